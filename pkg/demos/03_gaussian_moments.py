# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#   kernelspec:
#     display_name: Python 3
#     name: python3
# ---

# # Gaussian moments and the determinant kernel
#
# Expectations are taken against the standard complex Gaussian density
# prod exp(-|z_i|^2) / pi.  Each check compares a Monte Carlo estimate with
# a Gamma-function closed form.

# +
import numpy as np

from zamint import IntegrationConfig, RngStream, gexpect, kernel_K, sample_cgauss, verify_prop1, verify_thm2
# -

cfg = IntegrationConfig(budget=10**6, seed=1)

# Standard complex normals have E|z|^2 = 1.

z = sample_cgauss(RngStream(0), 100_000)
print(np.mean(np.abs(z) ** 2))

# `gexpect` takes a function of an (N, n) array.

print(gexpect(lambda z: np.abs(z[:, 0] + z[:, 1]) ** 2, 2, cfg).value)

# The three moment formulas: radial powers, linear forms and the determinant.

for rep in [
    verify_prop1("radial", s=1.5, n=3, config=cfg),
    verify_prop1("linear", s=0.7, c=[1, 2j], config=cfg),
    verify_prop1("det", s=2, config=cfg),
]:
    print(rep.check, rep.lhs.value, rep.rhs, rep.sigmas, rep.passed)

# The kernel K_nu is a product of powers of 2x2 determinants between three
# spinors.  At nu = (1, 1, 1) every exponent vanishes and K is exactly 1.

w = sample_cgauss(RngStream(2), (4, 3, 2))
print(kernel_K((1, 1, 1), w))

# Its Gaussian moment is a product of Gamma functions.

rep = verify_thm2((1.2, 1.5, 2.0), cfg)
print(rep.lhs.value, rep.lhs.error, rep.rhs, rep.passed)

# When the MC variance is infinite the check switches to shifted Sobol and
# warns that the error bar is not calibrated.

rep = verify_thm2((0.6, 0.6, 0.7), cfg)
print(rep.lhs.method, rep.warnings)
