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

# # Parameters and closed forms
#
# A parameter point is a triple of exponents sigma together with the derived
# triple nu_i = sum(sigma) - 2 sigma_i.  This script walks through the domain
# check and the Gamma-function right-hand sides.

# +
import numpy as np

import zamint
from zamint import ParameterPoint, check_domain
# -

# Build a point from sigma and look at its nu.

p = ParameterPoint.from_sigma((1.2, 1.1 + 0.3j, 1.3))
print(p.sigma)
print(p.nu)

# The triple integral converges when every Re sigma > 1/2 and every Re nu > 0.
# Near the edge the point is still valid but plain Monte Carlo may lose finite
# variance, so the check attaches a warning status.

for sigma in [(1.5, 1.5, 1.5), (0.8, 1.0, 1.0), (0.4, 1.0, 1.0), (1.0, 1.0, 3.0)]:
    d = check_domain(ParameterPoint.from_sigma(sigma))
    print(sigma, d.status.name, d.reason)

# `log_gamma` is the principal branch of log Gamma, continuous off the
# negative real axis.  Compare exp(log_gamma) with the factorial.

z = np.array([1, 2, 3, 4, 5, 0.5])
print(np.exp(zamint.log_gamma(z)).real)
print(np.sqrt(np.pi))

# The closed form for the triple integral, evaluated in log space.

for sigma in [(1, 1, 1), (1.2, 1.1 + 0.3j, 1.3), (2, 2, 2)]:
    print(sigma, zamint.rhs_eq3(ParameterPoint.from_sigma(sigma)))

# The kernel moment and the Gaussian moment right-hand sides.

print(zamint.rhs_thm2((1, 1, 1)), zamint.rhs_thm2((1, 1.5, 2)))
print(zamint.prop1_radial_rhs(2, 3), zamint.prop1_det_rhs(2))
