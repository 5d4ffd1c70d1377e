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

# # The triple integral
#
# The integrand is a product of powers of pairwise distances between three
# points of the plane.  Two routes compute it: nested cubature after mapping
# the plane to the sphere, and importance-sampled Monte Carlo.

# +
import numpy as np

from zamint import (
    IntegrationConfig,
    ParameterPoint,
    chordal_gate,
    ell_trilinear,
    integrand_eq1,
    integrate_eq1_cubature,
    integrate_eq1_mc,
    radial_power,
    rhs_eq3,
    verify_chain,
    verify_thm1,
)
# -

# The sphere reduction rests on an identity between plane distances and
# chordal distances on the sphere.  The gate reports its worst relative
# deviation over random pairs.

print(chordal_gate(10_000, seed=0))

# The integrand at a few points.

p = ParameterPoint.from_sigma((1.2, 1.1, 1.3))
print(integrand_eq1(p, 0.1, 1 + 1j, -2j))

# Cubature against the closed form.

cub = integrate_eq1_cubature(p, IntegrationConfig(tolerance=1e-10))
print(cub.value, cub.error, cub.count, rhs_eq3(p))

# Monte Carlo on the same point.

mc = integrate_eq1_mc(p, IntegrationConfig(budget=10**6, seed=5))
print(mc.value, mc.error)

# `verify_thm1` runs either route or both, and reports the agreement.

for sigma in [(1, 1, 1), (1.2, 1.1 + 0.3j, 1.3), (0.8, 0.9, 1.0)]:
    rep = verify_thm1(ParameterPoint.from_sigma(sigma), IntegrationConfig(budget=10**5), route="both")
    print(sigma, rep.lhs.value, rep.rhs, rep.extra["agreement_sigmas"], rep.warnings)

# The trilinear functional of a product of radial powers reproduces the
# triple integral.

f = radial_power([-2 * s for s in p.sigma])
print(ell_trilinear(p, f, IntegrationConfig(budget=10**5, seed=2)).value)

# `verify_chain` runs the kernel moment, the trilinear functional and the
# closed form on one point and reports the consistency of the chain.

rep = verify_chain(p, IntegrationConfig(budget=10**5))
print(rep.passed, rep.extra.keys())

# A sigma grid: relative error of cubature across the convergence region.

grid = np.linspace(0.75, 1.5, 4)
worst = 0.0
for a in grid:
    for b in grid:
        q = ParameterPoint.from_sigma((a, b, 1.1))
        if min(v.real for v in q.nu) > 0:
            worst = max(worst, verify_thm1(q, IntegrationConfig(tolerance=1e-8), route="cubature").rel_error)
print(worst)
