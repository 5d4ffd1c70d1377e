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

# # Quadrature engine
#
# Three engines share one `Estimate` type: double-exponential cubature,
# Monte Carlo over reproducible random streams, and randomly shifted Sobol
# quasi Monte Carlo.

# +
import math

import numpy as np

from zamint import DomainSpec, IntegrationConfig, RngStream, cubature, mc_expect, qmc_expect
from zamint.quad import tanh_sinh
# -

# A tanh-sinh rule keeps the distances to both endpoints, so an integrand
# with an endpoint singularity is evaluated without cancellation.

rule = tanh_sinh(3)
print(len(rule), rule.lo[:3], rule.hi[-3:])

# The integral of x^(-1/2) over [0, 1] is 2.  Tell the domain about the
# endpoint exponent and the cubature converges to machine precision.

dom = DomainSpec("box", 1, exponents=((-0.5, 0.0),))
est = cubature(lambda x: x[:, 0] ** -0.5, dom, 1e-12)
print(est.value, est.error, est.count)

# The half line with exp-sinh: the integral of r e^(-r) is 1.

est = cubature(lambda r: r * np.exp(-r), DomainSpec("half-line-radial"), 1e-12)
print(est.value, est.error)

# The area of the unit sphere, as a one-factor sphere product.

est = cubature(lambda u: np.ones(u.shape[0]), DomainSpec("sphere-product", 1), 1e-12)
print(est.value, 4 * math.pi)

# Monte Carlo draws chunks from independent Philox streams keyed by the seed
# and the chunk index.  The answer does not depend on the worker count.

def sampler(stream, m):
    return stream.normal((m,))

for workers in (1, 4):
    cfg = IntegrationConfig(budget=200_000, seed=3, workers=workers)
    est = mc_expect(lambda x: x**2, sampler, cfg)
    print(workers, est.value, est.error)

# Shifted Sobol on a smooth integrand: the mean of prod(u_i) over [0,1]^4.

est = qmc_expect(lambda u: np.prod(u, axis=1), 4, IntegrationConfig(budget=2**14, chunk=2**12))
print(est.value, 1 / 16, est.error)

# A single stream can also be used directly.

s = RngStream(seed=0, stream_id=5)
print(s, s.uniform(3))
