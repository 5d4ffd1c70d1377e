"""Normalised complex Gaussian expectations and the determinant kernel.

Expectations are taken against the product density prod exp(-|z_i|^2)/pi,
so the expectation of the constant 1 is exactly 1.  With this normalisation
the three moment formulas, the kernel moment and the proportionality
constants of the two functionals are mutually consistent.
"""

from __future__ import annotations

import math
import time
import warnings
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri

from .errors import CoincidenceError, DomainError, VarianceWarning
from .params import Estimate, IntegrationConfig
from .quad import RngStream, mc_expect, qmc_expect
from .report import Report, make_report
from .special import prop1_det_rhs, prop1_linear_rhs, prop1_radial_rhs, rhs_thm2

COINCIDENCE_CUTOFF = 1e-300
_HALF_SQRT = math.sqrt(0.5)


class Spinor(NamedTuple):
    z1: complex
    z2: complex


class SpinorTriple(NamedTuple):
    w1: Spinor
    w2: Spinor
    w3: Spinor


def sample_cgauss(stream: RngStream, size=None):
    """Standard complex normals: independent N(0, 1/2) real and imaginary parts."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    xy = stream.normal(shape + (2,)) * _HALF_SQRT
    out = xy[..., 0] + 1j * xy[..., 1]
    return complex(out) if size is None else out


def uniform_to_cgauss(u):
    """Map uniforms of shape (..., 2k) to k standard complex normals (inverse CDF)."""
    u = np.clip(np.asarray(u, dtype=float), 1e-300, 1 - 2**-53)
    g = ndtri(u) * _HALF_SQRT
    return g[..., 0::2] + 1j * g[..., 1::2]


def gexpect(f, n: int, config: IntegrationConfig) -> Estimate:
    """E[f(z)] for z a vector of ``n`` independent standard complex normals.

    ``f`` maps an array of shape (N, n) to N values.
    """
    return mc_expect(f, lambda st, m: sample_cgauss(st, (m, n)), config)


def spinor_det(w1, w2):
    """d(w1, w2) = w1[0] w2[1] - w1[1] w2[0]; broadcasts over leading axes."""
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    d = w1[..., 0] * w2[..., 1] - w1[..., 1] * w2[..., 0]
    return complex(d) if d.ndim == 0 else d


def kernel_K(nu, w):
    """|d(w1,w2)|^(2nu3-2) |d(w1,w3)|^(2nu2-2) |d(w2,w3)|^(2nu1-2).

    ``w`` has shape (..., 3, 2).  Evaluated as exp(sum (2 nu_k - 2) log|d|);
    factors with a zero exponent are skipped so that K is exactly 1 at
    nu = (1, 1, 1).
    """
    w = np.asarray(w, dtype=complex)
    nu = [complex(v) for v in nu]
    pairs = ((0, 1, nu[2]), (0, 2, nu[1]), (1, 2, nu[0]))
    log_k = np.zeros(w.shape[:-2], dtype=complex)
    for i, j, v in pairs:
        e = 2 * v - 2
        if e == 0:
            continue
        d = np.abs(spinor_det(w[..., i, :], w[..., j, :]))
        hit = d < COINCIDENCE_CUTOFF
        if np.any(hit):
            if e.real <= 0:
                raise CoincidenceError(f"d(w{i + 1}, w{j + 1}) = 0 with exponent {e}")
            d = np.where(hit, COINCIDENCE_CUTOFF, d)
        log_k = log_k + e * np.log(d)
    out = np.exp(log_k)
    if out.ndim == 0:
        return complex(out)
    return out


# -- verification -------------------------------------------------------------


def verify_prop1(
    case: str,
    *,
    s: complex,
    n: int | None = None,
    c=None,
    config: IntegrationConfig = IntegrationConfig(),
    threshold: float = 3.0,
) -> Report:
    """Monte Carlo check of one of the three Gaussian moment formulas.

    case ``"radial"``: E[r^s] on C^n; ``"linear"``: E[|sum c_i z_i|^s];
    ``"det"``: E[|d(w1, w2)|^s] on C^4.
    """
    t0 = time.perf_counter()
    s = complex(s)
    if case == "radial":
        if n is None or n < 1:
            raise ValueError("radial case needs n >= 1")
        if s.real <= -n:
            raise DomainError(f"need Re s > -n for finite variance (s={s}, n={n})")
        rhs = prop1_radial_rhs(s, n)
        dim = n
        if s == 0:
            f = lambda z: np.ones(z.shape[0])
        else:
            f = lambda z: np.exp(0.5 * s * np.log(np.sum(np.abs(z) ** 2, axis=1)))
        params = {"s": s, "n": n}
    elif case == "linear":
        if c is None:
            raise ValueError("linear case needs coefficients c")
        cv = np.asarray(c, dtype=complex)
        if s.real <= -1:
            raise DomainError(f"need Re s > -1 for finite variance (s={s})")
        rhs = prop1_linear_rhs(s, cv)
        dim = cv.size
        f = lambda z: np.exp(s * np.log(np.abs(z @ cv)))
        params = {"s": s, "c": [complex(x) for x in cv]}
    elif case == "det":
        if s.real <= -0.5:
            raise DomainError(f"need Re s > -1/2 (s={s})")
        rhs = prop1_det_rhs(s)
        dim = 4
        if s == 0:
            f = lambda z: np.ones(z.shape[0])
        else:
            f = lambda z: np.exp(s * np.log(np.abs(z[:, 0] * z[:, 3] - z[:, 2] * z[:, 1])))
        params = {"s": s}
    else:
        raise ValueError(f"unknown case {case!r}")
    lhs = gexpect(f, dim, config)
    return make_report(f"prop1.{case}", params, lhs, rhs, t0, config, threshold=threshold)


def thm2_variance_finite(nu) -> bool:
    """Whether E[K^2] < inf, i.e. plain MC on the kernel has finite variance.

    K^2 is the kernel at 2 nu - 1, whose Gaussian moment is finite iff all
    Re(2 nu_i - 1) > 0 and Re sum(2 nu_i - 1) > 1.
    """
    re = [complex(v).real for v in nu]
    return min(re) > 0.5 and sum(re) > 2.0


def _thm2_qmc(nu, config):
    def f(u):
        z = uniform_to_cgauss(u)
        return kernel_K(nu, z.reshape(-1, 3, 2))

    return qmc_expect(f, 12, config, calibrated=False)


def verify_thm2(nu, config: IntegrationConfig = IntegrationConfig(), threshold: float = 3.0) -> Report:
    """Compare E[K_nu] over (C^2)^3 with Gamma(sum nu - 1) prod Gamma(nu_i)."""
    t0 = time.perf_counter()
    nu = tuple(complex(v) for v in nu)
    bad = [i + 1 for i, v in enumerate(nu) if v.real <= 0]
    if bad:
        raise DomainError(f"Re nu_{bad[0]} <= 0: the Gaussian integral diverges")
    rhs = rhs_thm2(nu)
    notes = []
    if thm2_variance_finite(nu):
        lhs = gexpect(lambda z: kernel_K(nu, z.reshape(-1, 3, 2)), 6, config)
    else:
        msg = "infinite MC variance (min Re nu <= 1/2 or Re sum nu <= 2); using shifted-Sobol QMC, error not calibrated"
        warnings.warn(msg, VarianceWarning, stacklevel=2)
        notes.append(msg)
        lhs = _thm2_qmc(nu, config)
    return make_report("thm2", {"nu": nu}, lhs, rhs, t0, config, threshold=threshold, warnings=notes)
