"""Numerical integration machinery: seeded chunked Monte Carlo, randomly
shifted Sobol QMC, and double-exponential product cubature.

Monte Carlo work is split into chunks of ``config.chunk`` samples.  Chunk
``k`` draws from its own counter-based stream ``RngStream(seed, k)`` and the
per-chunk moments are merged in chunk order, so results are bit-identical
for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc as _qmc

from .errors import BudgetExhaustedError, NonFiniteSampleError, NonIntegrableError
from .params import Estimate, IntegrationConfig

EPS = np.finfo(float).eps
# nodes closer than this to an endpoint are dropped; keeps products of a few
# singular factors far from overflow
MIN_DIST = 1e-200


class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Backed by the Philox counter-based generator; distinct stream ids give
    independent streams via ``SeedSequence`` spawn keys.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.rng = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform(self, size=None):
        return self.rng.random(size)

    def normal(self, size=None):
        return self.rng.standard_normal(size)


# -- Monte Carlo -------------------------------------------------------------


def _pool_map(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _chunk_sizes(budget: int, chunk: int) -> list[int]:
    n_full, rest = divmod(budget, chunk)
    return [chunk] * n_full + ([rest] if rest else [])


def _moments(vals: np.ndarray):
    vals = np.asarray(vals)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSampleError("integrand returned a non-finite value at a sample")
    mean = vals.mean()
    m2 = float(np.sum(np.abs(vals - mean) ** 2))
    return vals.size, complex(mean), m2


def _merge(parts) -> tuple[int, complex, float]:
    """Chan et al. pairwise update, applied strictly left to right."""
    n, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        tot = n + nb
        delta = mb - mean
        mean = mean + delta * (nb / tot)
        m2 = m2 + m2b + abs(delta) ** 2 * (n * nb / tot)
        n = tot
    return n, mean, m2


def mc_expect(f: Callable, sampler: Callable, config: IntegrationConfig) -> Estimate:
    """Plain Monte Carlo mean of ``f`` over i.i.d. draws from ``sampler``.

    ``sampler(stream, n)`` returns a batch whose leading axis has length
    ``n``; ``f(batch)`` returns ``n`` real or complex values.  The error is
    the standard error of the mean (complex values: sqrt of the summed
    component variances over n).
    """
    sizes = _chunk_sizes(config.budget, config.chunk)

    def run(k):
        stream = RngStream(config.seed, k)
        return _moments(f(sampler(stream, sizes[k])))

    n, mean, m2 = _merge(_pool_map(run, range(len(sizes)), config.workers))
    err = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
    return Estimate(mean, err, n, "mc")


def qmc_expect(
    f: Callable, dim: int, config: IntegrationConfig, n_shifts: int = 8, calibrated: bool = True
) -> Estimate:
    """Randomly shifted Sobol estimate of E[f(U)], U uniform on [0,1)^dim.

    The point set is the first 2^m Sobol points with m the largest value
    fitting ``budget / n_shifts``; each replicate adds an independent uniform
    shift modulo 1.  The error is the standard error over replicates.
    """
    if not 1 <= dim <= 16:
        raise ValueError(f"dim must be in [1, 16], got {dim}")
    if n_shifts < 8:
        raise ValueError("need at least 8 random shifts")
    m = max(0, int(math.floor(math.log2(max(1, config.budget // n_shifts)))))
    base = _qmc.Sobol(d=dim, scramble=False).random_base2(m)

    def run(r):
        shift = RngStream(config.seed, r).uniform(dim)
        u = np.mod(base + shift, 1.0)
        vals = np.asarray(f(u))
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSampleError("integrand returned a non-finite value at a QMC point")
        return complex(vals.mean())

    means = np.array(_pool_map(run, range(n_shifts), config.workers))
    mean = means.mean()
    err = math.sqrt(np.sum(np.abs(means - mean) ** 2) / (n_shifts - 1) / n_shifts)
    return Estimate(mean, err, n_shifts * base.shape[0], "qmc", calibrated=calibrated)


# -- one-dimensional rules -----------------------------------------------------


@dataclass(frozen=True)
class QuadRule:
    """Nodes on [a, b] with exact distances to both endpoints.

    ``lo = x - a`` and ``hi = b - x`` are computed without cancellation, so
    integrands with endpoint singularities can be evaluated from them.
    """

    x: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    w: np.ndarray

    def __len__(self):
        return self.x.size

    def scaled(self, a: float, b: float) -> QuadRule:
        """Map a rule on [0, 1] to [a, b]."""
        span = b - a
        return QuadRule(a + span * self.x, span * self.lo, span * self.hi, span * self.w)


def de_tmax(alpha: float, target: float = 1e-18) -> float:
    """Truncation point of the tanh-sinh variable for endpoint behaviour x^alpha."""
    a = max(float(alpha), -0.95)
    return float(np.clip(math.asinh(math.log(1 / target) / (math.pi * (1 + a))), 3.5, 6.0))


def tanh_sinh(level: int, alpha=(0.0, 0.0), h0: float = 1.0) -> QuadRule:
    """Tanh-sinh rule on [0, 1] with step ``h0 / 2**level``.

    ``alpha`` gives the (real parts of the) endpoint exponents; more singular
    endpoints get a longer tail of nodes.
    """
    h = h0 / 2**level
    t_lo, t_hi = de_tmax(alpha[0]), de_tmax(alpha[1])
    k = np.arange(-int(math.ceil(t_lo / h)), int(math.ceil(t_hi / h)) + 1)
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        lo = 1.0 / (1.0 + np.exp(-2.0 * u))
        hi = 1.0 / (1.0 + np.exp(2.0 * u))
        w = h * 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = (lo > MIN_DIST) & (hi > MIN_DIST) & (w > 0)
    x = np.where(u < 0, lo, 1.0 - hi)
    return QuadRule(x[keep], lo[keep], hi[keep], w[keep])


def exp_sinh(level: int, alpha: float = 0.0, h0: float = 1.0) -> QuadRule:
    """Exp-sinh rule on [0, inf); ``alpha`` is the exponent at 0.

    ``hi`` is +inf for every node.
    """
    h = h0 / 2**level
    # x = exp(-pi/2 sinh t) on the left: half the decay rate of tanh-sinh
    a = max(float(alpha), -0.95)
    t_lo = float(np.clip(math.asinh(2 * math.log(1e18) / (math.pi * (1 + a))), 3.5, 6.5))
    t_hi = 4.0
    k = np.arange(-int(math.ceil(t_lo / h)), int(math.ceil(t_hi / h)) + 1)
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    x = np.exp(u)
    w = h * 0.5 * math.pi * np.cosh(t) * x
    keep = (x > MIN_DIST) & np.isfinite(w)
    x = x[keep]
    return QuadRule(x, x.copy(), np.full_like(x, np.inf), w[keep])


def trapezoid_periodic(n: int, a: float = 0.0, b: float = 2 * math.pi) -> QuadRule:
    """n-point trapezoid rule for periodic integrands on [a, b)."""
    lo = (b - a) * np.arange(n) / n
    return QuadRule(a + lo, lo, (b - a) - lo, np.full(n, (b - a) / n))


# -- product cubature ----------------------------------------------------------


@dataclass(frozen=True)
class DomainSpec:
    """Integration domain for :func:`cubature`.

    kind
        ``"box"``: product of intervals ``bounds``; ``f`` receives ``x`` of
        shape (N, dims).
        ``"sphere-product"``: ``dims`` copies of the unit sphere S^2 with
        surface measure; ``f`` receives unit vectors of shape (N, dims, 3).
        ``"half-line-radial"``: [0, inf); ``f`` receives ``r`` of shape (N,).
    exponents
        Per-dimension ``(alpha_lo, alpha_hi)`` endpoint exponents (> -1).
    periodic
        Per-dimension flags (box only); periodic axes use the trapezoid rule.
    """

    kind: str
    dims: int = 1
    bounds: tuple = ()
    exponents: tuple = ()
    periodic: tuple = ()

    def __post_init__(self):
        if self.kind not in ("box", "sphere-product", "half-line-radial"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.kind == "box":
            bounds = self.bounds or ((0.0, 1.0),) * self.dims
            if len(bounds) != self.dims:
                raise ValueError("need one (a, b) pair per dimension")
            object.__setattr__(self, "bounds", tuple((float(a), float(b)) for a, b in bounds))
        if self.kind == "half-line-radial" and self.dims != 1:
            raise ValueError("half-line-radial domains are one-dimensional")
        n_axes = self.dims * (2 if self.kind == "sphere-product" else 1)
        exps = self.exponents or ((0.0, 0.0),) * n_axes
        if len(exps) != n_axes:
            raise ValueError(f"need {n_axes} exponent pairs")
        for pair in exps:
            if min(pair) <= -1:
                raise ValueError(f"endpoint exponents must be > -1, got {pair}")
        object.__setattr__(self, "exponents", tuple(tuple(map(float, p)) for p in exps))
        object.__setattr__(self, "periodic", tuple(self.periodic) or (False,) * n_axes)


def product_sum(f: Callable, rules: Sequence[QuadRule], block: int = 1 << 18):
    """Sum of w * f over the tensor grid, in fixed-size blocks of the first axis.

    ``f`` receives a list of per-axis node views ``(x, lo, hi)`` broadcast to
    the flattened grid.  Returns ``(sum, sum |w f|, evaluations)``.
    """
    sizes = [len(r) for r in rules]
    inner = int(np.prod(sizes[1:])) if len(sizes) > 1 else 1
    rows = max(1, block // inner)
    total = 0j
    mag = 0.0
    for start in range(0, sizes[0], rows):
        sl = slice(start, min(start + rows, sizes[0]))
        sub = [QuadRule(r.x[sl], r.lo[sl], r.hi[sl], r.w[sl]) if i == 0 else r for i, r in enumerate(rules)]
        grids = np.meshgrid(*[np.arange(len(r)) for r in sub], indexing="ij")
        idx = [g.ravel() for g in grids]
        views = [(r.x[i], r.lo[i], r.hi[i]) for r, i in zip(sub, idx)]
        w = np.prod([r.w[i] for r, i in zip(sub, idx)], axis=0)
        vals = np.asarray(f(views))
        if not np.all(np.isfinite(vals)):
            raise NonIntegrableError("integrand is not finite at a quadrature node")
        total += complex(np.sum(w * vals))
        mag += float(np.sum(np.abs(w * vals)))
    return total, mag, int(np.prod(sizes))


@dataclass
class Refinement:
    """Record of a level-doubling run (kept for diagnostics and tests)."""

    values: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    evals: int = 0


def refine(
    level_sum: Callable[[int], tuple],
    tolerance: float,
    max_evals: int,
    start: int = 1,
    max_level: int = 12,
    history: Refinement | None = None,
) -> Estimate:
    """Double the resolution until successive levels agree to ``tolerance``.

    ``level_sum(L)`` returns ``(value, sum |w f|, evaluations)``.  The error
    bound for level L is ``|Q_L - Q_{L-1}|`` plus a round-off floor.
    """
    hist = history if history is not None else Refinement()
    prev = None
    for level in range(start, max_level + 1):
        value, mag, n = level_sum(level)
        hist.evals += n
        if prev is not None:
            err = abs(value - prev) + 64 * EPS * mag
            hist.values.append(value)
            hist.errors.append(err)
            if len(hist.errors) >= 3 and err > 10 * hist.errors[-2] > 10 * hist.errors[-3]:
                raise NonIntegrableError(f"refinement diverges: errors {hist.errors[-3:]}")
            if err <= tolerance * max(abs(value), 1e-300) or err <= 64 * EPS * mag:
                return Estimate(value, err, hist.evals, "cubature")
        prev = value
        if hist.evals >= max_evals:
            break
    raise BudgetExhaustedError(
        f"tolerance {tolerance:g} not reached within {hist.evals} evaluations"
        + (f" (last error {hist.errors[-1]:.3g})" if hist.errors else "")
    )


def _axis_rule(level, alpha, periodic, a, b):
    if periodic:
        return trapezoid_periodic(8 * 2**level, a, b)
    return tanh_sinh(level, alpha).scaled(a, b)


def cubature(
    f: Callable, domain: DomainSpec, tolerance: float, max_evals: int = 50_000_000
) -> Estimate:
    """Deterministic integral of ``f`` over ``domain`` by product DE rules.

    Non-periodic axes use tanh-sinh (exp-sinh on the half line), whose
    double-exponential clustering absorbs integrable endpoint singularities
    ``x^alpha``; periodic axes use the trapezoid rule.
    """
    if domain.kind == "box":

        def level_sum(level):
            rules = [
                _axis_rule(level, alpha, per, a, b)
                for (a, b), alpha, per in zip(domain.bounds, domain.exponents, domain.periodic)
            ]
            return product_sum(lambda v: f(np.stack([x for x, _, _ in v], axis=1)), rules)

    elif domain.kind == "sphere-product":
        m = domain.dims

        def level_sum(level):
            rules = []
            for k in range(m):
                rules.append(tanh_sinh(level, domain.exponents[2 * k]).scaled(-1.0, 1.0))
                rules.append(trapezoid_periodic(8 * 2**level))

            def g(views):
                pts = []
                for k in range(m):
                    ct, lo, hi = views[2 * k]
                    phi = views[2 * k + 1][0]
                    st = np.sqrt(lo * hi)
                    pts.append(np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=-1))
                return f(np.stack(pts, axis=1))

            return product_sum(g, rules)

    else:
        alpha = domain.exponents[0][0]

        def level_sum(level):
            return product_sum(lambda v: f(v[0][0]), [exp_sinh(level, alpha)])

    return refine(level_sum, tolerance, max_evals)
