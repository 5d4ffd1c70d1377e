"""The triple integral I(sigma) over C^3 and its two independent evaluations.

Monte Carlo route
    Importance sampling with three independent draws from the density
    1/(pi (1 + |z|^2)^2), working directly in the plane.

Cubature route
    Stereographic projection sends that density to the uniform measure on
    S^2, and the chordal identity

        |z - w|^2 = (1 + |z|^2)(1 + |w|^2) (1 - <u, v>) / 2

    absorbs every (1 + |z_i|^2) factor, leaving

        I = pi^3 E[ s12^(nu3-1) s13^(nu2-1) s23^(nu1-1) ],  s_ij = (1 - <u_i, u_j>)/2

    over three independent uniform points.  Rotating u1 to the north pole,
    t2 = s12 and t3 = s13 are independent uniforms on [0, 1] and, with phi the
    azimuth of u3 relative to u2,

        s23 = (A - B)^2 + 4 A B sin^2(phi/2),  A = sqrt(t2 (1-t3)),  B = sqrt(t3 (1-t2)).

    The remaining 3-d integral is done with nested tanh-sinh rules split at
    t3 = t2 so that every singularity sits at an endpoint.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import CoincidenceError, DomainError, VarianceWarning
from .gauss import gexpect, kernel_K
from .params import DomainStatus, Estimate, IntegrationConfig, ParameterPoint, check_domain
from .quad import RngStream, mc_expect, refine, tanh_sinh
from .report import Report, deviation_sigmas, make_report
from .special import gamma_prefactor_eq3, rhs_eq3

PI3 = math.pi**3
CHORDAL_GATE_TOL = 1e-12
_S23_FLOOR = 1e-300


# -- sphere chart -------------------------------------------------------------


def plane_to_sphere(z):
    """Inverse stereographic projection from the north pole; returns (..., 3)."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    den = 1.0 + r2
    return np.stack([2 * z.real / den, 2 * z.imag / den, (r2 - 1.0) / den], axis=-1)


def sphere_to_plane(u):
    """Stereographic projection from the north pole, u -> (ux + i uy)/(1 - uz)."""
    u = np.asarray(u, dtype=float)
    out = (u[..., 0] + 1j * u[..., 1]) / (1.0 - u[..., 2])
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpherePoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if abs(math.hypot(self.x, self.y, self.z) - 1.0) > 1e-12:
            raise ValueError("not a unit vector")

    @classmethod
    def from_plane(cls, z: complex) -> SpherePoint:
        return cls(*(float(c) for c in plane_to_sphere(z)))

    def to_plane(self) -> complex:
        return sphere_to_plane((self.x, self.y, self.z))


def chordal_deviation(z, w):
    """|lhs - rhs| of the chordal identity, pointwise."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    lhs = np.abs(z - w) ** 2 / ((1 + np.abs(z) ** 2) * (1 + np.abs(w) ** 2))
    rhs = (1.0 - np.sum(plane_to_sphere(z) * plane_to_sphere(w), axis=-1)) / 2
    return np.abs(lhs - rhs)


def chordal_gate(n_pairs: int = 10_000, seed: int = 0) -> float:
    """Max deviation of the chordal identity over random pairs (plane draws
    from the Fubini-Study density, so all regions of the sphere are hit)."""
    st = RngStream(seed, 0)
    z = fs_sample(st, (n_pairs, 2))
    return float(np.max(chordal_deviation(z[:, 0], z[:, 1])))


@lru_cache(maxsize=1)
def _gate_passed() -> bool:
    return chordal_gate() <= CHORDAL_GATE_TOL


# -- integrand and sampler ------------------------------------------------------

_PAIRS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))  # (i, j, index of nu on |z_i - z_j|)


def integrand_eq1(p: ParameterPoint, z1, z2, z3):
    """prod (1+|z_i|^2)^(-2 sigma_i) * |z1-z2|^(2nu3-2) |z2-z3|^(2nu1-2) |z3-z1|^(2nu2-2).

    dz is the area measure dx dy.  Vectorised over the z arguments.
    """
    z = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (z1, z2, z3))), axis=-1)
    out = np.exp(_log_weight(p, z, [-2 * s for s in p.sigma]))
    return complex(out) if out.ndim == 0 else out


def _log_weight(p: ParameterPoint, z, fs_exponents):
    """log of prod (1+|z_i|^2)^(e_i) * prod |z_i - z_j|^(2 nu_k - 2)."""
    log_f = np.zeros(z.shape[:-1], dtype=complex)
    for i, e in enumerate(fs_exponents):
        if e != 0:
            log_f = log_f + e * np.log1p(np.abs(z[..., i]) ** 2)
    for i, j, k in _PAIRS:
        e = p.nu[k] - 1
        if e == 0:
            continue
        d2 = np.abs(z[..., i] - z[..., j]) ** 2
        if np.any(d2 == 0):
            if e.real <= 0:
                raise CoincidenceError(f"z{i + 1} = z{j + 1} with Re nu_{k + 1} <= 1")
            d2 = np.where(d2 == 0, 1e-300, d2)
        log_f = log_f + e * np.log(d2)
    return log_f


def fs_sample(stream: RngStream, size=None):
    """Draws from 1/(pi (1+|z|^2)^2): uniform sphere points, stereographically projected."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    uz = 2.0 * stream.uniform(shape) - 1.0
    phi = 2.0 * math.pi * stream.uniform(shape)
    # |z|^2 = (1 + uz)/(1 - uz)
    r = np.sqrt((1.0 + uz) / (1.0 - uz))
    out = r * np.exp(1j * phi)
    return complex(out) if size is None else out


# -- Monte Carlo route ------------------------------------------------------------


def _require_domain(p: ParameterPoint):
    chk = check_domain(p)
    if chk.status is DomainStatus.DIVERGENT:
        raise DomainError(f"integral diverges: {chk.reason}")
    return chk


def integrate_eq1_mc(p: ParameterPoint, config: IntegrationConfig = IntegrationConfig()) -> Estimate:
    """Importance-sampled estimate of I(sigma).

    Weight: pi^3 prod (1+|z_i|^2)^(2-2 sigma_i) prod |z_i - z_j|^(2nu-2).
    """
    chk = _require_domain(p)
    if chk.status is DomainStatus.MC_VARIANCE_WARNING:
        warnings.warn(chk.reason, VarianceWarning, stacklevel=2)

    exps = [2 - 2 * s for s in p.sigma]

    def f(z):
        return PI3 * np.exp(_log_weight(p, z, exps))

    return mc_expect(f, lambda st, m: fs_sample(st, (m, 3)), config)


# -- cubature route -----------------------------------------------------------------


def _canonical_order(p: ParameterPoint) -> ParameterPoint:
    """Relabel so the pair handled by the inner azimuthal rule has the largest Re nu."""
    k = max(range(3), key=lambda i: (p.nu[i].real, -i))
    return p.permuted((k, (k + 1) % 3, (k + 2) % 3))


def _eq1_level_sum(q: ParameterPoint, level: int, workers: int = 1, block: int = 8):
    c = q.nu[0] - 1  # s23
    b = q.nu[1] - 1  # s13 = t3
    a = q.nu[2] - 1  # s12 = t2
    kink = min(0.0, 2 * c.real + 1)  # J ~ |t3 - t2|^(2c+1) near the split point
    r2 = tanh_sinh(level, (a.real, 0.0))
    rl = tanh_sinh(level, (b.real, kink))
    rr = tanh_sinh(level, (kink, 0.0))
    rp = tanh_sinh(level, (2 * c.real, 0.0))
    cplx = any(v.imag != 0 for v in (a, b, c))
    if not cplx:
        a, b, c = a.real, b.real, c.real

    # phi in [0, pi]; (1/pi) * integral over [0, pi] is the full azimuthal mean
    log_sh2 = 2 * np.log(np.sin(0.5 * math.pi * rp.x))
    wphi = rp.w

    log_t2 = np.log(r2.lo)
    log_h2 = np.log(r2.hi)
    w2f = np.exp(np.log(r2.w) + a * log_t2)

    def sub_sum(sl):
        lt2 = log_t2[sl, None]
        lh2 = log_h2[sl, None]
        t2 = r2.lo[sl, None]
        h2 = r2.hi[sl, None]
        # left piece: t3 = t2 * x, t2 - t3 = t2 * (1 - x)
        lt3_l = lt2 + np.log(rl.lo)
        ld_l = lt2 + np.log(rl.hi)
        om3_l = h2 + t2 * rl.hi
        lw_l = lt2 + np.log(rl.w)
        # right piece: t3 = t2 + h2 * x, t3 - t2 = h2 * x, 1 - t3 = h2 * (1 - x)
        lt3_r = np.log(t2 + h2 * rr.lo)
        ld_r = lh2 + np.log(rr.lo)
        lom3_r = lh2 + np.log(rr.hi)
        lw_r = lh2 + np.log(rr.w)

        lt3 = np.concatenate([lt3_l, lt3_r], axis=1)
        ld = np.concatenate([ld_l, ld_r], axis=1)
        lom3 = np.concatenate([np.log(om3_l), lom3_r], axis=1)
        lw3 = np.concatenate([lw_l, lw_r], axis=1)

        log_a = 0.5 * (lt2 + lom3)
        log_b = 0.5 * (lt3 + lh2)
        log_apb = np.logaddexp(log_a, log_b)
        amb2 = np.exp(2 * (ld - log_apb))[..., None]
        cross = np.exp(np.log(4.0) + (log_a + log_b)[..., None] + log_sh2)
        s23 = np.maximum(amb2 + cross, _S23_FLOOR)
        pw = np.exp(c * np.log(s23))
        w3f = np.exp(lw3 + b * lt3)
        inner = np.sum(w3f * (pw @ wphi), axis=1)
        total = complex(np.sum(w2f[sl] * inner))
        if not cplx:
            return total, abs(total)
        mag = np.sum(np.abs(w2f[sl]) * np.sum(np.abs(w3f) * (np.abs(pw) @ wphi), axis=1))
        return total, float(mag)

    slices = [slice(i, min(i + block, len(r2))) for i in range(0, len(r2), block)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(sub_sum, slices))
    else:
        parts = [sub_sum(sl) for sl in slices]
    total = 0j
    mag = 0.0
    for v, m in parts:  # fixed order
        total += v
        mag += m
    n_evals = len(r2) * (len(rl) + len(rr)) * len(rp)
    return PI3 * total, PI3 * mag, n_evals


def integrate_eq1_cubature(p: ParameterPoint, config: IntegrationConfig = IntegrationConfig()) -> Estimate:
    """Deterministic evaluation of I(sigma) on (S^2)^3 reduced by rotation symmetry.

    Valid in the whole convergence region.  Refines until successive levels
    agree to ``config.tolerance`` (relative) or ``config.max_evals`` is spent.
    """
    _require_domain(p)
    if not _gate_passed():
        raise RuntimeError("chordal identity gate failed; refusing to use the sphere reduction")
    q = _canonical_order(p)
    return refine(
        lambda L: _eq1_level_sum(q, L, config.workers),
        config.tolerance,
        config.max_evals,
        start=2,
        max_level=7,
    )


# -- verification ---------------------------------------------------------------------


def default_route(p: ParameterPoint) -> str:
    return "mc" if check_domain(p).status is DomainStatus.OK else "cubature"


def verify_thm1(
    p: ParameterPoint,
    config: IntegrationConfig = IntegrationConfig(),
    route: str = "auto",
    threshold: float = 3.0,
) -> Report:
    """Compare I(sigma) by the chosen route(s) with the Gamma-function formula."""
    t0 = time.perf_counter()
    chk = _require_domain(p)
    rhs = rhs_eq3(p)
    if route == "auto":
        route = default_route(p)
    if route not in ("mc", "cubature", "both"):
        raise ValueError(f"unknown route {route!r}")
    notes = []
    extra = {}
    params = {"sigma": p.sigma, "nu": p.nu, "route": route}
    if route in ("mc", "both") and chk.status is DomainStatus.MC_VARIANCE_WARNING:
        notes.append(chk.reason)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VarianceWarning)
        mc = integrate_eq1_mc(p, config) if route in ("mc", "both") else None
    cub = integrate_eq1_cubature(p, config) if route in ("cubature", "both") else None
    if route == "both":
        agree = deviation_sigmas(abs(mc.value - cub.value), math.hypot(mc.error, cub.error), abs(rhs))
        mc_sig = deviation_sigmas(abs(mc.value - rhs), mc.error, abs(rhs))
        extra = {"mc": mc, "cubature": cub, "mc_sigmas": mc_sig, "agreement_sigmas": agree}
        return make_report(
            "thm1", params, cub, rhs, t0, config, threshold=threshold, warnings=notes,
            extra=extra, passed=agree <= threshold and mc_sig <= threshold,
        )
    return make_report("thm1", params, mc or cub, rhs, t0, config, threshold=threshold, warnings=notes)


def verify_chain(p: ParameterPoint, config: IntegrationConfig = IntegrationConfig(), threshold: float = 3.0) -> Report:
    """pi^3 E[K_nu] / prod Gamma(2 sigma_i) against a direct estimate of I(sigma).

    Both sides are Monte Carlo, with independent seeds.
    """
    t0 = time.perf_counter()
    _require_domain(p)
    gauss = gexpect(lambda z: kernel_K(p.nu, z.reshape(-1, 3, 2)), 6, config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VarianceWarning)
        direct = integrate_eq1_mc(p, replace(config, seed=(config.seed + 1) % 2**64))
    factor = gamma_prefactor_eq3(p)
    return make_report(
        "thm1.chain", {"sigma": p.sigma, "nu": p.nu}, direct, factor * gauss.value, t0, config,
        threshold=threshold, rhs_error=abs(factor) * gauss.error, extra={"gauss": gauss},
    )
