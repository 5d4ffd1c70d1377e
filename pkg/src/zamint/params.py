"""Parameter algebra for the triple integral and shared value types.

The triple integral is parametrised by ``sigma = (s1, s2, s3)``; the
pairwise kernel exponents are controlled by ``nu_i = s_{i+1} + s_{i+2} - s_i``
(indices mod 3).  Triples are 0-based in code, 1-based in messages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

Triple = tuple[complex, complex, complex]


def _triple(values) -> Triple:
    vals = tuple(complex(v) for v in values)
    if len(vals) != 3:
        raise ValueError(f"expected a triple, got {len(vals)} values")
    return vals


def nu_from_sigma(sigma) -> Triple:
    """Kernel exponents ``nu_i = sigma_{i+1} + sigma_{i+2} - sigma_i``."""
    s = _triple(sigma)
    return tuple(s[(i + 1) % 3] + s[(i + 2) % 3] - s[i] for i in range(3))


def sigma_from_nu(nu) -> Triple:
    """Inverse of :func:`nu_from_sigma`: ``sigma_i = (nu_{i+1} + nu_{i+2}) / 2``."""
    n = _triple(nu)
    return tuple((n[(i + 1) % 3] + n[(i + 2) % 3]) / 2 for i in range(3))


@dataclass(frozen=True)
class ParameterPoint:
    """Coupled (sigma, nu) triples.  Build with :meth:`from_sigma` or :meth:`from_nu`."""

    sigma: Triple
    nu: Triple

    def __post_init__(self):
        object.__setattr__(self, "sigma", _triple(self.sigma))
        object.__setattr__(self, "nu", _triple(self.nu))
        expected = nu_from_sigma(self.sigma)
        scale = max(1.0, max(abs(s) for s in self.sigma))
        if max(abs(a - b) for a, b in zip(expected, self.nu)) > 1e-12 * scale:
            raise ValueError("nu is inconsistent with sigma")

    @classmethod
    def from_sigma(cls, sigma) -> ParameterPoint:
        return cls(sigma, nu_from_sigma(sigma))

    @classmethod
    def from_nu(cls, nu) -> ParameterPoint:
        s = sigma_from_nu(nu)
        # keep the caller's nu verbatim; sigma is derived from it
        return cls(s, _triple(nu))

    def permuted(self, perm) -> ParameterPoint:
        """Relabel the three points; nu_i is attached to the point opposite pair i."""
        perm = tuple(perm)
        if sorted(perm) != [0, 1, 2]:
            raise ValueError(f"not a permutation of (0, 1, 2): {perm}")
        return ParameterPoint(
            tuple(self.sigma[k] for k in perm), tuple(self.nu[k] for k in perm)
        )


class DomainStatus(enum.Enum):
    OK = "ok"
    DIVERGENT = "divergent"
    MC_VARIANCE_WARNING = "mc_variance_warning"


@dataclass(frozen=True)
class DomainCheck:
    status: DomainStatus
    reason: str = ""

    @property
    def converges(self) -> bool:
        return self.status is not DomainStatus.DIVERGENT


def check_domain(p: ParameterPoint) -> DomainCheck:
    """Classify ``p`` against the convergence region Re sigma_i > 1/2, Re nu_i > 0.

    Inside the region, points with ``min Re nu <= 1/2`` or ``min Re sigma <= 1``
    are flagged with ``MC_VARIANCE_WARNING``: importance-sampled Monte Carlo
    may have infinite variance there, while cubature remains valid.
    """
    bad = [f"Re sigma_{i + 1} = {s.real:g} <= 1/2" for i, s in enumerate(p.sigma) if s.real <= 0.5]
    bad += [f"Re nu_{i + 1} = {n.real:g} <= 0" for i, n in enumerate(p.nu) if n.real <= 0]
    if bad:
        return DomainCheck(DomainStatus.DIVERGENT, "; ".join(bad))
    if min(n.real for n in p.nu) <= 0.5 or min(s.real for s in p.sigma) <= 1.0:
        return DomainCheck(
            DomainStatus.MC_VARIANCE_WARNING,
            "min Re nu <= 1/2 or min Re sigma <= 1: plain MC variance may be infinite",
        )
    return DomainCheck(DomainStatus.OK)


METHODS = ("mc", "qmc", "cubature", "closed-form")


@dataclass(frozen=True)
class Estimate:
    """A numerical value with its error bar.

    ``error`` is one standard error for ``mc``/``qmc`` and an error bound for
    ``cubature``.  ``calibrated`` is False when the error bar comes from a
    method whose error estimate is known to be unreliable for this integrand.
    """

    value: complex
    error: float
    count: int
    method: str
    calibrated: bool = True

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "error", float(self.error))
        object.__setattr__(self, "count", int(self.count))
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.error >= 0:
            raise ValueError(f"error must be >= 0, got {self.error}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.method == "closed-form" and self.error != 0:
            raise ValueError("closed-form estimates carry zero error")

    @classmethod
    def closed_form(cls, value) -> Estimate:
        return cls(value, 0.0, 1, "closed-form")

    @property
    def stochastic(self) -> bool:
        return self.method in ("mc", "qmc")

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.value) if self.value != 0 else np.inf


@dataclass(frozen=True)
class IntegrationConfig:
    """Knobs shared by the Monte Carlo and cubature engines.

    budget
        Sample count for Monte Carlo / QMC.
    max_evals
        Evaluation cap for the deterministic rules.
    chunk
        Samples per deterministic RNG sub-stream; results depend on
        ``(seed, chunk, budget)`` but never on ``workers``.
    """

    budget: int = 1_000_000
    seed: int = 0
    tolerance: float = 1e-6
    workers: int = 1
    chunk: int = 65536
    max_evals: int = 50_000_000

    def __post_init__(self):
        for name in ("budget", "seed", "workers", "chunk", "max_evals"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.budget >= self.chunk >= 1:
            raise ValueError(f"need budget >= chunk >= 1, got {self.budget}, {self.chunk}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def with_budget(self, budget: int) -> IntegrationConfig:
        """Copy with a new sample budget; ``chunk`` is clipped to fit."""
        return replace(self, budget=int(budget), chunk=min(self.chunk, int(budget)))
