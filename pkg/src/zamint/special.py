"""Complex log-gamma and the closed-form sides of the identities.

Everything is assembled in log space and exponentiated once at the end,
since products and ratios of Gamma values overflow long before the final
value does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import PoleError
from .params import ParameterPoint

POLE_TOL = 1e-12
LOG_PI = math.log(math.pi)


def _check_pole(z):
    z = np.asarray(z, dtype=complex)
    near = (np.abs(z.imag) <= POLE_TOL) & (z.real <= POLE_TOL) & (
        np.abs(z.real - np.round(z.real)) <= POLE_TOL
    )
    if np.any(near):
        bad = z[near].ravel()[0]
        raise PoleError(f"Gamma pole at z = {bad:.12g}")


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex ``z`` (scalar or array).

    Satisfies ``log_gamma(z + 1) == log_gamma(z) + log(z)`` away from the
    negative real axis.  Raises :class:`PoleError` at non-positive integers.
    """
    _check_pole(z)
    out = _sp.loggamma(np.asarray(z, dtype=complex))
    return complex(out) if out.ndim == 0 else out


def _log_gamma_sum(args) -> complex:
    return sum(log_gamma(a) for a in args)


@dataclass(frozen=True)
class ClosedFormValue:
    """exp(log_magnitude + i*phase), with overflow kept explicit."""

    log_magnitude: float
    phase: float

    @classmethod
    def from_log(cls, logz: complex) -> ClosedFormValue:
        logz = complex(logz)
        phase = math.remainder(logz.imag, 2 * math.pi)
        return cls(logz.real, phase)

    @property
    def overflow(self) -> bool:
        return self.log_magnitude > 709.0

    @property
    def value(self) -> complex:
        if self.overflow:
            return complex(math.inf, 0.0)
        return math.exp(self.log_magnitude) * complex(math.cos(self.phase), math.sin(self.phase))


def log_rhs_eq3(p: ParameterPoint) -> complex:
    nu = p.nu
    num = _log_gamma_sum([sum(nu) - 1, *nu])
    den = _log_gamma_sum([2 * s for s in p.sigma])
    return 3 * LOG_PI + num - den


def rhs_eq3(p: ParameterPoint) -> complex:
    """pi^3 Gamma(nu1+nu2+nu3-1) prod Gamma(nu_i) / prod Gamma(2 sigma_i)."""
    return ClosedFormValue.from_log(log_rhs_eq3(p)).value


def rhs_thm2(nu) -> complex:
    """Gamma(nu1+nu2+nu3-1) Gamma(nu1) Gamma(nu2) Gamma(nu3)."""
    nu = [complex(v) for v in nu]
    return ClosedFormValue.from_log(_log_gamma_sum([sum(nu) - 1, *nu])).value


def gamma_prefactor_eq3(p: ParameterPoint) -> complex:
    """pi^3 / prod Gamma(2 sigma_i): the factor linking the Gaussian and line sides."""
    return ClosedFormValue.from_log(3 * LOG_PI - _log_gamma_sum([2 * s for s in p.sigma])).value


def prop1_radial_rhs(s: complex, n: int) -> complex:
    """Normalised Gaussian moment of r^s on C^n: Gamma(s/2 + n) / Gamma(n)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    s = complex(s)
    return ClosedFormValue.from_log(log_gamma(s / 2 + n) - log_gamma(n)).value


def prop1_linear_rhs(s: complex, c) -> complex:
    """Normalised Gaussian moment of |sum c_i z_i|^s: Gamma(s/2 + 1) ||c||^s."""
    s = complex(s)
    norm = math.sqrt(float(np.sum(np.abs(np.asarray(c, dtype=complex)) ** 2)))
    if norm == 0:
        raise ValueError("coefficient vector must be nonzero")
    return ClosedFormValue.from_log(log_gamma(s / 2 + 1) + s * math.log(norm)).value


def prop1_det_rhs(s: complex) -> complex:
    """Normalised Gaussian moment of |z11 z22 - z12 z21|^s on C^4."""
    s = complex(s)
    return ClosedFormValue.from_log(log_gamma(s / 2 + 1) + log_gamma(s / 2 + 2)).value


def lemma3_constant(lam: complex) -> complex:
    """Proportionality constant Gamma(lambda)/pi between the two functionals."""
    return ClosedFormValue.from_log(log_gamma(complex(lam)) - LOG_PI).value


def cor1_constant(lams) -> complex:
    """pi^-n prod Gamma(lambda_i)."""
    lams = [complex(v) for v in lams]
    return ClosedFormValue.from_log(_log_gamma_sum(lams) - len(lams) * LOG_PI).value
