"""SL2(C) group elements, test functions in the two realisations, and the
invariant functionals on them.

A test function of homogeneity degrees ``lam = (l1, ..., ln)`` has a
*homogeneous* evaluator on (C^2)^n, f(a1 w1, ..., an wn) = prod |a_i|^(2 l_i) f(w),
and a *line* evaluator on C^n, its restriction to w_i = (z_i, 1).  Either
one determines the other.

G acts by right translation, (g f)(w) = f(w g) with w_i row vectors; on the
line this reads

    (g f)(z) = prod |b z_i + d|^(2 l_i) f((a z + c)/(b z + d)),

which is the convention under which ``ell_prime`` is SU(2)-invariant on
functions of degree ``lam - 2``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PoleError
from .gauss import kernel_K, sample_cgauss
from .params import Estimate, IntegrationConfig, ParameterPoint, sigma_from_nu
from .quad import DomainSpec, RngStream, cubature, mc_expect, product_sum, refine, tanh_sinh, trapezoid_periodic
from .report import ROUNDOFF, Report, make_report
from .special import cor1_constant, lemma3_constant
from .zam import fs_sample

# -- group elements ---------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """g = ((a, b), (c, d)) with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.a * self.d - self.b * self.c - 1) > 1e-12 * max(1.0, abs(self.a * self.d)):
            raise ValueError("determinant is not 1")

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, t: complex) -> GroupElement:
        return cls(t, 0, 0, 1 / complex(t))

    @classmethod
    def su2(cls, alpha: complex, beta: complex) -> GroupElement:
        """((alpha, beta), (-conj(beta), conj(alpha))) for |alpha|^2 + |beta|^2 = 1."""
        alpha, beta = complex(alpha), complex(beta)
        return cls(alpha, beta, -beta.conjugate(), alpha.conjugate())

    @classmethod
    def from_matrix(cls, m) -> GroupElement:
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement.from_matrix(self.matrix @ other.matrix)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m @ m.conj().T - np.eye(2))) <= tol)


def haar_su2(stream: RngStream, size: int | None = None):
    """Haar-random SU(2) element(s): (alpha, beta) uniform on the unit sphere of C^2."""
    g = sample_cgauss(stream, (1 if size is None else size, 2))
    g = g / np.linalg.norm(g, axis=1, keepdims=True)
    out = [GroupElement.su2(al, be) for al, be in g]
    return out[0] if size is None else out


# -- test functions ------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Evaluators for one element of V_lam.

    ``line(z)`` takes z of shape (N, n); ``homogeneous(w)`` takes w of shape
    (N, n, 2).  Both return N complex values.  ``factors`` lists one-variable
    test functions when f is their product.
    """

    __test__ = False  # not a pytest class

    degrees: tuple
    line: Callable | None = None
    homogeneous: Callable | None = None
    factors: tuple | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(complex(v) for v in np.atleast_1d(self.degrees)))
        if self.line is None and self.homogeneous is None:
            raise ValueError("need at least one evaluator")

    @property
    def n(self) -> int:
        return len(self.degrees)

    def eval_line(self, z):
        z = np.asarray(z, dtype=complex).reshape(-1, self.n)
        if self.line is not None:
            return np.asarray(self.line(z))
        w = np.stack([z, np.ones_like(z)], axis=-1)
        return np.asarray(self.homogeneous(w))

    def eval_hom(self, w):
        w = np.asarray(w, dtype=complex).reshape(-1, self.n, 2)
        if self.homogeneous is not None:
            return np.asarray(self.homogeneous(w))
        x, y = w[..., 0], w[..., 1]
        scale = np.exp(np.sum(np.asarray(self.degrees) * np.log(np.abs(y) ** 2), axis=1))
        return scale * np.asarray(self.line(x / y))


def radial_power(degrees, name: str = "radial") -> TestFunction:
    """prod_i (|x_i|^2 + |y_i|^2)^deg_i, whose line form is prod (1 + |z_i|^2)^deg_i."""
    degs = np.array(np.atleast_1d(degrees), dtype=complex)

    def hom(w):
        return np.exp(np.sum(degs * np.log(np.sum(np.abs(w) ** 2, axis=-1)), axis=1))

    def line(z):
        return np.exp(np.sum(degs * np.log1p(np.abs(z) ** 2), axis=1))

    return TestFunction(tuple(degs), line, hom, name=name)


def fs_type(degree: complex, mu: float, name: str = "fs") -> TestFunction:
    """Line-only test function (1 + |z|^2)^(degree + mu); mu < 0 adds decay."""
    e = complex(degree) + mu
    return TestFunction((degree,), line=lambda z: np.exp(e * np.log1p(np.abs(z[:, 0]) ** 2)), name=name)


def quadratic_form(h, degree: complex, name: str = "quadratic") -> TestFunction:
    """(w H w^*) r^(2(deg - 1)) for a Hermitian 2x2 H: smooth, degree ``deg``,
    not SU(2)-invariant unless H is scalar."""
    h = np.asarray(h, dtype=complex)
    if not np.allclose(h, h.conj().T):
        raise ValueError("H must be Hermitian")
    deg = complex(degree)

    def hom(w):
        w1 = w[:, 0, :]
        q = np.einsum("ni,ij,nj->n", w1, h, w1.conj()).real
        r2 = np.sum(np.abs(w1) ** 2, axis=1)
        return q * np.exp((deg - 1) * np.log(r2))

    return TestFunction((deg,), homogeneous=hom, name=name)


def kernel_function(nu) -> TestFunction:
    """K_nu on (C^2)^3, of degrees 2 sigma - 2; its line form is the triple-integral kernel."""
    nu = tuple(complex(v) for v in nu)
    degs = tuple(2 * s - 2 for s in sigma_from_nu(nu))
    return TestFunction(degs, homogeneous=lambda w: kernel_K(nu, w), name="kernel")


def product(*fs: TestFunction) -> TestFunction:
    """Tensor product of test functions in disjoint variables."""
    sizes = [f.n for f in fs]
    offs = np.cumsum([0] + sizes)

    def line(z):
        return np.prod([f.eval_line(z[:, offs[k]:offs[k + 1]]) for k, f in enumerate(fs)], axis=0)

    def hom(w):
        return np.prod([f.eval_hom(w[:, offs[k]:offs[k + 1], :]) for k, f in enumerate(fs)], axis=0)

    degs = tuple(d for f in fs for d in f.degrees)
    return TestFunction(degs, line, hom, factors=tuple(fs), name="*".join(f.name for f in fs))


def act(g: GroupElement, f: TestFunction) -> TestFunction:
    """Right translation g f, on both evaluators; degrees are unchanged."""
    degs = np.asarray(f.degrees)

    def line(z):
        den = g.b * z + g.d
        if np.any(den == 0):
            raise PoleError("b z + d = 0 at an evaluation point")
        cocycle = np.exp(np.sum(degs * np.log(np.abs(den) ** 2), axis=1))
        return cocycle * f.eval_line((g.a * z + g.c) / den)

    def hom(w):
        x, y = w[..., 0], w[..., 1]
        return f.eval_hom(np.stack([g.a * x + g.c * y, g.b * x + g.d * y], axis=-1))

    factors = tuple(act(g, fi) for fi in f.factors) if f.factors else None
    return TestFunction(f.degrees, line, hom, factors=factors, name=f.name)


# -- functionals -------------------------------------------------------------------


def _lams(lam, n: int) -> tuple:
    lams = tuple(complex(v) for v in np.atleast_1d(lam))
    if len(lams) == 1 and n > 1:
        lams = lams * n
    if len(lams) != n:
        raise ValueError(f"need {n} lambda values, got {len(lams)}")
    return lams


def _sphere_rules(level: int, n: int):
    rules = []
    for _ in range(n):
        rules.append(tanh_sinh(level).scaled(-1.0, 1.0))
        rules.append(trapezoid_periodic(4 * 2**level))
    return rules


def ell_prime(lam, f: TestFunction, config: IntegrationConfig = IntegrationConfig(), method: str = "auto") -> Estimate:
    """Line-model functional  int_{C^n} prod (1 + |z_i|^2)^(-lam_i) f(z) dz.

    ``cubature`` (default for n <= 2) moves each z_i to the sphere, where
    dz = (1 + |z|^2)^2 dS / 4; ``mc`` (default for n >= 3) samples each z_i
    from the Fubini-Study density.
    """
    lams = _lams(lam, f.n)
    if method == "auto":
        method = "cubature" if f.n <= 2 else "mc"
    if method == "mc":
        exps = np.array([2 - v for v in lams])

        def g(z):
            w = np.exp(np.sum(exps * np.log1p(np.abs(z) ** 2), axis=1))
            return math.pi**f.n * w * f.eval_line(z)

        return mc_expect(g, lambda st, m: fs_sample(st, (m, f.n)), config)
    if method != "cubature":
        raise ValueError(f"unknown method {method!r}")

    def integrand(views):
        zs, log_fs = [], 0
        for k in range(f.n):
            _, lo, hi = views[2 * k]  # t = cos(theta): lo = 1 + t, hi = 1 - t
            phi = views[2 * k + 1][0]
            zs.append(np.sqrt(lo / hi) * np.exp(1j * phi))
            log_fs = log_fs + (2 - lams[k]) * np.log(2 / hi) - math.log(4)
        return np.exp(log_fs) * f.eval_line(np.stack(zs, axis=1))

    return refine(
        lambda L: product_sum(integrand, _sphere_rules(L, f.n)),
        config.tolerance / 10,
        config.max_evals,
        start=1,
    )


def _radial_factor(lam: complex, tol: float, max_evals: int) -> Estimate:
    """int_0^inf 2 rho^(2 lam - 1) exp(-rho^2) d rho, by exp-sinh quadrature."""
    dom = DomainSpec("half-line-radial", exponents=((2 * lam.real - 1, 0.0),))
    return cubature(lambda r: 2 * np.exp((2 * lam - 1) * np.log(r) - r * r), dom, tol, max_evals)


def ell_gauss(lam, f: TestFunction, config: IntegrationConfig = IntegrationConfig(), method: str = "auto") -> Estimate:
    """Gaussian-model functional: normalised E[f(w)] over (C^2)^n.

    f must have degrees ``lam - 2``.  ``cubature`` (default for n <= 2) uses
    homogeneity, E[f] = prod_i R(lam_i) * avg_{(S^3)^n} f, with the radial
    moments R computed by half-line quadrature and the sphere average over
    Hopf coordinates (one phase per factor is redundant for f in V_lam).
    """
    lams = _lams(lam, f.n)
    bad = [v for v in lams if v.real <= 0]
    if bad:
        raise DomainError(f"Gaussian functional diverges for Re lambda <= 0 (lambda = {bad[0]})")
    if max(abs(d - (v - 2)) for d, v in zip(f.degrees, lams)) > 1e-12:
        raise ValueError(f"test function degrees {f.degrees} != lambda - 2")
    if method == "auto":
        method = "cubature" if f.n <= 2 else "mc"
    if method == "mc":
        return mc_expect(f.eval_hom, lambda st, m: sample_cgauss(st, (m, f.n, 2)), config)
    if method != "cubature":
        raise ValueError(f"unknown method {method!r}")

    tol = config.tolerance / 10
    radial = [_radial_factor(v, tol, config.max_evals) for v in lams]

    def integrand(views):
        ws = []
        for k in range(f.n):
            _, lo, hi = views[2 * k]  # u = |y|^2 on the unit sphere
            beta = views[2 * k + 1][0]
            ws.append(np.stack([np.sqrt(hi) + 0j, np.sqrt(lo) * np.exp(2j * math.pi * beta)], axis=-1))
        return f.eval_hom(np.stack(ws, axis=1))

    def level_sum(level):
        rules = []
        for _ in range(f.n):
            rules.append(tanh_sinh(level))
            rules.append(trapezoid_periodic(4 * 2**level, 0.0, 1.0))  # normalised phase average
        return product_sum(integrand, rules)

    avg = refine(level_sum, tol, config.max_evals, start=1)
    value = avg.value * np.prod([r.value for r in radial])
    rel = math.sqrt(avg.relative_error**2 + sum(r.relative_error**2 for r in radial))
    count = avg.count + sum(r.count for r in radial)
    return Estimate(value, abs(value) * rel, count, "cubature")


def ell_trilinear(p: ParameterPoint, f: TestFunction, config: IntegrationConfig = IntegrationConfig()) -> Estimate:
    """int_{C^3} f(z) K'_nu(z) dz for f of degrees -2 sigma (Monte Carlo)."""
    if f.n != 3:
        raise ValueError("trilinear functional takes a 3-variable test function")
    nu = p.nu

    def g(z):
        log_w = 2 * np.sum(np.log1p(np.abs(z) ** 2), axis=1)
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            log_w = log_w + (nu[k] - 1) * np.log(np.abs(z[:, i] - z[:, j]) ** 2)
        return math.pi**3 * np.exp(log_w) * f.eval_line(z)

    return mc_expect(g, lambda st, m: fs_sample(st, (m, 3)), config)


# -- verification -------------------------------------------------------------------


def _ratio(num: Estimate, den: Estimate) -> Estimate:
    value = num.value / den.value
    rel = math.hypot(num.relative_error, den.relative_error)
    method = "mc" if (num.stochastic or den.stochastic) else "cubature"
    return Estimate(value, abs(value) * rel, num.count + den.count, method)


def verify_lemma3(lam, f: TestFunction, config: IntegrationConfig = IntegrationConfig(), threshold: float = 3.0) -> Report:
    """ell_gauss(f) / ell_prime(f) against Gamma(lambda)/pi."""
    t0 = time.perf_counter()
    lam = complex(np.atleast_1d(lam)[0])
    if f.n != 1:
        raise ValueError("the one-variable proportionality needs n = 1")
    g = ell_gauss(lam, f, config)
    lp = ell_prime(lam, f, config)
    extra = {"ell_gauss": g, "ell_prime": lp}
    return make_report("lemma3", {"lambda": lam, "f": f.name}, _ratio(g, lp), lemma3_constant(lam),
                       t0, config, threshold=threshold, extra=extra)


def verify_cor1(lams, f: TestFunction, config: IntegrationConfig = IntegrationConfig(), threshold: float = 3.0) -> Report:
    """ell_gauss(f) against pi^-n prod Gamma(lambda_i) ell_prime(f).

    For factorisable f the result is also compared with the product of the
    one-variable Gaussian functionals.
    """
    t0 = time.perf_counter()
    lams = _lams(lams, f.n)
    lhs = ell_gauss(lams, f, config)
    lp = ell_prime(lams, f, config)
    const = cor1_constant(lams)
    extra = {"ell_prime": lp}
    ok = None
    if f.factors:
        offs = np.cumsum([0] + [fi.n for fi in f.factors])
        parts = [ell_gauss(lams[offs[k]:offs[k + 1]], fi, config) for k, fi in enumerate(f.factors)]
        pv = complex(np.prod([e.value for e in parts]))
        prod = Estimate(
            pv,
            abs(pv) * math.sqrt(sum(e.relative_error**2 for e in parts)),
            sum(e.count for e in parts),
            "mc" if any(e.stochastic for e in parts) else "cubature",
        )
        dev = abs(prod.value - lhs.value)
        comb = math.hypot(prod.error, lhs.error)
        extra["factor_product"] = prod
        if lhs.stochastic or prod.stochastic:
            ok = dev <= threshold * comb or dev <= ROUNDOFF * abs(lhs.value)
        else:
            ok = dev <= config.tolerance * abs(lhs.value)
        extra["factor_product_ok"] = ok
    return make_report("cor1", {"lambda": lams, "f": f.name}, lhs, const * lp.value, t0, config,
                       threshold=threshold, rhs_error=abs(const) * lp.error, extra=extra, passed=ok)


_FUNCTIONALS = {"ell_prime": ell_prime, "ell_gauss": ell_gauss}


def invariance_test(
    functional: str,
    lam,
    f: TestFunction,
    n_group_samples: int = 100,
    config: IntegrationConfig = IntegrationConfig(),
    elements: Sequence[GroupElement] | None = None,
    tolerance: float | None = None,
) -> Report:
    """Max relative change of a functional under the action of group elements.

    With ``elements=None`` the elements are Haar-random SU(2) draws.  The
    functional is expected to be invariant when every element is unitary,
    or when it is ``ell_prime`` at lambda = 0 (full G-invariance).  A
    violation is declared when the deviation exceeds both the tolerance and
    5 combined errors; ``passed`` means the observation matches expectation.
    """
    t0 = time.perf_counter()
    fn = _FUNCTIONALS[functional]
    tol = config.tolerance if tolerance is None else tolerance
    if elements is None:
        elements = haar_su2(RngStream(config.seed, 0), n_group_samples)
    lams = _lams(lam, f.n)
    base = fn(lams, f, config)
    worst, worst_err = 0.0, 0.0
    for g in elements:
        v = fn(lams, act(g, f), config)
        dev = abs(v.value - base.value) / abs(base.value)
        if dev >= worst:
            worst, worst_err = dev, math.hypot(v.error, base.error) / abs(base.value)
    expected = all(g.is_unitary() for g in elements) or (
        functional == "ell_prime" and all(v == 0 for v in lams)
    )
    invariant = worst <= tol
    violation = worst > tol and worst > 5 * worst_err
    est = Estimate(worst, worst_err, max(1, len(elements)), base.method)
    return Report(
        check=f"lemma2.{functional}",
        params={"lambda": lams, "f": f.name, "n_elements": len(elements)},
        lhs=est,
        rhs=0j,
        rel_error=worst,
        sigmas=None,
        passed=invariant if expected else violation,
        runtime_ms=int(round(1000 * (time.perf_counter() - t0))),
        seed=config.seed,
        extra={"expected_invariant": expected, "invariant": invariant, "violation": violation},
    )
