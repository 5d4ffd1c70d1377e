"""The acceptance suite as a library routine, shared by ``zamint selftest``
and the test suite.

Every criterion returns its Report records and a verdict.  Wall-clock
timings are kept apart from the reports so the report stream is a pure
function of ``(seed, quick)``.
"""

from __future__ import annotations

import itertools
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import VarianceWarning
from .gauss import gexpect, kernel_K, verify_prop1, verify_thm2
from .params import IntegrationConfig, ParameterPoint
from .report import Report
from .rep import (
    GroupElement,
    fs_type,
    invariance_test,
    kernel_function,
    product,
    quadratic_form,
    radial_power,
    verify_cor1,
    verify_lemma3,
)
from .zam import CHORDAL_GATE_TOL, chordal_gate, verify_thm1

# runtime ceilings in seconds, by criterion
TIME_LIMITS = {1: 30.0, 2: 120.0, 3: 180.0}

_H = np.array([[1.0, 0.5 - 0.25j], [0.5 + 0.25j, 3.0]])


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    reports: list = field(default_factory=list)
    seconds: float = 0.0

    def summary_line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number}: {verdict}  {self.title}  ({self.detail})"


def _budget(full: int, quick: bool, cut: int = 10) -> int:
    return full // cut if quick else full


def _cfg(seed, workers, budget, **kw) -> IntegrationConfig:
    return IntegrationConfig(budget=budget, seed=seed, workers=workers, chunk=min(65536, budget), **kw)


def criterion_1(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, _budget(1_000_000, quick))
    reps = []
    for s, n in itertools.product((0, 1, 2, 3.5), (1, 2, 3)):
        reps.append(verify_prop1("radial", s=s, n=n, config=cfg))
    for s, c in itertools.product((1, 2), ((1, 1), (1, 2j, -1))):
        reps.append(verify_prop1("linear", s=s, c=c, config=cfg))
    for s in (0, 1, 2, 3):
        reps.append(verify_prop1("det", s=s, config=cfg))
    ok = [r.passed and r.rel_error <= 0.01 for r in reps]
    worst = max(r.rel_error for r in reps)
    return reps, all(ok), f"{sum(ok)}/{len(ok)} within 3 se and 1%, worst rel {worst:.2e}"


def criterion_2(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, _budget(10_000_000, quick))
    reps = [verify_thm2(nu, cfg) for nu in ((1, 1, 1), (1, 1, 2), (0.8, 0.9, 1.1), (1.5, 0.75, 1.25))]
    exact = abs(reps[0].rhs - 1) < 1e-14 and abs(reps[1].rhs - 2) < 1e-14 and reps[0].lhs.value == 1
    ok = all(r.passed for r in reps) and exact
    worst = max(r.sigmas for r in reps)
    return reps, ok, f"{sum(r.passed for r in reps)}/4 within 3 se, worst {worst:.2f} se"


def criterion_3(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, 1000)
    reps = [verify_thm1(ParameterPoint.from_sigma((1, 1, 1)), cfg, route="cubature")]
    grid_cfg = replace(cfg, tolerance=1e-4)
    for sig in itertools.product((0.75, 1.0, 1.25), repeat=3):
        reps.append(verify_thm1(ParameterPoint.from_sigma(sig), grid_cfg, route="cubature"))
    reps.append(verify_thm1(ParameterPoint.from_sigma((1 + 0.3j, 0.9, 1.1)), replace(cfg, tolerance=1e-3), route="cubature"))
    tols = [1e-6] + [1e-4] * 27 + [1e-3]
    ok = [r.passed and r.rel_error <= t for r, t in zip(reps, tols)]
    worst = max(r.rel_error for r in reps)
    return reps, all(ok), f"{sum(ok)}/{len(ok)} points, worst rel {worst:.2e}"


def criterion_4(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, _budget(10_000_000, quick))
    reps = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VarianceWarning)
        for sig in ((1.25, 1.25, 1.25), (1.25, 1.0, 1.1)):
            reps.append(verify_thm1(ParameterPoint.from_sigma(sig), cfg, route="both"))
    agree = [r.extra["agreement_sigmas"] for r in reps]
    ok = all(a <= 3 for a in agree)
    return reps, ok, "route agreement " + ", ".join(f"{a:.2f} se" for a in agree)


def criterion_5(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, _budget(100_000, quick))
    reps = []
    for lam in (1.5, 2, 2.7, 1 + 0.5j):
        deg = complex(lam) - 2
        reps.append(verify_lemma3(lam, radial_power([deg]), cfg))
        reps.append(verify_lemma3(lam, fs_type(deg, -0.7), cfg))
    reps.append(verify_cor1((2, 2, 2), kernel_function((1, 1, 1)), cfg))
    reps.append(verify_cor1((1.5, 2.7), product(radial_power([-0.5]), quadratic_form(_H, 0.7)), cfg))
    ok = [r.passed and r.rel_error <= 1e-6 for r in reps]
    worst = max(r.rel_error for r in reps)
    return reps, all(ok), f"{sum(ok)}/{len(ok)} ratios within 1e-6, worst rel {worst:.2e}"


def criterion_6(seed=0, workers=1, quick=False):
    cfg = _cfg(seed, workers, 1000)
    g = GroupElement.diag(2)
    reps = [
        invariance_test("ell_prime", 2, radial_power([0]), 100, cfg),
        invariance_test("ell_prime", 2, quadratic_form(_H, 0), 100, cfg),
        invariance_test("ell_prime", 0, quadratic_form(_H, -2), config=cfg, elements=[g]),
        invariance_test("ell_prime", 2, quadratic_form(np.diag([0.0, 1.0]), 0), config=cfg, elements=[g]),
    ]
    tol = cfg.tolerance
    ok = (
        all(r.rel_error <= tol for r in reps[:3])
        and reps[3].rel_error >= 10 * tol
        and all(r.passed for r in reps)
    )
    detail = f"SU(2) max {max(r.rel_error for r in reps[:2]):.1e}, lambda=0 {reps[2].rel_error:.1e}, lambda=2 {reps[3].rel_error:.3f}"
    return reps, ok, detail


def criterion_7(seed=0, workers=1, quick=False):
    dev = chordal_gate(10_000, seed)
    return [], dev <= CHORDAL_GATE_TOL, f"max deviation {dev:.2e} over 10^4 pairs"


def criterion_8(seed=0, workers=1, quick=False):
    """In-process determinism: the same estimate under 1, 4 and 8 workers, twice."""
    nu = (0.8, 0.9, 1.1)
    f = lambda z: kernel_K(nu, z.reshape(-1, 3, 2))
    vals = []
    for w in (1, 4, 8, 1):
        cfg = IntegrationConfig(budget=300_000, seed=seed, workers=w, chunk=20_000)
        e = gexpect(f, 6, cfg)
        vals.append((e.value, e.error, e.count))
    ok = all(v == vals[0] for v in vals)
    return [], ok, "identical estimates for workers 1/4/8 and a rerun" if ok else "estimates differ"


def criterion_9(seed=0, workers=1, quick=False):
    reps_n = 200
    budget = _budget(100_000, quick)
    hits = 0
    for k in range(reps_n):
        cfg = _cfg(seed + 1000 + k, workers, budget)
        hits += verify_thm2((1, 1, 2), cfg).passed
    frac = hits / reps_n
    return [], frac >= 0.99, f"{hits}/{reps_n} runs cover the true value 2"


CRITERIA = {
    1: ("Gaussian moment formulas by MC", criterion_1),
    2: ("kernel moment formula by MC", criterion_2),
    3: ("triple integral, deterministic route", criterion_3),
    4: ("triple integral, MC vs cubature", criterion_4),
    5: ("functional proportionality constants", criterion_5),
    6: ("invariance suite", criterion_6),
    7: ("chordal identity gate", criterion_7),
    8: ("worker-count determinism", criterion_8),
    9: ("MC error calibration", criterion_9),
}


def run_criterion(number: int, seed: int = 0, workers: int = 1, quick: bool = False) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    reps, ok, detail = fn(seed=seed, workers=workers, quick=quick)
    return CriterionResult(number, title, bool(ok), detail, list(reps), time.perf_counter() - t0)


def run_selftest(seed: int = 0, workers: int = 1, quick: bool = False, only=None):
    """Run the criteria in order; yields CriterionResult objects as they finish."""
    for number in sorted(CRITERIA if only is None else only):
        yield run_criterion(number, seed, workers, quick)


def stable_report(r: Report) -> Report:
    """Copy with the wall-clock field zeroed, for byte-stable output."""
    return replace(r, runtime_ms=0)
