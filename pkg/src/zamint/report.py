"""The Report record shared by every verification routine, and its JSON/CSV forms.

JSON keys are emitted in the fixed order of :data:`REPORT_KEYS`.  Complex
numbers are written as ``{"re": x, "im": y}``; non-finite numbers are written
as the string ``"divergent"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

from .params import Estimate, IntegrationConfig

REPORT_KEYS = (
    "check", "params", "lhs", "rhs", "rel_error", "sigmas", "pass",
    "runtime_ms", "seed", "warnings", "extra",
)
CSV_COLUMNS = (
    "check", "params", "lhs_re", "lhs_im", "lhs_error", "count", "method",
    "rhs_re", "rhs_im", "rel_error", "sigmas", "pass", "runtime_ms", "seed",
)


@dataclass
class Report:
    check: str
    params: dict
    lhs: Estimate
    rhs: complex
    rel_error: float
    sigmas: float | None
    passed: bool
    runtime_ms: int
    seed: int
    warnings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        raw = {
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_error": self.rel_error,
            "sigmas": self.sigmas,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "extra": self.extra,
        }
        return {k: encode(raw[k]) for k in REPORT_KEYS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), allow_nan=False)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        return cls(
            check=d["check"],
            params={k: decode(v) for k, v in d["params"].items()},
            lhs=decode_estimate(d["lhs"]),
            rhs=decode(d["rhs"]),
            rel_error=decode(d["rel_error"]),
            sigmas=decode(d["sigmas"]),
            passed=d["pass"],
            runtime_ms=d["runtime_ms"],
            seed=d["seed"],
            warnings=list(d["warnings"]),
            extra=d["extra"],
        )

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def csv_row(self) -> list:
        d = self.to_dict()
        lhs, rhs = d["lhs"], d["rhs"]
        return [
            d["check"], json.dumps(d["params"]), lhs["value"]["re"], lhs["value"]["im"],
            lhs["error"], lhs["count"], lhs["method"], rhs["re"], rhs["im"],
            d["rel_error"], "" if d["sigmas"] is None else d["sigmas"], d["pass"],
            d["runtime_ms"], d["seed"],
        ]


def encode(obj):
    """Convert to JSON-safe structures (complex -> {re, im}, inf/nan -> "divergent")."""
    if isinstance(obj, Estimate):
        return {
            "value": encode(obj.value),
            "error": encode(obj.error),
            "count": obj.count,
            "method": obj.method,
            "calibrated": obj.calibrated,
        }
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, complex):
        return {"re": encode(obj.real), "im": encode(obj.imag)}
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else "divergent"
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(obj):
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        return complex(decode(obj["re"]), decode(obj["im"]))
    if obj == "divergent":
        return math.inf
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def decode_estimate(d: dict) -> Estimate:
    return Estimate(decode(d["value"]), decode(d["error"]), d["count"], d["method"], d["calibrated"])


ROUNDOFF = 4 * 2.2e-16


def deviation_sigmas(deviation: float, error: float, scale: float = 0.0) -> float:
    """deviation / error; a deviation at round-off level relative to ``scale`` counts as 0."""
    if deviation <= ROUNDOFF * max(scale, 1.0):
        return 0.0
    if error > 0:
        return deviation / error
    return 0.0 if deviation == 0 else math.inf


def make_report(
    check: str,
    params: dict,
    lhs: Estimate,
    rhs: complex,
    t0: float,
    config: IntegrationConfig,
    *,
    threshold: float = 3.0,
    tolerance: float | None = None,
    rhs_error: float = 0.0,
    warnings=(),
    extra: dict | None = None,
    passed: bool | None = None,
) -> Report:
    """Assemble a Report; pass/fail follows the stochastic/deterministic rule.

    Stochastic estimates pass when the deviation is within ``threshold``
    combined standard errors; deterministic ones when the relative error is
    within ``tolerance`` (default ``config.tolerance``).  ``passed`` may
    tighten the verdict with extra conditions (it is and-ed in).
    """
    rhs = complex(rhs)
    dev = abs(lhs.value - rhs)
    rel = dev / abs(rhs) if rhs != 0 else dev
    tol = config.tolerance if tolerance is None else tolerance
    # exact agreement up to round-off counts as zero deviation
    if dev <= ROUNDOFF * max(abs(rhs), 1.0):
        dev = 0.0
    if lhs.stochastic:
        sig = deviation_sigmas(dev, math.hypot(lhs.error, rhs_error))
        ok = sig <= threshold
    else:
        sig = None
        ok = rel <= tol
    if passed is not None:
        ok = ok and passed
    return Report(
        check=check,
        params=dict(params),
        lhs=lhs,
        rhs=rhs,
        rel_error=float(rel),
        sigmas=None if sig is None else float(sig),
        passed=bool(ok),
        runtime_ms=int(round(1000 * (time.perf_counter() - t0))),
        seed=config.seed,
        warnings=list(warnings),
        extra=dict(extra or {}),
    )


def reports_to_csv(reports, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
