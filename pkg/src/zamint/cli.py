"""Command-line front end: ``zamint verify``, ``zamint sweep`` and ``zamint selftest``.

Reports go to stdout as JSON lines (default) or CSV; progress, warnings and
timings go to stderr.  Exit codes: 0 all pass, 1 a check failed, 2 usage
error, 3 domain or pole error.
"""

from __future__ import annotations

import argparse
import contextlib
import itertools
import json
import re
import sys
import time
import warnings

import numpy as np

from .errors import BudgetExhaustedError, DomainError, NonIntegrableError, PoleError
from .gauss import verify_prop1, verify_thm2
from .params import Estimate, IntegrationConfig, ParameterPoint, check_domain, sigma_from_nu
from .report import encode, make_report, reports_to_csv
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
from .selftest import TIME_LIMITS, run_selftest, stable_report
from .zam import CHORDAL_GATE_TOL, chordal_gate, verify_thm1

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
CHECKS = ("prop1", "lemma2", "lemma3", "cor1", "thm2", "thm1", "chordal")

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^[+-]?{_NUM}$|^[+-]?(?:{_NUM})?i$|^[+-]?{_NUM}[+-](?:{_NUM})?i$")


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi`` or ``a-bi`` (no spaces)."""
    if not _COMPLEX_RE.match(text):
        raise UsageError(f"cannot parse complex number {text!r}")
    return complex(text[:-1] + "j" if text.endswith("i") else text)


def parse_list(text: str) -> list[complex]:
    return [parse_complex(p) for p in text.split(",")]


def parse_triple(text: str) -> tuple:
    vals = parse_list(text)
    if len(vals) != 3:
        raise UsageError(f"expected three comma-separated values, got {text!r}")
    return tuple(vals)


def _simplify(z: complex):
    return z.real if z.imag == 0 else z


def parse_count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 1 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


# -- argument parsing ---------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=parse_count, default=None, help="MC sample budget (accepts 1e7)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for deterministic routes")
    p.add_argument("--sigmas-threshold", type=float, default=3.0, dest="threshold")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk", type=parse_count, default=65536)
    p.add_argument("--route", choices=("auto", "mc", "cubature", "both"), default="auto")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write reports to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zamint", description="Numerical checks of the triple integral identity.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one check on one or more parameter instances")
    v.add_argument("check", choices=CHECKS)
    v.add_argument("--sigma", action="append", default=[], help="sigma triple, e.g. 1,1,1 (repeatable)")
    v.add_argument("--nu", action="append", default=[], help="nu triple (repeatable)")
    v.add_argument("--lambda", action="append", default=[], dest="lam", help="lambda value(s), comma-separated")
    v.add_argument("--s", action="append", default=[], help="exponent(s) for prop1, comma-separated")
    v.add_argument("--case", choices=("radial", "linear", "det"), default="radial")
    v.add_argument("--n", type=int, default=1, help="dimension for prop1 radial")
    v.add_argument("--c", default="1,1", help="coefficients for prop1 linear")
    v.add_argument("--f", default=None, help="test function: radial | fs | quadratic | kernel")
    v.add_argument("--functional", choices=("ell_prime", "ell_gauss"), default="ell_prime")
    v.add_argument("--group", choices=("haar", "diag"), default="haar")
    v.add_argument("--t", type=float, default=2.0, help="diagonal entry for --group diag")
    v.add_argument("--n-group", type=int, default=100, dest="n_group")
    _common(v)

    s = sub.add_parser("sweep", help="run a check over a parameter grid")
    s.add_argument("check", choices=("thm1", "thm2"))
    s.add_argument("--grid", default=None, help="values used for every coordinate, e.g. 0.75,1,1.25")
    for k in (1, 2, 3):
        s.add_argument(f"--grid{k}", default=None, help=f"values for coordinate {k} (overrides --grid)")
    s.add_argument("--param", choices=("sigma", "nu"), default=None, help="grid over sigma (thm1 default) or nu")
    _common(s)

    t = sub.add_parser("selftest", help="run the acceptance suite")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--quick", action="store_true", help="reduced MC budgets")
    t.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,3,7")
    t.add_argument("--out", default=None)
    return parser


def make_config(args) -> IntegrationConfig:
    budget = args.samples or 1_000_000
    try:
        return IntegrationConfig(
            budget=budget, seed=args.seed, tolerance=args.tol, workers=args.workers, chunk=min(args.chunk, budget)
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- instances ------------------------------------------------------------------------


def _points(args) -> list[ParameterPoint]:
    pts = [ParameterPoint.from_sigma(parse_triple(t)) for t in args.sigma]
    pts += [ParameterPoint.from_nu(parse_triple(t)) for t in args.nu]
    if not pts:
        raise UsageError("give at least one --sigma or --nu")
    return pts


def _test_function(name: str | None, lams, nu=None):
    n = len(lams)
    name = name or ("kernel" if nu is not None else "radial")
    if name == "kernel":
        if nu is None:
            raise UsageError("--f kernel needs --nu")
        return kernel_function(nu)
    makers = {
        "radial": lambda lam: radial_power([lam - 2]),
        "fs": lambda lam: fs_type(lam - 2, -0.7),
        "quadratic": lambda lam: quadratic_form(np.array([[1.0, 0.5], [0.5, 3.0]]), lam - 2),
    }
    if name not in makers:
        raise UsageError(f"unknown test function {name!r}")
    fs = [makers[name](lam) for lam in lams]
    return fs[0] if n == 1 else product(*fs)


def _instances(args, config):
    """Yield (label, params, thunk) for each requested instance."""
    check = args.check
    if check == "thm1":
        for p in _points(args):
            yield check, {"sigma": p.sigma}, lambda p=p: verify_thm1(p, config, args.route, args.threshold)
    elif check == "thm2":
        if not args.nu:
            raise UsageError("thm2 needs --nu")
        for t in args.nu:
            nu = parse_triple(t)
            yield check, {"nu": nu}, lambda nu=nu: verify_thm2(nu, config, args.threshold)
    elif check == "prop1":
        svals = [v for t in (args.s or ["2"]) for v in parse_list(t)]
        c = parse_list(args.c)
        for s in svals:
            yield f"prop1.{args.case}", {"s": s}, lambda s=s: verify_prop1(
                args.case, s=s, n=args.n, c=c, config=config, threshold=args.threshold
            )
    elif check == "lemma3":
        lams = [v for t in (args.lam or ["2"]) for v in parse_list(t)]
        for lam in lams:
            yield check, {"lambda": lam}, lambda lam=lam: verify_lemma3(
                lam, _test_function(args.f, [lam]), config, args.threshold
            )
    elif check == "cor1":
        nu = parse_triple(args.nu[0]) if args.nu else None
        if nu is not None and (args.f or "kernel") == "kernel":
            # the kernel fixes lambda_i = 2 sigma_i
            lams = [2 * s for s in sigma_from_nu(nu)]
            for t in args.lam or []:
                if not np.allclose(parse_list(t), lams):
                    raise UsageError(f"--lambda {t} does not match 2 sigma from --nu")
            lam_sets = [lams]
        else:
            lam_sets = [parse_list(t) for t in (args.lam or ["2,2,2"])]
        for lams in lam_sets:
            f = _test_function(args.f, lams, nu)
            yield check, {"lambda": lams}, lambda lams=lams, f=f: verify_cor1(lams, f, config, args.threshold)
    elif check == "lemma2":
        lams = [v for t in (args.lam or ["2"]) for v in parse_list(t)]
        elements = [GroupElement.diag(args.t)] if args.group == "diag" else None
        for lam in lams:
            f = _test_function(args.f or "quadratic", [lam])
            yield f"lemma2.{args.functional}", {"lambda": lam}, lambda lam=lam, f=f: invariance_test(
                args.functional, lam, f, args.n_group, config, elements
            )
    elif check == "chordal":
        yield check, {"n_pairs": args.samples or 10_000}, lambda: _chordal_report(args, config)


def _chordal_report(args, config):
    t0 = time.perf_counter()
    n = args.samples or 10_000
    dev = chordal_gate(n, args.seed)
    est = Estimate(dev, 0.0, 2 * n, "closed-form")
    # rhs 0, so rel_error is the absolute deviation
    return make_report("chordal", {"n_pairs": n}, est, 0.0, t0, config, tolerance=CHORDAL_GATE_TOL)


# -- output ---------------------------------------------------------------------------


class Emitter:
    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream
        self.header_done = False

    def report(self, rep):
        if self.fmt == "json":
            self.stream.write(rep.to_json() + "\n")
        else:
            self.stream.write(reports_to_csv([rep], header=not self.header_done))
            self.header_done = True
        self.stream.flush()

    def record(self, obj: dict):
        if self.fmt == "json":
            self.stream.write(json.dumps(encode(obj), allow_nan=False) + "\n")
        else:
            self.stream.write("# " + json.dumps(encode(obj), allow_nan=False) + "\n")
        self.stream.flush()


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _domain_record(label, params, exc) -> dict:
    status = "pole" if isinstance(exc, PoleError) else "divergent"
    return {"check": label, "params": params, "status": status, "error": str(exc)}


def _run(emit, label, params, thunk) -> int:
    """Run one instance; returns the exit code it implies."""
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = thunk()
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except DomainError as exc:
        emit.record(_domain_record(label, params, exc))
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (BudgetExhaustedError, NonIntegrableError) as exc:
        emit.record({"check": label, "params": params, "status": "failed", "error": str(exc)})
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    emit.report(rep)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# -- commands ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    config = make_config(args)
    instances = list(_instances(args, config))
    codes = []
    with _output(args.out) as fh:
        emit = Emitter(args.format, fh)
        for label, params, thunk in instances:
            codes.append(_run(emit, label, params, thunk))
    return max(codes, default=EXIT_USAGE)


def _grid(args) -> list[tuple]:
    axes = []
    for k in (1, 2, 3):
        text = getattr(args, f"grid{k}") or args.grid
        if not text:
            raise UsageError("empty grid: give --grid or --grid1/--grid2/--grid3")
        axes.append(parse_list(text))
    return list(itertools.product(*axes))


def cmd_sweep(args) -> int:
    config = make_config(args)
    param = args.param or ("sigma" if args.check == "thm1" else "nu")
    if args.check == "thm2" and param != "nu":
        raise UsageError("thm2 sweeps are over nu")
    points = _grid(args)
    n_pass = n_fail = n_skip = 0
    worst = EXIT_PASS
    with _output(args.out) as fh:
        emit = Emitter(args.format, fh)
        for vals in points:
            params = {param: tuple(_simplify(v) for v in vals)}
            if args.check == "thm1":
                p = ParameterPoint.from_sigma(vals) if param == "sigma" else ParameterPoint.from_nu(vals)
                if not check_domain(p).converges:
                    n_skip += 1
                    print(f"skipped {params}: {check_domain(p).reason}", file=sys.stderr)
                    continue
                thunk = lambda p=p: verify_thm1(p, config, args.route, args.threshold)
            else:
                if min(v.real for v in vals) <= 0:
                    n_skip += 1
                    print(f"skipped {params}: Re nu <= 0", file=sys.stderr)
                    continue
                thunk = lambda vals=vals: verify_thm2(vals, config, args.threshold)
            code = _run(emit, args.check, params, thunk)
            n_pass += code == EXIT_PASS
            n_fail += code != EXIT_PASS
            worst = max(worst, code)
        emit.record({"summary": {"points": len(points), "passed": n_pass, "failed": n_fail, "skipped": n_skip}})
    print(f"sweep: {n_pass}/{len(points) - n_skip} passed, {n_skip} skipped", file=sys.stderr)
    return worst


def cmd_selftest(args) -> int:
    only = None
    if args.criteria:
        try:
            only = [int(x) for x in args.criteria.split(",")]
        except ValueError:
            raise UsageError(f"bad --criteria {args.criteria!r}") from None
        if not set(only) <= set(range(1, 10)):
            raise UsageError("criteria are numbered 1..9")
    if args.workers < 1:
        raise UsageError("workers must be >= 1")
    n_ok = n_all = 0
    with _output(args.out) as fh:
        for res in run_selftest(args.seed, args.workers, args.quick, only):
            for rep in res.reports:
                fh.write(stable_report(rep).to_json() + "\n")
            fh.write(json.dumps({"criterion": res.number, "title": res.title, "pass": res.passed, "detail": res.detail}) + "\n")
            fh.flush()
            limit = TIME_LIMITS.get(res.number)
            timing = f"{res.seconds:.1f} s" + (f" (limit {limit:.0f} s)" if limit else "")
            print(f"{res.summary_line()}  {timing}", file=sys.stderr)
            n_ok += res.passed
            n_all += 1
        fh.write(json.dumps({"selftest": {"passed": n_ok, "total": n_all}}) + "\n")
    print(f"selftest: {n_ok}/{n_all} criteria passed", file=sys.stderr)
    return EXIT_PASS if n_ok == n_all else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"verify": cmd_verify, "sweep": cmd_sweep, "selftest": cmd_selftest}
    try:
        return commands[args.command](args)
    except UsageError as exc:
        print(f"zamint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"zamint: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
