"""Command-line front end: derive, scan, blur, curve, emit, verify-all.

Exit codes: 0 every verdict passed, 1 a verification failed, 2 usage error,
3 internal or solver error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable, TextIO

import numpy as np

from . import __version__, backend, reference, scanner, solver
from .bits import DomainError
from .kernels import Arithmetic, builtin_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

ROUNDING = {
    Arithmetic.BINARY32: "binary32, round-to-nearest-even after every operation",
    Arithmetic.X87: "per-statement extended precision, binary32 on assignment",
}


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    metadata: dict
    payload: dict
    verdicts: list[reference.Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"command": self.command, "metadata": self.metadata, "payload": self.payload,
                "verdicts": [v.to_dict() for v in self.verdicts], "passed": self.passed}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["command"], d["metadata"], d["payload"],
                   [reference.Verdict(**v) for v in d["verdicts"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def _metadata(command: str, config: dict, arithmetic: Arithmetic | None = None) -> dict:
    md = {"tool": "fastrsqrt", "version": __version__, "command": command,
          "config": config, "backend": backend.name()}
    if arithmetic is not None:
        md["rounding"] = ROUNDING[arithmetic]
    return md


def _fmt(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _print_verdicts(verdicts: list[reference.Verdict], out: TextIO) -> None:
    if not verdicts:
        return
    w = max(len(v.name) for v in verdicts)
    for v in verdicts:
        tag = "PASS" if v.passed else "FAIL"
        out.write(f"{tag}  {v.name:<{w}}  derived={_fmt(v.derived)}  expected={_fmt(v.expected)}"
                  f"  delta={v.delta:.3g}  tol={v.tol:.3g}\n")


# derive ------------------------------------------------------------------------

DERIVE_GROUPS = ("seed", "classic", "modified", "joint", "scheme1", "scheme2")


def cmd_derive(args, out: TextIO) -> Report:
    groups = DERIVE_GROUPS if args.scheme == "all" else (args.scheme,)
    if args.scheme in ("all", "modified"):
        groups = groups + ("interval",)
    payload, verdicts = {}, []
    for g in groups:
        payload[g] = reference.derived_values(g)
        vs = reference.check_group(g)
        verdicts += vs
        out.write(f"[{g}]\n")
        w = max(len(v.name) for v in vs)
        for v in vs:
            d = v.derived if isinstance(v.derived, str) else f"{v.derived:.12g}"
            e = v.expected if isinstance(v.expected, str) else f"{v.expected:.12g}"
            out.write(f"  {v.name:<{w}}  {d:>20}  published {e:>20}  delta {v.delta:+.3g}"
                      f"  {'ok' if v.passed else 'MISMATCH'}\n")
    return Report("derive", _metadata("derive", {"scheme": args.scheme}), payload, verdicts)


# scan --------------------------------------------------------------------------

SCAN_HEADER = ["exponent", "count", "min", "argmin_bits_hex", "max", "argmax_bits_hex", "mean"]


def _stats_row(label, s: scanner.ErrorStats) -> list[str]:
    return [str(label), str(s.count), repr(s.min), f"0x{s.argmin:08X}", repr(s.max),
            f"0x{s.argmax:08X}", repr(s.mean)]


def scan_verdicts(scheme: str, result: scanner.ScanResult, claim=None,
                  tol: float | None = None) -> list[reference.Verdict]:
    cfg = result.config
    k = cfg.iterations
    out = []
    g = result.global_stats
    if claim is not None:
        t = 0.0 if tol is None else tol
        return [reference.range_verdict("scan.claim", (g.min, g.max), tuple(claim), t)]
    if cfg.mode != "exhaustive":
        return out
    t = reference.ENVELOPE_TOL.get(k) if tol is None else tol
    interior = [e for e in cfg.exponents if e != scanner.SUBNORMAL_EDGE]
    if (scheme, k) in reference.ENVELOPES and interior:
        out.append(reference.range_verdict(f"{scheme}.iter{k}.global", (g.min, g.max),
                                           reference.ENVELOPES[scheme, k], t))
    if (scheme, k) in reference.EDGE_ENVELOPES and scanner.SUBNORMAL_EDGE in cfg.exponents:
        s = result.per_exponent[scanner.SUBNORMAL_EDGE]
        out.append(reference.range_verdict(f"{scheme}.iter{k}.exponent-126", (s.min, s.max),
                                           reference.EDGE_ENVELOPES[scheme, k], t))
    worst = max(-result.all_stats.min, result.all_stats.max)
    if scheme == "scheme2" and k == 2:
        out.append(reference.bound_verdict("scheme2.iter2.max_abs", worst, 7.0e-7, upper=True))
    if scheme == "classic" and k == 2:
        out.append(reference.bound_verdict("classic.iter2.max_abs", worst, 4.4e-6, upper=False))
    return out


def _scan_config(args) -> scanner.ScanConfig:
    if args.full:
        exps = scanner.FULL_EXPONENTS
    elif args.exponents:
        lo, hi = args.exponents
        if hi < lo:
            raise UsageError("empty exponent range")
        exps = tuple(range(lo, hi + 1))
    else:
        exps = scanner.DEFAULT_EXPONENTS
    try:
        return scanner.ScanConfig(exps, args.iter, args.sample, args.seed, args.arithmetic)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_scan(args, out: TextIO, files: dict) -> Report:
    cfg = _scan_config(args)
    spec = builtin_spec(args.scheme)
    result = scanner.scan(spec, cfg, workers=args.workers)
    rows = {str(e): s.to_dict() for e, s in result.per_exponent.items()}
    payload = {"scheme": args.scheme, "per_exponent": rows,
               "global": result.global_stats.to_dict(), "all": result.all_stats.to_dict()}
    verdicts = scan_verdicts(args.scheme, result, args.claim, args.tol)
    if "csv" in files:
        w = csv.writer(files["csv"], lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for e, s in result.per_exponent.items():
            w.writerow(_stats_row(e, s))
        w.writerow(_stats_row("global", result.global_stats))
    out.write(f"{args.scheme}, {cfg.iterations} iteration(s), {cfg.mode}, "
              f"{cfg.arithmetic.value} arithmetic\n")
    out.write(f"{'exponent':>9} {'count':>9} {'min':>13} {'max':>13} {'mean':>13}\n")
    for label, s in [*result.per_exponent.items(), ("global", result.global_stats)]:
        out.write(f"{label!s:>9} {s.count:>9} {s.min:>13.6g} {s.max:>13.6g} {s.mean:>13.6g}\n")
    config = cfg.to_dict() | {"scheme": args.scheme}
    return Report("scan", _metadata("scan", config, cfg.arithmetic), payload, verdicts)


# blur --------------------------------------------------------------------------

def blur_verdicts(scheme: str, b: scanner.BlurStats) -> list[reference.Verdict]:
    if scheme not in reference.BLUR:
        return []
    mean, lo, hi = reference.BLUR[scheme]
    return [reference.value_verdict(f"{scheme}.blur.mean", b.mean, mean, reference.BLUR_MEAN_TOL),
            reference.range_verdict(f"{scheme}.blur.range", (b.min, b.max), (lo, hi),
                                    reference.BLUR_RANGE_TOL)]


def cmd_blur(args, out: TextIO, files: dict) -> Report:
    model = solver.SOLVERS[args.scheme]().curve(2)
    b = scanner.blur(builtin_spec(args.scheme), model, arithmetic=args.arithmetic)
    if "csv" in files:
        w = csv.writer(files["csv"], lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "min", "max"])
        for s in b.bins:
            w.writerow([repr(s.lo), repr(s.hi), repr(s.min), repr(s.max)])
    out.write(f"{args.scheme} blur over [1,4), {Arithmetic(args.arithmetic).value} arithmetic: "
              f"mean {b.mean:.6g}, range [{b.min:.6g}, {b.max:.6g}]\n")
    cfg = {"scheme": args.scheme, "arithmetic": Arithmetic(args.arithmetic).value}
    return Report("blur", _metadata("blur", cfg, Arithmetic(args.arithmetic)),
                  {"scheme": args.scheme, "blur": b.to_dict()}, blur_verdicts(args.scheme, b))


# curve -------------------------------------------------------------------------

def difference_curve(x: np.ndarray) -> np.ndarray:
    """First-correction error of scheme 1 minus that of scheme 2, as a fraction
    of the scheme-1 maximum."""
    s1, s2 = solver.solve_scheme1(), solver.solve_scheme2()
    return (s1.curve(1)(x) - s2.curve(1)(x)) / s1.max_err_iter1


def cmd_curve(args, out: TextIO, files: dict) -> Report:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    x = np.linspace(1.0, 4.0, args.points, endpoint=False)
    if args.difference:
        y = difference_curve(x)
        label = "difference"
    else:
        if args.scheme is None:
            raise UsageError("a scheme is required unless --difference is given")
        k = 0 if args.scheme == "seed" else args.iter
        y = solver.SOLVERS[args.scheme]().curve(k)(x)
        label = f"{args.scheme}.iter{k}"
    y = np.asarray(y, dtype=np.float64)
    sink = files.get("csv")
    if sink is None:
        sink = out
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["x", "error"])
    for xi, yi in zip(x.tolist(), y.tolist()):
        w.writerow([repr(xi), repr(yi)])
    i, j = int(np.argmin(y)), int(np.argmax(y))
    summary = {"curve": label, "points": args.points, "min": float(y[i]),
               "argmin": float(x[i]), "max": float(y[j]), "argmax": float(x[j])}
    if "csv" in files:
        out.write(f"{label}: {args.points} points, min {y[i]:.6g} at x={x[i]:.6g}, "
                  f"max {y[j]:.6g} at x={x[j]:.6g}\n")
    cfg = {"scheme": args.scheme, "iteration": args.iter, "points": args.points,
           "difference": args.difference}
    return Report("curve", _metadata("curve", cfg), summary)


# emit --------------------------------------------------------------------------

def _literal(real: float, f: np.float32) -> str:
    """Eight significant digits of the unrounded constant, as the listings
    print them; nine if eight would land on a different binary32 value."""
    for digits in (8, 9):
        text = f"{real:.{digits}g}"
        if np.float32(text) == f:
            return text
    return repr(float(f))


def _bits(f: np.float32) -> str:
    return f"0x{int(np.float32(f).view(np.uint32)):08X}"


def emit_entries(scheme: str) -> tuple[solver.MinimaxSolution, list[dict]]:
    sol = solver.SOLVERS[scheme]()
    real = solver.code_constants_real(sol)
    spec = solver.emit_code_constants(sol)
    rows = []
    for name, f in spec.constants().items():
        rows.append({"name": name, "literal": _literal(real[name], f),
                     "binary32": np.format_float_positional(f, unique=True, trim="-"),
                     "bits": _bits(f), "exact": str(Decimal(float(f))), "real": real[name]})
    return sol, rows


def render_c(scheme: str, sol: solver.MinimaxSolution, rows: list[dict]) -> str:
    c = {r["name"]: r for r in rows}

    def lit(name):
        r = c[name]
        return f"{r['literal']}f"

    def note(name):
        r = c[name]
        return f"/* binary32 {r['binary32']}, {r['bits']} */"

    lines = [
        f"/* {scheme}: t = {sol.t:.12g} */",
        "#include <stdint.h>",
        "#include <string.h>",
        "",
        f"static float inv_sqrt_{scheme}(float x)",
        "{",
        f"    float halfnumber = {lit('half_factor')} * x;  {note('half_factor')}",
        "    uint32_t i;",
        "    float y;",
        "    memcpy(&i, &x, sizeof i);",
        f"    i = {sol.R} - (i >> 1);",
        "    memcpy(&y, &i, sizeof y);",
    ]
    for k in (1, 2):
        mul = "" if c[f"c_mul{k}"]["bits"] == _bits(np.float32(1.0)) else f"{lit(f'c_mul{k}')} * "
        lines.append(f"    y = y * ({lit(f'c_add{k}')} - {mul}halfnumber * y * y);"
                     f"  {note(f'c_add{k}')}")
        if mul:
            lines.append(f"    /* multiplier {k}: {note(f'c_mul{k}')[3:-3]} */")
    lines += ["    return y;", "}"]
    return "\n".join(lines) + "\n"


def render_table(scheme: str, sol: solver.MinimaxSolution, rows: list[dict]) -> str:
    lines = [f"{scheme}  magic {sol.R}  t {sol.t:.12g}",
             f"{'name':<12} {'literal':<12} {'binary32':<12} {'bits':<10} exact binary32 value"]
    for r in rows:
        lines.append(f"{r['name']:<12} {r['literal']:<12} {r['binary32']:<12} {r['bits']:<10} "
                     f"{r['exact']}")
    return "\n".join(lines) + "\n"


def cmd_emit(args, out: TextIO, files: dict) -> Report:
    sol, rows = emit_entries(args.scheme)
    render = render_c if args.format == "c-like" else render_table
    out.write(render(args.scheme, sol, rows))
    verdicts = (reference.check_code_constants(args.scheme)
                if args.scheme in reference.CODE_CONSTANTS else [])
    payload = {"scheme": args.scheme, "magic": str(sol.R), "t": sol.t, "constants": rows}
    return Report("emit", _metadata("emit", {"scheme": args.scheme, "format": args.format}),
                  payload, verdicts)


# verify-all --------------------------------------------------------------------

def cmd_verify_all(args, out: TextIO, files: dict) -> Report:
    arith = Arithmetic(args.arithmetic)
    verdicts: list[reference.Verdict] = []
    payload: dict = {}
    for g in reference.GROUPS:
        payload[g] = reference.derived_values(g)
        verdicts += reference.check_group(g)
    for s in reference.CODE_CONSTANTS:
        verdicts += reference.check_code_constants(s)
    conf = scanner.seed_conformance(solver.solve_classic_optimum().R)
    payload["seed_conformance"] = conf._asdict()
    verdicts += [reference.bound_verdict("seed_model.max_abs", conf.max_abs, 2.0 ** -25, True),
                 reference.bound_verdict("seed_model.max_rel", conf.max_rel, 2.0 ** -24, True)]
    exps = scanner.FULL_EXPONENTS if args.full else scanner.DEFAULT_EXPONENTS
    payload["scans"] = {}
    for scheme, k in [("scheme1", 2), ("scheme2", 2), ("scheme1", 1), ("scheme2", 1),
                      ("classic", 2)]:
        cfg = scanner.ScanConfig(exps, k, arithmetic=arith)
        res = scanner.scan(builtin_spec(scheme), cfg, workers=args.workers)
        payload["scans"][f"{scheme}.iter{k}"] = {"global": res.global_stats.to_dict(),
                                                 "all": res.all_stats.to_dict()}
        verdicts += scan_verdicts(scheme, res)
    payload["blur"] = {}
    for scheme in reference.BLUR:
        b = scanner.blur(builtin_spec(scheme), solver.SOLVERS[scheme]().curve(2), arithmetic=arith)
        payload["blur"][scheme] = {k: v for k, v in b.to_dict().items() if k != "bins"}
        verdicts += blur_verdicts(scheme, b)
    _print_verdicts(verdicts, out)
    n_fail = sum(not v.passed for v in verdicts)
    out.write(f"{len(verdicts) - n_fail}/{len(verdicts)} checks passed\n")
    cfg = {"full": args.full, "arithmetic": arith.value}
    return Report("verify-all", _metadata("verify-all", cfg, arith), payload, verdicts)


# parser ------------------------------------------------------------------------

def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {text!r}") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fastrsqrt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--backend", choices=("core", "fallback"),
                   help="kernel backend (default: compiled core when available)")
    sub = p.add_subparsers(dest="command", required=True)

    def outputs(sp, csv_help=None):
        sp.add_argument("--json", metavar="PATH", help="write the JSON report here")
        if csv_help:
            sp.add_argument("--csv", metavar="PATH", help=csv_help)

    def arithmetic(sp, default="binary32"):
        sp.add_argument("--arithmetic", choices=[a.value for a in Arithmetic], default=default,
                        help=f"kernel rounding model (default: {default})")

    d = sub.add_parser("derive", help="solve for the optimal constants and compare")
    d.add_argument("scheme", nargs="?", default="all", choices=("all",) + DERIVE_GROUPS)
    outputs(d)

    s = sub.add_parser("scan", help="error envelope of a built-in kernel over binary32 inputs")
    s.add_argument("scheme", choices=("classic", "scheme1", "scheme2"))
    s.add_argument("--iter", type=int, default=2, choices=(0, 1, 2))
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exponents", type=int, nargs=2, metavar=("LO", "HI"),
                   help="inclusive unbiased exponent range")
    g.add_argument("--full", action="store_true", help="every exponent in [-126, 127]")
    s.add_argument("--sample", type=int, metavar="N", help="N random inputs per exponent")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--claim", type=_pair, metavar="MIN,MAX",
                   help="check the global envelope against this claim instead "
                        "(write --claim=MIN,MAX when MIN is negative)")
    s.add_argument("--tol", type=float, help="tolerance for envelope checks")
    arithmetic(s)
    outputs(s, "per-exponent statistics")

    b = sub.add_parser("blur", help="deviation of a kernel from its analytic model on [1,4)")
    b.add_argument("scheme", choices=("classic", "scheme1", "scheme2"))
    arithmetic(b)
    outputs(b, "per-bin envelopes")

    c = sub.add_parser("curve", help="sample an analytic error curve on [1,4)")
    c.add_argument("scheme", nargs="?",
                   choices=("seed", "classic", "modified", "scheme1", "scheme2"))
    c.add_argument("--iter", type=int, default=1, choices=(1, 2))
    c.add_argument("--points", type=int, default=1001)
    c.add_argument("--difference", action="store_true",
                   help="scheme-1 minus scheme-2 first correction, over the scheme-1 maximum")
    outputs(c, "x,error samples (default: standard output)")

    e = sub.add_parser("emit", help="print kernel constants derived by the solver")
    e.add_argument("scheme", choices=("classic", "scheme1", "scheme2"))
    e.add_argument("--format", choices=("c-like", "table"), default="c-like")
    outputs(e)

    v = sub.add_parser("verify-all", help="every reproduction check in one run")
    v.add_argument("--full", action="store_true", help="scan every exponent")
    v.add_argument("--workers", type=int, default=1)
    arithmetic(v, default="x87")
    outputs(v)
    return p


COMMANDS: dict[str, Callable] = {
    "derive": lambda a, o, f: cmd_derive(a, o),
    "scan": cmd_scan,
    "blur": cmd_blur,
    "curve": cmd_curve,
    "emit": cmd_emit,
    "verify-all": cmd_verify_all,
}


def main(argv: list[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err) if stderr else contextlib.nullcontext():
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        err.write("fastrsqrt: --workers must be positive\n")
        return EXIT_USAGE
    previous = backend.name()
    try:
        if args.backend:
            backend.use(args.backend)
        with contextlib.ExitStack() as stack:
            files = {}
            try:
                for key in ("csv", "json"):
                    path = getattr(args, key, None)
                    if path:
                        files[key] = stack.enter_context(
                            open(path, "w", encoding="utf-8", newline=""))
            except OSError as exc:
                raise UsageError(f"cannot write {exc.filename}: {exc.strerror}") from exc
            report = COMMANDS[args.command](args, out, files)
            if "json" in files:
                files["json"].write(report.to_json())
        if report.verdicts and args.command not in ("derive", "verify-all"):
            _print_verdicts(report.verdicts, out)
        return EXIT_OK if report.passed else EXIT_FAIL
    except UsageError as exc:
        err.write(f"fastrsqrt: {exc}\n")
        return EXIT_USAGE
    except solver.BracketError as exc:
        err.write(f"fastrsqrt: solver failed: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        err.write(f"fastrsqrt: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    finally:
        backend.use(previous)


if __name__ == "__main__":
    sys.exit(main())
