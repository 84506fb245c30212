"""Command-line front end.

Every command writes one report (JSON by default, CSV where tabular) to
``--output`` or stdout. Failures print a JSON error object and exit with:

    0 ok, 2 bad arguments, 3 infeasible q1 / not PSD,
    4 enumeration cap exceeded, 5 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import balanced_ensemble, boolean_functions, filtering, povm_synthesis, simulate, walsh_basis
from .boolean_functions import BooleanFunction, EnumerationCapError
from .vectors import NotPSDError

SCHEMA = 1

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_NOT_PSD = 3
EXIT_CAP = 4
EXIT_VALIDATION = 5


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(report: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(_clean({"schema": SCHEMA, **report}), indent=2, sort_keys=True) + "\n"


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _parse_sweep(spec: str) -> np.ndarray:
    try:
        name, rng = spec.split("=", 1)
        a, b, steps = rng.split(":")
        if name != "eta1":
            raise ValueError
        grid = np.linspace(float(a), float(b), int(steps))
    except ValueError:
        raise UsageError(f"bad sweep {spec!r}; expected eta1=a:b:steps") from None
    if len(grid) < 1 or grid.min() < 0 or grid.max() > 1:
        raise UsageError("sweep values must lie in [0, 1]")
    return grid


def _function_arg(args) -> BooleanFunction:
    if args.table is not None:
        return BooleanFunction.from_bits(args.table)
    if args.hex is not None:
        if args.n is None:
            raise UsageError("--hex needs --n")
        return BooleanFunction.from_hex(args.hex, args.n)
    if args.n is not None and args.k is not None:
        return boolean_functions.make_wk(args.n, args.k, args.polarity)
    raise UsageError("give --table, --hex with --n, or --n with --k")


# commands ------------------------------------------------------------------

def cmd_classify(args):
    f = _function_arg(args)
    return {"command": "classify", **f.to_json()}


def cmd_encode(args):
    f = _function_arg(args)
    return {"command": "encode", "n": f.n, "table": f.to_bits(),
            "dim": f.dim, "state": boolean_functions.encode(f).tolist()}


def cmd_basis(args):
    _need(args, "n")
    if args.format == "csv":
        return walsh_basis.export_csv(args.n)
    return {"command": "basis", **walsh_basis.export_json(args.n)}


def _analyze_row(n, k, eta1):
    rep = filtering.choose_strategy(filtering.basis_problem(n, k, eta1))
    closed = filtering.wk_closed_forms(n, k, eta1)
    return rep, closed


def cmd_analyze(args):
    _need(args, "n", "k")
    grid = _parse_sweep(args.sweep) if args.sweep else np.array([args.eta1])
    rows = []
    for eta1 in grid:
        rep, closed = _analyze_row(args.n, args.k, float(eta1))
        rows.append((float(eta1), closed.Q1, closed.Q2, closed.Qpovm if closed.in_window else None,
                     rep.chosen.value, rep.Q, rep.q1_opt))
    if args.format == "csv":
        return _rows_csv(["eta1", "Q1", "Q2", "Qpovm", "chosen", "Q", "q1_opt"], rows)
    if not args.sweep:
        return {"command": "analyze", "n": args.n, "k": args.k, "eta1": float(args.eta1),
                "Q1": rep.Q1, "Q2": rep.Q2, "Qpovm": rep.Qpovm, "chosen": rep.chosen.value,
                "Q": rep.Q, "q1_opt": rep.q1_opt, "S": rep.S,
                "par_norm_sq": rep.par_norm_sq, "closed_form": closed.to_json()}
    keys = ["eta1", "Q1", "Q2", "Qpovm", "chosen", "Q", "q1_opt"]
    return {"command": "analyze", "n": args.n, "k": args.k,
            "rows": [dict(zip(keys, r)) for r in rows]}


def cmd_thresholds(args):
    _need(args, "n", "k")
    grid, labels = filtering.regime_scan(args.n, args.k, args.points)
    switches = filtering.regime_switches(grid, labels)
    return {"command": "thresholds", "n": args.n, "k": args.k,
            "zeta1": filtering.zeta1(args.n, args.k), "zeta2": filtering.zeta2(args.n, args.k),
            "grid_points": args.points, "grid_step": float(grid[1] - grid[0]),
            "switches": [{"eta1": float(e), "from": a.value, "to": b.value} for e, a, b in switches]}


def _synth_problem(args):
    if args.example:
        problem = povm_synthesis.worked_example_problem()
        q1 = args.q1
        if q1 is None:
            raise UsageError("--example needs --q1")
        return problem, q1
    _need(args, "n", "k")
    problem = filtering.basis_problem(args.n, args.k, args.eta1)
    q1 = args.q1 if args.q1 is not None else filtering.choose_strategy(problem).q1_opt
    return problem, q1


def cmd_synth(args):
    problem, q1 = _synth_problem(args)
    d = povm_synthesis.synthesize_dilation(problem, q1)
    val = povm_synthesis.validate_dilation(d, problem)
    report = {"command": "synth", "dilation": d.to_json(), "validation": val.to_json()}
    if not val.passed:
        raise ValidationFailure("dilation fails validation", report)
    return report


def cmd_simulate(args):
    problem, q1 = _synth_problem(args)
    d = povm_synthesis.synthesize_dilation(problem, q1)
    summary = simulate.run_trials(problem, d, args.trials, args.seed, workers=args.workers)
    if args.format == "csv":
        return summary.tallies_csv()
    cmp = simulate.summarize_vs_analytic(summary, summary.analytic_Q)
    report = {"command": "simulate", "q1": q1, "summary": summary.to_json(),
              "comparison": cmp.to_json()}
    if summary.misidentifications or not cmp.passed:
        raise ValidationFailure("simulation disagrees with the analytic prediction", report)
    return report


def cmd_ensemble(args):
    _need(args, "n", "k")
    summary = balanced_ensemble.summarize(args.n, args.k, args.eta1,
                                          brute_force=not args.no_bruteforce, cap=args.cap)
    if args.format == "csv":
        return summary.audit_csv()
    return {"command": "ensemble", **summary.to_json()}


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


COMMANDS = {
    "classify": cmd_classify,
    "encode": cmd_encode,
    "basis": cmd_basis,
    "analyze": cmd_analyze,
    "thresholds": cmd_thresholds,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="statefilter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--eta1", type=float, default=None)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if name in ("classify", "encode"):
            p.add_argument("--table")
            p.add_argument("--hex")
            p.add_argument("--polarity", type=int, choices=[0, 1], default=0)
        if name == "analyze":
            p.add_argument("--sweep", help="eta1=a:b:steps")
        if name == "thresholds":
            p.add_argument("--points", type=int, default=10_000)
        if name in ("synth", "simulate"):
            p.add_argument("--q1", type=float)
            p.add_argument("--example", action="store_true",
                           help="use the four-state k=2 worked example")
        if name == "simulate":
            p.add_argument("--trials", type=int, default=100_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
        if name == "ensemble":
            p.add_argument("--cap", type=int, default=boolean_functions.ENUMERATION_CAP)
            p.add_argument("--no-bruteforce", action="store_true")
    return parser


def _defaults(args):
    if getattr(args, "eta1", None) is None:
        if args.command in ("synth", "simulate", "analyze", "ensemble") and args.n is not None:
            args.eta1 = 1.0 / 2 ** args.n
    if args.eta1 is not None and not 0.0 <= args.eta1 <= 1.0:
        raise UsageError("--eta1 must lie in [0, 1]")


def _emit(text: str, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(code: int, kind: str, message: str, extra=None) -> int:
    obj = {"error": {"code": code, "kind": kind, "message": message}}
    if extra:
        obj["report"] = extra
    sys.stderr.write(dumps(obj))
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        _defaults(args)
        out = COMMANDS[args.command](args)
    except UsageError as e:
        return _error(EXIT_BAD_ARGS, "bad-args", str(e))
    except NotPSDError as e:
        return _error(EXIT_NOT_PSD, "not-psd", str(e), {"min_eigenvalue": e.min_eigenvalue})
    except EnumerationCapError as e:
        return _error(EXIT_CAP, "cap-exceeded", str(e))
    except ValidationFailure as e:
        if getattr(args, "output", None):
            _emit(dumps(e.report), args.output)
        return _error(EXIT_VALIDATION, "validation-failure", str(e), e.report)
    except (ValueError, IndexError) as e:
        return _error(EXIT_BAD_ARGS, "bad-args", str(e))
    _emit(out if isinstance(out, str) else dumps(out), args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
