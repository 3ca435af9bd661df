"""Command-line front end: ``mopiep solve | experiment | backward | condition``.

Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 breakdown,
4 elimination (LU or chase) failure, 5 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .diagnostics import backward_errors, conditioning_estimate
from .errors import MopError, ValidationError
from .experiments import EXPERIMENTS, format_number, parse_ns, run_experiment
from .model import DiscreteSystem, Hahn, Kravchuk, Synthetic, _encode, build_system
from .solvers import ALGORITHMS, solve

EXIT_IO = 1
FAMILIES = ("kravchuk", "hahn", "equidistant", "chebyshev")


def _add_input(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input (a system JSON file or a family)")
    g.add_argument("input", nargs="?", help="system JSON with nodes, weights1, weights2")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--n", type=int, help="number of nodes for --family")
    g.add_argument("--p1", default="2/5", help="Kravchuk parameter (fractions allowed)")
    g.add_argument("--p2", default="1/2")
    g.add_argument("--beta1", default="1", help="Hahn parameters")
    g.add_argument("--beta2", default="3/2")
    g.add_argument("--gamma", default="1")
    g.add_argument("--weight-seed", type=int, default=0, help="seed for synthetic weights")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a number: {text!r}") from None


def _load_system(args) -> DiscreteSystem:
    if args.input and args.family:
        raise ValidationError("give either an input file or --family, not both")
    if args.input:
        return DiscreteSystem.from_json(Path(args.input).read_text())
    if not args.family:
        raise ValidationError("an input file or --family is required")
    if args.n is None:
        raise ValidationError("--family needs --n")
    if args.family == "kravchuk":
        fam = Kravchuk(_fraction(args.p1), _fraction(args.p2))
    elif args.family == "hahn":
        fam = Hahn(_fraction(args.beta1), _fraction(args.beta2), _fraction(args.gamma))
    else:
        fam = Synthetic(args.family, args.weight_seed)
    return build_system(fam, args.n)


def _precision(args):
    # "auto" keeps the input's own kind: rational files and Kravchuk/Hahn
    # families stay exact, doubles stay double
    return None if args.precision == "auto" else args.precision


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _matrix_json(A) -> list:
    return [_encode(A[i, :]) for i in range(A.shape[0])]


# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    system = _load_system(args)
    sol = solve(system, args.alg, kind=_precision(args))
    out = json.loads(sol.H.to_json())
    if args.bases:
        out["W"] = _matrix_json(sol.W)
        out["V"] = _matrix_json(sol.V)
    _write(json.dumps(out) + "\n", args.output)
    return 0


def cmd_experiment(args) -> int:
    ns = parse_ns(args.ns) if args.ns else None
    opts = dict(runs=args.runs, seed=args.seed, cond_trials=args.trials, timing=args.timing)
    if args.name == "fig5_scaling":
        if args.output in (None, "-"):
            raise ValidationError("fig5_scaling writes two files; give --output STEM.csv")
        stem = Path(args.output)
        for part in ("equidistant", "chebyshev"):
            rep = run_experiment(f"fig5_{part}", ns, **opts)
            stem.with_name(f"{stem.stem}_{part}{stem.suffix or '.csv'}").write_text(rep.to_csv())
        return 0
    _write(run_experiment(args.name, ns, **opts).to_csv(), args.output)
    return 0


def cmd_backward(args) -> int:
    system = _load_system(args)
    sol = solve(system, args.alg, kind=_precision(args))
    errs = backward_errors(system, sol.H)
    lines = ["quantity,value"] + [f"{k},{format_number(v)}" for k, v in errs.items()]
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_condition(args) -> int:
    system = _load_system(args)
    value = conditioning_estimate(system, args.eps, args.trials, args.seed)
    _write(format_number(value) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mopiep", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the recurrence matrix H")
    _add_input(p)
    p.add_argument("--alg", choices=ALGORITHMS, default="krylreorth_full")
    p.add_argument("--precision", choices=("auto", "double", "extended", "rational"), default="auto")
    p.add_argument("--bases", action="store_true", help="also write W and V")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="write an error table as CSV")
    p.add_argument("name", choices=sorted(set(EXPERIMENTS) | {"fig5_scaling"}))
    p.add_argument("--ns", help="N values: LO:HI[:STEP] or a comma list")
    p.add_argument("--runs", type=int, help="weight draws to average (synthetic families)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5, help="trials of the conditioning estimate")
    p.add_argument("--timing", action="store_true",
                   help="fill runtime_seconds (output is then no longer reproducible)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("backward", help="relative backward errors of a solver")
    _add_input(p)
    p.add_argument("--alg", choices=ALGORITHMS, default="krylreorth_full")
    p.add_argument("--precision", choices=("auto", "double", "extended", "rational"), default="auto")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_backward)

    p = sub.add_parser("condition", help="perturbation estimate of the conditioning")
    _add_input(p)
    p.add_argument("--eps", type=float, default=2.0 ** -52)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_condition)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MopError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc, OSError) else ValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
