"""Command-line front end.

Subcommands: lift, project, eliminate, closure, hilbert, monoid, check,
eval.  Exit codes: 0 success, 2 parse error, 3 resource cap or validation
escalation exceeded, 4 oracle disagreement found by check.  Output is
deterministic; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .closure import (ClosureOptions, Cone, FeasibilityFunctions,
                      hilbert_generating_set, feasibility_functions)
from .errors import (CapExceededError, MicrepError, SystemFileError,
                     TreeSyntaxError, ValidationError)
from .fm import SymbolicSystem, eliminate_all
from .lift import lift_to_milp
from .oracle import Box, check_projection_equality
from .project import eliminate_variables, monoid_representation, project_to_mic
from .rationals import format_rational, parse_rational
from .sysfile import format_mic, format_milp, read_system
from .trees import AffineForm, Leaf, evaluate, format_tree, parse_tree
from .varpool import intern_var, var_name

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_DISAGREE = 4


def _closure_options(args) -> ClosureOptions:
    return ClosureOptions(
        rounds="auto" if args.rounds == "auto" else int(args.rounds),
        max_rounds=args.max_rounds,
        subset_cap=2 ** args.max_subset,
        max_support=args.max_support,
        grid_radius=args.grid_radius,
        grid_denominators=tuple(args.grid_denominators),
        max_grid_points=args.max_grid_points,
        witness_bound=args.witness_box,
        simplify=args.simplify,
    )


def _add_closure_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--rounds", default="auto",
                        help="closure rounds: a number or 'auto' (default)")
    parser.add_argument("--max-rounds", type=int, default=3,
                        help="auto-mode escalation limit")
    parser.add_argument("--max-subset", type=int, default=12, metavar="M",
                        help="allow up to 2^M aggregation subsets")
    parser.add_argument("--max-support", type=int, default=None,
                        help="cap aggregation subset size (default: matrix rank)")
    parser.add_argument("--grid-radius", type=int, default=3,
                        help="validation grid radius per parameter")
    parser.add_argument("--grid-denominators", type=int, nargs="+",
                        default=[1, 2], help="validation grid denominators")
    parser.add_argument("--max-grid-points", type=int, default=4000,
                        help="validation grid size cap (it is sampled beyond)")
    parser.add_argument("--witness-box", type=int, default=50,
                        help="integer witness bound for the oracle")
    parser.add_argument("--simplify", action="store_true",
                        help="keep only an oracle-covering subset of outputs")


def _result_header(ff: FeasibilityFunctions) -> list[str]:
    header = [f"rounds used: {ff.rounds_used}"]
    if ff.grid_points:
        sampled = " (sampled)" if ff.grid_sampled else ""
        header.append(f"validated on {ff.grid_points} grid points{sampled}, "
                      f"integer witness bound {ff.witness_bound}")
    return header


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_lift(args) -> int:
    mic = read_system(args.input).to_mic()
    milp = lift_to_milp(mic)
    aux = len(milp.integer_aux_vars) - len(mic.integer_vars)
    _write(format_milp(milp, [f"lifted; auxiliary integer variables: {aux}"]),
           args.out)
    return EXIT_OK


def cmd_project(args) -> int:
    milp = read_system(args.input).to_milp()
    mic = project_to_mic(milp, options=_closure_options(args))
    _write(format_mic(mic), args.out)
    return EXIT_OK


def cmd_eliminate(args) -> int:
    mic = read_system(args.input).to_mic()
    if not args.var and not args.order:
        raise SystemFileError("eliminate needs --var or --order", args.input)
    names = args.order.split(",") if args.order else [args.var]
    order = [intern_var(n.strip()) for n in names]
    result = eliminate_variables(mic, order, options=_closure_options(args))
    _write(format_mic(result), args.out)
    return EXIT_OK


def cmd_closure(args) -> int:
    matrix, z_ids, params = read_system(args.input).to_closure_input()
    rounds = args.rounds
    if rounds == "auto":
        raise SystemFileError("closure dumps need an explicit --rounds count",
                              args.input)
    from .closure import _closure_round  # symbolic state transformer
    options = _closure_options(args)
    state = [(tuple(row), Leaf(AffineForm.variable(p)))
             for row, p in zip(matrix, params)]
    for _ in range(int(rounds)):
        state = _closure_round(state, options)
    lines = [f"# symbolic system after {rounds} closure round(s)",
             "# columns: " + " ".join(var_name(v) for v in z_ids)]
    for vec, tree in state:
        coeffs = " ".join(format_rational(c) for c in vec)
        lines.append(f"row {coeffs} >= {format_tree(tree)}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_hilbert(args) -> int:
    matrix = read_system(args.input).to_matrix()
    gens = hilbert_generating_set(Cone(tuple(tuple(r) for r in matrix)),
                                  minimal=args.minimal_hilbert)
    lines = [" ".join(str(c) for c in vec) for vec in gens.vectors]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_monoid(args) -> int:
    matrix = read_system(args.input).to_matrix()
    ff = monoid_representation(matrix, options=_closure_options(args))
    lines = [f"# {h}" for h in _result_header(ff)]
    lines += [f"chv {format_tree(f)} <= 0" for f in ff.functions]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    lhs = read_system(args.lhs).to_mic()
    if args.against_lift:
        rhs = lift_to_milp(lhs)
    elif args.rhs:
        parsed = read_system(args.rhs)
        rhs = parsed.to_mic() if parsed.format == "mic" else parsed.to_milp()
    else:
        raise SystemFileError("check needs a second system or --against-lift",
                              args.lhs)
    lo, hi = (parse_rational(p) for p in args.box.split(","))
    box = Box.make({v: (lo, hi) for v in lhs.variables},
                   {v: args.denominator for v in lhs.continuous_vars})
    aux_box = None
    if args.aux_box:
        alo, ahi = (parse_rational(p) for p in args.aux_box.split(","))
        extra = [v for v in rhs.variables if v not in lhs.variables]
        aux_box = Box.make({v: (alo, ahi) for v in extra})
    report = check_projection_equality(lhs, rhs, box, aux_box=aux_box,
                                       bound=args.witness_box)
    sys.stdout.write(report.format() + "\n")
    return EXIT_OK if report.equal else EXIT_DISAGREE


def cmd_eval(args) -> int:
    tree = parse_tree(args.tree)
    point = {}
    for piece in args.at.split(","):
        name, sep, value = piece.partition("=")
        if not sep:
            raise SystemFileError(f"bad assignment {piece!r}", "--at")
        point[intern_var(name.strip())] = parse_rational(value.strip())
    sys.stdout.write(format_rational(evaluate(tree, point)) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="micrep",
        description="Exact conversions between mixed-integer Chvatal systems "
                    "and MILP projections, with brute-force certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", help="MIC file -> MILP file")
    p.add_argument("input")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("project", help="MILP file -> MIC file over targets")
    p.add_argument("input")
    p.add_argument("-o", "--out")
    _add_closure_flags(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("eliminate", help="project out MIC variables in order")
    p.add_argument("input")
    p.add_argument("--var", help="single variable to eliminate")
    p.add_argument("--order", help="comma-separated elimination order")
    p.add_argument("-o", "--out")
    _add_closure_flags(p)
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("closure", help="dump the symbolic system after k rounds")
    p.add_argument("input")
    p.add_argument("-o", "--out")
    _add_closure_flags(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("hilbert", help="generating set of the cone of the rows")
    p.add_argument("input")
    p.add_argument("--minimal-hilbert", action="store_true",
                   help="reduce to the minimal basis (pointed cones)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("monoid", help="Chvatal description of {Ax : x in Z+^n}")
    p.add_argument("input")
    p.add_argument("-o", "--out")
    _add_closure_flags(p)
    p.set_defaults(func=cmd_monoid)

    p = sub.add_parser("check", help="oracle projection-equality report")
    p.add_argument("lhs")
    p.add_argument("rhs", nargs="?")
    p.add_argument("--against-lift", action="store_true",
                   help="compare against the lift of the first system")
    p.add_argument("--box", default="-6,6", help="lo,hi bounds for lhs variables")
    p.add_argument("--denominator", type=int, default=2,
                   help="grid denominator for continuous variables")
    p.add_argument("--aux-box", help="lo,hi bounds for rhs-only variables")
    p.add_argument("--witness-box", type=int, default=50)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="evaluate a Chvatal tree at a point")
    p.add_argument("tree")
    p.add_argument("--at", required=True,
                   help="comma-separated name=rational assignments")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CapExceededError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (MicrepError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
