"""Command line interface.

Subcommands: minex, maxin, decide, shortcut, export-diagram, oracle,
repro-unsolvable.  Results are printed (or written) as JSON; figure output is
available wherever a diagram is built.
"""

from __future__ import annotations

import argparse
import json
import sys

from .curves import load_curve, save_curve
from .freespace import build_diagram
from .grid_graph import build_graph_g, place_grid
from .oracle import (
    OracleConfig,
    oracle_minex,
    reproduce_unsolvable_case1,
    reproduce_unsolvable_case2,
)
from .pathsearch import (
    build_shortcut_curves,
    frechet_decision,
    solve_maxin,
    solve_maxin_one_minus_delta,
    solve_minex,
)
from .steiner import build_graph_gstar


def _add_curve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--curve-a", required=True, help="curve file (json or text)")
    p.add_argument("--curve-b", required=True, help="curve file (json or text)")
    p.add_argument("--epsilon", type=float, required=True, help="leash length")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    _add_curve_args(p)
    p.add_argument("--delta", type=float, required=True,
                   help="approximation parameter")
    p.add_argument("--algorithm", choices=("grid", "steiner"),
                   default="steiner")
    p.add_argument("--out", help="write result JSON here instead of stdout")
    p.add_argument("--svg", help="render the diagram and path to this file")
    p.add_argument("--dump-graph", help="write the search graph as JSON")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _run_solver(args, maxin: bool) -> int:
    t1 = load_curve(args.curve_a)
    t2 = load_curve(args.curve_b)
    if maxin and getattr(args, "one_minus_delta", False):
        res = solve_maxin_one_minus_delta(t1, t2, args.epsilon, args.delta)
        sol = res.solution
        payload = sol.to_json_dict()
        payload["guarantee"] = {
            "relative": args.delta,
            "gamma_lower_bound": res.gamma_lb,
            "steiner_spacing": res.steiner_spacing,
            "fallback_additive": res.fallback_additive,
        }
    else:
        solve = solve_maxin if maxin else solve_minex
        sol = solve(t1, t2, args.epsilon, args.delta, args.algorithm)
        payload = sol.to_json_dict()
    if args.dump_graph:
        diag = build_diagram(t1, t2, args.epsilon)
        if args.algorithm == "grid":
            g = build_graph_g(diag, place_grid(diag, args.delta / 16.0))
        else:
            g = build_graph_gstar(diag, args.delta / 16.0)
        g.save_json(args.dump_graph)
    if args.svg:
        from .plots import export_diagram_svg

        diag = build_diagram(t1, t2, args.epsilon)
        export_diagram_svg(diag, args.svg, sol)
    _emit(payload, args.out)
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="outlierfrechet",
        description="Outlier-tolerant curve similarity: minimize ignored or "
                    "maximize matched curve length for a fixed leash length.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minex", help="minimize total ignored curve length")
    _add_solver_args(p)

    p = sub.add_parser("maxin", help="maximize total matched curve length")
    _add_solver_args(p)
    p.add_argument("--one-minus-delta", action="store_true",
                   help="multiplicative (1 - delta) guarantee instead of "
                        "the additive one")

    p = sub.add_parser("decide", help="Fréchet distance decision")
    _add_curve_args(p)
    p.add_argument("--out")

    p = sub.add_parser("shortcut", help="write curves with ignored subcurves "
                                        "replaced by straight segments")
    _add_curve_args(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--algorithm", choices=("grid", "steiner"),
                   default="steiner")
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.add_argument("--out")

    p = sub.add_parser("export-diagram", help="render the free-space diagram")
    _add_curve_args(p)
    p.add_argument("--metric", choices=("l1", "l2"), default="l2")
    p.add_argument("--out", required=True, help="figure file (.svg, .png)")

    p = sub.add_parser("oracle", help="dense-lattice reference solver")
    _add_curve_args(p)
    p.add_argument("--resolution", type=int, default=1024)
    p.add_argument("--metric", choices=("l1", "l2"), default="l2")
    p.add_argument("--out")

    p = sub.add_parser("repro-unsolvable",
                       help="reproduce the pinned hard-instance values")
    p.add_argument("--out")

    args = ap.parse_args(argv)

    if args.command == "minex":
        return _run_solver(args, maxin=False)
    if args.command == "maxin":
        return _run_solver(args, maxin=True)
    if args.command == "decide":
        t1 = load_curve(args.curve_a)
        t2 = load_curve(args.curve_b)
        within = frechet_decision(t1, t2, args.epsilon)
        _emit({"epsilon": args.epsilon, "within": within}, args.out)
        return 0
    if args.command == "shortcut":
        t1 = load_curve(args.curve_a)
        t2 = load_curve(args.curve_b)
        sol = solve_minex(t1, t2, args.epsilon, args.delta, args.algorithm)
        sc = build_shortcut_curves(t1, t2, sol, args.epsilon)
        save_curve(sc.curve_a, args.out_a)
        save_curve(sc.curve_b, args.out_b)
        _emit({
            "epsilon": args.epsilon,
            "delta": args.delta,
            "quality_B": sol.quality_B,
            "replaced_length": sc.replaced_length,
            "replaced_a": sc.replaced_a,
            "replaced_b": sc.replaced_b,
            "out_a": args.out_a,
            "out_b": args.out_b,
        }, args.out)
        return 0
    if args.command == "export-diagram":
        from .plots import export_diagram_svg

        t1 = load_curve(args.curve_a)
        t2 = load_curve(args.curve_b)
        diag = build_diagram(t1, t2, args.epsilon, args.metric)
        export_diagram_svg(diag, args.out)
        print(json.dumps({"out": args.out}))
        return 0
    if args.command == "oracle":
        t1 = load_curve(args.curve_a)
        t2 = load_curve(args.curve_b)
        value = oracle_minex(t1, t2, args.epsilon,
                             OracleConfig(args.resolution, args.metric))
        _emit({"value": value, "resolution": args.resolution}, args.out)
        return 0
    if args.command == "repro-unsolvable":
        case1 = reproduce_unsolvable_case1()
        h, length = reproduce_unsolvable_case2()
        _emit({"h": h, "length": length, "case1": case1}, args.out)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
