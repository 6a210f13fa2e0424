"""Command line front end.

Exit codes: 0 ok, 2 bad input, 3 an exact identity failed, 4 over budget
(partial output is still written).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .documents import DocumentError, GraphDocument, load_document, parse_rational, rational_str
from .exchange import DEFAULT_BUDGET, BudgetExceeded, build_exchange_graph, verify_thm_conn
from .multigraph import NotConnectedError
from .symanzik import phi_det, phi_enum, psi_det, psi_enum
from .variation import (
    DEFAULT_TRIPLE_BUDGET,
    ConditionViolated,
    IdentityViolation,
    PerturbationSpec,
    Weights,
    boundedness_sweep,
    build_triple_graph,
    projection_iso_check,
    q_balance_check,
    sample_perturbation,
    weight_identities,
)

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_BUDGET = 0, 2, 3, 4


class InputError(ValueError):
    pass


class MathFailure(RuntimeError):
    pass


def parse_grid(text: str) -> tuple[Fraction, ...]:
    """``"1e1..1e6:decade"``, ``"1..64:x2"`` or an explicit ``"10,100,1000"``."""
    text = text.strip()
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            lo_s, hi_s = span.split("..")
            lo, hi = Fraction(lo_s), Fraction(hi_s)
            step = step or "decade"
            factor = Fraction(10) if step == "decade" else Fraction(step.removeprefix("x"))
            if lo <= 0 or factor <= 1 or hi < lo:
                raise ValueError
            grid, t = [], lo
            while t <= hi:
                grid.append(t)
                t *= factor
            return tuple(grid)
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad grid specification {text!r}") from None


def parse_point(text: str, m: int) -> tuple[Fraction, ...]:
    point = tuple(parse_rational(x, "--y") for x in text.split(","))
    if len(point) != m:
        raise InputError(f"--y has {len(point)} entries, graph has {m} edges")
    return point


def _write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


def _dump(path: Path, data) -> Path:
    return _write(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _load(args) -> GraphDocument:
    if not args.input:
        raise InputError("--input is required")
    doc = load_document(args.input)
    if not doc.graph.is_connected():
        raise InputError("graph not connected")
    return doc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_symanzik(args) -> int:
    doc = _load(args)
    g, mom = doc.graph, doc.momenta
    if args.phi and mom is None:
        raise InputError("second polynomial requested but the document has no momenta")
    points = list(doc.y) + [parse_point(t, g.m) for t in args.y or []]
    psi = psi_enum(g)
    report = {"edges": list(doc.edge_ids), "psi": psi.to_json(), "evaluations": []}
    phi = None
    if mom is not None:
        phi = phi_enum(g, mom)
        report["phi"] = phi.to_json()
    agree = True
    for y in points:
        if any(v <= 0 for v in y):
            raise InputError("edge weights must be positive")
        row = {"y": [rational_str(v) for v in y], "psi": rational_str(psi.evaluate(y))}
        row["psi_agrees"] = psi_det(g, y) == psi.evaluate(y)
        agree &= row["psi_agrees"]
        if phi is not None:
            row["phi"] = rational_str(phi.evaluate(y))
            row["phi_agrees"] = phi_det(g, mom, y) == phi.evaluate(y)
            agree &= row["phi_agrees"]
        report["evaluations"].append(row)
    report["agreement"] = agree
    _dump(_out_dir(args) / "symanzik.json", report)
    if not agree:
        raise MathFailure("determinant and enumeration forms disagree")
    return EXIT_OK


def cmd_exchange(args) -> int:
    doc = _load(args)
    out = _out_dir(args)
    try:
        h = build_exchange_graph(doc.graph, args.budget_vertices)
    except BudgetExceeded as exc:
        _dump(out / "exchange.json", {"error": str(exc), "counts": exc.counts, "complete": False})
        raise
    report = verify_thm_conn(doc.graph, exchange=h)
    data = report.to_json() | {
        "edge_ids": list(doc.edge_ids),
        "component_sizes": [len(c) for c in h.components] if h.n_vertices else [],
        "complete": True,
    }
    _dump(out / "exchange.json", data)
    _write(out / "exchange.dot", h.to_dot())
    if args.plots and h.n_vertices:
        from .plotting import plot_component_sizes

        plot_component_sizes(data["component_sizes"], out)
    if not report.passed:
        raise MathFailure(report.counterexample or "component classification failed")
    return EXIT_OK


def _perturbation_spec(args, doc: GraphDocument) -> PerturbationSpec:
    g = doc.graph
    bound = parse_rational(args.bound, "--bound")
    base = doc.base or tuple(Fraction(1) for _ in range(g.m))
    if doc.perturbation is not None:
        a = doc.perturbation
    else:
        if args.seed is None:
            raise InputError("--seed is required when the perturbation is sampled")
        a = sample_perturbation(g.m, bound, random.Random(args.seed))
    try:
        return PerturbationSpec(base, a, bound, parse_grid(args.grid))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_variation(args) -> int:
    doc = _load(args)
    if doc.momenta is None:
        raise InputError("variation needs momenta")
    g, mom = doc.graph, doc.momenta
    try:
        spec = _perturbation_spec(args, doc)
        sweep = boundedness_sweep(g, mom, spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = _out_dir(args)
    _write(out / "sweep.csv", sweep.to_csv())
    _write(out / "sweep.json", sweep.dumps())
    if args.plots:
        from .plotting import plot_sweep

        plot_sweep(sweep, out)

    summary: dict = {
        "seed": args.seed,
        "bound": rational_str(spec.bound),
        "base": [rational_str(v) for v in spec.base],
        "perturbation": spec.A.to_strings(),
        "sweep_passed": sweep.passed,
        "singular_at": [rational_str(t) for t in sweep.singular_at],
        "complete": False,
    }
    try:
        tg = build_triple_graph(g, mom, args.budget_vertices)
    except BudgetExceeded as exc:
        summary["error"] = str(exc)
        _dump(out / "variation.json", summary)
        raise
    checked_t = sorted({spec.grid[0], spec.grid[-1]})
    identities = []
    for t in checked_t:
        try:
            r = weight_identities(g, mom, spec, t)
            identities.append({"t": rational_str(t), "side1": True, "side2": True,
                               "g2_f1": rational_str(r.g2_f1), "g1_f2": rational_str(r.g1_f2)})
        except IdentityViolation as exc:
            identities.append({"t": rational_str(t), "error": str(exc)})
    balance = q_balance_check(tg, Weights(g, mom, spec, spec.grid[-1]))
    projections = [projection_iso_check(tg, c) for c in tg.special_free_components()]
    summary.update({
        "triple_graph": {
            "vertices": len(tg),
            "components": tg.n_components,
            "special_vertices": sum(tg.special),
            "special_free_components": balance.special_free,
        },
        "weight_identities": identities,
        "q_balance": {
            "balanced": balance.balanced,
            "special_free": balance.special_free,
            "max_zeta_residual_over_f1_squared": rational_str(balance.max_zeta_residual or 0),
        },
        "projection_isomorphisms": sum(p.passed for p in projections),
        "complete": True,
    })
    exact_ok = all("error" not in r for r in identities) and balance.passed and all(p.passed for p in projections)
    summary["exact_identities_hold"] = exact_ok
    _dump(out / "variation.json", summary)
    if not exact_ok:
        raise MathFailure("an exact identity failed; see variation.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import VerifyConfig, run_all

    cfg = VerifyConfig(
        seed=0 if args.seed is None else args.seed,
        max_n=args.max_n,
        max_m=args.max_m,
        samples=args.samples,
        budget=args.budget_vertices,
        triple_budget=args.triple_budget,
        points=args.points,
    )
    progress = (lambda line: print(line, file=sys.stderr)) if args.verbose else None
    summary = run_all(cfg, progress=progress)
    out = _out_dir(args)
    _write(out / "summary.json", summary.dumps())
    _write(out / "summary.txt", summary.table())
    if not summary.passed:
        raise MathFailure("some exact properties failed; see summary.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symratio", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="graph document (JSON)")
        p.add_argument("--out", default="out", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("symanzik", help="both polynomials, evaluations and agreement flags")
    common(p)
    p.add_argument("--y", action="append", help="comma-separated edge weights; repeatable")
    p.add_argument("--phi", action="store_true", help="fail if the second polynomial cannot be computed")
    p.set_defaults(func=cmd_symanzik)

    p = sub.add_parser("exchange", help="exchange graph components, profiles and DOT export")
    common(p)
    p.add_argument("--budget-vertices", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--no-plots", dest="plots", action="store_false")
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("variation", help="bounded-perturbation sweep and triple-graph identities")
    common(p)
    p.add_argument("--bound", default="1", help="entry bound for the perturbation (rational)")
    p.add_argument("--grid", default="1e1..1e6:decade")
    p.add_argument("--budget-vertices", type=int, default=DEFAULT_TRIPLE_BUDGET)
    p.add_argument("--no-plots", dest="plots", action="store_false")
    p.set_defaults(func=cmd_variation)

    p = sub.add_parser("verify", help="run every property suite over the generated corpus")
    common(p, needs_input=False)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--max-m", type=int, default=10)
    p.add_argument("--samples", type=int, default=200, help="seeded graphs per vertex count above 5")
    p.add_argument("--budget-vertices", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--triple-budget", type=int, default=5_000)
    p.add_argument("--points", type=int, default=50, help="random weight vectors per graph")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DocumentError, NotConnectedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MathFailure, IdentityViolation, ConditionViolated) as exc:
        print(f"math failure: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
