"""Command-line front end.

Every command builds a JSON-ready dict. ``--format json`` prints it with
sorted keys; ``--format text`` prints the same leaves as ``path = value``
lines, so both modes carry identical numbers.

Exit codes: 0 success, 1 usage, 2 bad input, 3 precondition violated,
4 a pipeline self-check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import KmsGraphError, ParseError, PreconditionError
from .graph import (
    DirectedGraph,
    disjoint_union,
    has_sink,
    is_strongly_connected,
    load_graph,
    paths_from,
    save_graph,
    strongly_connected_components,
    validate_path,
)
from .kms import (
    Beta,
    KmsPolytope,
    KmsState,
    admissible_inverse_temperatures,
    critical_inverse_temperature,
    evaluate_state,
    kms_simplex,
)
from .lbcs import constraint_graph, format_lbcs, homogenize, mermin_peres, parse_lbcs, solve_f2
from .quantum import (
    CERTIFIED,
    QuantumContext,
    coherent_partition,
    quantum_invariant_kms,
    qvt_verdict,
    strongly_connected_quantum_report,
)
from .spectral import fraction_str, spectral_report
from .symmetry import are_isomorphic, automorphism_group, invariant_kms_subpolytope, is_vertex_transitive

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_PRECONDITION, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- reports


def _graph_summary(g: DirectedGraph) -> dict:
    out_deg = g.out_degrees()
    in_deg = g.in_degrees()
    regular = len(set(out_deg)) == 1 and set(out_deg) == set(in_deg)
    return {
        "vertex_count": g.vertex_count,
        "edge_count": g.edge_count,
        "loops": sum(1 for s, t in g.edges if s == t),
        "out_degrees": out_deg,
        "in_degrees": in_deg,
        "regular_degree": out_deg[0] if regular else None,
        "has_sink": has_sink(g),
        "strongly_connected": is_strongly_connected(g),
        "strongly_connected_components": [sorted(c) for c in sorted(strongly_connected_components(g), key=min)],
    }


def _retag(state: KmsState, tol: float | None) -> KmsState:
    if tol is None or state.is_exact:
        return state
    return KmsState(state.beta, state.weights, tol)


def _retag_polytope(p: KmsPolytope, tol: float | None) -> KmsPolytope:
    if tol is None or not p.numeric:
        return p
    pts = tuple(_retag(s, tol) for s in p.extreme_points)
    return KmsPolytope(p.beta, p.eigenspace_basis, pts, p.dimension, p.numeric, p.warnings)


def _path_check(g: DirectedGraph, polytope: KmsPolytope, max_len: int) -> dict:
    """Check tau(S_mu S_mu^*) = sum over one-edge extensions, for every
    extreme point and every path of length < max_len."""
    checked = 0
    ok = True
    for state in polytope.extreme_points:
        for v in range(g.vertex_count):
            for length in range(max_len):
                for mu in paths_from(g, v, length):
                    parent = evaluate_state(g, state, mu, mu)
                    _, _, t = validate_path(g, mu)
                    kids = [mu.extend(e) for e in g.out_edges[t]]
                    total = sum((evaluate_state(g, state, w, w) for w in kids), Fraction(0) if state.is_exact else 0.0)
                    checked += 1
                    if state.is_exact:
                        ok &= total == parent
                    else:
                        ok &= abs(float(total) - float(parent)) <= (state.tolerance or 1e-9)
    return {"max_path_len": max_len, "words_checked": checked, "extension_sums_hold": bool(ok)}


def _parse_beta(text: str | None, g: DirectedGraph) -> Beta:
    if text is None or text == "critical":
        return critical_inverse_temperature(g)
    try:
        lam = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--beta expects exp(beta) as p/q or 'critical', got {text!r}") from exc
    if lam <= 0:
        raise UsageError("--beta: exp(beta) must be positive")
    return Beta.from_exp(lam)


def graph_info(g: DirectedGraph) -> dict:
    return {"graph": _graph_summary(g), "spectral": spectral_report(g).to_dict()}


def kms_analyze(g: DirectedGraph, beta_text=None, tol=None, max_len=2) -> dict:
    beta = _parse_beta(beta_text, g)
    admissible = admissible_inverse_temperatures(g)
    polytope = _retag_polytope(kms_simplex(g, beta), tol)
    return {
        "graph": _graph_summary(g),
        "spectral": spectral_report(g).to_dict(),
        "admissible": admissible.to_dict(),
        "polytope": polytope.to_dict(g),
        "path_check": _path_check(g, polytope, max_len),
        "citations": {
            "admissible": admissible.certificate,
            "polytope": "Prop 2.1(c)",
        },
    }


def aut_report(g: DirectedGraph, tol=None) -> dict:
    group = automorphism_group(g)
    doc = {
        "graph": _graph_summary(g),
        "automorphisms": group.to_dict(),
        "vertex_transitive": is_vertex_transitive(group),
    }
    if not has_sink(g):
        polytope = _retag_polytope(kms_simplex(g, critical_inverse_temperature(g)), tol)
        doc["classical_invariant"] = invariant_kms_subpolytope(group, polytope).to_dict(g)
        doc["citations"] = {"classical_invariant": "Lemma inv_1"}
    return doc


def quantum_report(g: DirectedGraph, context: QuantumContext | None = None, tol=None) -> dict:
    group = automorphism_group(g)
    verdict = qvt_verdict(g, context, group)
    cp = coherent_partition(g)
    doc = {
        "graph": _graph_summary(g),
        "verdict": verdict.to_dict(),
        "coherent_partition": {
            "vertex_cells": [list(c) for c in cp.vertex_cells],
            "pair_color_count": cp.pair_color_count,
            "rounds": cp.rounds,
        },
        "automorphism_orbits": [list(o) for o in group.orbits],
    }
    if not has_sink(g):
        polytope = _retag_polytope(kms_simplex(g, critical_inverse_temperature(g)), tol)
        doc["polytope"] = polytope.to_dict(g)
        doc["classical_invariant"] = invariant_kms_subpolytope(group, polytope).to_dict(g)
        doc["quantum_invariant"] = quantum_invariant_kms(g, polytope, verdict, group=group).to_dict(g)
    if is_strongly_connected(g):
        doc["strongly_connected"] = strongly_connected_quantum_report(g).to_dict(g)
    return doc


def lbcs_report(system, homogenized: bool) -> dict:
    if homogenized:
        system = homogenize(system)
    solution = solve_f2(system)
    g, vertices = constraint_graph(system)
    return {
        "system": format_lbcs(system).splitlines(),
        "homogenized": homogenized,
        "satisfiable": solution is not None,
        "solution": None if solution is None else list(solution),
        "graph": g.to_dict(),
        "summary": _graph_summary(g),
        "vertex_labels": [v.label() for v in vertices],
    }


def _check(cond: bool, what: str) -> None:
    if not cond:
        raise CheckFailed(f"pipeline check failed: {what}")


def pipeline_mermin_peres(tol=None, max_len=2) -> dict:
    f = mermin_peres()
    f0 = homogenize(f)
    _check(solve_f2(f) is None, "F must be classically unsatisfiable")
    _check(solve_f2(f0) is not None, "F0 must be satisfiable")
    g, _ = constraint_graph(f)
    g0, _ = constraint_graph(f0)
    aut_g = automorphism_group(g)
    aut_g0 = automorphism_group(g0)
    iso = are_isomorphic(g, g0)
    components = {}
    for name, graph, group in (("G(F)", g, aut_g), ("G(F0)", g0, aut_g0)):
        s = _graph_summary(graph)
        _check(s["vertex_count"] == 24 and s["regular_degree"] == 9, f"{name} must be 9-regular on 24 vertices")
        _check(is_vertex_transitive(group), f"{name} must be vertex transitive")
        components[name] = {"summary": s, "automorphism_order": str(group.order), "vertex_transitive": True}
    _check(iso is None, "G(F) and G(F0) must not be isomorphic")

    u = disjoint_union(g, g0)
    spec = spectral_report(u)
    _check(spec.radius.is_exact and spec.radius.exact == 9, "spectral radius must be exactly 9")
    admissible = admissible_inverse_temperatures(u)
    _check(len(admissible.betas) == 1 and admissible.betas[0].exp_exact == 9, "admissible set must be {ln 9}")
    polytope = kms_simplex(u, admissible.betas[0])
    ones = tuple([Fraction(1, 24)] * 24)
    zeros = tuple([Fraction(0)] * 24)
    extremes = {p.weights for p in polytope.extreme_points}
    _check(extremes == {ones + zeros, zeros + ones}, "KMS polytope must be the expected segment")
    group = automorphism_group(u)
    classical = invariant_kms_subpolytope(group, polytope)
    context = QuantumContext(g, g0, True, "Theorem quantum (F is quantum satisfiable)")
    verdict = qvt_verdict(u, context, group)
    _check(verdict.status == CERTIFIED, "union must be certified quantum vertex transitive")
    qinv = quantum_invariant_kms(u, polytope, verdict, group=group)
    _check(
        len(qinv.states) == 1 and qinv.states[0].weights == tuple([Fraction(1, 48)] * 48),
        "quantum-invariant set must be the uniform 1/48 state",
    )
    return {
        "system": format_lbcs(f).splitlines(),
        "satisfiable": {"F": False, "F0": True},
        "components": components,
        "isomorphic": False,
        "union": {
            "summary": _graph_summary(u),
            "spectral": spec.to_dict(),
            "admissible": admissible.to_dict(),
            "critical_beta": admissible.betas[0].to_dict(),
            "polytope": polytope.to_dict(u),
            "automorphism_order": str(group.order),
            "automorphism_orbits": [list(o) for o in group.orbits],
            "classical_invariant": classical.to_dict(u),
            "verdict": verdict.to_dict(),
            "quantum_invariant": qinv.to_dict(u),
            "path_check": _path_check(u, polytope, max_len),
        },
        "unique_quantum_invariant_weights": [fraction_str(x) for x in qinv.states[0].weights],
        "checks_passed": True,
    }


# ---------------------------------------------------------------- output


def _flatten(node, prefix=""):
    if isinstance(node, dict):
        if not node:
            yield prefix, {}
        for k in sorted(node):
            yield from _flatten(node[k], f"{prefix}.{k}" if prefix else k)
    elif isinstance(node, list):
        if not node:
            yield prefix, []
        for i, x in enumerate(node):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, node


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return "".join(f"{path} = {json.dumps(value)}\n" for path, value in _flatten(doc))


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--tolerance", type=float, default=None, help="tolerance attached to numeric states")
    common.add_argument("--max-path-len", type=int, default=2, help="longest path word in the extension-sum check")

    parser = _Parser(prog="kmsgraph", description="KMS states of graph algebras and their symmetries")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    graph = sub.add_parser("graph").add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = graph.add_parser("info", parents=[common])
    info.add_argument("file")

    kms = sub.add_parser("kms").add_subparsers(dest="action", required=True, parser_class=_Parser)
    analyze = kms.add_parser("analyze", parents=[common])
    analyze.add_argument("file")
    analyze.add_argument("--beta", default=None, help="exp(beta) as p/q, or 'critical' (default)")

    aut = sub.add_parser("aut", parents=[common])
    aut.add_argument("file")

    quantum = sub.add_parser("quantum", parents=[common])
    quantum.add_argument("file")
    quantum.add_argument(
        "--assert-qiso", metavar="FILE2", default=None,
        help="analyse FILE u FILE2, taking FILE and FILE2 to be quantum isomorphic",
    )

    lbcs = sub.add_parser("lbcs").add_subparsers(dest="action", required=True, parser_class=_Parser)
    build = lbcs.add_parser("build", parents=[common])
    src = build.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?")
    src.add_argument("--mermin-peres", action="store_true")
    build.add_argument("--homogenize", action="store_true")
    build.add_argument("-o", "--output", default=None, help="also write the graph JSON here")

    pipe = sub.add_parser("pipeline").add_subparsers(dest="action", required=True, parser_class=_Parser)
    pipe.add_parser("mermin-peres", parents=[common])
    return parser


def _dispatch(args) -> dict:
    tol = args.tolerance
    if tol is not None and not tol > 0:
        raise UsageError("--tolerance must be positive")
    if args.max_path_len < 0:
        raise UsageError("--max-path-len must be non-negative")
    if args.group == "graph":
        doc = graph_info(load_graph(args.file))
    elif args.group == "kms":
        doc = kms_analyze(load_graph(args.file), args.beta, tol, args.max_path_len)
    elif args.group == "aut":
        doc = aut_report(load_graph(args.file), tol)
    elif args.group == "quantum":
        g = load_graph(args.file)
        context = None
        if args.assert_qiso:
            g2 = load_graph(args.assert_qiso)
            context = QuantumContext(g, g2, True, f"asserted on the command line ({args.assert_qiso})")
            g = disjoint_union(g, g2)
        doc = quantum_report(g, context, tol)
    elif args.group == "lbcs":
        if args.mermin_peres:
            system = mermin_peres()
        else:
            with open(args.file, encoding="utf-8") as fh:
                system = parse_lbcs(fh.read())
        doc = lbcs_report(system, args.homogenize)
        if args.output:
            save_graph(DirectedGraph.from_dict(doc["graph"]), args.output)
    else:
        doc = pipeline_mermin_peres(tol, args.max_path_len)
    name = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
    return {"schema_version": SCHEMA_VERSION, "command": name, **doc}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        doc = _dispatch(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CheckFailed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CHECK
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KmsGraphError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(doc, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
