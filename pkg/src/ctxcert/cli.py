"""Command-line front end.

Subcommands: build, analyze, graph, ks-check, zero-one.  Scenarios are builtin
names (ceg, ceg17, ceg-lift, ceg-gen12, kcbs) or JSON files.  Reports render
as text or JSON; the text form is derived from the JSON form only, and exit
codes are a function of the JSON report alone (0 classical, 10 nonclassical
scenario with noncontextual state, 20 contextual, 1 error).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analyze import (
    CLASSICAL,
    CONTEXTUAL,
    NONCLASSICAL_SCENARIO_ONLY,
    classify_experiment,
    kcbs_value,
    zero_one_states,
)
from .catalog import BUILTINS
from .errors import CtxcertError, ScenarioFormatError
from .graphs import DEFAULT_SEARCH_BUDGET, PBAState
from .io import (
    load_cached_system,
    scenario_from_path,
    state_from_path,
    store_cached_system,
    system_to_payload,
)
from .linalg import EXACT, FLOAT
from .systems import DEFAULT_MAX_ELEMENTS, QuantumSystem, generate_system
from .vectorsets import ks_assignment_search

EXIT_BY_LABEL = {CLASSICAL: 0, NONCLASSICAL_SCENARIO_ONLY: 10, CONTEXTUAL: 20}

log = logging.getLogger(__name__)


class _Source:
    """A scenario argument resolved to builders for vectors and the system."""

    def __init__(
        self,
        token: str,
        max_elements: int,
        use_cache: bool,
        backend_override: str | None = None,
        tolerance_override: float | None = None,
    ):
        self.token = token
        self.max_elements = max_elements
        self.use_cache = use_cache
        self.path: Path | None = None
        self.builtin = BUILTINS.get(token)
        if self.builtin is None:
            self.path = Path(token)
            if not self.path.exists():
                raise ScenarioFormatError(
                    f"{token!r} is neither a builtin ({', '.join(sorted(BUILTINS))}) "
                    "nor an existing file"
                )
            self.scenario = scenario_from_path(
                self.path, backend=backend_override, tolerance=tolerance_override
            )
            if backend_override or tolerance_override is not None:
                # Overrides change the parse, so the cache beside the file
                # (keyed on content only) must not serve stale systems.
                self.use_cache = False
        elif backend_override and backend_override != self.builtin.vector_set().backend:
            raise ScenarioFormatError(
                f"builtin {token!r} is fixed to the "
                f"{self.builtin.vector_set().backend!r} backend"
            )
        elif tolerance_override is not None:
            raise ScenarioFormatError(
                f"builtin {token!r} carries its own tolerance; --tolerance applies "
                "to scenario files"
            )

    @property
    def backend(self) -> str:
        if self.builtin:
            return self.builtin.vector_set().backend
        return self.scenario.backend

    @property
    def tol(self) -> float:
        if self.builtin:
            return self.builtin.vector_set().tol
        return self.scenario.tol

    @property
    def dimension(self) -> int:
        if self.builtin:
            return self.builtin.vector_set().dim
        return self.scenario.dimension

    def vector_set(self):
        if self.builtin:
            return self.builtin.vector_set()
        return self.scenario.vector_set

    def build_system(self) -> QuantumSystem:
        if self.builtin:
            return self.builtin.system(self.max_elements)
        if self.use_cache:
            cached = load_cached_system(self.path)
            if cached is not None:
                log.info("loaded system from cache beside %s", self.path)
                return cached
        system = generate_system(self.scenario.generators, self.max_elements)
        atoms = set(system.atom_indices())
        labels = {
            name: proj
            for name, proj in self.scenario.labels.items()
            if system.contains(proj) and system.index_of(proj) in atoms
        }
        system = QuantumSystem(system.elements, system.generators, atom_labels=labels)
        if self.use_cache:
            store_cached_system(self.path, system)
        return system


def _system_summary(system: QuantumSystem) -> dict:
    graph = system.atom_graph()
    report = system.verify_epba()
    return {
        "dimension": system.dim,
        "backend": system.backend,
        "elements": len(system),
        "atoms": len(system.atom_indices()),
        "maximal_contexts": len(graph.maximal_cliques()),
        "lep": "holds" if report.lep_holds else f"violated {report.lep_violation}",
        "transitivity": (
            "holds" if report.transitivity_holds else f"violated {report.transitivity_violation}"
        ),
    }


def _base_report(args, source: _Source) -> dict:
    return {
        "tool": {"name": "ctxcert", "version": __version__},
        "scenario": {
            "source": source.token,
            "dimension": source.dimension,
            "backend": source.backend,
            "tolerance": repr(source.tol) if source.backend == FLOAT else None,
        },
        "budgets": {
            "max_elements": args.max_elements,
            "search_nodes": args.budget,
        },
        "timings": {},
    }


def _certificate_payload(cert) -> dict:
    if cert.verdict == "NONCONTEXTUAL":
        return {
            "verdict": cert.verdict,
            "weights": {str(k): str(w) for k, w in sorted(cert.weights.items())},
        }
    if cert.empty_s01:
        return {
            "verdict": cert.verdict,
            "empty_s01": True,
            "note": "no deterministic states exist, so no NCHV model exists",
        }
    ineq = cert.inequality
    return {
        "verdict": cert.verdict,
        "inequality": {
            "atom_order": list(ineq.atom_order),
            "coefficients": {v: c for v, c in ineq.coeffs.items() if c != 0},
            "bound": ineq.bound,
            "text": str(ineq),
        },
        "violation": str(cert.violation),
    }


def _state_for(system: QuantumSystem, spec) -> PBAState:
    if spec.density is not None:
        return system.state_from_density(spec.density)
    graph = system.atom_graph()
    backend = EXACT if system.backend == EXACT else FLOAT
    return PBAState(graph, spec.atom_values, backend=backend, tol=max(system.tol, 1e-9))


def cmd_build(args) -> int:
    source = _Source(args.scenario, args.max_elements, not args.no_cache, args.backend, args.tolerance)
    report = _base_report(args, source)
    t0 = time.perf_counter()
    system = source.build_system()
    report["timings"]["build_s"] = time.perf_counter() - t0
    report["system"] = _system_summary(system)
    t0 = time.perf_counter()
    s01 = zero_one_states(system, args.budget)
    report["timings"]["zero_one_s"] = time.perf_counter() - t0
    report["zero_one"] = {"count": len(s01)}
    _emit(args, report)
    return 0


def cmd_analyze(args) -> int:
    source = _Source(args.scenario, args.max_elements, not args.no_cache, args.backend, args.tolerance)
    report = _base_report(args, source)
    t0 = time.perf_counter()
    system = source.build_system()
    report["timings"]["build_s"] = time.perf_counter() - t0
    report["system"] = _system_summary(system)

    spec = state_from_path(Path(args.state), source.backend, source.tol, source.dimension)
    state = _state_for(system, spec)

    t0 = time.perf_counter()
    s01 = zero_one_states(system, args.budget)
    classification = classify_experiment(system, state, s01)
    report["timings"]["analyze_s"] = time.perf_counter() - t0

    report["zero_one"] = {"count": len(s01)}
    report["scenario_verdict"] = {
        "embeddable": classification.embedding.embeddable,
        "witness": list(classification.embedding.witness)
        if classification.embedding.witness
        else None,
        "reason": classification.embedding.reason,
    }
    report["state_verdict"] = _certificate_payload(classification.certificate)
    report["classification"] = classification.label
    graph = system.atom_graph()
    if all(f"P{i}" in graph._index for i in range(5)):
        report["kcbs"] = {"value": str(kcbs_value(state)), "bound": 2}
    _emit(args, report)
    return EXIT_BY_LABEL[classification.label]


def cmd_graph(args) -> int:
    source = _Source(args.scenario, args.max_elements, not args.no_cache, args.backend, args.tolerance)
    report = _base_report(args, source)
    t0 = time.perf_counter()
    system = source.build_system()
    report["timings"]["build_s"] = time.perf_counter() - t0
    graph = system.atom_graph()
    report["graph"] = {
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
    }
    if args.dot:
        Path(args.dot).write_text(graph.to_dot(), encoding="utf-8")
        report["graph"]["dot_path"] = args.dot
    else:
        report["graph"]["dot"] = graph.to_dot()
    _emit(args, report)
    return 0


def cmd_ks_check(args) -> int:
    source = _Source(args.scenario, args.max_elements, not args.no_cache, args.backend, args.tolerance)
    report = _base_report(args, source)
    vs = source.vector_set()
    t0 = time.perf_counter()
    result = ks_assignment_search(vs, args.budget)
    report["timings"]["search_s"] = time.perf_counter() - t0
    report["ks_check"] = {
        "vectors": len(vs),
        "complete_bases": sum(1 for b in vs.bases if b.complete),
        "deficient_bases": sum(1 for b in vs.bases if not b.complete),
        "found": result.found,
        "nodes": result.nodes,
        "assignment": result.assignment if result.found else None,
        "exhaustive": not result.found,
    }
    _emit(args, report)
    return 0


def cmd_zero_one(args) -> int:
    source = _Source(args.scenario, args.max_elements, not args.no_cache, args.backend, args.tolerance)
    report = _base_report(args, source)
    t0 = time.perf_counter()
    system = source.build_system()
    s01 = zero_one_states(system, args.budget)
    report["timings"]["total_s"] = time.perf_counter() - t0
    report["zero_one"] = {
        "count": len(s01),
        "atom_order": list(system.atom_graph().vertices),
        "states": [sorted(s.ones) for s in s01],
    }
    _emit(args, report)
    return 0


# -- rendering ----------------------------------------------------------------


def _render_text(report: dict) -> str:
    lines = [f"ctxcert {report['tool']['version']}"]
    sc = report["scenario"]
    lines.append(
        f"scenario: {sc['source']} (dimension {sc['dimension']}, backend {sc['backend']}"
        + (f", tolerance {sc['tolerance']}" if sc.get("tolerance") else "")
        + ")"
    )
    if "system" in report:
        s = report["system"]
        lines.append(
            f"system: elements: {s['elements']}, atoms: {s['atoms']}, "
            f"maximal contexts: {s['maximal_contexts']}"
        )
        lines.append(f"LEP: {s['lep']}; transitivity: {s['transitivity']}")
    if "zero_one" in report:
        lines.append(f"0-1 states: {report['zero_one']['count']}")
        if "states" in report["zero_one"]:
            for ones in report["zero_one"]["states"]:
                lines.append("  ones: " + (", ".join(ones) if ones else "(none)"))
    if "scenario_verdict" in report:
        v = report["scenario_verdict"]
        if v["embeddable"]:
            lines.append("scenario: embeddable into a Boolean algebra")
        else:
            lines.append(
                f"scenario: not embeddable (witness {tuple(v['witness'])}; {v['reason']})"
            )
    if "state_verdict" in report:
        cert = report["state_verdict"]
        lines.append(f"state: {cert['verdict']}")
        if "inequality" in cert:
            lines.append(f"  separating inequality: {cert['inequality']['text']}")
            lines.append(f"  violation: {cert['violation']}")
        if "weights" in cert:
            ws = ", ".join(f"state {k}: {w}" for k, w in cert["weights"].items())
            lines.append(f"  weights: {ws}")
        if cert.get("empty_s01"):
            lines.append(f"  {cert['note']}")
    if "kcbs" in report:
        lines.append(
            f"pentagon value: {report['kcbs']['value']} (noncontextual bound {report['kcbs']['bound']})"
        )
    if "classification" in report:
        lines.append(f"classification: {report['classification']}")
    if "ks_check" in report:
        k = report["ks_check"]
        lines.append(
            f"vectors: {k['vectors']}, complete bases: {k['complete_bases']}, "
            f"deficient: {k['deficient_bases']}"
        )
        if k["found"]:
            ones = sorted(n for n, v in k["assignment"].items() if v == 1)
            lines.append(f"assignment found ({k['nodes']} nodes); ones: {', '.join(ones)}")
        else:
            lines.append(f"no assignment (exhaustive, {k['nodes']} nodes)")
    if "graph" in report:
        g = report["graph"]
        lines.append(f"atom graph: {g['vertices']} vertices, {g['edges']} edges")
        if "dot_path" in g:
            lines.append(f"wrote DOT to {g['dot_path']}")
    return "\n".join(lines) + "\n"


def _emit(args, report: dict) -> None:
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_render_text(report), end="")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="builtin name or scenario JSON path")
    parser.add_argument(
        "--backend",
        choices=("exact", "float"),
        help="override the scenario file's backend (default: inferred)",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        help="override the float-backend tolerance of a scenario file",
    )
    parser.add_argument(
        "--max-elements",
        type=int,
        default=DEFAULT_MAX_ELEMENTS,
        help="closure element cap (default %(default)s)",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_SEARCH_BUDGET,
        help="search node cap (default %(default)s)",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument(
        "--no-cache", action="store_true", help="skip the .ctxcache beside scenario files"
    )
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxcert",
        description="certify classicality, noncontextuality and contextuality "
        "of projective measurement scenarios",
    )
    parser.add_argument("--version", action="version", version=f"ctxcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the system and print its summary")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="full pipeline: scenario + state -> classification")
    _add_common(p)
    p.add_argument("--state", required=True, help="state JSON path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graph", help="export the atom graph")
    _add_common(p)
    p.add_argument("--dot", help="write DOT to this path")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("ks-check", help="search for a deterministic assignment")
    _add_common(p)
    p.set_defaults(func=cmd_ks_check)

    p = sub.add_parser("zero-one", help="list the deterministic states")
    _add_common(p)
    p.set_defaults(func=cmd_zero_one)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CtxcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
