"""Exclusivity graphs of atoms, their states, and 0-1 state enumeration.

A finite exclusive structure is determined by this graph, so scenario-level
questions (state spaces, deterministic assignments, isomorphism) are answered
here on plain vertex/edge data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import MissingVertex, NotAGraphState, SearchBudgetExceeded
from .linalg import DEFAULT_TOL, EXACT, FLOAT

DEFAULT_SEARCH_BUDGET = 1_000_000


class ExclusivityGraph:
    """Finite simple graph on named atoms; maximal cliques are the contexts."""

    __slots__ = ("vertices", "edges", "_adj", "_cliques", "_index")

    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple[str, str]]):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        self._index = {v: i for i, v in enumerate(self.vertices)}
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u!r}")
            if u not in self._index or v not in self._index:
                raise MissingVertex(f"edge ({u!r}, {v!r}) references unknown vertex")
            norm.add((u, v) if u <= v else (v, u))
        self.edges = frozenset(norm)
        self._adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            self._adj[u].add(v)
            self._adj[v].add(u)
        self._cliques = self._maximal_cliques()

    def neighbors(self, v: str) -> frozenset[str]:
        return frozenset(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def has_edge(self, u: str, v: str) -> bool:
        return ((u, v) if u <= v else (v, u)) in self.edges

    def _maximal_cliques(self) -> tuple[tuple[str, ...], ...]:
        # Bron-Kerbosch with pivoting; output is sorted for determinism.
        adj = {self._index[v]: {self._index[w] for w in self._adj[v]} for v in self.vertices}
        found: list[tuple[int, ...]] = []

        def expand(r: set[int], p: set[int], x: set[int]) -> None:
            if not p and not x:
                found.append(tuple(sorted(r)))
                return
            pivot = max(p | x, key=lambda u: len(adj[u] & p))
            for v in sorted(p - adj[pivot]):
                expand(r | {v}, p & adj[v], x & adj[v])
                p.remove(v)
                x.add(v)

        expand(set(), set(range(len(self.vertices))), set())
        named = [tuple(sorted(self.vertices[i] for i in c)) for c in found]
        return tuple(sorted(named))

    def maximal_cliques(self) -> tuple[tuple[str, ...], ...]:
        return self._cliques

    def relabel(self, mapping: Mapping[str, str]) -> "ExclusivityGraph":
        verts = [mapping[v] for v in self.vertices]
        edges = [(mapping[u], mapping[v]) for u, v in self.edges]
        return ExclusivityGraph(verts, edges)

    def to_dot(self, name: str = "atoms") -> str:
        """Graphviz DOT text: vertices then edges, both in lexicographic order."""
        lines = [f"graph {name} {{"]
        for v in sorted(self.vertices):
            lines.append(f'  "{v}";')
        for u, v in sorted(self.edges):
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExclusivityGraph)
            and set(self.vertices) == set(other.vertices)
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.edges))

    def __repr__(self) -> str:
        return f"ExclusivityGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class PBAState:
    """Probability assignment to atoms with unit mass on every maximal clique.

    ``range_checked=False`` skips the [0, 1] bound (clique sums stay enforced);
    it exists for rationalized float states whose dependent coordinates may
    carry boundary noise.
    """

    graph: ExclusivityGraph
    values: Mapping[str, object]
    backend: str = EXACT
    tol: float = DEFAULT_TOL
    range_checked: bool = True

    def __post_init__(self):
        for v in self.graph.vertices:
            if v not in self.values:
                raise MissingVertex(f"no value for vertex {v!r}")
            if self.range_checked:
                val = self.values[v]
                slack = 0 if self.backend == EXACT else self.tol
                if val < -slack or val > 1 + slack:
                    raise NotAGraphState(f"value {val} at {v!r} outside [0, 1]")
        if not is_state(self.graph, self.values, backend=self.backend, tol=self.tol):
            raise NotAGraphState("clique sums differ from 1")

    def value(self, vertex: str):
        try:
            return self.values[vertex]
        except KeyError:
            raise MissingVertex(vertex) from None

    def as_tuple(self) -> tuple:
        return tuple(self.values[v] for v in self.graph.vertices)


def is_state(
    graph: ExclusivityGraph,
    values: Mapping[str, object],
    backend: str = EXACT,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Check the defining clique-normalization of a graph state."""
    for v in graph.vertices:
        if v not in values:
            raise MissingVertex(f"no value for vertex {v!r}")
    for clique in graph.maximal_cliques():
        total = sum(values[v] for v in clique)
        if backend == FLOAT:
            if abs(total - 1.0) >= tol * max(1, len(clique)):
                return False
        elif total != 1:
            return False
    return True


@dataclass(frozen=True)
class ZeroOneState:
    """Deterministic state: exactly one atom fires in every maximal clique."""

    graph: ExclusivityGraph
    ones: frozenset[str]

    def __post_init__(self):
        unknown = self.ones - set(self.graph.vertices)
        if unknown:
            raise MissingVertex(f"unknown vertices {sorted(unknown)}")
        for u, v in self.graph.edges:
            if u in self.ones and v in self.ones:
                raise NotAGraphState(f"adjacent vertices {u!r}, {v!r} both set to 1")
        for clique in self.graph.maximal_cliques():
            if sum(1 for v in clique if v in self.ones) != 1:
                raise NotAGraphState(f"clique {clique} does not contain exactly one 1")

    def value(self, vertex: str) -> int:
        if vertex not in self.graph._index:
            raise MissingVertex(vertex)
        return 1 if vertex in self.ones else 0

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(1 if v in self.ones else 0 for v in self.graph.vertices)

    def as_state(self, backend: str = EXACT, tol: float = DEFAULT_TOL) -> PBAState:
        one = Fraction(1) if backend == EXACT else 1.0
        zero = Fraction(0) if backend == EXACT else 0.0
        vals = {v: (one if v in self.ones else zero) for v in self.graph.vertices}
        return PBAState(self.graph, vals, backend=backend, tol=tol)


def enumerate_zero_one_states(
    graph: ExclusivityGraph, budget: int = DEFAULT_SEARCH_BUDGET
) -> list[ZeroOneState]:
    """All 0-1 states by backtracking with clique propagation.

    An empty result is meaningful: it is the defining property of a
    Kochen-Specker scenario.  Output is sorted by the value tuple taken in
    vertex order.
    """
    verts = list(graph.vertices)
    n = len(verts)
    if n == 0:
        return []
    cliques = [tuple(graph._index[v] for v in c) for c in graph.maximal_cliques()]
    member = [[] for _ in range(n)]
    for ci, c in enumerate(cliques):
        for v in c:
            member[v].append(ci)
    adj = [sorted(graph._index[w] for w in graph._adj[v]) for v in verts]
    order = sorted(range(n), key=lambda i: (-len(adj[i]), verts[i]))

    assign: list[int] = [-1] * n
    nodes = 0
    results: list[frozenset[str]] = []

    def propagate(trail: list[int]) -> bool:
        # Fixpoint: a 1 zeroes its neighbors; a clique with all but one vertex
        # at 0 forces the survivor to 1; an all-zero clique is contradictory.
        changed = True
        while changed:
            changed = False
            for ci, c in enumerate(cliques):
                ones = sum(1 for v in c if assign[v] == 1)
                if ones > 1:
                    return False
                unassigned = [v for v in c if assign[v] == -1]
                if ones == 1:
                    for v in unassigned:
                        assign[v] = 0
                        trail.append(v)
                        changed = True
                elif not unassigned:
                    return False
                elif len(unassigned) == 1:
                    v = unassigned[0]
                    assign[v] = 1
                    trail.append(v)
                    for w in adj[v]:
                        if assign[w] == 1:
                            return False
                        if assign[w] == -1:
                            assign[w] = 0
                            trail.append(w)
                    changed = True
        return True

    def undo(trail: list[int]) -> None:
        for v in trail:
            assign[v] = -1

    def backtrack(pos: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(nodes, budget)
        while pos < n and assign[order[pos]] != -1:
            pos += 1
        if pos == n:
            ones = frozenset(verts[i] for i in range(n) if assign[i] == 1)
            results.append(ones)
            return
        v = order[pos]
        for value in (0, 1):
            trail = [v]
            assign[v] = value
            ok = True
            if value == 1:
                for w in adj[v]:
                    if assign[w] == 1:
                        ok = False
                        break
                    if assign[w] == -1:
                        assign[w] = 0
                        trail.append(w)
            if ok:
                ok = propagate(trail)
            if ok:
                backtrack(pos + 1)
            undo(trail)

    backtrack(0)
    states = [ZeroOneState(graph, ones) for ones in set(results)]
    states.sort(key=lambda s: s.as_tuple())
    return states


def _refine_colors(n: int, adj: list[set[int]], init: list[int]) -> list[int]:
    colors = init[:]
    while True:
        sig = [(colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(n)]
        table = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [table[s] for s in sig]
        if new == colors:
            return colors
        colors = new


def graphs_isomorphic(
    g1: ExclusivityGraph, g2: ExclusivityGraph, budget: int = DEFAULT_SEARCH_BUDGET
) -> tuple[bool, dict[str, str] | None]:
    """Backtracking isomorphism test; returns a vertex bijection when true."""
    n = len(g1.vertices)
    if n != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False, None
    a1 = [set(g1._index[w] for w in g1._adj[v]) for v in g1.vertices]
    a2 = [set(g2._index[w] for w in g2._adj[v]) for v in g2.vertices]
    if sorted(map(len, a1)) != sorted(map(len, a2)):
        return False, None
    sizes1 = sorted(len(c) for c in g1.maximal_cliques())
    sizes2 = sorted(len(c) for c in g2.maximal_cliques())
    if sizes1 != sizes2:
        return False, None

    c1 = _refine_colors(n, a1, [len(s) for s in a1])
    c2 = _refine_colors(n, a2, [len(s) for s in a2])
    if sorted(c1) != sorted(c2):
        return False, None

    candidates = [sorted(u for u in range(n) if c2[u] == c1[v]) for v in range(n)]
    order = sorted(range(n), key=lambda v: (len(candidates[v]), -len(a1[v])))
    mapping = [-1] * n
    used = [False] * n
    nodes = 0

    def dfs(pos: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(nodes, budget)
        if pos == n:
            return True
        v = order[pos]
        for u in candidates[v]:
            if used[u]:
                continue
            ok = True
            for w in a1[v]:
                mw = mapping[w]
                if mw != -1 and mw not in a2[u]:
                    ok = False
                    break
            if ok:
                for w in range(n):
                    mw = mapping[w]
                    if mw != -1 and mw in a2[u] and w not in a1[v]:
                        ok = False
                        break
            if not ok:
                continue
            mapping[v] = u
            used[u] = True
            if dfs(pos + 1):
                return True
            mapping[v] = -1
            used[u] = False
        return False

    if dfs(0):
        witness = {g1.vertices[v]: g2.vertices[mapping[v]] for v in range(n)}
        return True, witness
    return False, None
