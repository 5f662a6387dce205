"""Named vector families with declared orthonormal bases, and the search for
deterministic 0/1 assignments on them.

A base removed of one vector stays in the structure as a deficient context: its
orthogonality constraints survive but the one-outcome-per-basis rule no longer
applies to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    DimensionMismatch,
    OrthogonalityCheckFailed,
    SearchBudgetExceeded,
    UnknownElement,
)
from .graphs import DEFAULT_SEARCH_BUDGET, ExclusivityGraph
from .linalg import DEFAULT_TOL, EXACT, FLOAT, Projector, projector_from_vector


@dataclass(frozen=True)
class Basis:
    """Indices of mutually orthogonal vectors; complete means it spans."""

    indices: tuple[int, ...]
    complete: bool = True


def _inner_exact(u: Sequence, v: Sequence) -> tuple[Fraction, Fraction]:
    re = Fraction(0)
    im = Fraction(0)
    for x, y in zip(u, v):
        if isinstance(x, tuple):
            a, b = Fraction(x[0]), Fraction(x[1])
        else:
            a, b = Fraction(x), Fraction(0)
        if isinstance(y, tuple):
            c, d = Fraction(y[0]), Fraction(y[1])
        else:
            c, d = Fraction(y), Fraction(0)
        # conj(u) . v
        re += a * c + b * d
        im += a * d - b * c
    return re, im


def _inner_float(u: Sequence, v: Sequence) -> complex:
    return sum(complex(x).conjugate() * complex(y) for x, y in zip(u, v))


class VectorSet:
    """Finite list of named vectors plus declared (possibly deficient) bases."""

    def __init__(
        self,
        dim: int,
        names: Sequence[str],
        vectors: Sequence[Sequence],
        bases: Sequence[Basis] = (),
        backend: str = EXACT,
        tol: float = DEFAULT_TOL,
    ):
        if len(names) != len(vectors):
            raise DimensionMismatch("names and vectors differ in length")
        if len(set(names)) != len(names):
            raise UnknownElement("duplicate vector names")
        for name, vec in zip(names, vectors):
            if len(vec) != dim:
                raise DimensionMismatch(f"vector {name!r} is not {dim}-dimensional")
        self.dim = dim
        self.backend = backend
        self.tol = tol
        self.names = tuple(names)
        self.vectors = tuple(tuple(v) for v in vectors)
        self.bases = tuple(bases)
        self._index = {n: i for i, n in enumerate(self.names)}
        self._orth = self._orthogonality_pairs()
        self._validate_bases()

    def _is_orthogonal(self, i: int, j: int) -> bool:
        if self.backend == EXACT:
            re, im = _inner_exact(self.vectors[i], self.vectors[j])
            return re == 0 and im == 0
        return abs(_inner_float(self.vectors[i], self.vectors[j])) < self.tol

    def _orthogonality_pairs(self) -> frozenset[tuple[int, int]]:
        pairs = set()
        for i, j in combinations(range(len(self.vectors)), 2):
            if self._is_orthogonal(i, j):
                pairs.add((i, j))
        return frozenset(pairs)

    def _validate_bases(self) -> None:
        for basis in self.bases:
            idx = basis.indices
            if basis.complete and len(idx) != self.dim:
                raise OrthogonalityCheckFailed(
                    f"complete basis {idx} has {len(idx)} vectors, expected {self.dim}"
                )
            for i, j in combinations(sorted(idx), 2):
                if (i, j) not in self._orth:
                    raise OrthogonalityCheckFailed(
                        f"vectors {self.names[i]!r} and {self.names[j]!r} in a declared "
                        "basis are not orthogonal"
                    )

    def __len__(self) -> int:
        return len(self.vectors)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElement(f"no vector named {name!r}") from None

    def orthogonal_names(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            tuple(sorted((self.names[i], self.names[j]))) for i, j in self._orth
        )

    def orthogonality_graph(self) -> ExclusivityGraph:
        edges = [(self.names[i], self.names[j]) for i, j in self._orth]
        return ExclusivityGraph(self.names, edges)

    def projector(self, name: str) -> Projector:
        i = self.index(name)
        return projector_from_vector(self.vectors[i], self.backend, self.tol)

    def projectors(self) -> list[Projector]:
        return [
            projector_from_vector(v, self.backend, self.tol) for v in self.vectors
        ]

    def remove(self, name: str) -> "VectorSet":
        """Drop one vector; bases that contained it become deficient contexts."""
        gone = self.index(name)
        keep = [i for i in range(len(self.vectors)) if i != gone]
        remap = {old: new for new, old in enumerate(keep)}
        bases = []
        for basis in self.bases:
            if gone in basis.indices:
                trimmed = tuple(remap[i] for i in basis.indices if i != gone)
                bases.append(Basis(trimmed, complete=False))
            else:
                bases.append(Basis(tuple(remap[i] for i in basis.indices), basis.complete))
        return VectorSet(
            self.dim,
            [self.names[i] for i in keep],
            [self.vectors[i] for i in keep],
            bases,
            self.backend,
            self.tol,
        )

    def __repr__(self) -> str:
        return f"VectorSet({len(self.vectors)} vectors, dim={self.dim}, {len(self.bases)} bases)"


@dataclass(frozen=True)
class KSSearchResult:
    """Assignment found, or a certified exhaustion of the search tree."""

    assignment: dict[str, int] | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.assignment is not None


def ks_assignment_search(
    vs: VectorSet,
    budget: int = DEFAULT_SEARCH_BUDGET,
    forced: dict[str, int] | None = None,
) -> KSSearchResult:
    """Search for a 0/1 assignment with no two orthogonal 1s and exactly one 1
    per complete basis.

    Backtracks over vectors in declared order trying 1 before 0, so the first
    complete assignment found gives the 1 to the earliest vectors possible.
    Constraint propagation: a 1 zeroes all orthogonal vectors; a complete
    basis with all but one vector at 0 forces the last to 1.  ``forced`` pins
    chosen vectors before the search starts (a conditioned search).
    """
    n = len(vs.vectors)
    orth = [[] for _ in range(n)]
    for i, j in vs._orth:
        orth[i].append(j)
        orth[j].append(i)
    full_bases = [b.indices for b in vs.bases if b.complete]
    member = [[] for _ in range(n)]
    for bi, basis in enumerate(full_bases):
        for v in basis:
            member[v].append(bi)

    assign = [-1] * n
    nodes = 0

    def propagate(trail: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for basis in full_bases:
                ones = sum(1 for v in basis if assign[v] == 1)
                if ones > 1:
                    return False
                unassigned = [v for v in basis if assign[v] == -1]
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
                    for w in orth[v]:
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

    def backtrack(pos: int) -> dict[str, int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(nodes, budget)
        while pos < n and assign[pos] != -1:
            pos += 1
        if pos == n:
            return {vs.names[i]: assign[i] for i in range(n)}
        for value in (1, 0):
            trail = [pos]
            assign[pos] = value
            ok = True
            if value == 1:
                for w in orth[pos]:
                    if assign[w] == 1:
                        ok = False
                        break
                    if assign[w] == -1:
                        assign[w] = 0
                        trail.append(w)
            if ok:
                ok = propagate(trail)
            if ok:
                found = backtrack(pos + 1)
                if found is not None:
                    return found
            undo(trail)
        return None

    if forced:
        trail: list[int] = []
        ok = True
        for name, value in forced.items():
            i = vs.index(name)
            assign[i] = value
            trail.append(i)
            if value == 1:
                for w in orth[i]:
                    if assign[w] == 1:
                        ok = False
                    elif assign[w] == -1:
                        assign[w] = 0
                        trail.append(w)
        ok = ok and propagate(trail)
        if not ok:
            return KSSearchResult(None, 0)

    result = backtrack(0)
    return KSSearchResult(result, nodes)


def brute_force_ks_assignments(vs: VectorSet) -> list[dict[str, int]]:
    """All valid assignments by full enumeration; test oracle for small sets."""
    n = len(vs.vectors)
    if n > 20:
        raise SearchBudgetExceeded(2**n, 2**20)
    full_bases = [b.indices for b in vs.bases if b.complete]
    out = []
    for mask in range(2**n):
        bits = [(mask >> i) & 1 for i in range(n)]
        if any(bits[i] and bits[j] for i, j in vs._orth):
            continue
        if any(sum(bits[v] for v in basis) != 1 for basis in full_bases):
            continue
        out.append({vs.names[i]: bits[i] for i in range(n)})
    return out


def verify_ks_assignment(vs: VectorSet, assignment: dict[str, int]) -> bool:
    bits = [assignment[name] for name in vs.names]
    if any(bits[i] and bits[j] for i, j in vs._orth):
        return False
    return all(
        sum(bits[v] for v in b.indices) == 1 for b in vs.bases if b.complete
    )


def lift_ks_set(vs: VectorSet, new_name: str = "kprime") -> VectorSet:
    """Embed into one dimension higher and adjoin the new axis vector.

    Every vector is zero-padded, the added vector is orthogonal to all of
    them, and each complete basis is extended by it.
    """
    if new_name in vs.names:
        raise UnknownElement(f"name {new_name!r} already used")
    zero = Fraction(0) if vs.backend == EXACT else 0.0
    one = Fraction(1) if vs.backend == EXACT else 1.0
    vectors = [tuple(v) + (zero,) for v in vs.vectors]
    vectors.append((zero,) * vs.dim + (one,))
    names = list(vs.names) + [new_name]
    k = len(vs.vectors)
    bases = []
    for basis in vs.bases:
        if basis.complete:
            bases.append(Basis(tuple(basis.indices) + (k,), complete=True))
        else:
            bases.append(basis)
    return VectorSet(vs.dim + 1, names, vectors, bases, vs.backend, vs.tol)
