"""Concrete event algebras of projectors, generated by closure.

``generate_system`` saturates a generator list under complement and under
meet/join of commuting pairs.  The closed system knows its atoms, its atom
graph, and how to extend an atom-level state to every element.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    BackendMismatch,
    ClosureBudgetExceeded,
    DimensionMismatch,
    NoDecomposition,
    NotAGraphState,
    NotAnElement,
    UnknownElement,
)
from .graphs import ExclusivityGraph, PBAState
from .linalg import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    DensityMatrix,
    ExactMatrix,
    FloatMatrix,
    Projector,
    identity_projector,
    quantum_state_eval,
    zero_projector,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_ELEMENTS = 100_000
PROGRESS_EVERY = 1000


class _Pool:
    """Deduplicating index of projector matrices.

    Exact matrices key exactly.  Float matrices key on a rounded grid first and
    fall back to a confirmed linear scan, since tolerance equality is not
    captured by any hash.
    """

    def __init__(self, backend: str):
        self.backend = backend
        self._by_key: dict = {}
        self._mats: list = []

    def lookup(self, mat) -> int | None:
        key = mat.key()
        hit = self._by_key.get(key)
        if hit is not None:
            return hit
        if self.backend == FLOAT:
            for idx, other in enumerate(self._mats):
                if mat.approx_equal(other):
                    return idx
        return None

    def insert(self, mat) -> int:
        idx = len(self._mats)
        self._mats.append(mat)
        self._by_key[mat.key()] = idx
        return idx


@dataclass(frozen=True)
class EpbaReport:
    """Exhaustive exclusivity and transitivity audit of a closed system."""

    lep_holds: bool
    transitivity_holds: bool
    pairs_checked: int
    chains_checked: int
    lep_violation: tuple | None = None
    transitivity_violation: tuple | None = None

    @property
    def holds(self) -> bool:
        return self.lep_holds and self.transitivity_holds


class QuantumSystem:
    """A finite, closed set of projectors with cached order structure."""

    def __init__(
        self,
        elements: Sequence[Projector],
        generators: Sequence[Projector],
        atom_labels: Mapping[str, Projector] | None = None,
    ):
        if not elements:
            raise NotAnElement("empty system")
        self.dim = elements[0].dim
        self.backend = elements[0].backend
        self.tol = elements[0].tol
        self.elements = tuple(sorted(elements, key=lambda p: p.sort_key()))
        self.generators = tuple(generators)
        self._pool = _Pool(self.backend)
        for p in self.elements:
            self._pool.insert(p.mat)
        self.zero_index = self.index_of(zero_projector(self.dim, self.backend, self.tol))
        self.identity_index = self.index_of(identity_projector(self.dim, self.backend, self.tol))
        self._leq_rows: list[int] | None = None
        self._comp: list[int] | None = None
        self._atom_indices: list[int] | None = None
        self._atom_graph: ExclusivityGraph | None = None
        self._atom_labels_arg = dict(atom_labels or {})
        self._labels: list[str] | None = None
        self._names: dict[int, str] = {}

    # -- membership -----------------------------------------------------------

    def index_of(self, p: Projector) -> int:
        idx = self._pool.lookup(p.mat)
        if idx is None:
            raise NotAnElement(f"{p!r} is not an element of this system")
        return idx

    def contains(self, p: Projector) -> bool:
        return self._pool.lookup(p.mat) is not None

    def __len__(self) -> int:
        return len(self.elements)

    # -- order structure --------------------------------------------------------

    def _ensure_leq(self) -> list[int]:
        if self._leq_rows is not None:
            return self._leq_rows
        n = len(self.elements)
        rows = [0] * n
        mats = [p.mat for p in self.elements]
        ranks = [p.rank for p in self.elements]
        if self.backend == EXACT:
            equal = lambda a, b: a == b  # noqa: E731
        else:
            equal = lambda a, b: a.approx_equal(b)  # noqa: E731
        for i in range(n):
            row = 0
            mi, ri = mats[i], ranks[i]
            for j in range(n):
                if i == j:
                    row |= 1 << j
                    continue
                if ri > ranks[j]:
                    continue
                if equal(mi.mul(mats[j]), mi):
                    row |= 1 << j
            rows[i] = row
        self._leq_rows = rows
        return rows

    def _ensure_comp(self) -> list[int]:
        if self._comp is None:
            ident = (
                ExactMatrix.identity(self.dim)
                if self.backend == EXACT
                else FloatMatrix.identity(self.dim, self.tol)
            )
            comp = []
            for p in self.elements:
                idx = self._pool.lookup(ident.sub(p.mat))
                if idx is None:
                    raise NotAnElement("system is not closed under complement")
                comp.append(idx)
            self._comp = comp
        return self._comp

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self._ensure_leq()[i] >> j & 1)

    def complement_index(self, i: int) -> int:
        return self._ensure_comp()[i]

    # -- atoms -----------------------------------------------------------------

    def _compute_atom_indices(self) -> list[int]:
        rows = self._ensure_leq()
        n = len(self.elements)
        zero = self.zero_index
        atoms = []
        for i in range(n):
            if i == zero:
                continue
            below = [j for j in range(n) if rows[j] >> i & 1 and j not in (i, zero)]
            if not below:
                atoms.append(i)
        return atoms

    def atom_indices(self) -> list[int]:
        """Atom element indices, labeled atoms first (the atom-graph order)."""
        self._ensure_labels()
        return self._atom_indices

    def _ensure_labels(self) -> list[str]:
        if self._labels is not None:
            return self._labels
        atoms = self._compute_atom_indices()
        assigned: dict[int, str] = {}
        ordered: list[int] = []
        for name, proj in self._atom_labels_arg.items():
            idx = self.index_of(proj)
            if idx not in atoms:
                raise NotAnElement(f"label {name!r} does not name an atom")
            if idx in assigned:
                raise UnknownElement(f"atom labeled twice: {assigned[idx]!r}, {name!r}")
            assigned[idx] = name
            ordered.append(idx)
        rest = [i for i in atoms if i not in assigned]
        rest.sort(key=lambda i: self.elements[i].sort_key())
        for k, idx in enumerate(rest):
            assigned[idx] = f"e{k}"
            ordered.append(idx)
        if len(set(assigned.values())) != len(assigned):
            raise UnknownElement("atom label collision")
        self._atom_indices = ordered
        self._labels = [assigned[i] for i in ordered]
        self._names = dict(zip(ordered, self._labels))
        return self._labels

    def atom_label(self, index: int) -> str:
        self._ensure_labels()
        return self._names[index]

    def atoms(self) -> list[Projector]:
        self._ensure_labels()
        return [self.elements[i] for i in self.atom_indices()]

    def atom_by_label(self, label: str) -> Projector:
        labels = self._ensure_labels()
        try:
            pos = labels.index(label)
        except ValueError:
            raise UnknownElement(f"no atom labeled {label!r}") from None
        return self.elements[self.atom_indices()[pos]]

    def atom_graph(self) -> ExclusivityGraph:
        """Vertices are atom labels; edges join compatible distinct atoms."""
        if self._atom_graph is None:
            labels = self._ensure_labels()
            idxs = self.atom_indices()
            edges = []
            for (la, ia), (lb, ib) in combinations(zip(labels, idxs), 2):
                if self._orthogonal_idx(ia, ib):
                    edges.append((la, lb))
            self._atom_graph = ExclusivityGraph(labels, edges)
        return self._atom_graph

    def _orthogonal_idx(self, i: int, j: int) -> bool:
        prod = self.elements[i].mat.mul(self.elements[j].mat)
        return prod.is_zero()

    # -- naming ----------------------------------------------------------------

    def element_name(self, index: int) -> str:
        """Stable human name: 0, 1, an atom label, or a join of atom labels."""
        if index == self.zero_index:
            return "0"
        if index == self.identity_index:
            return "1"
        self._ensure_labels()
        if index in self._names:
            return self._names[index]
        parts = self.decompose(index)
        return "|".join(self._names[i] for i in parts)

    # -- state extension ---------------------------------------------------------

    def decompose(self, index: int) -> tuple[int, ...]:
        """First maximal orthogonal set of atoms below the element summing to it."""
        for decomposition in self.decompositions(index):
            return decomposition
        raise NoDecomposition(
            f"element {index} has no atomic decomposition; system is not closed"
        )

    def decompositions(self, index: int):
        """Yield every orthogonal atom set that sums to the element."""
        target = self.elements[index]
        if target.rank == 0:
            yield ()
            return
        rows = self._ensure_leq()
        atoms = [i for i in self.atom_indices() if rows[i] >> index & 1]
        mats = {i: self.elements[i].mat for i in atoms}
        ranks = {i: self.elements[i].rank for i in atoms}
        if self.backend == EXACT:
            equal = lambda a, b: a == b  # noqa: E731
        else:
            equal = lambda a, b: a.approx_equal(b)  # noqa: E731

        def search(start: int, chosen: list[int], total, rank: int):
            if rank == target.rank:
                if equal(total, target.mat):
                    yield tuple(chosen)
                return
            for pos in range(start, len(atoms)):
                a = atoms[pos]
                if rank + ranks[a] > target.rank:
                    continue
                if any(not mats[a].mul(mats[b]).is_zero() for b in chosen):
                    continue
                chosen.append(a)
                new_total = mats[a] if total is None else total.add(mats[a])
                yield from search(pos + 1, chosen, new_total, rank + ranks[a])
                chosen.pop()

        yield from search(0, [], None, 0)

    def extend_state(self, state: PBAState) -> "SystemState":
        if state.graph != self.atom_graph():
            raise NotAGraphState("state is defined on a different atom graph")
        return SystemState(self, state)

    def state_from_density(self, rho: DensityMatrix) -> PBAState:
        """Restrict the Born rule to atoms; always yields a graph state."""
        labels = self._ensure_labels()
        values = {}
        for label, idx in zip(labels, self.atom_indices()):
            values[label] = quantum_state_eval(rho, self.elements[idx])
        backend = EXACT if self.backend == EXACT else FLOAT
        return PBAState(self.atom_graph(), values, backend=backend, tol=max(self.tol, DEFAULT_TOL))

    # -- audits ---------------------------------------------------------------

    def verify_epba(self) -> EpbaReport:
        """Exhaustively confirm exclusivity implies compatibility, and that the
        element order is transitive.  Any violation signals a bug or a
        tolerance failure, never valid physics."""
        rows = self._ensure_leq()
        comp = self._ensure_comp()
        n = len(self.elements)
        neg_image = [0] * n
        for j in range(n):
            row = rows[j]
            mask = 0
            for c in range(n):
                if row >> comp[c] & 1:
                    mask |= 1 << c
            neg_image[j] = mask

        lep_violation = None
        pairs = 0
        for i in range(n):
            for j in range(i + 1, n):
                pairs += 1
                if rows[i] & neg_image[j]:
                    # Exclusive pair; in a projector algebra this forces a
                    # vanishing product, hence compatibility.
                    if not self.elements[i].mat.mul(self.elements[j].mat).is_zero():
                        lep_violation = (i, j)
                        break
            if lep_violation:
                break

        transitivity_violation = None
        chains = 0
        for i in range(n):
            row_i = rows[i]
            m = row_i
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                chains += 1
                bad = rows[j] & ~row_i
                if bad:
                    k = (bad & -bad).bit_length() - 1
                    transitivity_violation = (i, j, k)
                    break
            if transitivity_violation:
                break

        return EpbaReport(
            lep_holds=lep_violation is None,
            transitivity_holds=transitivity_violation is None,
            pairs_checked=pairs,
            chains_checked=chains,
            lep_violation=lep_violation,
            transitivity_violation=transitivity_violation,
        )

    def __repr__(self) -> str:
        return (
            f"QuantumSystem(dim={self.dim}, backend={self.backend}, "
            f"{len(self.elements)} elements)"
        )


class SystemState:
    """Atom-level state extended to every element via atomic decompositions."""

    def __init__(self, system: QuantumSystem, atom_state: PBAState):
        self.system = system
        self.atom_state = atom_state
        self._cache: dict[int, object] = {}

    def eval_index(self, index: int):
        if index in self._cache:
            return self._cache[index]
        system = self.system
        parts = system.decompose(index)
        zero = Fraction(0) if self.atom_state.backend == EXACT else 0.0
        value = sum((self.atom_state.value(system.atom_label(i)) for i in parts), zero)
        self._cache[index] = value
        return value

    def eval(self, p: Projector):
        return self.eval_index(self.system.index_of(p))


def leq_q(system: QuantumSystem, p: Projector, q: Projector) -> bool:
    """Event order inside a system: PQ = P."""
    return system.leq_idx(system.index_of(p), system.index_of(q))


def exclusive_q(system: QuantumSystem, p: Projector, q: Projector) -> bool:
    """Exclusivity inside a system reduces to a vanishing product."""
    i, j = system.index_of(p), system.index_of(q)
    return system._orthogonal_idx(i, j)


def generate_system(
    generators: Sequence[Projector],
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    atom_labels: Mapping[str, Projector] | None = None,
) -> QuantumSystem:
    """Close a generator list under complement and commuting meet/join.

    The worklist is processed in canonical order (complement of each element
    first, then pairs with all earlier elements), so the discovered set and
    the final sorted element list do not depend on generator order.
    """
    if not generators:
        raise NotAnElement("need at least one generator")
    dim = generators[0].dim
    backend = generators[0].backend
    tol = max((g.tol for g in generators), default=DEFAULT_TOL) or DEFAULT_TOL
    for g in generators:
        if g.dim != dim:
            raise DimensionMismatch("generators of mixed dimension")
        if g.backend != backend:
            raise BackendMismatch("generators of mixed backend")
    if max_elements < 4:
        raise ClosureBudgetExceeded(max_elements)

    pool = _Pool(backend)
    elems: list[Projector] = []

    def insert(mat) -> None:
        if pool.lookup(mat) is not None:
            return
        if len(elems) >= max_elements:
            raise ClosureBudgetExceeded(max_elements)
        proj = Projector(mat)
        pool.insert(mat)
        elems.append(proj)
        if len(elems) % PROGRESS_EVERY == 0:
            log.info("closure reached %d elements", len(elems))

    insert(zero_projector(dim, backend, tol).mat)
    insert(identity_projector(dim, backend, tol).mat)
    seeds = sorted({g.sort_key(): g for g in generators}.values(), key=lambda p: p.sort_key())
    for g in seeds:
        insert(g.mat)

    ident = elems[1].mat
    if backend == EXACT:
        equal = lambda a, b: a == b  # noqa: E731
    else:
        equal = lambda a, b: a.approx_equal(b)  # noqa: E731

    idx = 0
    while idx < len(elems):
        p = elems[idx].mat
        insert(ident.sub(p))
        for j in range(idx):
            q = elems[j].mat
            pq = p.mul(q)
            qp = q.mul(p)
            if equal(pq, qp):
                insert(pq)
                insert(p.add(q).sub(pq))
        idx += 1

    return QuantumSystem(elems, seeds, atom_labels)


def systems_equal(a: QuantumSystem, b: QuantumSystem) -> bool:
    """Set equality of elements under the backend's projector equality."""
    if a.backend != b.backend:
        raise BackendMismatch(f"{a.backend} vs {b.backend}")
    if a.dim != b.dim or len(a) != len(b):
        return False
    if a.backend == EXACT:
        return {p.mat.key() for p in a.elements} == {p.mat.key() for p in b.elements}
    return all(b.contains(p) for p in a.elements)
