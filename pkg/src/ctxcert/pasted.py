"""Abstract event algebras presented as Boolean contexts glued along shared elements.

Each context is a named finite set of local atoms; its elements are all subsets
of those atoms.  Gluings identify elements across contexts (atoms with equal
names are identified automatically).  The identification is closed under
complement and under pairwise meet/join of already-identified elements, then
validated.  This representation hosts structures that no projector family can
realize, which is exactly what makes it useful as a counterexample bench.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import Incompatible, InconsistentGluing, NotAGraphState, NotAPBA, UnknownElement
from .graphs import ExclusivityGraph

Local = tuple[int, frozenset]

MAX_CONTEXT_ATOMS = 12


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a structural law check; violation holds the first offender."""

    holds: bool
    violation: tuple | None = None


@dataclass(frozen=True)
class AxiomReport:
    """How far the pairwise-compatibility axiom was verified exhaustively."""

    verified_up_to_size: int
    subsets_checked: int


class PastedPBA:
    """A pasted partial Boolean algebra with named global elements."""

    def __init__(
        self,
        contexts: Sequence[tuple[str, Sequence[str]]],
        gluings: Iterable[tuple[tuple[str, Sequence[str]], tuple[str, Sequence[str]]]] = (),
        axiom_check_size: int = 4,
    ):
        if not contexts:
            raise NotAPBA("at least one context is required")
        self.context_names = tuple(name for name, _ in contexts)
        if len(set(self.context_names)) != len(self.context_names):
            raise InconsistentGluing("duplicate context names")
        self.context_atoms: list[tuple[str, ...]] = []
        for name, atoms in contexts:
            atoms = tuple(atoms)
            if not atoms:
                raise NotAPBA(f"context {name!r} has no atoms")
            if len(set(atoms)) != len(atoms):
                raise InconsistentGluing(f"context {name!r} repeats an atom name")
            if len(atoms) > MAX_CONTEXT_ATOMS:
                raise NotAPBA(f"context {name!r} exceeds {MAX_CONTEXT_ATOMS} atoms")
            self.context_atoms.append(atoms)
        self._ctx_index = {n: i for i, n in enumerate(self.context_names)}

        self._parent: dict[Local, Local] = {}
        for i, atoms in enumerate(self.context_atoms):
            members = list(atoms)
            for r in range(len(members) + 1):
                for sub in combinations(members, r):
                    self._parent[(i, frozenset(sub))] = (i, frozenset(sub))

        # Distinguished identifications: all empty subsets, all full subsets,
        # and same-named atoms across contexts.
        first_empty = (0, frozenset())
        first_full = (0, frozenset(self.context_atoms[0]))
        for i in range(1, len(self.context_atoms)):
            self._union(first_empty, (i, frozenset()))
            self._union(first_full, (i, frozenset(self.context_atoms[i])))
        by_name: dict[str, Local] = {}
        for i, atoms in enumerate(self.context_atoms):
            for a in atoms:
                loc = (i, frozenset([a]))
                if a in by_name:
                    self._union(by_name[a], loc)
                else:
                    by_name[a] = loc

        for (cname1, sub1), (cname2, sub2) in gluings:
            self._union(self._local(cname1, sub1), self._local(cname2, sub2))

        self._close()
        self._validate_consistency()
        self._build_catalog()
        self.axiom_report = self._check_axiom(axiom_check_size)

    # -- union-find ---------------------------------------------------------

    def _local(self, context: str, atoms: Sequence[str]) -> Local:
        if context not in self._ctx_index:
            raise UnknownElement(f"unknown context {context!r}")
        i = self._ctx_index[context]
        sub = frozenset(atoms)
        if not sub <= set(self.context_atoms[i]):
            raise UnknownElement(f"{sorted(sub)} not within context {context!r}")
        return (i, sub)

    def _find(self, x: Local) -> Local:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def _union(self, x: Local, y: Local) -> bool:
        rx, ry = self._find(x), self._find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self._parent[ry] = rx
        return True

    def _classes(self) -> dict[Local, list[Local]]:
        groups: dict[Local, list[Local]] = {}
        for loc in self._parent:
            groups.setdefault(self._find(loc), []).append(loc)
        return groups

    def _complement_local(self, loc: Local) -> Local:
        i, sub = loc
        return (i, frozenset(self.context_atoms[i]) - sub)

    def _close(self) -> None:
        # Fixpoint closure: identified elements force identified complements,
        # and identified pairs within one context pair force identified
        # meets/joins.
        changed = True
        while changed:
            changed = False
            for members in self._classes().values():
                for (i, x), (j, y) in combinations(sorted(members), 2):
                    if i == j:
                        continue
                    if self._union(self._complement_local((i, x)), self._complement_local((j, y))):
                        changed = True
            cross: dict[tuple[int, int], list[tuple[frozenset, frozenset]]] = {}
            for members in self._classes().values():
                for (i, x), (j, y) in combinations(sorted(members), 2):
                    if i != j:
                        cross.setdefault((i, j), []).append((x, y))
            for (i, j), pairs in cross.items():
                for (x1, y1), (x2, y2) in combinations(pairs, 2):
                    if self._union((i, x1 & x2), (j, y1 & y2)):
                        changed = True
                    if self._union((i, x1 | x2), (j, y1 | y2)):
                        changed = True

    def _validate_consistency(self) -> None:
        for members in self._classes().values():
            per_ctx: dict[int, frozenset] = {}
            for i, sub in members:
                if i in per_ctx and per_ctx[i] != sub:
                    raise InconsistentGluing(
                        f"context {self.context_names[i]!r} identifies distinct subsets "
                        f"{sorted(per_ctx[i])} and {sorted(sub)}"
                    )
                per_ctx[i] = sub
        # Order agreement on shared pairs follows from the meet/join closure,
        # but check it explicitly so a failure names the offending pair.
        groups = self._classes()
        cross: dict[tuple[int, int], list[tuple[frozenset, frozenset]]] = {}
        for members in groups.values():
            for (i, x), (j, y) in combinations(sorted(members), 2):
                if i != j:
                    cross.setdefault((i, j), []).append((x, y))
        for (i, j), pairs in cross.items():
            for (x1, y1), (x2, y2) in combinations(pairs, 2):
                if (x1 <= x2) != (y1 <= y2):
                    raise InconsistentGluing(
                        f"order disagreement between contexts {self.context_names[i]!r} "
                        f"and {self.context_names[j]!r}: {sorted(x1)}<={sorted(x2)} "
                        f"but not {sorted(y1)}<={sorted(y2)}"
                    )

    # -- global element catalog ---------------------------------------------

    def _name_for(self, rep: Local) -> str:
        i, sub = rep
        if not sub:
            return "0"
        if sub == frozenset(self.context_atoms[i]):
            return "1"
        if len(sub) == 1:
            return next(iter(sub))
        return "|".join(sorted(sub))

    def _build_catalog(self) -> None:
        groups = self._classes()
        reps = {}
        for root, members in groups.items():
            rep = min(members, key=lambda loc: (len(loc[1]), tuple(sorted(loc[1])), loc[0]))
            reps[root] = rep
        order = sorted(groups, key=lambda r: (len(reps[r][1]), tuple(sorted(reps[r][1])), reps[r][0]))
        self._roots = order
        self._root_pos = {root: k for k, root in enumerate(order)}
        self._reps = [reps[root] for root in order]
        self._members = [sorted(groups[root]) for root in order]
        self.element_names = tuple(self._name_for(reps[root]) for root in order)
        if len(set(self.element_names)) != len(self.element_names):
            raise InconsistentGluing("element naming collision; gluing is malformed")
        self._by_name = {n: k for k, n in enumerate(self.element_names)}
        # Per-element map: context -> local subset in that context.
        self._ctx_reps: list[dict[int, frozenset]] = []
        for members in self._members:
            self._ctx_reps.append({i: sub for i, sub in members})
        self._comp = [
            self._root_pos[self._find(self._complement_local(self._reps[k]))]
            for k in range(len(order))
        ]

    def _idx(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownElement(f"no element named {name!r}") from None

    def element_of(self, context: str, atoms: Sequence[str]) -> str:
        """Name of the global element given by a local subset."""
        root = self._find(self._local(context, atoms))
        return self.element_names[self._root_pos[root]]

    # -- relations ------------------------------------------------------------

    def _leq_idx(self, a: int, b: int) -> bool:
        ra, rb = self._ctx_reps[a], self._ctx_reps[b]
        return any(ra[i] <= rb[i] for i in ra.keys() & rb.keys())

    def _compatible_idx(self, a: int, b: int) -> bool:
        return bool(self._ctx_reps[a].keys() & self._ctx_reps[b].keys())

    def leq(self, x: str, y: str) -> bool:
        """x <= y: some context contains both with the subset inclusion."""
        return self._leq_idx(self._idx(x), self._idx(y))

    def compatible(self, x: str, y: str) -> bool:
        """Compatibility is co-residence in at least one context."""
        return self._compatible_idx(self._idx(x), self._idx(y))

    def complement_of(self, x: str) -> str:
        return self.element_names[self._comp[self._idx(x)]]

    def meet_of(self, x: str, y: str) -> str:
        a, b = self._idx(x), self._idx(y)
        shared = self._ctx_reps[a].keys() & self._ctx_reps[b].keys()
        if not shared:
            raise Incompatible(f"{x!r} and {y!r} share no context")
        i = min(shared)
        root = self._find((i, self._ctx_reps[a][i] & self._ctx_reps[b][i]))
        return self.element_names[self._root_pos[root]]

    def join_of(self, x: str, y: str) -> str:
        a, b = self._idx(x), self._idx(y)
        shared = self._ctx_reps[a].keys() & self._ctx_reps[b].keys()
        if not shared:
            raise Incompatible(f"{x!r} and {y!r} share no context")
        i = min(shared)
        root = self._find((i, self._ctx_reps[a][i] | self._ctx_reps[b][i]))
        return self.element_names[self._root_pos[root]]

    def exclusive(self, x: str, y: str) -> bool:
        """Exhaustive witness search: some c has x <= c and y <= not-c."""
        a, b = self._idx(x), self._idx(y)
        for c in range(len(self.element_names)):
            if self._leq_idx(a, c) and self._leq_idx(b, self._comp[c]):
                return True
        return False

    # -- law checks -----------------------------------------------------------

    def check_lep(self) -> CheckResult:
        """First pair that is exclusive yet incompatible, in canonical order."""
        n = len(self.element_names)
        for a in range(n):
            for b in range(a + 1, n):
                if self._compatible_idx(a, b):
                    continue
                if self.exclusive(self.element_names[a], self.element_names[b]):
                    return CheckResult(False, (self.element_names[a], self.element_names[b]))
        return CheckResult(True)

    def check_transitivity(self) -> CheckResult:
        """First chain x <= y <= z with x not below z, in canonical order."""
        n = len(self.element_names)
        leq = [[self._leq_idx(a, b) for b in range(n)] for a in range(n)]
        for a in range(n):
            for b in range(n):
                if not leq[a][b]:
                    continue
                for c in range(n):
                    if leq[b][c] and not leq[a][c]:
                        return CheckResult(
                            False,
                            (self.element_names[a], self.element_names[b], self.element_names[c]),
                        )
        return CheckResult(True)

    def _check_axiom(self, max_size: int) -> AxiomReport:
        # Bounded verification of the defining axiom: every pairwise-compatible
        # subset must sit inside one context.  Sets of size <= 2 hold by the
        # definition of compatibility.
        n = len(self.element_names)
        if n > 64:
            return AxiomReport(verified_up_to_size=2, subsets_checked=0)
        masks = []
        for k in range(n):
            m = 0
            for i in self._ctx_reps[k]:
                m |= 1 << i
            masks.append(m)
        checked = 0
        top = min(max_size, n)
        for size in range(3, top + 1):
            for combo in combinations(range(n), size):
                if any(not masks[a] & masks[b] for a, b in combinations(combo, 2)):
                    continue
                checked += 1
                common = masks[combo[0]]
                for k in combo[1:]:
                    common &= masks[k]
                if not common:
                    raise NotAPBA(
                        "pairwise-compatible set with no common context: "
                        f"{[self.element_names[k] for k in combo]}"
                    )
        return AxiomReport(verified_up_to_size=top, subsets_checked=checked)

    # -- atoms ----------------------------------------------------------------

    def atoms(self) -> tuple[str, ...]:
        n = len(self.element_names)
        zero = self._by_name["0"]
        out = []
        for a in range(n):
            if a == zero:
                continue
            if any(b != zero and b != a and self._leq_idx(b, a) for b in range(n)):
                continue
            out.append(self.element_names[a])
        return tuple(out)

    def atom_graph(self) -> ExclusivityGraph:
        atoms = self.atoms()
        edges = [
            (x, y)
            for x, y in combinations(atoms, 2)
            if self._compatible_idx(self._idx(x), self._idx(y))
        ]
        return ExclusivityGraph(atoms, edges)

    def state(self, atom_values: Mapping[str, object]) -> "PastedState":
        return PastedState(self, atom_values)

    def __repr__(self) -> str:
        return (
            f"PastedPBA({len(self.context_names)} contexts, "
            f"{len(self.element_names)} elements)"
        )


class PastedState:
    """Per-context probability measures that agree on every glued element."""

    def __init__(self, pba: PastedPBA, atom_values: Mapping[str, object]):
        self.pba = pba
        self.atom_values = {k: Fraction(v) for k, v in atom_values.items()}
        for i, atoms in enumerate(pba.context_atoms):
            missing = [a for a in atoms if a not in self.atom_values]
            if missing:
                raise NotAGraphState(f"missing values for atoms {missing}")
            if any(self.atom_values[a] < 0 for a in atoms):
                raise NotAGraphState("negative atom value")
            if sum(self.atom_values[a] for a in atoms) != 1:
                raise NotAGraphState(
                    f"context {pba.context_names[i]!r} mass differs from 1"
                )
        # Local consistency: every representation of a glued element carries
        # the same mass.
        for k, members in enumerate(pba._members):
            vals = {sum(self.atom_values[a] for a in sub) for _, sub in members}
            if len(vals) > 1:
                raise NotAGraphState(
                    f"element {pba.element_names[k]!r} has inconsistent mass {sorted(vals)}"
                )

    def value(self, element: str) -> Fraction:
        i, sub = self.pba._reps[self.pba._idx(element)]
        return sum((self.atom_values[a] for a in sub), Fraction(0))


def build_pasted_pba(
    contexts: Sequence[tuple[str, Sequence[str]]],
    gluings: Iterable[tuple[tuple[str, Sequence[str]], tuple[str, Sequence[str]]]] = (),
    axiom_check_size: int = 4,
) -> PastedPBA:
    """Construct and validate a pasted structure; raises on any broken invariant."""
    return PastedPBA(contexts, gluings, axiom_check_size)
