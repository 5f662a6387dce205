"""Two-phase primal simplex over exact rationals.

Verdicts downstream must be unconditional, so everything here is Fraction
arithmetic with Bland's anti-cycling rule.  Problem sizes are tiny (tens of
rows and columns), which makes the dense tableau the right data structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None
    value: Fraction | None


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            f = line[col]
            prow = tableau[row]
            tableau[r] = [v - f * p for v, p in zip(line, prow)]
    basis[row] = col


def _run(
    tableau: list[list[Fraction]],
    basis: list[int],
    cost: list[Fraction],
    allowed: Sequence[bool],
) -> str:
    m = len(tableau)
    width = len(tableau[0])
    while True:
        # Reduced costs from the canonical tableau: r_j = c_j - c_B . column_j.
        cb = [cost[basis[i]] for i in range(m)]
        entering = -1
        for j in range(width - 1):
            if not allowed[j] or j in basis:
                continue
            r = cost[j] - sum(cb[i] * tableau[i][j] for i in range(m))
            if r < 0:
                entering = j  # Bland: first improving index
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best: Fraction | None = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return UNBOUNDED
        _pivot(tableau, basis, leaving, entering)


def solve_standard(
    a: Sequence[Sequence], b: Sequence, c: Sequence, maximize: bool = False
) -> LPResult:
    """Solve min (or max) c.x subject to a x = b, x >= 0."""
    m = len(a)
    n = len(c)
    obj = [Fraction(v) for v in c]
    if maximize:
        obj = [-v for v in obj]

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m):
        line = [Fraction(v) for v in a[i]]
        bi = Fraction(b[i])
        if bi < 0:
            line = [-v for v in line]
            bi = -bi
        rows.append(line)
        rhs.append(bi)

    # Phase 1: artificial identity basis.
    width = n + m + 1
    tableau = []
    for i in range(m):
        line = rows[i] + [Fraction(0)] * m + [rhs[i]]
        line[n + i] = Fraction(1)
        tableau.append(line)
    basis = [n + i for i in range(m)]
    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * m
    allowed = [True] * (n + m)
    status = _run(tableau, basis, phase1_cost, allowed)
    assert status == OPTIMAL, "phase 1 cannot be unbounded"
    art_value = sum(
        phase1_cost[basis[i]] * tableau[i][-1] for i in range(len(tableau))
    )
    if art_value > 0:
        return LPResult(INFEASIBLE, None, None)

    # Drive leftover zero-level artificials out of the basis; a row with no
    # structural column available is redundant and gets dropped.
    drop: list[int] = []
    for i in range(len(tableau)):
        if basis[i] >= n:
            col = next((j for j in range(n) if tableau[i][j] != 0), None)
            if col is None:
                drop.append(i)
            else:
                _pivot(tableau, basis, i, col)
    for i in reversed(drop):
        del tableau[i]
        del basis[i]

    # Phase 2: original objective, artificial columns disabled.
    allowed = [True] * n + [False] * m
    phase2_cost = obj + [Fraction(0)] * m
    status = _run(tableau, basis, phase2_cost, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    x = [Fraction(0)] * n
    for i, col in enumerate(basis):
        if col < n:
            x[col] = tableau[i][-1]
    value = sum(o * v for o, v in zip(obj, x))
    if maximize:
        value = -value
    return LPResult(OPTIMAL, tuple(x), value)
