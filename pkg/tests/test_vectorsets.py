"""Vector families and the deterministic-assignment search."""

from __future__ import annotations

import itertools
import random

import pytest

from ctxcert.catalog import CEG_REMOVED_VECTOR, ceg_prime, ceg_set
from ctxcert.errors import OrthogonalityCheckFailed, SearchBudgetExceeded
from ctxcert.vectorsets import (
    Basis,
    VectorSet,
    brute_force_ks_assignments,
    ks_assignment_search,
    lift_ks_set,
    verify_ks_assignment,
)


def test_ceg_fixture_shape():
    vs = ceg_set()
    assert len(vs) == 18
    assert len(vs.bases) == 9
    assert all(b.complete for b in vs.bases)
    counts = [0] * 18
    for b in vs.bases:
        for i in b.indices:
            counts[i] += 1
    assert counts == [2] * 18


def test_ceg_contains_the_pinned_context():
    vs = ceg_set()
    first = tuple(vs.names[i] for i in vs.bases[0].indices)
    assert first == ("(1,0,0,0)", "(0,1,0,0)", "(0,0,1,1)", "(0,0,1,-1)")


def test_declared_bases_must_be_orthogonal():
    with pytest.raises(OrthogonalityCheckFailed):
        VectorSet(2, ["a", "b"], [(1, 0), (1, 1)], [Basis((0, 1))])


def test_ceg_admits_no_assignment():
    result = ks_assignment_search(ceg_set())
    assert not result.found


def test_ceg_prime_admits_an_assignment():
    vs = ceg_prime()
    assert len(vs) == 17
    assert sum(1 for b in vs.bases if not b.complete) == 2
    result = ks_assignment_search(vs)
    assert result.found
    assert verify_ks_assignment(vs, result.assignment)


def test_ceg_prime_assignment_tears_the_removed_vector():
    # The two contexts that lost (1,0,0,0) must disagree about it: one forces
    # the missing vector to 1 (its three survivors all read 0) and the other
    # forces it to 0 (one survivor reads 1).
    full = ceg_set()
    vs = ceg_prime()
    result = ks_assignment_search(vs)
    removed_idx = full.index(CEG_REMOVED_VECTOR)
    forced = []
    for basis in full.bases:
        if removed_idx in basis.indices:
            survivors = [full.names[i] for i in basis.indices if i != removed_idx]
            forced.append(1 - sum(result.assignment[n] for n in survivors))
    assert sorted(forced) == [0, 1]


def test_single_basis_dimension_three():
    vs = VectorSet(3, ["a", "b", "c"], [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [Basis((0, 1, 2))])
    assert len(brute_force_ks_assignments(vs)) == 3
    result = ks_assignment_search(vs)
    assert result.assignment == {"a": 1, "b": 0, "c": 0}


def test_search_gives_one_to_earliest_vector():
    vs = VectorSet(2, ["a", "b"], [(1, 0), (0, 1)], [Basis((0, 1))])
    result = ks_assignment_search(vs)
    assert result.assignment == {"a": 1, "b": 0}


def _sub_vectorset(vs, keep):
    keep = sorted(keep)
    remap = {old: new for new, old in enumerate(keep)}
    bases = [
        Basis(tuple(remap[i] for i in b.indices), b.complete)
        for b in vs.bases
        if all(i in remap for i in b.indices)
    ]
    return VectorSet(
        vs.dim,
        [vs.names[i] for i in keep],
        [vs.vectors[i] for i in keep],
        bases,
        vs.backend,
        vs.tol,
    )


def test_search_matches_brute_force_on_small_subsets():
    vs = ceg_set()
    rng = random.Random(42)
    for _ in range(12):
        size = rng.randint(4, 12)
        keep = rng.sample(range(18), size)
        sub = _sub_vectorset(vs, keep)
        brute = brute_force_ks_assignments(sub)
        result = ks_assignment_search(sub)
        assert result.found == bool(brute)
        if brute:
            # First found maximizes the value tuple in declared order.
            first = max(tuple(a[n] for n in sub.names) for a in brute)
            assert tuple(result.assignment[n] for n in sub.names) == first


def test_budget_respected():
    vs = ceg_set()
    with pytest.raises(SearchBudgetExceeded):
        ks_assignment_search(vs, budget=2)


# -- lifting --------------------------------------------------------------------


def test_lift_shape_and_orthogonality():
    vs = ceg_set()
    lifted = lift_ks_set(vs)
    assert lifted.dim == 5
    assert len(lifted) == 19
    assert lifted.names[-1] == "kprime"
    # Original orthogonality is preserved and kprime is orthogonal to all.
    base_pairs = vs.orthogonal_names()
    lifted_pairs = lifted.orthogonal_names()
    assert base_pairs <= lifted_pairs
    for name in vs.names:
        assert tuple(sorted((name, "kprime"))) in lifted_pairs
    assert all(b.complete and len(b.indices) == 5 for b in lifted.bases)


def test_lift_has_assignment_but_not_with_kprime_zero():
    # The new ray can take the single 1 in every basis; forcing it to 0
    # recreates the original unsolvable constraints.  Machine-checks the
    # contradiction used to prove the lifted system is nonclassical.
    lifted = lift_ks_set(ceg_set())
    result = ks_assignment_search(lifted)
    assert result.found
    assert result.assignment["kprime"] == 1
    assert not ks_assignment_search(lifted, forced={"kprime": 0}).found


def test_lift_of_solvable_set_stays_solvable_with_kprime_zero():
    vs = VectorSet(3, ["a", "b", "c"], [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [Basis((0, 1, 2))])
    lifted = lift_ks_set(vs)
    result = ks_assignment_search(lifted, forced={"kprime": 0})
    assert result.found and result.assignment["kprime"] == 0
