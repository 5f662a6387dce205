"""Pasted-context structures: gluing closure, order laws, the B2 counterexample."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxcert.catalog import b2_pasted
from ctxcert.errors import Incompatible, InconsistentGluing, UnknownElement
from ctxcert.pasted import build_pasted_pba


@pytest.fixture(scope="module")
def b2():
    return b2_pasted()


def test_b2_has_twelve_elements(b2):
    assert len(b2.element_names) == 12


def test_b2_order_examples(b2):
    assert b2.leq("a1", "c")
    assert b2.leq("c", "a2|c")
    assert not b2.leq("a1", "a2|c")


def test_b2_exclusive_but_incompatible(b2):
    assert b2.exclusive("a1", "a2")
    assert not b2.compatible("a1", "a2")


def test_b2_lep_violation(b2):
    result = b2.check_lep()
    assert not result.holds
    assert result.violation == ("a1", "a2")


def test_b2_transitivity_violation(b2):
    result = b2.check_transitivity()
    assert not result.holds
    assert result.violation == ("a1", "c", "a2|c")


def test_b2_complements(b2):
    assert b2.complement_of("c") == "x"
    assert b2.complement_of("x") == "c"
    assert b2.complement_of("0") == "1"


def test_b2_meet_join(b2):
    assert b2.meet_of("c", "x") == "0"
    assert b2.join_of("c", "x") == "1"
    assert b2.join_of("a1", "b1") == "c"
    with pytest.raises(Incompatible):
        b2.meet_of("a1", "a2")


def test_b2_atoms(b2):
    assert set(b2.atoms()) == {"a1", "b1", "a2", "b2"}
    g = b2.atom_graph()
    assert g.edges == frozenset({("a1", "b1"), ("a2", "b2")})


def test_single_context_boolean_algebra():
    b = build_pasted_pba([("C", ["a", "b", "c"])])
    assert len(b.element_names) == 8
    assert b.check_lep().holds
    assert b.check_transitivity().holds


def test_same_context_gluing_rejected():
    with pytest.raises(InconsistentGluing):
        build_pasted_pba(
            [("C", ["a1", "b1", "x"])],
            gluings=[(("C", ["a1"]), ("C", ["b1"]))],
        )


def test_two_contexts_sharing_only_bounds_hold():
    b = build_pasted_pba([("C1", ["a", "b"]), ("C2", ["c", "d"])])
    assert b.check_lep().holds
    assert b.check_transitivity().holds
    assert b.axiom_report.verified_up_to_size >= 3


def test_shared_atom_auto_gluing():
    b = build_pasted_pba([("C1", ["a", "b", "x1"]), ("C2", ["b", "c", "x2"])])
    # The shared atom b and its complement are glued; everything else is local.
    assert b.compatible("a", "b") and b.compatible("b", "c")
    assert not b.compatible("a", "c")
    assert b.complement_of("b") == "a|x1"
    assert b.element_of("C1", ["a", "x1"]) == b.element_of("C2", ["c", "x2"])
    assert len(b.element_names) == 12  # 8 + 8 sharing 0, 1, b, not-b


def test_two_atom_contexts_collapse_by_complement():
    # In a 2-atom context the atoms are each other's complements, so sharing
    # one atom forces the other two to coincide.
    b = build_pasted_pba([("C1", ["a", "b"]), ("C2", ["b", "c"])])
    assert len(b.element_names) == 4
    assert b.element_of("C1", ["a"]) == b.element_of("C2", ["c"])


def test_unknown_element_raises(b2):
    with pytest.raises(UnknownElement):
        b2.leq("a1", "nope")


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=30, deadline=None)
def test_single_context_always_lawful(n_atoms, seed):
    atoms = [f"a{i}" for i in range(n_atoms)]
    b = build_pasted_pba([("C", atoms)])
    assert b.check_lep().holds
    assert b.check_transitivity().holds
    assert len(b.element_names) == 2**n_atoms


def test_relations_are_lawful_on_b2(b2):
    names = b2.element_names
    for x in names:
        assert b2.leq(x, x)
        assert b2.compatible(x, x)
    for x, y in combinations(names, 2):
        assert b2.compatible(x, y) == b2.compatible(y, x)
        assert b2.exclusive(x, y) == b2.exclusive(y, x)
        if b2.leq(x, y) and b2.leq(y, x):
            assert x == y


# -- states on pasted structures ----------------------------------------------


def b2_state(b2, pa1, pb1, pa2, pb2):
    vals = {
        "a1": pa1,
        "b1": pb1,
        "x": 1 - pa1 - pb1,
        "a2": pa2,
        "b2": pb2,
        "c": 1 - pa2 - pb2,
    }
    return b2.state(vals)


def test_b2_state_consistency_enforced(b2):
    # value(x) must match value(a2) + value(b2); here it does not.
    with pytest.raises(Exception):
        b2.state(
            {
                "a1": Fraction(1, 2),
                "b1": Fraction(1, 2),
                "x": Fraction(0),
                "a2": Fraction(1, 2),
                "b2": Fraction(1, 2),
                "c": Fraction(0),
            }
        )


@given(
    st.integers(min_value=0, max_value=8),
    st.integers(min_value=0, max_value=8),
    st.integers(min_value=0, max_value=8),
)
@settings(max_examples=50, deadline=None)
def test_b2_state_monotone_under_leq(na1, nb1, na2):
    # Random rational states: masses over (a1, b1, a2, b2) summing to one,
    # which is exactly the consistency constraint of the two contexts.
    b2 = b2_pasted()
    total = na1 + nb1 + na2 + 3
    pa1, pb1, pa2 = (
        Fraction(na1, total),
        Fraction(nb1, total),
        Fraction(na2 + 1, total),
    )
    pb2 = 1 - pa1 - pb1 - pa2
    assert pb2 >= 0
    state = b2_state(b2, pa1, pb1, pa2, pb2)
    for x in b2.element_names:
        for y in b2.element_names:
            if b2.leq(x, y):
                assert state.value(x) <= state.value(y)


def test_three_cyclic_contexts_violate_the_pasting_axiom():
    # a, b, c are pairwise co-resident through three different contexts but
    # share none, so the pairwise-compatible triple has no Boolean home.
    from ctxcert.errors import NotAPBA

    with pytest.raises(NotAPBA):
        build_pasted_pba(
            [
                ("A", ["a", "b", "x"]),
                ("B", ["b", "c", "y"]),
                ("C", ["c", "a", "z"]),
            ]
        )


def test_order_disagreement_is_rejected():
    with pytest.raises(InconsistentGluing):
        build_pasted_pba(
            [("C1", ["a", "b", "c"]), ("C2", ["d", "e", "f"])],
            gluings=[
                (("C1", ["a"]), ("C2", ["d", "e"])),
                (("C1", ["a", "b"]), ("C2", ["d"])),
            ],
        )
