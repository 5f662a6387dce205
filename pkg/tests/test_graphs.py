"""Exclusivity graphs: cliques, states, 0-1 enumeration, isomorphism."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxcert.errors import MissingVertex, NotAGraphState, SearchBudgetExceeded
from ctxcert.graphs import (
    ExclusivityGraph,
    PBAState,
    ZeroOneState,
    enumerate_zero_one_states,
    graphs_isomorphic,
    is_state,
)


def cycle(n, prefix="v"):
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    return ExclusivityGraph(verts, edges)


def path(n, prefix="v"):
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = [(verts[i], verts[i + 1]) for i in range(n - 1)]
    return ExclusivityGraph(verts, edges)


def kcbs_graph():
    verts = [f"P{i}" for i in range(5)] + [f"P{i}{(i + 1) % 5}" for i in range(5)]
    edges = []
    for i in range(5):
        j = (i + 1) % 5
        edges += [(f"P{i}", f"P{j}"), (f"P{i}{j}", f"P{i}"), (f"P{i}{j}", f"P{j}")]
    return ExclusivityGraph(verts, edges)


def test_pentagon_cliques_are_edges():
    g = cycle(5)
    cliques = g.maximal_cliques()
    assert len(cliques) == 5
    assert all(len(c) == 2 for c in cliques)


def test_triangle_single_clique():
    g = ExclusivityGraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert g.maximal_cliques() == (("a", "b", "c"),)


def test_kcbs_graph_cliques_are_five_triangles():
    g = kcbs_graph()
    cliques = g.maximal_cliques()
    assert len(cliques) == 5
    assert all(len(c) == 3 for c in cliques)
    assert ("P0", "P01", "P1") in cliques


def test_graph_rejects_loops_and_unknown_vertices():
    with pytest.raises(ValueError):
        ExclusivityGraph(["a"], [("a", "a")])
    with pytest.raises(MissingVertex):
        ExclusivityGraph(["a"], [("a", "b")])


def test_is_state_examples():
    g = kcbs_graph()
    half = {v: (Fraction(1, 2) if v.startswith("P") and len(v) == 2 else Fraction(0)) for v in g.vertices}
    assert is_state(g, half)
    third = {v: Fraction(1, 3) for v in g.vertices}
    assert is_state(g, third)
    ones = {v: Fraction(1) for v in cycle(5).vertices}
    assert not is_state(cycle(5), ones)
    with pytest.raises(MissingVertex):
        is_state(g, {"P0": 1})


def test_pba_state_rejects_out_of_range():
    g = ExclusivityGraph(["a", "b"], [("a", "b")])
    with pytest.raises(NotAGraphState):
        PBAState(g, {"a": Fraction(2), "b": Fraction(-1)})
    PBAState(g, {"a": Fraction(2), "b": Fraction(-1)}, range_checked=False)


def test_zero_one_state_validation():
    g = kcbs_graph()
    ZeroOneState(g, frozenset({"P0", "P2", "P34"}))
    with pytest.raises(NotAGraphState):
        ZeroOneState(g, frozenset({"P0", "P1"}))  # adjacent
    with pytest.raises(NotAGraphState):
        ZeroOneState(g, frozenset())  # empty cliques


def test_enumerate_triangle():
    g = ExclusivityGraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    states = enumerate_zero_one_states(g)
    assert len(states) == 3
    assert sorted(tuple(sorted(s.ones)) for s in states) == [("a",), ("b",), ("c",)]


def test_enumerate_kcbs_eleven():
    assert len(enumerate_zero_one_states(kcbs_graph())) == 11


def test_enumerate_matches_pentagon_independent_sets():
    # Oracle: brute-force independent sets of the 5-cycle extend uniquely.
    pent = [f"P{i}" for i in range(5)]
    adj = {i: {(i - 1) % 5, (i + 1) % 5} for i in range(5)}
    independent = []
    for mask in range(32):
        chosen = [i for i in range(5) if mask >> i & 1]
        if all(j not in adj[i] for i in chosen for j in chosen):
            independent.append(frozenset(chosen))
    states = enumerate_zero_one_states(kcbs_graph())
    got = {frozenset(i for i in range(5) if f"P{i}" in s.ones) for s in states}
    assert got == set(independent)
    assert len(independent) == 11


def test_enumerate_odd_cycle_has_no_states():
    assert enumerate_zero_one_states(cycle(5)) == []


def test_every_enumerated_state_is_a_state():
    g = kcbs_graph()
    for s in enumerate_zero_one_states(g):
        assert is_state(g, {v: s.value(v) for v in g.vertices})


def test_budget_exceeded():
    g = kcbs_graph()
    with pytest.raises(SearchBudgetExceeded):
        enumerate_zero_one_states(g, budget=3)


def test_isomorphic_relabelled_cycle():
    g1 = cycle(5)
    mapping = {f"v{i}": f"w{(3 * i + 1) % 5}" for i in range(5)}
    g2 = g1.relabel(mapping)
    ok, witness = graphs_isomorphic(g1, g2)
    assert ok
    for u, v in g1.edges:
        assert g2.has_edge(witness[u], witness[v])


def test_cycle_vs_path_not_isomorphic():
    ok, witness = graphs_isomorphic(cycle(5), path(5))
    assert not ok and witness is None


def test_same_degrees_not_isomorphic():
    # C6 versus two triangles: both 2-regular on 6 vertices.
    g1 = cycle(6)
    verts = ["a", "b", "c", "d", "e", "f"]
    edges = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]
    g2 = ExclusivityGraph(verts, edges)
    ok, _ = graphs_isomorphic(g1, g2)
    assert not ok


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_state_count_invariant_under_relabelling(seed):
    rng = random.Random(seed)
    g = kcbs_graph()
    names = list(g.vertices)
    permuted = names[:]
    rng.shuffle(permuted)
    mapping = dict(zip(names, permuted))
    h = g.relabel(mapping)
    ok, witness = graphs_isomorphic(g, h)
    assert ok
    sg = enumerate_zero_one_states(g)
    sh = enumerate_zero_one_states(h)
    assert len(sg) == len(sh)
    transported = {frozenset(witness[v] for v in s.ones) for s in sg}
    assert transported == {s.ones for s in sh}


def test_dot_export_sorted_and_verbatim():
    g = ExclusivityGraph(["b", "a", "c"], [("b", "a"), ("c", "b")])
    dot = g.to_dot()
    lines = dot.strip().splitlines()
    assert lines[0] == "graph atoms {"
    assert lines[1:4] == ['  "a";', '  "b";', '  "c";']
    assert lines[4:6] == ['  "a" -- "b";', '  "b" -- "c";']
    assert lines[-1] == "}"
