"""Typed pedigree graphs: vertex rule, edge rules, connectivity."""
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pedigree.cycles import (
    Pedigree,
    PedigreeError,
    cycle_from_pedigree,
    enumerate_pedigrees,
    sample_uniform,
)
from pedigree.demo import DEMO_A, DEMO_B, demo_edges, narrate
from pedigree.graph import (
    T1_AB,
    T1_BA,
    T2_AB,
    T2_BA,
    CycleIndex,
    IdenticalPedigreeError,
    TypedEdge,
    adjacent_from_indexes,
    build,
    empty_graph,
    extend,
    graph_from_json,
    is_vertex,
    past_edges,
    pedigree_adjacent,
)


@pytest.fixture(scope="module")
def demo_cycles():
    return cycle_from_pedigree(DEMO_A), cycle_from_pedigree(DEMO_B)


def test_vertex_rule_on_demo(demo_cycles):
    a, b = demo_cycles
    assert not is_vertex(a, b, 6)
    assert is_vertex(a, b, 4)
    assert not is_vertex(a, a, 7)
    for m in (1, 2, 3):
        assert not is_vertex(a, b, m)
    with pytest.raises(PedigreeError):
        is_vertex(a, b, 11)


def test_past_edges_demo_times(demo_cycles):
    a, b = demo_cycles
    assert past_edges(a, b, 5) == {TypedEdge(4, 5, T1_BA), TypedEdge(4, 5, T2_AB)}
    assert past_edges(a, b, 8) == frozenset()
    assert past_edges(a, b, 10) == {TypedEdge(9, 10, T2_AB)}
    assert past_edges(a, b, 7) == {TypedEdge(5, 7, T2_AB), TypedEdge(4, 7, T2_BA)}
    assert past_edges(a, b, 9) == {TypedEdge(4, 9, T1_AB), TypedEdge(8, 9, T2_BA)}
    with pytest.raises(PedigreeError):
        past_edges(a, b, 6)


def test_extend_demo_steps(demo_cycles):
    a, b = demo_cycles
    g = empty_graph()
    for m in range(4, 6):
        g = extend(g, a, b, m)
    g5 = g
    g6 = extend(g5, a, b, 6)
    assert g6.vertices == g5.vertices
    assert g6.typed_edges == g5.typed_edges
    g7 = extend(g6, a, b, 7)
    g8 = extend(g7, a, b, 8)
    assert g8.component_count == g7.component_count + 1
    g9 = extend(g8, a, b, 9)
    assert TypedEdge(4, 9, T1_AB) in g9.typed_edges
    assert TypedEdge(8, 9, T2_BA) in g9.typed_edges
    assert all(8 not in c or len(c) > 1 for c in g9.components)
    with pytest.raises(PedigreeError):
        extend(g9, a, b, 9)


def test_build_demo_full_graph():
    g = build(DEMO_A, DEMO_B)
    assert g.vertices == {4, 5, 7, 8, 9, 10}
    assert g.typed_edges == demo_edges()
    assert g.is_connected
    assert g.component_count == 1


def test_build_identical_pedigree_empty():
    p = Pedigree(7, (2, 1, 4, 3))
    g = build(p, p)
    assert g.vertices == frozenset()
    assert not g.is_connected


def test_adjacency_demo_and_small():
    assert pedigree_adjacent(DEMO_A, DEMO_B)
    peds4 = list(enumerate_pedigrees(4))
    for x, y in itertools.combinations(peds4, 2):
        assert pedigree_adjacent(x, y)
    with pytest.raises(IdenticalPedigreeError):
        pedigree_adjacent(peds4[0], peds4[0])
    with pytest.raises(PedigreeError):
        pedigree_adjacent(Pedigree(4, (1,)), Pedigree(5, (1, 2)))
    with pytest.raises(PedigreeError):
        pedigree_adjacent(Pedigree(3), Pedigree(3))


def test_fast_route_matches_built_graph():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(4, 12)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        if pa == pb:
            continue
        g = build(pa, pb)
        ia = CycleIndex(cycle_from_pedigree(pa))
        ib = CycleIndex(cycle_from_pedigree(pb))
        assert adjacent_from_indexes(ia, ib) == g.is_connected


def test_induced_subgraph_property():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(5, 11)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        full = build(pa, pb)
        for m in range(4, n):
            prefix = build(Pedigree(m, pa.choices[: m - 3]), Pedigree(m, pb.choices[: m - 3]))
            restricted = full.restricted_to(m)
            assert prefix.vertices == restricted.vertices
            assert prefix.typed_edges == restricted.typed_edges
            assert prefix.components == restricted.components


def test_typed_past_degree_at_most_one_per_direction():
    rng = random.Random(23)
    for _ in range(200):
        n = rng.randint(4, 14)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        g = build(pa, pb)
        for v in g.vertices:
            per_dir = {"AB": 0, "BA": 0}
            for e in g.typed_edges:
                if e.hi == v:
                    per_dir[e.tag[-2:]] += 1
            assert per_dir["AB"] <= 1 and per_dir["BA"] <= 1
            assert g.typed_past_degree(v) <= 2


def test_simple_degree_bound_and_target_vertices():
    rng = random.Random(37)
    for _ in range(200):
        n = rng.randint(4, 16)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        g = build(pa, pb)
        for v in g.vertices:
            assert g.simple_degree(v) <= 6
        for e in g.typed_edges:
            assert e.lo in g.vertices and e.hi in g.vertices


def test_isolation_characterization():
    # a fresh vertex is isolated iff each cycle's new edge is currently an
    # edge of the other cycle
    rng = random.Random(41)
    for _ in range(150):
        n = rng.randint(4, 12)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        ca, cb = cycle_from_pedigree(pa), cycle_from_pedigree(pb)
        for m in range(4, n + 1):
            if not is_vertex(ca, cb, m):
                continue
            prev_a = cycle_from_pedigree(Pedigree(m - 1, pa.choices[: m - 4]))
            prev_b = cycle_from_pedigree(Pedigree(m - 1, pb.choices[: m - 4]))
            expected = prev_b.has_edge(ca.nu_pair(m)) and prev_a.has_edge(cb.nu_pair(m))
            assert (past_edges(ca, cb, m) == frozenset()) == expected


def test_component_count_bounded_by_isolated_creations():
    rng = random.Random(53)
    for _ in range(100):
        n = rng.randint(4, 20)
        pa, pb = sample_uniform(n, rng), sample_uniform(n, rng)
        ca, cb = cycle_from_pedigree(pa), cycle_from_pedigree(pb)
        g = empty_graph()
        isolated = 0
        for m in range(4, n + 1):
            before = g.component_count
            g = extend(g, ca, cb, m)
            if g.component_count == before + 1:
                isolated += 1
            assert g.component_count <= isolated


@given(st.integers(min_value=0, max_value=59), st.integers(min_value=0, max_value=59))
@settings(max_examples=80, deadline=None)
def test_adjacency_is_symmetric(i, j):
    peds = list(enumerate_pedigrees(6))
    if i == j:
        return
    assert pedigree_adjacent(peds[i], peds[j]) == pedigree_adjacent(peds[j], peds[i])


def test_json_and_dot_round_trip():
    g = build(DEMO_A, DEMO_B)
    d = g.to_json_dict()
    assert d["vertices"] == [4, 5, 7, 8, 9, 10]
    assert d["components"] == 1
    assert {"u": 4, "v": 5, "tag": "T1-BA"} in d["edges"]
    back = graph_from_json(g.to_json())
    assert back.vertices == g.vertices
    assert back.typed_edges == g.typed_edges
    assert back.components == g.components
    dot = g.to_dot()
    assert "4 -- 5" in dot and dot.startswith("graph pedigree {")


def test_narration_mentions_demo_facts():
    reports, g = narrate()
    by_m = {r.m: r for r in reports}
    assert not by_m[6].vertex_added
    assert by_m[8].isolated
    assert by_m[4].isolated
    assert not by_m[9].isolated
    assert g.is_connected
    targets_9 = {r.tag: r.target for r in by_m[9].rules}
    assert targets_9[T1_AB] == 4 and targets_9[T2_BA] == 8
    assert targets_9[T1_BA] is None and targets_9[T2_AB] is None
