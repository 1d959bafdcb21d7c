import io
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from semirandom.multigraph import ALL_MODES, DegreeMode, EdgeKind, MultiGraph, read_edge_list

from conftest import edge_lists

FULL, NO_LOOPS, SIMPLE = DegreeMode.FULL, DegreeMode.NO_LOOPS, DegreeMode.SIMPLE


def test_new_graph_is_empty():
    g = MultiGraph(5)
    assert g.num_edges == 0
    for mode in ALL_MODES:
        assert g.min_degree(mode) == 0
        assert g.degrees(mode) == [0] * 5
    assert MultiGraph(1).n == 1


def test_zero_vertices_rejected():
    with pytest.raises(ValueError):
        MultiGraph(0)


def test_edge_kinds_and_degree_modes():
    g = MultiGraph(4)
    assert g.add_edge(0, 1) is EdgeKind.FRESH
    assert [g.degree(0, m) for m in ALL_MODES] == [1, 1, 1]
    assert g.add_edge(0, 1) is EdgeKind.DUPLICATE
    assert g.degree(0, SIMPLE) == 1 and g.degree(0, NO_LOOPS) == 2
    assert g.add_edge(3, 3) is EdgeKind.LOOP
    assert g.degree(3, FULL) == 2 and g.degree(3, NO_LOOPS) == 0 and g.degree(3, SIMPLE) == 0


def test_out_of_range_vertex():
    g = MultiGraph(3)
    with pytest.raises(IndexError):
        g.add_edge(0, 3)
    with pytest.raises(IndexError):
        g.degree(3)


def test_triangle_and_small_minimums():
    tri = MultiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert tri.degree(0, FULL) == 2
    assert tri.distinct_neighbors(0) == {1, 2}
    loop = MultiGraph.from_edges(2, [(0, 0)])
    assert loop.min_degree(FULL) == 0
    double = MultiGraph.from_edges(2, [(0, 1), (0, 1)])
    assert double.min_degree(SIMPLE) == 1 and double.min_degree(NO_LOOPS) == 2


@given(edge_lists())
def test_incremental_degrees_match_recount(case):
    n, edges = case
    g = MultiGraph.from_edges(n, edges)
    g.check_invariants()
    full, noloop, simple = [0] * n, [0] * n, [set() for _ in range(n)]
    for u, v in edges:
        full[u] += 1
        full[v] += 1
        if u != v:
            noloop[u] += 1
            noloop[v] += 1
            simple[u].add(v)
            simple[v].add(u)
    assert g.degrees(FULL) == full
    assert g.degrees(NO_LOOPS) == noloop
    assert g.degrees(SIMPLE) == [len(s) for s in simple]
    assert sum(full) == 2 * len(edges) == 2 * g.num_edges
    for v in range(n):
        assert g.degree(v, SIMPLE) <= g.degree(v, NO_LOOPS) <= g.degree(v, FULL)
        for mode in ALL_MODES:
            assert v in g.bucket(g.degree(v, mode), mode)


@given(edge_lists(), st.sampled_from([(FULL,), (SIMPLE,), ()]))
def test_untracked_modes_are_derived(case, track):
    n, edges = case
    g = MultiGraph.from_edges(n, edges, track=track)
    ref = MultiGraph.from_edges(n, edges)
    for mode in ALL_MODES:
        assert g.degrees(mode) == ref.degrees(mode)
        assert g.min_degree(mode) == ref.min_degree(mode)


def test_sampler_unique_minimum_and_exclusion():
    rng = random.Random(1)
    g = MultiGraph.from_edges(3, [(1, 2)])  # degrees (0, 1, 1)
    assert {g.sample_min_degree_vertex(FULL, rng) for _ in range(50)} == {0}
    g = MultiGraph.from_edges(3, [(2, 2)])  # FULL degrees (0, 0, 2)
    assert {g.sample_min_degree_vertex(FULL, rng, exclude=0) for _ in range(50)} == {1}
    # bucket {v} alone at the minimum: fall through to the next bucket
    g = MultiGraph.from_edges(3, [(1, 2)])
    assert {g.sample_min_degree_vertex(FULL, rng, exclude=0) for _ in range(100)} == {1, 2}
    with pytest.raises(ValueError):
        MultiGraph(1).sample_min_degree_vertex(FULL, rng, exclude=0)


def test_sampler_uniform_on_min_set():
    rng = random.Random(7)
    g = MultiGraph.from_edges(6, [(0, 1), (0, 2), (1, 2)])  # min set {3, 4, 5}
    draws = 100_000
    counts = Counter(g.sample_min_degree_vertex(FULL, rng) for _ in range(draws))
    assert set(counts) == {3, 4, 5}
    expected = draws / 3
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 13.82  # chi-square, 2 dof, significance 1e-3


def test_edge_list_round_trip():
    g = MultiGraph.from_edges(4, [(0, 1), (0, 1), (3, 3), (2, 1)])
    buf = io.StringIO()
    g.write_edge_list(buf)
    assert buf.getvalue().splitlines() == ["1 2", "1 2", "4 4", "3 2"]
    buf.seek(0)
    assert read_edge_list(buf) == g.edges


def test_copy_prefix():
    g = MultiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    h = g.copy_prefix(2)
    assert h.num_edges == 2 and h.degree(3) == 0
