"""Error components, measures and prediction generation."""

import pytest

from predsync import measures as M
from predsync.graphs import (build_graph, grid, line, line_tree,
                             random_connected_graph, random_tree, validate)


def _k(n):
    return build_graph(range(1, n + 1),
                       [(i, j) for i in range(1, n + 1)
                        for j in range(i + 1, n + 1)])


def test_mu_values():
    single = build_graph([1], [])
    assert M.mu1(single) == 1 and M.mu2(single) == 0
    assert M.mu2(_k(6)) == 2
    g = line(5)
    assert M.mu1(g) == 5 and M.mu2(g) == 4


def test_error_components_examples():
    e = build_graph([1, 2], [(1, 2)])
    comps = M.error_components("MIS", e, {1: 1, 2: 1})
    assert len(comps) == 1 and sorted(comps[0].nodes) == [1, 2]
    lonely = build_graph([1, 2, 3], [(1, 2), (2, 3)])
    comps = M.error_components("MIS", lonely, {1: 0, 2: 0, 3: 0})
    assert {u for c in comps for u in c.nodes} == {1, 2, 3}
    assert M.error_components("MIS", e, {1: 1, 2: 0}) == []


def test_eta_examples():
    k6 = _k(6)
    ones = {u: 1 for u in k6.nodes}
    assert M.eta(M.MU1, "MIS", k6, ones) == 6
    assert M.eta(M.MU2, "MIS", k6, ones) == 2
    with pytest.raises(ValueError):
        M.eta("MU3", "MIS", k6, ones)


def test_grid_pattern():
    g = grid(16, 16)
    p = M.make_predictions("MIS", g, pattern="GRID_4BLOCK", rows=16, cols=16)
    assert M.eta(M.MU1, "MIS", g, p) == 256
    assert M.eta_bw(g, p) == 4


def test_eta_bw_all_ones_line():
    g = line(7)
    p = M.make_predictions("MIS", g, pattern="ALL_ONES")
    assert M.eta_bw(g, p) == 7 == M.eta(M.MU1, "MIS", g, p)


def test_eta_t():
    t = line_tree(15)
    p = M.make_predictions("MIS", t.graph, pattern="MOD3_LINE", tree=t)
    assert [p[u] for u in sorted(t.graph.nodes)][:4] == [0, 1, 1, 0]
    assert M.eta_t(t, p) == 2
    t6 = line_tree(6)
    assert M.eta_t(t6, {u: 1 for u in t6.graph.nodes}) == 6
    solved = M.make_predictions("MIS", t6.graph, k=0)
    assert M.eta_t(t6, solved) == 0


def test_eta_hamming():
    tri = build_graph([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    assert M.eta_hamming(tri, {1: 1, 2: 1, 3: 1}) == 2
    e = build_graph([1, 2], [(1, 2)])
    assert M.eta_hamming(e, {1: 0, 2: 0}) == 1
    assert M.eta_hamming(e, {1: 1, 2: 0}) == 0


def test_solve_then_corrupt_k0_is_correct():
    for kind in ("MIS", "MAXIMAL_MATCHING", "VERTEX_COLORING",
                 "EDGE_COLORING"):
        g = random_connected_graph(10, 0.3, 11)
        p = M.make_predictions(kind, g, k=0)
        assert M.eta(M.MU1, kind, g, p) == 0
        assert validate(kind, g, p) is None


def test_corruption_is_deterministic_and_in_range():
    g = random_connected_graph(12, 0.3, 4)
    for kind in ("MIS", "MAXIMAL_MATCHING", "VERTEX_COLORING",
                 "EDGE_COLORING"):
        a = M.make_predictions(kind, g, k=5, seed=9)
        b = M.make_predictions(kind, g, k=5, seed=9)
        assert a == b
    p = M.make_predictions("VERTEX_COLORING", g, k=12, seed=1)
    assert all(1 <= p[u] <= g.delta + 1 for u in g.nodes)
    p = M.make_predictions("MAXIMAL_MATCHING", g, k=12, seed=1)
    assert all(p[u] is None or p[u] in g.adjacency[u] for u in g.nodes)


def test_pattern_errors():
    g = line(5)
    with pytest.raises(ValueError):
        M.make_predictions("MIS", g, pattern="GRID_4BLOCK", rows=2, cols=2)
    with pytest.raises(ValueError):
        M.make_predictions("MIS", g, pattern="MOD3_LINE")
    with pytest.raises(ValueError):
        M.make_predictions("VERTEX_COLORING", g, pattern="ALL_ONES")
    with pytest.raises(ValueError):
        M.make_predictions("MIS", g, pattern="NOPE")


def test_measure_relations_on_random_instances():
    for seed in range(15):
        g = random_connected_graph(4 + seed % 9, 0.35, seed)
        for k in (1, 3, 6):
            p = M.make_predictions("MIS", g, k=k, seed=seed)
            eta1 = M.eta(M.MU1, "MIS", g, p)
            assert M.eta(M.MU2, "MIS", g, p) <= eta1
            assert M.eta_bw(g, p) <= eta1
    for seed in range(10):
        t = random_tree(4 + seed, seed)
        p = M.make_predictions("MIS", t.graph, k=3, seed=seed)
        assert M.eta_t(t, p) <= M.eta_bw(t.graph, p)


def test_init_components_nest_inside_base_components():
    from predsync import mis
    from predsync.engine import simulate
    from predsync.graphs import components, induced_subgraph
    for seed in range(20):
        g = random_connected_graph(4 + seed % 9, 0.35, seed)
        p = M.make_predictions("MIS", g, k=4, seed=seed)
        base_comps = [set(c.nodes) for c in M.error_components("MIS", g, p)]
        init_active = simulate(g, mis.mis_init(), p).undecided(g)
        for c in components(induced_subgraph(g, init_active)):
            assert any(set(c.nodes) <= b for b in base_comps)


def test_prediction_file_roundtrip():
    g = line(3)
    p = {1: 2, 2: None, 3: 2}
    text = M.format_predictions("MAXIMAL_MATCHING", p)
    assert M.parse_predictions("MAXIMAL_MATCHING", text) == p
    ec = {1: {2: 1}, 2: {1: 1, 3: 2}, 3: {2: 2}}
    text = M.format_predictions("EDGE_COLORING", ec)
    assert M.parse_predictions("EDGE_COLORING", text) == ec
    with pytest.raises(ValueError):
        M.parse_predictions("MIS", "1 2 3\n")
