"""MIS node programs: base, init, cleanup, greedy, u_bw, coloring part 2,
and the rooted-tree programs."""

import pytest

from predsync import measures as M, mis
from predsync.audit import audit_run, even_rounds, partial_outputs
from predsync.engine import ProtocolViolation, simulate, snapshot_active
from predsync.graphs import (build_graph, components, grid,
                             induced_subgraph, line, line_tree,
                             random_connected_graph, random_tree, validate,
                             _rng)


def _k(ids):
    ids = list(ids)
    return build_graph(ids, [(a, b) for i, a in enumerate(ids)
                             for b in ids[i + 1:]])


# base and init


def test_base_correct_predictions_output_prediction():
    g = line(5)
    p = {1: 1, 2: 0, 3: 1, 4: 0, 5: 1}
    out = simulate(g, mis.mis_base(), p)
    assert out.total_rounds <= 3
    assert {u: out.value(u) for u in g.nodes} == p


def test_base_all_zero_line_is_empty():
    g = line(3)
    out = simulate(g, mis.mis_base(), {1: 0, 2: 0, 3: 0})
    assert out.undecided(g) == {1, 2, 3}


def test_base_conflicting_edge_undecided():
    g = build_graph([1, 2], [(1, 2)])
    out = simulate(g, mis.mis_base(), {1: 1, 2: 1})
    assert out.undecided(g) == {1, 2}


def test_init_breaks_ties_by_identifier():
    g = build_graph([3, 7], [(3, 7)])
    out = simulate(g, mis.mis_init(), {3: 1, 7: 1})
    assert out.value(7) == 1 and out.value(3) == 0
    tri = _k([2, 5, 9])
    out = simulate(tri, mis.mis_init(), {2: 1, 5: 1, 9: 1})
    assert out.value(9) == 1 and out.value(2) == 0 and out.value(5) == 0


def test_init_extends_base():
    for seed in range(15):
        g = random_connected_graph(4 + seed % 9, 0.35, seed)
        p = M.make_predictions("MIS", g, k=4, seed=seed)
        base = simulate(g, mis.mis_base(), p).outputs
        init = simulate(g, mis.mis_init(), p).outputs
        for u in g.nodes:
            if base[u]:
                assert init[u] == base[u]


def test_cleanup_star():
    star = build_graph([9, 1, 2, 3], [(9, 1), (9, 2), (9, 3)])

    # leaves know 9 joined (stage state persists via Ctx only inside one
    # program, so drive the cleanup with a prediction standing in for it)
    class Pre(mis.MisCleanupStage):
        def start(self, ctx):
            if ctx.view.id != 9:
                ctx.nbr_one.add(9)
            return super().start(ctx)

    from predsync.stages import StagedProgram
    out = simulate(star, StagedProgram([Pre()]), None)
    assert out.total_rounds == 1
    assert all(out.value(u) == 0 for u in (1, 2, 3))


# greedy


def test_greedy_line5():
    g = line(5)
    out = simulate(g, mis.greedy_mis(), trace=True)
    assert out.total_rounds == 5
    assert {u for u in g.nodes if out.value(u) == 1} == {1, 3, 5}
    assert audit_run("MIS", g, out, even_rounds(out)) == []


def test_greedy_clique_and_single():
    out = simulate(_k(range(1, 7)), mis.greedy_mis())
    assert out.total_rounds == 2
    single = build_graph([4], [])
    out = simulate(single, mis.greedy_mis())
    assert out.total_rounds == 1 and out.value(4) == 1


def test_greedy_even_round_zero_iff_one_neighbor():
    for seed in range(20):
        g = random_connected_graph(4 + seed % 10, 0.3, seed)
        out = simulate(g, mis.greedy_mis(), trace=True)
        for rnd in range(2, out.total_rounds + 1, 2):
            y = {u: s.get("y") for u, s in partial_outputs(out, rnd).items()}
            for u in g.nodes:
                has_one = any(y.get(v) == 1 for v in g.neighbors(u))
                assert (y.get(u) == 0) == has_one, (seed, rnd, u)


def test_greedy_per_component_bound():
    for seed in range(40):
        g = random_connected_graph(4 + seed % 12, 0.3, seed)
        out = simulate(g, mis.greedy_mis())
        assert validate("MIS", g, out.solution("MIS", g)) is None
        assert out.total_rounds <= min(M.mu1(g), M.mu2(g) + 1)


def test_greedy_steady_progress():
    # at the end of every round r, every still-active component S satisfies
    # r + f(mu(S)) <= f(mu(G)) + 2 for f = id (mu1) and f = x+1 (mu2)
    for seed in range(15):
        g = random_connected_graph(5 + seed % 8, 0.35, seed)
        out = simulate(g, mis.greedy_mis(), trace=True)
        for rnd in range(1, out.total_rounds + 1):
            active = snapshot_active(out, g, rnd)
            for s in components(induced_subgraph(g, active)):
                assert rnd + M.mu1(s) <= M.mu1(g) + 2
                assert rnd + M.mu2(s) + 1 <= M.mu2(g) + 1 + 2


# u_bw


def test_u_bw_grid_pattern():
    g = grid(16, 16)
    p = M.make_predictions("MIS", g, pattern="GRID_4BLOCK", rows=16, cols=16)
    out = simulate(g, mis.u_bw(), p)
    assert validate("MIS", g, out.solution("MIS", g)) is None
    # color components have <= 4 nodes; one probe round plus two alternating
    # passes of the greedy bound
    assert out.total_rounds <= 1 + 2 * 4


def test_u_bw_all_black():
    g = line(6)
    out = simulate(g, mis.u_bw(), {u: 1 for u in g.nodes})
    assert validate("MIS", g, out.solution("MIS", g)) is None


# coloring part 2


def test_part2_path():
    g = line(3)
    out = simulate(g, mis.coloring_to_mis_part2(), {1: 1, 2: 2, 3: 1})
    assert out.value(1) == 1 and out.value(3) == 1 and out.value(2) == 0


def test_part2_clique_color1_wins_first():
    g = _k([1, 2, 3, 4])
    out = simulate(g, mis.coloring_to_mis_part2(), {1: 2, 2: 1, 3: 3, 4: 4})
    assert out.value(2) == 1 and out.term_round[2] == 2  # reveal + round 1
    assert all(out.value(u) == 0 for u in (1, 3, 4))


def test_part2_single_node():
    g = build_graph([5], [])
    out = simulate(g, mis.coloring_to_mis_part2(), {5: 1})
    assert out.value(5) == 1


def test_part2_rejects_improper_coloring():
    g = build_graph([1, 2], [(1, 2)])
    with pytest.raises(ProtocolViolation):
        simulate(g, mis.coloring_to_mis_part2(), {1: 1, 2: 1})


def test_part2_combined_beats_mu2_bound():
    for seed in range(15):
        g = random_connected_graph(4 + seed % 9, 0.4, seed)
        colors = M.solve("VERTEX_COLORING", g)
        out = simulate(g, mis.coloring_to_mis_part2(combined=True), colors)
        assert validate("MIS", g, out.solution("MIS", g)) is None
        assert out.total_rounds <= 1 + M.mu2(g) + 1  # reveal + mu2(S)+1


# rooted-tree programs


def test_tree_init_mod3_line():
    t = line_tree(15)
    p = M.make_predictions("MIS", t.graph, pattern="MOD3_LINE", tree=t)
    assert M.eta_t(t, p) == 2
    out = simulate(t.graph, mis.tree_init(eager=True), p, tree=t)
    assert out.total_rounds == 2
    assert max(out.term_round.values()) == 2


def test_tree_init_correct_predictions():
    for seed in range(10):
        t = random_tree(3 + seed, seed)
        p = M.make_predictions("MIS", t.graph, k=0)
        out = simulate(t.graph, mis.tree_init(), p, tree=t)
        assert out.total_rounds == 3
        assert validate("MIS", t.graph, out.solution("MIS", t.graph)) is None


def test_tree_init_leaves_monochromatic_components():
    for seed in range(20):
        t = random_tree(4 + seed % 10, seed)
        p = M.make_predictions("MIS", t.graph, k=4, seed=seed)
        out = simulate(t.graph, mis.tree_init(), p, tree=t)
        active = out.undecided(t.graph)
        for u in active:
            for v in t.graph.neighbors(u):
                if v in active:
                    assert p[u] == p[v], (seed, u, v)


def test_tree_uniform_paths():
    single = random_tree(1, 0)
    out = simulate(single.graph, mis.tree_uniform(), tree=single)
    assert out.total_rounds == 1
    t2 = line_tree(2)
    out = simulate(t2.graph, mis.tree_uniform(), tree=t2)
    assert out.total_rounds == 1
    assert out.value(1) == 1 and out.value(2) == 0
    t7 = line_tree(7)
    out = simulate(t7.graph, mis.tree_uniform(), tree=t7, trace=True)
    assert validate("MIS", t7.graph, out.solution("MIS", t7.graph)) is None
    assert out.total_rounds <= 2 * ((7 + 1) // 2)
    assert audit_run("MIS", t7.graph, out, even_rounds(out)) == []


def test_tree_uniform_random_trees():
    for seed in range(20):
        t = random_tree(3 + seed % 12, seed)
        out = simulate(t.graph, mis.tree_uniform(), tree=t, trace=True)
        assert validate("MIS", t.graph, out.solution("MIS", t.graph)) is None
        assert audit_run("MIS", t.graph, out, even_rounds(out)) == []


def test_gps_examples():
    t = random_tree(1, 0)
    out = simulate(t.graph, mis.gps_tree_3coloring(), tree=t)
    assert out.value(next(iter(t.graph.nodes))) in (1, 2, 3)
    t2 = line_tree(2)
    out = simulate(t2.graph, mis.gps_tree_3coloring(), tree=t2)
    assert out.value(1) != out.value(2)
    t200 = random_tree(200, 3, d=10 ** 6)
    budget = mis.gps_budget_even(10 ** 6)
    out = simulate(t200.graph, mis.gps_tree_3coloring(), tree=t200,
                   max_rounds=budget + 5)
    sol = {u: out.value(u) for u in t200.graph.nodes}
    assert all(c in (1, 2, 3) for c in sol.values())
    assert all(sol[u] != sol[v] for u, v in t200.graph.edges())
    assert out.total_rounds <= budget


def test_gps_fault_tolerance():
    for seed in range(25):
        t = random_tree(4 + seed % 12, seed)
        g = t.graph
        budget = mis.gps_rounds(g.d)
        r = _rng(seed, "gps-crash")
        sched = {}
        for u in sorted(g.nodes):
            if r.random() < 0.4:
                sched.setdefault(r.randrange(1, budget + 1), set()).add(u)
        out = simulate(g, mis.gps_tree_3coloring(), tree=t,
                       max_rounds=budget + 5, crash_schedule=sched)
        sol = {u: out.value(u) for u in g.nodes}
        for u, v in g.edges():
            if sol[u] is not None and sol[v] is not None:
                assert sol[u] != sol[v], (seed, u, v)


def test_tree_part2():
    single = build_graph([5], [])
    out = simulate(single, mis.tree_ref_part2(), {5: 2})
    assert out.value(5) == 1 and out.term_round[5] == 2
    edgeless = build_graph([1, 2], [])
    out = simulate(edgeless, mis.tree_ref_part2(), {1: 1, 2: 1})
    assert out.value(1) == 1 and out.value(2) == 1
    assert out.term_round[1] == 1
    t7 = line_tree(7)
    colors = {u: (i % 2) + 2 for i, u in enumerate(sorted(t7.graph.nodes))}
    out = simulate(t7.graph, mis.tree_ref_part2(), colors)
    assert out.total_rounds == 2
    assert validate("MIS", t7.graph, out.solution("MIS", t7.graph)) is None
    with pytest.raises(ProtocolViolation):
        simulate(line(2), mis.tree_ref_part2(), {1: 3, 2: 3})
