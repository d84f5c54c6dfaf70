"""Template combinators: assembly checks, round bounds, checkpoints and the
parallel part-1 isolation property."""

import ast

import pytest

from predsync import measures as M, mis, problems
from predsync.audit import audit_run
from predsync.engine import simulate
from predsync.graphs import (build_graph, random_connected_graph,
                             random_tree, validate)
from predsync.stages import ConfigError, ParallelProgram, StagedProgram
from predsync.templates import build_template


def test_build_template_errors():
    with pytest.raises(ConfigError):
        build_template("MIS", "sideways")
    with pytest.raises(ConfigError):
        build_template("NOPE", "simple")
    with pytest.raises(ConfigError):
        build_template("MIS", "interleaved", phase=3)
    with pytest.raises(ConfigError):
        build_template("MIS", "consecutive", tree=True)
    with pytest.raises(ConfigError):
        build_template("VERTEX_COLORING", "parallel")


def test_parallel_requires_fault_tolerant_part1():
    with pytest.raises(ConfigError):
        ParallelProgram(mis.MisInitStage("init"), mis.GreedyStage("max"),
                        mis.GreedyStage("max"), mis.TreePart2Stage(),
                        lambda v: 4)


def test_simple_template_k6_all_ones():
    k6 = build_graph(range(1, 7),
                     [(i, j) for i in range(1, 7) for j in range(i + 1, 7)])
    inst = build_template("MIS", "simple")
    out = simulate(k6, inst.program, {u: 1 for u in k6.nodes})
    # the identifier rule lets node 6 join during initialization, so the run
    # ends in 3 rounds, well inside eta2 + 4 = 6
    assert out.total_rounds == 3
    assert out.value(6) == 1


def test_consecutive_truncation_branch():
    # force a tiny uniform budget so the run must fall through cleanup into
    # the reference, and check the robust bound
    g = random_connected_graph(12, 0.3, 3)
    p = M.make_predictions("MIS", g, k=12, seed=0)
    r = lambda v: 2
    inst = build_template("MIS", "consecutive", r=r)
    out = simulate(g, inst.program, p, trace=True)
    assert validate("MIS", g, out.solution("MIS", g)) is None
    assert out.total_rounds <= inst.robust_bound(g)
    cps = inst.checkpoints(g, out.total_rounds)
    assert audit_run("MIS", g, out, cps) == []


def test_consecutive_inside_uniform_branch():
    g = random_connected_graph(12, 0.3, 3)
    p = M.make_predictions("MIS", g, k=2, seed=1)
    rep = M.error_report("MIS", g, p)
    inst = build_template("MIS", "consecutive")
    out = simulate(g, inst.program, p)
    assert validate("MIS", g, out.solution("MIS", g)) is None
    assert out.total_rounds <= inst.c + inst.f(rep)


def test_interleaved_round_accounting():
    for seed in range(10):
        g = random_connected_graph(10, 0.35, seed)
        for k in (0, 3, 10):
            p = M.make_predictions("MIS", g, k=k, seed=seed)
            rep = M.error_report("MIS", g, p)
            inst = build_template("MIS", "interleaved")
            out = simulate(g, inst.program, p, trace=True)
            assert validate("MIS", g, out.solution("MIS", g)) is None
            assert out.total_rounds <= inst.degrading_bound(rep)
            assert out.total_rounds <= inst.robust_bound(g, rep)
            cps = inst.checkpoints(g, out.total_rounds)
            assert audit_run("MIS", g, out, cps) == []


def test_checkpoint_lists():
    g = random_connected_graph(8, 0.4, 2)
    simple = build_template("MIS", "simple")
    pts = simple.checkpoints(g, 9)
    assert 3 in pts and 9 in pts and 5 in pts and 4 not in pts
    inter = build_template("MIS", "interleaved")
    pts = inter.checkpoints(g, 9)
    assert pts[0] == 3 and all(b - a == 2 for a, b in zip(pts, pts[1:]))


def _r_subchannel_sends(trace, lo, hi):
    """Part-1 ("C", color) messages inside fused rounds lo..hi, keyed by
    (relative round, sender, target)."""
    sends = {}
    for ev in trace:
        if ev.event != "SEND" or not lo <= ev.round <= hi:
            continue
        target, payload = ev.detail.split(":", 1)
        msg = ast.literal_eval(payload)
        if isinstance(msg, dict) and msg.get("R") is not None:
            sends[(ev.round - lo + 1, ev.node, int(target))] = msg["R"]
    return sends


def test_parallel_part1_isolation():
    # part 1 must behave exactly as if run alone with the uniform-terminated
    # nodes crash-scheduled
    for seed in range(6):
        g = random_connected_graph(9, 0.35, seed)
        p = {u: 0 for u in g.nodes}  # init terminates nobody
        inst = build_template("MIS", "parallel")
        out = simulate(g, inst.program, p, max_rounds=inst.max_rounds(g),
                       trace=True)
        init_len, r1 = inst.init_len, inst.r1(g)
        fused = _r_subchannel_sends(out.trace, init_len + 1, init_len + r1)

        crashes = {}
        for u, t in out.term_round.items():
            if init_len < t <= init_len + r1:
                crashes.setdefault(t - init_len, set()).add(u)
        alone = StagedProgram([problems.LinialColoringStage(store_only=True)])
        ref = simulate(g, alone, crash_schedule=crashes,
                       max_rounds=r1 + 5, trace=True)
        lone = {}
        for ev in ref.trace:
            if ev.event != "SEND":
                continue
            target, payload = ev.detail.split(":", 1)
            lone[(ev.round, ev.node, int(target))] = ast.literal_eval(payload)
        shared = set(fused) & set(lone)
        assert shared, "no overlapping part-1 traffic to compare"
        for key in shared:
            assert fused[key] == lone[key], (seed, key)
        # every part-1 message in the fused run appears in the isolated run
        assert set(fused) <= set(lone)


def test_tree_parallel_bounds():
    for seed in range(10):
        t = random_tree(4 + seed, seed)
        g = t.graph
        inst = build_template("MIS", "parallel", tree=True)
        for k in (0, 2, 5):
            p = M.make_predictions("MIS", g, k=k, seed=seed)
            rep = M.error_report("MIS", g, p, tree=t)
            out = simulate(g, inst.program, p, tree=t,
                           max_rounds=inst.max_rounds(g), trace=True)
            assert validate("MIS", g, out.solution("MIS", g)) is None
            assert out.total_rounds <= inst.robust_bound(g)
            if out.total_rounds <= inst.init_len + inst.r1(g):
                assert out.total_rounds <= -(-rep["eta_t"] // 2) + 5
            cps = inst.checkpoints(g, out.total_rounds)
            assert audit_run("MIS", g, out, cps) == []


def test_other_problem_templates():
    for kind in ("MAXIMAL_MATCHING", "VERTEX_COLORING", "EDGE_COLORING"):
        for seed in range(6):
            g = random_connected_graph(9, 0.35, seed)
            for tpl in ("simple", "consecutive"):
                inst = build_template(kind, tpl)
                for k in (0, 4):
                    p = M.make_predictions(kind, g, k=k, seed=seed)
                    rep = M.error_report(kind, g, p)
                    out = simulate(g, inst.program, p,
                                   max_rounds=inst.max_rounds(g))
                    assert validate(kind, g, out.solution(kind, g)) is None
                    if k == 0:
                        assert out.total_rounds == inst.c
                    assert out.total_rounds <= inst.degrading_bound(rep) \
                        or (inst.robust_bound(g) is not None
                            and out.total_rounds <= inst.robust_bound(g))
