"""Extendability auditor.

Replays a traced run and checks, at each checkpoint round, that the partial
output accumulated so far can still be completed to a correct solution.
The checks are the problem-specific characterizations below; each is
sufficient for extendability (a greedy completion of the undecided part
always exists once they hold).
"""

from __future__ import annotations

import ast

from .graphs import Graph


def partial_outputs(outcome, upto_round: int) -> dict:
    """Outputs assigned by the end of the given round, from the trace."""
    if outcome.trace is None:
        raise ValueError("auditing needs a trace-enabled run")
    partial: dict = {}
    for ev in outcome.trace:
        if ev.event != "OUTPUT" or ev.round > upto_round:
            continue
        text, value = ev.detail.split("=", 1)
        try:
            slot = int(text)
        except ValueError:
            slot = text
        partial.setdefault(ev.node, {})[slot] = ast.literal_eval(value)
    return partial


def _check_mis(g: Graph, partial) -> str:
    y = {u: partial[u].get("y") for u in partial if "y" in partial[u]}
    for u, value in y.items():
        if value == 1:
            for v in g.neighbors(u):
                if y.get(v) == 1:
                    return f"adjacent nodes {u},{v} both joined"
        elif value == 0:
            if not any(y.get(v) == 1 for v in g.neighbors(u)):
                return f"node {u} output 0 with no joined neighbor"
        else:
            return f"node {u} output {value!r}"
    return ""


def _check_matching(g: Graph, partial) -> str:
    y = {u: partial[u].get("y") for u in partial if "y" in partial[u]}
    for u, mate in y.items():
        if mate is None:
            for v in g.neighbors(u):
                if v not in y or y[v] is None or y[v] == u:
                    return f"node {u} output - but neighbor {v} is not matched away"
        else:
            if mate not in g.adjacency[u]:
                return f"node {u} matched to non-neighbor {mate}"
            if y.get(mate) != u:
                return f"match {u}->{mate} not mutual"
    return ""


def _check_vertex_coloring(g: Graph, partial) -> str:
    y = {u: partial[u].get("y") for u in partial if "y" in partial[u]}
    hi = g.delta + 1
    for u, c in y.items():
        if not isinstance(c, int) or not 1 <= c <= hi:
            return f"node {u} color {c!r} out of range"
        for v in g.neighbors(u):
            if y.get(v) == c:
                return f"adjacent nodes {u},{v} share color {c}"
    return ""


def _check_edge_coloring(g: Graph, partial) -> str:
    hi = max(1, 2 * g.delta - 1)
    for u in partial:
        seen = {}
        for v, c in partial[u].items():
            if v not in g.adjacency[u]:
                return f"node {u} colored non-incident edge to {v}"
            if not isinstance(c, int) or not 1 <= c <= hi:
                return f"edge {{{u},{v}}} color {c!r} out of range"
            if c in seen:
                return f"node {u} used color {c} on two edges"
            seen[c] = v
            other = partial.get(v, {}).get(u)
            if other != c:
                return f"edge {{{u},{v}}} colored {c} at {u} but {other!r} at {v}"
    return ""


_CHECKS = {
    "MIS": _check_mis,
    "MAXIMAL_MATCHING": _check_matching,
    "VERTEX_COLORING": _check_vertex_coloring,
    "EDGE_COLORING": _check_edge_coloring,
}


def check_extendable(kind: str, g: Graph, partial) -> str:
    """Empty string when the partial output is extendable."""
    return _CHECKS[kind](g, partial)


def audit_run(kind: str, g: Graph, outcome, checkpoints) -> list[str]:
    """Extendability violations over all checkpoint rounds (empty = clean)."""
    problems = []
    for rnd in checkpoints:
        if rnd > outcome.total_rounds:
            continue
        msg = check_extendable(kind, g, partial_outputs(outcome, rnd))
        if msg:
            problems.append(f"round {rnd}: {msg}")
    return problems


def even_rounds(outcome) -> list[int]:
    """Checkpoint list for a bare phased run: every even round."""
    return list(range(2, outcome.total_rounds + 1, 2))
