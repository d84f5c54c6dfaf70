"""Prediction-error measures.

Error components are the connected pieces of the subgraph induced by the
nodes that are still undecided after running the problem's base algorithm
on the given predictions (for edge coloring: the subgraph induced by the
edges that remain uncolored).  All eta measures are maxima over these
components, so they are 0 exactly when the predictions already form a
correct solution.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import mis, problems
from .engine import simulate
from .graphs import (CapExceeded, Graph, RootedTree, _rng, alpha_oracle,
                     components, edge_induced_subgraph, enumerate_mis,
                     induced_subgraph, tau_oracle)

MU1 = "MU1"
MU2 = "MU2"


@dataclass(frozen=True)
class ErrorComponent:
    subgraph: Graph
    kind: str  # GENERAL, BLACK, WHITE or EDGE_INDUCED

    @property
    def nodes(self):
        return self.subgraph.nodes


_BASE = {
    "MIS": mis.mis_base,
    "MAXIMAL_MATCHING": problems.mm_base,
    "VERTEX_COLORING": problems.vc_base,
    "EDGE_COLORING": problems.ec_base,
}

_UNIFORM = {
    "MIS": mis.greedy_mis,
    "MAXIMAL_MATCHING": problems.mm_uniform,
    "VERTEX_COLORING": problems.vc_uniform,
    "EDGE_COLORING": problems.ec_uniform,
}


def base_active_nodes(kind: str, g: Graph, p) -> set:
    """Nodes left undecided by the base algorithm run on predictions p."""
    outcome = simulate(g, _BASE[kind](), p)
    return outcome.undecided(g)


def error_components(kind: str, g: Graph, p) -> list[ErrorComponent]:
    if kind == "EDGE_COLORING":
        outcome = simulate(g, _BASE[kind](), p)
        uncolored = [(u, v) for u, v in g.edges()
                     if v not in outcome.outputs.get(u, {})]
        if not uncolored:
            return []
        sub = edge_induced_subgraph(g, uncolored)
        return [ErrorComponent(c, "EDGE_INDUCED") for c in components(sub)]
    active = base_active_nodes(kind, g, p)
    return [ErrorComponent(c, "GENERAL")
            for c in components(induced_subgraph(g, active))]


def mu1(s: Graph) -> int:
    return s.n


def mu2(s: Graph) -> int:
    return 2 * min(alpha_oracle(s), tau_oracle(s))


def eta(measure: str, kind: str, g: Graph, p) -> int:
    if measure not in (MU1, MU2):
        raise ValueError(f"unknown measure {measure!r}")
    mu = mu1 if measure == MU1 else mu2
    comps = error_components(kind, g, p)
    return max((mu(c.subgraph) for c in comps), default=0)


def eta_bw(g: Graph, p) -> int:
    """Largest single-color component of undecided nodes (MIS only)."""
    active = base_active_nodes("MIS", g, p)
    worst = 0
    for color in (0, 1):
        keep = {u for u in active if p[u] == color}
        for c in components(induced_subgraph(g, keep)):
            worst = max(worst, c.n)
    return worst


def bw_components(g: Graph, p) -> list[ErrorComponent]:
    active = base_active_nodes("MIS", g, p)
    out = []
    for color, tag in ((1, "BLACK"), (0, "WHITE")):
        keep = {u for u in active if p[u] == color}
        out.extend(ErrorComponent(c, tag)
                   for c in components(induced_subgraph(g, keep)))
    return out


def eta_t(t: RootedTree, p) -> int:
    """1 plus the longest monochromatic parent-pointer path (in edges)
    through the undecided nodes of a rooted tree."""
    g = t.graph
    active = base_active_nodes("MIS", g, p)
    if not active:
        return 0
    best = 0
    for u in active:
        steps = 0
        at = u
        while True:
            parent = t.parent[at]
            if parent not in active or p[parent] != p[u]:
                break
            steps += 1
            at = parent
        best = max(best, steps)
    return 1 + best


def eta_hamming(g: Graph, p) -> int:
    """Minimum number of prediction flips to reach some correct solution."""
    best = None
    for m in enumerate_mis(g):
        dist = sum(1 for u in g.nodes if p[u] != (1 if u in m else 0))
        if best is None or dist < best:
            best = dist
    return 0 if best is None else best


def error_report(kind: str, g: Graph, p, tree: RootedTree = None) -> dict:
    """All measures for one instance; oracle-capped entries come back None."""
    report = {"eta1": eta(MU1, kind, g, p)}
    try:
        report["eta2"] = eta(MU2, kind, g, p)
    except CapExceeded:
        report["eta2"] = None
    if kind == "MIS":
        report["eta_bw"] = eta_bw(g, p)
        report["eta_t"] = eta_t(tree, p) if tree is not None else None
        try:
            report["eta_hamming"] = eta_hamming(g, p)
        except CapExceeded:
            report["eta_hamming"] = None
    else:
        report["eta_bw"] = report["eta_t"] = report["eta_hamming"] = None
    return report


# ---------------------------------------------------------------------------
# prediction generation


PATTERNS = ("ALL_ONES", "ALL_ZEROS", "GRID_4BLOCK", "MOD3_LINE")


def solve(kind: str, g: Graph, max_rounds=None) -> dict:
    """Correct solution from the problem's measure-uniform algorithm."""
    outcome = simulate(g, _UNIFORM[kind](), max_rounds=max_rounds)
    if kind == "EDGE_COLORING":
        return {u: dict(outcome.outputs.get(u, {})) for u in g.nodes}
    return {u: outcome.value(u) for u in g.nodes}


def _corrupt_one(kind: str, g: Graph, p: dict, u: int, r) -> None:
    nbrs = g.neighbors(u)
    if kind == "MIS":
        p[u] = 1 - p[u]
    elif kind == "MAXIMAL_MATCHING":
        options = [v for v in nbrs if v != p[u]]
        if p[u] is not None:
            options.append(None)
        if options:
            p[u] = options[r.randrange(len(options))]
    elif kind == "VERTEX_COLORING":
        options = [c for c in range(1, g.delta + 2) if c != p[u]]
        if options:
            p[u] = options[r.randrange(len(options))]
    else:
        if not nbrs:
            return
        v = nbrs[r.randrange(len(nbrs))]
        hi = max(1, 2 * g.delta - 1)
        options = [c for c in range(1, hi + 1) if c != p[u][v]]
        if options:
            p[u] = dict(p[u])
            p[u][v] = options[r.randrange(len(options))]


def corrupt(kind: str, g: Graph, solution: dict, k: int, seed: int) -> dict:
    """Re-randomize the outputs of k seeded-chosen nodes."""
    p = dict(solution)
    r = _rng(seed, "corrupt", kind, k)
    for u in r.sample(sorted(g.nodes), min(k, g.n)):
        _corrupt_one(kind, g, p, u, r)
    return p


def make_predictions(kind: str, g: Graph, *, k: int = 0, seed: int = 0,
                     pattern: str = None, tree: RootedTree = None,
                     rows: int = None, cols: int = None,
                     max_rounds=None) -> dict:
    """SOLVE_THEN_CORRUPT by default; a named pattern when pattern is set."""
    if pattern is None:
        return corrupt(kind, g, solve(kind, g, max_rounds), k, seed)
    if kind != "MIS":
        raise ValueError("patterns are defined for MIS predictions only")
    if pattern == "ALL_ONES":
        return {u: 1 for u in g.nodes}
    if pattern == "ALL_ZEROS":
        return {u: 0 for u in g.nodes}
    if pattern == "GRID_4BLOCK":
        if rows is None or cols is None or rows * cols != g.n:
            raise ValueError("GRID_4BLOCK needs matching rows and cols")
        ids = sorted(g.nodes)
        p = {}
        for i in range(rows):
            for j in range(cols):
                black = (i % 4 < 2) == (j % 4 < 2)
                p[ids[i * cols + j]] = 1 if black else 0
        return p
    if pattern == "MOD3_LINE":
        if tree is None:
            raise ValueError("MOD3_LINE needs a rooted tree")
        depth = {tree.root: 0}
        frontier = [tree.root]
        while frontier:
            u = frontier.pop()
            for v in tree.children(u):
                depth[v] = depth[u] + 1
                frontier.append(v)
        return {u: 0 if depth[u] % 3 == 0 else 1 for u in g.nodes}
    raise ValueError(f"unknown pattern {pattern!r}")


# ---------------------------------------------------------------------------
# prediction files


def format_predictions(kind: str, p: dict) -> str:
    lines = []
    if kind == "EDGE_COLORING":
        for u in sorted(p):
            for v in sorted(p[u]):
                lines.append(f"{u} {v} {p[u][v]}")
    else:
        for u in sorted(p):
            value = "-" if p[u] is None else str(p[u])
            lines.append(f"{u} {value}")
    return "\n".join(lines) + "\n"


def parse_predictions(kind: str, text: str) -> dict:
    p: dict = {}
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        parts = raw.split()
        if kind == "EDGE_COLORING":
            if len(parts) != 3:
                raise ValueError(f"bad edge prediction line {raw!r}")
            u, v, c = int(parts[0]), int(parts[1]), int(parts[2])
            p.setdefault(u, {})[v] = c
        else:
            if len(parts) != 2:
                raise ValueError(f"bad prediction line {raw!r}")
            u = int(parts[0])
            p[u] = None if parts[1] == "-" else int(parts[1])
    return p
