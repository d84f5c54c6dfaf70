"""Graph representation, generators, exact oracles and solution validators.

Graphs are undirected, simple, with distinct integer identifiers drawn from
{1..d}.  All structures are immutable after construction; the oracles are
pure functions, so everything here is safe to share between threads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

ROOT = 0  # parent marker for the root of a rooted tree

DEFAULT_ALPHA_CAP = 25
DEFAULT_ENUM_CAP = 20


class GraphError(ValueError):
    """Raised for malformed graph construction or parse input."""

    def __init__(self, code: str, message: str, line: Optional[int] = None):
        self.code = code
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{code}: {message}{where}")


class CapExceeded(RuntimeError):
    """An exact oracle was asked for a graph above its configured cap."""


@dataclass(frozen=True)
class Graph:
    d: int
    adjacency: Mapping[int, tuple[int, ...]]
    _nodes: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        nodes = tuple(sorted(self.adjacency))
        object.__setattr__(self, "_nodes", nodes)
        seen = set()
        for u in nodes:
            if not (1 <= u <= self.d):
                raise GraphError("ID_OUT_OF_RANGE", f"node {u} outside 1..{self.d}")
            if u in seen:
                raise GraphError("DUPLICATE_ID", f"node {u} repeated")
            seen.add(u)
            nbrs = self.adjacency[u]
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError("MALFORMED_LINE", f"neighbors of {u} not sorted/unique")
            for v in nbrs:
                if v == u:
                    raise GraphError("SELF_LOOP", f"self loop at {u}")
                if v not in self.adjacency or u not in self.adjacency[v]:
                    raise GraphError("MALFORMED_LINE", f"edge {u}-{v} not symmetric")

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def delta(self) -> int:
        return max((len(self.adjacency[u]) for u in self._nodes), default=0)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in self._nodes:
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, ())


def build_graph(nodes: Sequence[int], edges: Sequence[tuple[int, int]], d: Optional[int] = None) -> Graph:
    """Assemble a Graph from a node list and an edge list."""
    node_set = set(nodes)
    if len(node_set) != len(list(nodes)):
        raise GraphError("DUPLICATE_ID", "duplicate node identifiers")
    adj: dict[int, set[int]] = {u: set() for u in nodes}
    for u, v in edges:
        if u == v:
            raise GraphError("SELF_LOOP", f"self loop at {u}")
        if u not in node_set or v not in node_set:
            raise GraphError("ID_OUT_OF_RANGE", f"edge {u}-{v} uses unknown node")
        adj[u].add(v)
        adj[v].add(u)
    if d is None:
        d = max(node_set, default=1)
    return Graph(d=d, adjacency={u: tuple(sorted(vs)) for u, vs in adj.items()})


@dataclass(frozen=True)
class RootedTree:
    graph: Graph
    parent: Mapping[int, int]  # node -> parent id, ROOT for the root

    def __post_init__(self):
        g = self.graph
        roots = [u for u in g.nodes if self.parent[u] == ROOT]
        if len(roots) != 1:
            raise GraphError("MALFORMED_LINE", f"expected exactly one root, got {len(roots)}")
        for u in g.nodes:
            p = self.parent[u]
            if p != ROOT and not g.has_edge(u, p):
                raise GraphError("MALFORMED_LINE", f"parent {p} of {u} is not a neighbor")
        if g.num_edges() != g.n - 1 or (g.n and len(components(g)) != 1):
            raise GraphError("MALFORMED_LINE", "rooted tree must be connected and acyclic")

    @property
    def root(self) -> int:
        return next(u for u in self.graph.nodes if self.parent[u] == ROOT)

    def children(self, u: int) -> tuple[int, ...]:
        return tuple(v for v in self.graph.neighbors(u) if self.parent[v] == u)


# ---------------------------------------------------------------------------
# generators


def _rng(seed: int, *salt) -> random.Random:
    # string seeds hash via sha512, stable across processes (tuple seeds
    # would go through hash(), which is salted per process)
    return random.Random(f"{seed}|{salt!r}")


def _assign_ids(n: int, id_scheme: str, seed: int, d: Optional[int]) -> tuple[list[int], int]:
    """Map positions 0..n-1 to identifiers; returns (ids, d)."""
    if id_scheme == "INCREASING":
        d = d or n
        if d < n:
            raise GraphError("ID_OUT_OF_RANGE", f"d={d} too small for n={n}")
        return list(range(1, n + 1)), d
    if id_scheme == "SEEDED_PERMUTATION":
        d = d or max(2 * n, 1)
        if d < n:
            raise GraphError("ID_OUT_OF_RANGE", f"d={d} too small for n={n}")
        ids = _rng(seed, "ids").sample(range(1, d + 1), n)
        return ids, d
    raise GraphError("MALFORMED_LINE", f"unknown id scheme {id_scheme!r}")


def line(n: int, id_scheme: str = "INCREASING", seed: int = 0, d: Optional[int] = None) -> Graph:
    if n < 1:
        raise GraphError("MALFORMED_LINE", "line needs n >= 1")
    ids, d = _assign_ids(n, id_scheme, seed, d)
    return build_graph(ids, [(ids[i], ids[i + 1]) for i in range(n - 1)], d)


def wheel_fk(k: int, id_scheme: str = "INCREASING", seed: int = 0, d: Optional[int] = None) -> Graph:
    """Wheel with k rim nodes and one extra node on each spoke (2k+1 nodes).

    Positions: 0 is the hub, 1..k are spoke midpoints, k+1..2k the rim cycle.
    """
    if k < 3:
        raise GraphError("MALFORMED_LINE", "wheel needs k >= 3")
    ids, d = _assign_ids(2 * k + 1, id_scheme, seed, d)
    hub = ids[0]
    spokes = ids[1 : k + 1]
    rim = ids[k + 1 :]
    edges = []
    for i in range(k):
        edges.append((hub, spokes[i]))
        edges.append((spokes[i], rim[i]))
        edges.append((rim[i], rim[(i + 1) % k]))
    return build_graph(ids, edges, d)


def wheel_rim_nodes(k: int, id_scheme: str = "INCREASING", seed: int = 0, d: Optional[int] = None) -> set[int]:
    ids, _ = _assign_ids(2 * k + 1, id_scheme, seed, d)
    return set(ids[k + 1 :])


def grid(rows: int, cols: int, id_scheme: str = "INCREASING", seed: int = 0, d: Optional[int] = None) -> Graph:
    """rows x cols grid; position (i, j) occupies slot i*cols + j (row major)."""
    if rows < 1 or cols < 1:
        raise GraphError("MALFORMED_LINE", "grid needs positive dimensions")
    ids, d = _assign_ids(rows * cols, id_scheme, seed, d)
    at = lambda i, j: ids[i * cols + j]
    edges = []
    for i in range(rows):
        for j in range(cols):
            if i + 1 < rows:
                edges.append((at(i, j), at(i + 1, j)))
            if j + 1 < cols:
                edges.append((at(i, j), at(i, j + 1)))
    return build_graph(ids, edges, d)


def random_graph(n: int, p: float, seed: int, id_scheme: str = "SEEDED_PERMUTATION", d: Optional[int] = None) -> Graph:
    """Erdos-Renyi G(n, p); identifier permutation drawn from the same seed."""
    if not 0.0 <= p <= 1.0:
        raise GraphError("MALFORMED_LINE", f"edge probability {p} outside [0,1]")
    if n < 0:
        raise GraphError("MALFORMED_LINE", "n must be nonnegative")
    ids, d = _assign_ids(n, id_scheme, seed, d)
    r = _rng(seed, "edges")
    edges = [(ids[i], ids[j]) for i in range(n) for j in range(i + 1, n) if r.random() < p]
    return build_graph(ids, edges, d)


def random_connected_graph(n: int, p: float, seed: int, id_scheme: str = "SEEDED_PERMUTATION", d: Optional[int] = None) -> Graph:
    """G(n, p) plus a random spanning tree so the result is connected."""
    g = random_graph(n, p, seed, id_scheme, d)
    ids = list(g.nodes)
    r = _rng(seed, "spanning")
    order = ids[:]
    r.shuffle(order)
    extra = [(order[i], order[r.randrange(i)]) for i in range(1, n)]
    all_edges = set(g.edges()) | {(min(e), max(e)) for e in extra}
    return build_graph(ids, sorted(all_edges), g.d)


def random_tree(n: int, seed: int, id_scheme: str = "SEEDED_PERMUTATION", d: Optional[int] = None) -> RootedTree:
    """Random rooted tree via random parent attachment."""
    if n < 1:
        raise GraphError("MALFORMED_LINE", "tree needs n >= 1")
    ids, d = _assign_ids(n, id_scheme, seed, d)
    r = _rng(seed, "tree")
    parent = {ids[0]: ROOT}
    edges = []
    for i in range(1, n):
        p = ids[r.randrange(i)]
        parent[ids[i]] = p
        edges.append((p, ids[i]))
    return RootedTree(graph=build_graph(ids, edges, d), parent=parent)


def line_tree(n: int, id_scheme: str = "INCREASING", seed: int = 0, d: Optional[int] = None) -> RootedTree:
    """Directed line rooted at its first node (parent = previous node)."""
    g = line(n, id_scheme, seed, d)
    ids, _ = _assign_ids(n, id_scheme, seed, d)
    parent = {ids[0]: ROOT}
    for i in range(1, n):
        parent[ids[i]] = ids[i - 1]
    return RootedTree(graph=g, parent=parent)


def generate(family: str, params: Mapping[str, object], id_scheme: str = "INCREASING", seed: int = 0):
    """CLI-facing dispatcher over the graph families."""
    family = family.upper()
    d = params.get("d")
    if family == "LINE":
        return line(int(params["n"]), id_scheme, seed, d)
    if family == "WHEEL_FK":
        return wheel_fk(int(params["k"]), id_scheme, seed, d)
    if family == "GRID":
        return grid(int(params["rows"]), int(params["cols"]), id_scheme, seed, d)
    if family == "RANDOM":
        return random_graph(int(params["n"]), float(params["p"]), seed, id_scheme, d)
    if family == "RANDOM_CONNECTED":
        return random_connected_graph(int(params["n"]), float(params["p"]), seed, id_scheme, d)
    if family == "TREE":
        shape = str(params.get("shape", "random")).lower()
        if shape == "line":
            return line_tree(int(params["n"]), id_scheme, seed, d)
        return random_tree(int(params["n"]), int(seed), id_scheme, d)
    raise GraphError("MALFORMED_LINE", f"unknown graph family {family!r}")


# ---------------------------------------------------------------------------
# structure operations


def induced_subgraph(g: Graph, keep) -> Graph:
    keep = set(keep)
    unknown = keep - set(g.nodes)
    if unknown:
        raise GraphError("ID_OUT_OF_RANGE", f"unknown identifiers {sorted(unknown)}")
    adj = {u: tuple(v for v in g.adjacency[u] if v in keep) for u in sorted(keep)}
    return Graph(d=g.d, adjacency=adj)


def components(g: Graph) -> list[Graph]:
    """Connected components as induced subgraphs, sorted by smallest member."""
    seen: set[int] = set()
    out = []
    for start in g.nodes:  # nodes are sorted, so components come out ordered
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        out.append(induced_subgraph(g, comp))
    return out


def edge_induced_subgraph(g: Graph, edges: Sequence[tuple[int, int]]) -> Graph:
    """Subgraph whose nodes are the endpoints of the given edges."""
    nodes = sorted({u for e in edges for u in e})
    return build_graph(nodes, list(edges), g.d)


INFINITE = float("inf")


def diameter(g: Graph):
    """Max shortest-path length over node pairs; INFINITE if disconnected."""
    if g.n == 0:
        return 0
    best = 0
    for s in g.nodes:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in g.adjacency[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        if len(dist) < g.n:
            return INFINITE
        best = max(best, max(dist.values()))
    return best


# ---------------------------------------------------------------------------
# exact oracles


def alpha_oracle(g: Graph, cap: int = DEFAULT_ALPHA_CAP) -> int:
    """Exact maximum independent set size via branch and bound."""
    if g.n > cap:
        raise CapExceeded(f"alpha oracle capped at {cap} nodes, got {g.n}")
    best = 0
    for comp in components(g):
        best += _alpha_component(dict(comp.adjacency))
    return best


def _alpha_component(adj: dict[int, tuple[int, ...]]) -> int:
    best = [0]

    def go(active: frozenset, size: int):
        if size + len(active) <= best[0]:
            return  # bound: even taking everything cannot win
        if not active:
            best[0] = max(best[0], size)
            return
        degs = {u: sum(1 for v in adj[u] if v in active) for u in active}
        v = max(active, key=lambda u: (degs[u], u))
        if degs[v] <= 1:
            # remaining graph is a disjoint union of edges and isolated nodes
            edges = sum(d for d in degs.values()) // 2
            best[0] = max(best[0], size + len(active) - edges)
            return
        closed = active - {v} - set(adj[v])
        go(closed, size + 1)  # include v
        go(active - {v}, size)  # exclude v
    go(frozenset(adj), 0)
    return best[0]


def tau_oracle(g: Graph, cap: int = DEFAULT_ALPHA_CAP) -> int:
    """Exact minimum vertex cover size (complement of a maximum independent set)."""
    return g.n - alpha_oracle(g, cap)


def enumerate_mis(g: Graph, cap: int = DEFAULT_ENUM_CAP) -> list[frozenset]:
    """All maximal independent sets, via Bron-Kerbosch on the complement graph."""
    if g.n > cap:
        raise CapExceeded(f"MIS enumeration capped at {cap} nodes, got {g.n}")
    nodes = list(g.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    full = (1 << len(nodes)) - 1
    # complement adjacency as bitsets
    comp = []
    for u in nodes:
        mask = full & ~(1 << idx[u])
        for v in g.adjacency[u]:
            mask &= ~(1 << idx[v])
        comp.append(mask)
    out: list[frozenset] = []

    def bk(r: int, p: int, x: int):
        if p == 0 and x == 0:
            out.append(frozenset(nodes[i] for i in range(len(nodes)) if r >> i & 1))
            return
        pivot = max((i for i in range(len(nodes)) if (p | x) >> i & 1),
                    key=lambda i: bin(p & comp[i]).count("1"))
        cand = p & ~comp[pivot]
        while cand:
            i = (cand & -cand).bit_length() - 1
            bit = 1 << i
            bk(r | bit, p & comp[i], x & comp[i])
            p &= ~bit
            x |= bit
            cand &= ~bit

    if nodes:
        bk(0, full, 0)
    return sorted(out, key=lambda s: sorted(s))


# ---------------------------------------------------------------------------
# validators


@dataclass(frozen=True)
class Violation:
    code: str  # INDEPENDENCE, MAXIMALITY, SYMMETRY, RANGE, CONFLICT, INCOMPLETE
    where: object  # offending node or edge
    detail: str = ""

    def __str__(self):
        return f"{self.code} at {self.where}: {self.detail}"


PROBLEM_KINDS = ("MIS", "MAXIMAL_MATCHING", "VERTEX_COLORING", "EDGE_COLORING")


def validate(kind: str, g: Graph, outputs: Mapping[int, object]) -> Optional[Violation]:
    """None when the outputs solve the problem on g, else the first violation."""
    for u in g.nodes:
        if u not in outputs or outputs[u] is _MISSING:
            return Violation("INCOMPLETE", u, "no output")
    if kind == "MIS":
        return _validate_mis(g, outputs)
    if kind == "MAXIMAL_MATCHING":
        return _validate_matching(g, outputs)
    if kind == "VERTEX_COLORING":
        return _validate_vertex_coloring(g, outputs)
    if kind == "EDGE_COLORING":
        return _validate_edge_coloring(g, outputs)
    raise ValueError(f"unknown problem kind {kind!r}")


_MISSING = object()


def _validate_mis(g, out):
    for u in g.nodes:
        if out[u] not in (0, 1):
            return Violation("RANGE", u, f"bit expected, got {out[u]!r}")
    for u, v in g.edges():
        if out[u] == 1 and out[v] == 1:
            return Violation("INDEPENDENCE", (u, v), "both endpoints output 1")
    for u in g.nodes:
        if out[u] == 0 and not any(out[v] == 1 for v in g.adjacency[u]):
            return Violation("MAXIMALITY", u, "outputs 0 with no neighbor in the set")
    return None


def _validate_matching(g, out):
    for u in g.nodes:
        y = out[u]
        if y is not None:
            if y not in g.adjacency[u]:
                return Violation("RANGE", u, f"partner {y!r} is not a neighbor")
            if out[y] != u:
                return Violation("SYMMETRY", (u, y), "partner does not agree")
    for u in g.nodes:
        if out[u] is None and any(out[v] is None for v in g.adjacency[u]):
            v = next(v for v in g.adjacency[u] if out[v] is None)
            return Violation("MAXIMALITY", (u, v), "two adjacent unmatched nodes")
    return None


def _validate_vertex_coloring(g, out):
    hi = g.delta + 1
    for u in g.nodes:
        if not isinstance(out[u], int) or not 1 <= out[u] <= hi:
            return Violation("RANGE", u, f"color {out[u]!r} outside 1..{hi}")
    for u, v in g.edges():
        if out[u] == out[v]:
            return Violation("CONFLICT", (u, v), f"both colored {out[u]}")
    return None


def _validate_edge_coloring(g, out):
    hi = 2 * g.delta - 1
    for u in g.nodes:
        cols = out[u]
        if not isinstance(cols, Mapping) or set(cols) != set(g.adjacency[u]):
            return Violation("INCOMPLETE", u, "missing or spurious edge colors")
        for v, c in cols.items():
            if not isinstance(c, int) or not 1 <= c <= hi:
                return Violation("RANGE", (u, v), f"color {c!r} outside 1..{hi}")
    for u, v in g.edges():
        if out[u][v] != out[v][u]:
            return Violation("CONFLICT", (u, v), "endpoints disagree on edge color")
    for u in g.nodes:
        seen = {}
        for v, c in out[u].items():
            if c in seen:
                return Violation("CONFLICT", (u, (seen[c], v)), f"color {c} reused at {u}")
            seen[c] = v
    return None


# ---------------------------------------------------------------------------
# file format


def write_graph(g: Graph, tree: Optional[RootedTree] = None) -> str:
    lines = [f"{g.n} {g.d}"]
    isolated = [u for u in g.nodes if not g.adjacency[u]]
    lines += [f"V {u}" for u in isolated]
    lines += [f"{u} {v}" for u, v in g.edges()]
    if tree is not None:
        lines += [f"P {u} {tree.parent[u]}" for u in g.nodes]
    return "\n".join(lines) + "\n"


def read_graph(text: str):
    """Parse the graph file format; returns Graph or RootedTree."""
    n = d = None
    nodes: list[int] = []
    edges: list[tuple[int, int]] = []
    parents: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        parts = s.split()
        if n is None:
            if len(parts) != 2:
                raise GraphError("MALFORMED_LINE", "expected 'n d' header", lineno)
            try:
                n, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError("MALFORMED_LINE", "non-integer header", lineno)
            continue
        if parts[0] == "V":
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphError("MALFORMED_LINE", "expected 'V u'", lineno)
            nodes.append(int(parts[1]))
        elif parts[0] == "P":
            if len(parts) != 3:
                raise GraphError("MALFORMED_LINE", "expected 'P u p'", lineno)
            try:
                u, p = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError("MALFORMED_LINE", "non-integer parent line", lineno)
            parents[u] = p
        else:
            if len(parts) != 2:
                raise GraphError("MALFORMED_LINE", "expected 'u v' edge", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError("MALFORMED_LINE", "non-integer edge", lineno)
            if u == v:
                raise GraphError("SELF_LOOP", f"edge {u} {v}", lineno)
            if u > v:
                raise GraphError("MALFORMED_LINE", f"edge must satisfy u < v, got {u} {v}", lineno)
            edges.append((u, v))
            nodes += [u, v]
    if n is None:
        raise GraphError("MALFORMED_LINE", "empty graph file")
    ids = sorted(set(nodes))
    if len(ids) != n:
        raise GraphError("MALFORMED_LINE", f"header says n={n} but found {len(ids)} nodes")
    for u in ids:
        if not 1 <= u <= d:
            raise GraphError("ID_OUT_OF_RANGE", f"node {u} outside 1..{d}")
    if len(set(edges)) != len(edges):
        raise GraphError("DUPLICATE_ID", "duplicate edge")
    g = build_graph(ids, edges, d)
    if parents:
        if set(parents) != set(ids):
            raise GraphError("MALFORMED_LINE", "parent lines must cover all nodes")
        return RootedTree(graph=g, parent=parents)
    return g
