"""Property checkers with minimal witnesses and graded surrogate losses.

Every theory binds one checker, one witness kind and one loss in ``[0, 1]``
that is zero exactly when the checker accepts.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import comb
from typing import Optional

import networkx as nx

from .graphs import Graph


class TheoryError(ValueError):
    pass


@dataclass(frozen=True)
class PropertyTheory:
    name: str
    directed: bool = False

    def __str__(self):
        return self.name


THEORIES = {
    name: PropertyTheory(name, directed=(name == "two_edge_strong"))
    for name in ("bipartite", "planar", "tree", "connected", "has_triangle",
                 "triangle_free", "two_edge_strong")
}

# command-line friendly aliases
_ALIASES = {"planarity": "planar", "connectivity": "connected", "triangle": "has_triangle"}


def get_theory(name) -> PropertyTheory:
    if isinstance(name, PropertyTheory):
        return name
    key = _ALIASES.get(name, name)
    try:
        return THEORIES[key]
    except KeyError:
        raise TheoryError(f"unknown theory {name!r}; choose from {sorted(THEORIES)}") from None


@dataclass(frozen=True)
class Witness:
    """Minimal substructure explaining a verdict.

    ``detail`` carries kind-specific extras: ``(s, t)`` for a unit cut,
    ``(direction, degree)`` for a degree deficit. ``partial`` marks a witness
    whose substructure could not be extracted.
    """

    kind: str
    vertices: tuple[int, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()
    detail: tuple = ()
    partial: bool = False

    def describe(self) -> str:
        parts = [self.kind]
        if self.vertices:
            parts.append("vertices=" + ",".join(map(str, self.vertices)))
        if self.edges:
            parts.append("edges=" + ",".join(f"{u}-{v}" for u, v in self.edges))
        if self.detail:
            parts.append("detail=" + ",".join(map(str, self.detail)))
        if self.partial:
            parts.append("partial")
        return " ".join(parts)


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: Optional[Witness] = None

    def __iter__(self):
        return iter((self.holds, self.witness))

    def __bool__(self):
        return self.holds


def _require(theory: PropertyTheory, g: Graph):
    if theory.directed != g.directed:
        want = "directed" if theory.directed else "undirected"
        raise TheoryError(f"theory {theory.name} needs a {want} graph")


# -- helpers ----------------------------------------------------------------

class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True


def components(g: Graph) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest vertex."""
    dsu = DisjointSet(g.n)
    for u, v in g.edges:
        dsu.union(u, v)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(dsu.find(v), []).append(v)
    return sorted(groups.values())


def _bfs_path(adj, s: int, t: int, banned=frozenset()) -> Optional[list[int]]:
    prev = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            path = [t]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in sorted(adj[u]):
            if w not in prev and (u, w) not in banned:
                prev[w] = u
                queue.append(w)
    return None


def _reach(g: Graph, s: int, banned=None) -> set[int]:
    seen, stack = {s}, [s]
    while stack:
        u = stack.pop()
        for w in g.out_adj[u]:
            if w not in seen and (u, w) != banned:
                seen.add(w)
                stack.append(w)
    return seen


def _cycle_edges(cycle: list[int]) -> tuple[tuple[int, int], ...]:
    return tuple((min(a, b), max(a, b)) for a, b in zip(cycle, cycle[1:] + cycle[:1]))


# -- undirected checkers ----------------------------------------------------

def _odd_cycle(g: Graph) -> Optional[list[int]]:
    """BFS 2-colouring; on a clash returns the odd cycle through the BFS tree."""
    color = [-1] * g.n
    parent = [-1] * g.n
    depth = [0] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in sorted(g.out_adj[u]):
                if color[w] < 0:
                    color[w], parent[w], depth[w] = 1 - color[u], u, depth[u] + 1
                    queue.append(w)
                elif color[w] == color[u]:
                    a, b = [u], [w]
                    while a[-1] != b[-1]:
                        if depth[a[-1]] >= depth[b[-1]]:
                            a.append(parent[a[-1]])
                        else:
                            b.append(parent[b[-1]])
                    return a + b[-2::-1]
    return None


def _check_bipartite(g):
    cycle = _odd_cycle(g)
    if cycle is None:
        return CheckResult(True)
    return CheckResult(False, Witness("odd_cycle", tuple(cycle), _cycle_edges(cycle)))


def _split_witness(g: Graph) -> Optional[Witness]:
    comps = components(g)
    if len(comps) <= 1:
        return None
    return Witness("disconnecting_split", tuple(comps[0]))


def _check_connected(g):
    w = _split_witness(g)
    return CheckResult(w is None, w)


def _check_tree(g):
    dsu = DisjointSet(g.n)
    for u, v in g.edges:
        if not dsu.union(u, v):
            adj = [set(a) for a in g.out_adj]
            adj[u].discard(v)
            adj[v].discard(u)
            path = _bfs_path(adj, v, u)
            return CheckResult(False, Witness("extra_cycle_edge", tuple(path), ((u, v),)))
    if g.n == 0:
        return CheckResult(False, Witness("disconnecting_split"))
    w = _split_witness(g)
    return CheckResult(w is None, w)


def find_triangle(g: Graph) -> Optional[tuple[int, int, int]]:
    for u, v in g.edges:
        common = g.out_adj[u] & g.out_adj[v]
        later = [w for w in common if w > v]
        if later:
            return (u, v, min(later))
    return None


def count_triangles(g: Graph) -> int:
    return sum(1 for u, v in g.edges for w in g.out_adj[u] & g.out_adj[v] if w > v)


def _triangle_witness(tri):
    u, v, w = tri
    return Witness("triangle", tri, ((u, v), (u, w), (v, w)))


def _check_has_triangle(g):
    tri = find_triangle(g)
    # when the property holds the triangle is returned as positive evidence
    return CheckResult(tri is not None, _triangle_witness(tri) if tri else None)


def _check_triangle_free(g):
    tri = find_triangle(g)
    return CheckResult(tri is None, _triangle_witness(tri) if tri else None)


def euler_bound_exceeded(g: Graph) -> bool:
    return g.n >= 3 and g.m > 3 * g.n - 6


def _check_planar(g):
    planar, certificate = nx.check_planarity(g.to_networkx(), counterexample=True)
    if euler_bound_exceeded(g) and planar:
        raise AssertionError("planarity test contradicts the Euler bound")
    if planar:
        return CheckResult(True)
    if certificate is None:
        return CheckResult(False, Witness("kuratowski_subgraph", partial=True))
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in certificate.edges()))
    return CheckResult(False, Witness("kuratowski_subgraph", tuple(sorted(certificate.nodes())), edges))


# -- directed proxies -------------------------------------------------------

DEGREE_THRESHOLD = 2


@dataclass(frozen=True)
class DirectedReport:
    min_in_degree: int
    min_out_degree: int
    edges_not_on_any_directed_cycle: tuple[tuple[int, int], ...]
    directed_bridges: tuple[tuple[int, int], ...]


def _require_directed(d: Graph):
    if not d.directed:
        raise TheoryError("expected a directed graph")


def directed_bridges(d: Graph) -> list[tuple[int, int]]:
    """Arcs whose removal makes some reachable ordered pair unreachable.

    An arc ``u -> v`` is such a bridge exactly when ``u`` no longer reaches
    ``v`` without it.
    """
    _require_directed(d)
    return [(u, v) for u, v in d.edges if v not in _reach(d, u, banned=(u, v))]


def directed_proxies(d: Graph) -> DirectedReport:
    _require_directed(d)
    reach = [_reach(d, v) for v in range(d.n)]
    off_cycle = tuple((u, v) for u, v in d.edges if u not in reach[v])
    return DirectedReport(
        min_in_degree=min((len(a) for a in d.in_adj), default=0),
        min_out_degree=min((len(a) for a in d.out_adj), default=0),
        edges_not_on_any_directed_cycle=off_cycle,
        directed_bridges=tuple(directed_bridges(d)),
    )


def _max_flow_upto(d: Graph, s: int, t: int, limit: int):
    """Unit-capacity augmenting paths from ``s`` to ``t``, stopping at ``limit``."""
    residual = {u: {} for u in range(d.n)}
    for u, v in d.edges:
        residual[u][v] = residual[u].get(v, 0) + 1
        residual[v].setdefault(u, 0)
    flow = 0
    while flow < limit:
        prev = {s: None}
        queue = deque([s])
        while queue and t not in prev:
            u = queue.popleft()
            for w in sorted(residual[u]):
                if residual[u][w] > 0 and w not in prev:
                    prev[w] = u
                    queue.append(w)
        if t not in prev:
            break
        w = t
        while prev[w] is not None:
            u = prev[w]
            residual[u][w] -= 1
            residual[w][u] += 1
            w = u
        flow += 1
    return flow, residual


def two_edge_disjoint(d: Graph, s: int, t: int):
    """Whether two arc-disjoint ``s -> t`` paths exist.

    With a single path the witness is the arc every path shares (a unit cut).
    Returns ``(ok, arc_or_None)``.
    """
    _require_directed(d)
    if s == t:
        raise ValueError("source and target must differ")
    flow, residual = _max_flow_upto(d, s, t, 2)
    if flow != 1:
        return flow >= 2, None
    side = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for w, cap in residual[u].items():
            if cap > 0 and w not in side:
                side.add(w)
                stack.append(w)
    cut = [(u, v) for u, v in d.edges if u in side and v not in side]
    assert len(cut) == 1, cut
    return False, cut[0]


def _check_two_edge_strong(d):
    for v in range(d.n):
        for direction, adj in (("in", d.in_adj), ("out", d.out_adj)):
            if len(adj[v]) < DEGREE_THRESHOLD:
                return CheckResult(False, Witness("degree_deficit", (v,), detail=(direction, len(adj[v]))))
    bridges = directed_bridges(d)
    if bridges:
        return CheckResult(False, Witness("directed_bridge", bridges[0], (bridges[0],)))
    for s, t in itertools.permutations(range(d.n), 2):
        ok, arc = two_edge_disjoint(d, s, t)
        if ok:
            continue
        if arc is None:
            return CheckResult(False, Witness("disconnecting_split", tuple(sorted(_reach(d, s))), detail=(s, t)))
        return CheckResult(False, Witness("unit_cut", arc, (arc,), detail=(s, t)))
    return CheckResult(True)


_CHECKERS = {
    "bipartite": _check_bipartite,
    "planar": _check_planar,
    "tree": _check_tree,
    "connected": _check_connected,
    "has_triangle": _check_has_triangle,
    "triangle_free": _check_triangle_free,
    "two_edge_strong": _check_two_edge_strong,
}


def check(theory, g: Graph) -> CheckResult:
    theory = get_theory(theory)
    _require(theory, g)
    return _CHECKERS[theory.name](g)


# -- surrogate losses -------------------------------------------------------

def greedy_two_coloring(g: Graph) -> list[int]:
    """BFS 2-colouring improved by single-vertex flips until no flip helps."""
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in sorted(g.out_adj[u]):
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(w)
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            same = sum(color[w] == color[v] for w in g.out_adj[v])
            if 2 * same > len(g.out_adj[v]):
                color[v] = 1 - color[v]
                improved = True
    return color


def _loss_bipartite(g):
    if g.m == 0:
        return 0.0
    color = greedy_two_coloring(g)
    bad = sum(color[u] == color[v] for u, v in g.edges)
    return bad / g.m


def _loss_tree(g):
    c = len(components(g))
    excess = max(0, g.m - (g.n - 1))
    return min(1.0, (c - 1 + excess) / max(g.n, 1))


def _loss_connected(g):
    if g.n <= 1:
        return 0.0
    return (len(components(g)) - 1) / (g.n - 1)


def _loss_triangle_free(g):
    if g.n < 3:
        return 0.0
    return min(1.0, count_triangles(g) / comb(g.n, 3))


def _loss_has_triangle(g):
    return 0.0 if find_triangle(g) else 1.0


def _loss_planar(g):
    if g.n < 3:
        return 0.0
    over = max(0, g.m - (3 * g.n - 6))
    if over:
        return min(1.0, over / g.n)
    return 0.0 if check("planar", g).holds else 0.5


def _loss_two_edge_strong(d):
    if d.n < 2:
        return 0.0
    deficit = sum(len(d.in_adj[v]) < DEGREE_THRESHOLD or len(d.out_adj[v]) < DEGREE_THRESHOLD
                  for v in range(d.n)) / d.n
    bridges = len(directed_bridges(d)) / d.m if d.m else 0.0
    failing = sum(not two_edge_disjoint(d, s, t)[0] for s, t in itertools.permutations(range(d.n), 2))
    return (deficit + bridges + failing / (d.n * (d.n - 1))) / 3.0


_LOSSES = {
    "bipartite": _loss_bipartite,
    "planar": _loss_planar,
    "tree": _loss_tree,
    "connected": _loss_connected,
    "has_triangle": _loss_has_triangle,
    "triangle_free": _loss_triangle_free,
    "two_edge_strong": _loss_two_edge_strong,
}


def certificate_loss(theory, g: Graph) -> float:
    theory = get_theory(theory)
    _require(theory, g)
    return float(_LOSSES[theory.name](g))


# -- independent witness verification ---------------------------------------

def _is_closed_walk_cycle(g: Graph, cycle) -> bool:
    cycle = list(cycle)
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    return all(g.has_edge(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1]))


def is_kuratowski_subdivision(g: Graph, edges) -> bool:
    """Whether ``edges`` (a subgraph of ``g``) subdivide K5 or K3,3."""
    edges = [tuple(e) for e in edges]
    if not edges or not all(g.has_edge(u, v) for u, v in edges):
        return False
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    branch = sorted(v for v, a in adj.items() if len(a) != 2)
    degrees = {len(adj[v]) for v in branch}
    if not ((len(branch) == 5 and degrees == {4}) or (len(branch) == 6 and degrees == {3})):
        return False
    links, visited = [], set(branch)
    for b in branch:
        for nxt in adj[b]:
            prev, cur = b, nxt
            while len(adj[cur]) == 2:
                visited.add(cur)
                prev, cur = cur, next(w for w in adj[cur] if w != prev)
            if b < cur:
                links.append((b, cur))
    if visited != set(adj) or len(links) != len(set(links)):
        return False
    contracted = nx.Graph(links)
    if len(branch) == 5:
        return contracted.number_of_edges() == 10
    return contracted.number_of_edges() == 9 and nx.is_bipartite(contracted)


def verify_witness(g: Graph, w: Witness) -> bool:
    """Re-check a witness against ``g`` without calling the checkers."""
    k = w.kind
    if k == "odd_cycle":
        return len(w.vertices) % 2 == 1 and _is_closed_walk_cycle(g, w.vertices)
    if k == "triangle":
        a, b, c = w.vertices
        return g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
    if k == "extra_cycle_edge":
        (u, v), = w.edges
        return g.has_edge(u, v) and _is_closed_walk_cycle(g, w.vertices) and {u, v} <= set(w.vertices)
    if k == "disconnecting_split":
        side = set(w.vertices)
        if not side or len(side) == g.n:
            return False
        if g.directed:
            s, t = w.detail
            return s in side and t not in side and all(not (u in side and v not in side) for u, v in g.edges)
        return all((u in side) == (v in side) for u, v in g.edges)
    if k == "kuratowski_subgraph":
        return w.partial or is_kuratowski_subdivision(g, w.edges)
    if k == "degree_deficit":
        (v,), (direction, deg) = w.vertices, w.detail
        adj = g.in_adj if direction == "in" else g.out_adj
        return len(adj[v]) == deg < DEGREE_THRESHOLD
    if k == "directed_bridge":
        (u, v), = w.edges
        before = _reach(g, u)
        after = _reach(g, u, banned=(u, v))
        return g.has_edge(u, v) and v in before and v not in after
    if k == "unit_cut":
        (u, v), = w.edges
        s, t = w.detail
        if not g.has_edge(u, v):
            return False
        return t in _reach(g, s) and t not in _reach(g, s, banned=(u, v))
    raise TheoryError(f"unknown witness kind {k!r}")
