"""Finite simple (di)graphs, seeded samplers and the perturbation operator."""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, TextIO

import networkx as nx

# Bump RNG_VERSION whenever a sampler's consumption of the stream changes.
RNG_NAME = "python-mt19937"
RNG_VERSION = 1


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Undirected edges are stored as ``(min, max)``; the edge tuple is always
    sorted so iteration order is reproducible.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    directed: bool = False
    _edge_set: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {self.n}")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            if not self.directed and u > v:
                u, v = v, u
            if (u, v) in canon:
                raise GraphError(f"duplicate edge ({u}, {v})")
            canon.add((u, v))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "_edge_set", frozenset(canon))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> "Graph":
        """Build a graph, silently dropping repeated edges."""
        seen = set()
        for u, v in edges:
            key = (u, v) if directed else (min(u, v), max(u, v))
            seen.add(key)
        return cls(n, tuple(seen), directed)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        if not self.directed and u > v:
            u, v = v, u
        return (u, v) in self._edge_set

    @cached_property
    def out_adj(self) -> tuple[frozenset, ...]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            if not self.directed:
                adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def in_adj(self) -> tuple[frozenset, ...]:
        if not self.directed:
            return self.out_adj
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def adj_mask(self) -> tuple[int, ...]:
        """Out-adjacency as bitmasks, for fast partial-isomorphism checks."""
        return tuple(sum(1 << w for w in a) for a in self.out_adj)

    def neighbors(self, v: int) -> frozenset:
        """Neighbours of ``v``; for digraphs, successors and predecessors."""
        if self.directed:
            return self.out_adj[v] | self.in_adj[v]
        return self.out_adj[v]

    def degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edges + ((u, v),), self.directed)

    def without_edge(self, u: int, v: int) -> "Graph":
        if not self.directed and u > v:
            u, v = v, u
        if (u, v) not in self._edge_set:
            raise GraphError(f"edge ({u}, {v}) not present")
        return Graph(self.n, tuple(e for e in self.edges if e != (u, v)), self.directed)

    def toggled(self, u: int, v: int) -> "Graph":
        return self.without_edge(u, v) if self.has_edge(u, v) else self.with_edge(u, v)

    def relabeled(self, perm: list[int]) -> "Graph":
        """Image of the graph under the vertex map ``v -> perm[v]``."""
        return Graph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges), self.directed)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All vertex pairs that could carry an edge, in sorted order."""
        if self.directed:
            return itertools.permutations(range(self.n), 2)
        return itertools.combinations(range(self.n), 2)

    def to_networkx(self) -> nx.Graph:
        g = nx.DiGraph() if self.directed else nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __str__(self):
        kind = "digraph" if self.directed else "graph"
        return f"{kind}(n={self.n}, m={self.m})"


# -- named families ---------------------------------------------------------

def empty_graph(n: int, directed: bool = False) -> Graph:
    return Graph(n, (), directed)


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def directed_cycle(n: int, bidirected: bool = False) -> Graph:
    arcs = [(i, (i + 1) % n) for i in range(n)]
    if bidirected:
        arcs += [((i + 1) % n, i) for i in range(n)]
    return Graph(n, tuple(arcs), directed=True)


# -- seeding ----------------------------------------------------------------

def derive_seed(seed: int, *labels) -> int:
    """Child 64-bit seed for a labelled sub-stream; stable across platforms."""
    text = "|".join([RNG_NAME, str(RNG_VERSION), str(int(seed))] + [str(x) for x in labels])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def make_rng(seed: int, *labels) -> random.Random:
    if seed < 0 or seed >= 1 << 64:
        raise GraphError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return random.Random(derive_seed(seed, *labels) if labels else seed)


# -- samplers ---------------------------------------------------------------

def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p): every unordered pair kept independently with probability ``p``."""
    if n < 1:
        raise GraphError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed, "gnp", n)
    # one draw per pair even at p in {0, 1}, so the stream layout never depends on p
    edges = [pair for pair in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, tuple(edges))


def _random_tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Uniform labelled tree via a random Pruefer sequence."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(n) if degree[w] == 1]
    edges.append((u, v))
    return edges


def _random_connected_edges(vertices: list[int], rng: random.Random, p_extra: float = 0.15):
    k = len(vertices)
    edges = {tuple(sorted((vertices[a], vertices[b]))) for a, b in _random_tree_edges(k, rng)}
    for a, b in itertools.combinations(vertices, 2):
        e = (min(a, b), max(a, b))
        if e not in edges and rng.random() < p_extra:
            edges.add(e)
    return edges


def _random_bipartite(n: int, rng: random.Random, p: float = 0.4):
    order = list(range(n))
    rng.shuffle(order)
    left, right = sorted(order[: n // 2]), sorted(order[n // 2:])
    edges = [(min(a, b), max(a, b)) for a in left for b in right if rng.random() < p]
    return edges, left, right


def _random_planar(n: int, rng: random.Random, p: float = 0.3) -> Graph:
    """Random spanning tree plus random edges kept only while the graph stays planar."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(_random_tree_edges(n, rng))
    candidates = [e for e in itertools.combinations(range(n), 2) if not g.has_edge(*e)]
    rng.shuffle(candidates)
    for u, v in candidates:
        if rng.random() >= p:
            continue
        g.add_edge(u, v)
        if not nx.check_planarity(g)[0]:
            g.remove_edge(u, v)
    return Graph(n, tuple(g.edges()))


def _plant(n: int, pattern: Graph, rng: random.Random) -> list[tuple[int, int]]:
    slots = rng.sample(range(n), pattern.n)
    return [(slots[u], slots[v]) for u, v in pattern.edges]


_MIN_POSITIVE_N = {
    "tree": 1, "connected": 1, "bipartite": 2, "planar": 1,
    "has_triangle": 3, "triangle_free": 1, "two_edge_strong": 2,
}


def sample_theory(theory, n: int, seed: int) -> Graph:
    """A seeded graph on ``n`` vertices that satisfies ``theory``."""
    name = getattr(theory, "name", theory)
    if name not in _MIN_POSITIVE_N or n < _MIN_POSITIVE_N[name]:
        raise GraphError(f"cannot sample theory {name!r} with n={n}")
    rng = make_rng(seed, "theory", name, n)
    if name == "tree":
        return Graph(n, tuple(_random_tree_edges(n, rng)))
    if name == "connected":
        return Graph(n, tuple(_random_connected_edges(list(range(n)), rng)))
    if name in ("bipartite", "triangle_free"):
        return Graph(n, tuple(_random_bipartite(n, rng)[0]))
    if name == "planar":
        return _random_planar(n, rng)
    if name == "has_triangle":
        base = random_graph(n, 0.2, rng.getrandbits(64))
        return Graph.from_edges(n, list(base.edges) + _plant(n, complete_graph(3), rng))
    # two_edge_strong: bi-directed Hamiltonian cycle plus a few random arcs
    order = list(range(n))
    rng.shuffle(order)
    arcs = set()
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        if a != b:
            arcs.update({(a, b), (b, a)})
    for a, b in itertools.permutations(range(n), 2):
        if rng.random() < 0.1:
            arcs.add((a, b))
    return Graph(n, tuple(arcs), directed=True)


def sample_negative(theory, n: int, seed: int) -> Graph:
    """A seeded graph on ``n`` vertices that violates ``theory``."""
    name = getattr(theory, "name", theory)
    min_n = {"planar": 5, "two_edge_strong": 2}.get(name, 3)
    if name not in _MIN_POSITIVE_N or n < min_n:
        raise GraphError(f"cannot sample a negative for {name!r} with n={n}")
    rng = make_rng(seed, "negative", name, n)
    if name == "tree":
        edges = _random_tree_edges(n, rng)
        present = {(min(e), max(e)) for e in edges}
        missing = [e for e in itertools.combinations(range(n), 2) if e not in present]
        return Graph(n, tuple(edges) + (rng.choice(missing),))
    if name == "bipartite":
        while True:
            edges, left, right = _random_bipartite(n, rng)
            g = Graph(n, tuple(edges))
            side = rng.choice([s for s in (left, right) if len(s) >= 2])
            u, v = rng.sample(side, 2)
            # an intra-part edge closes an odd cycle only if u and v are already joined
            if _reachable(g, u, v):
                return g.with_edge(u, v)
    if name == "planar":
        pattern = complete_graph(5) if n < 6 or rng.random() < 0.5 else complete_bipartite(3, 3)
        return Graph(n, tuple(_plant(n, pattern, rng)))
    if name == "connected":
        order = list(range(n))
        rng.shuffle(order)
        cut = rng.randrange(1, n)
        edges = _random_connected_edges(sorted(order[:cut]), rng) | _random_connected_edges(sorted(order[cut:]), rng)
        return Graph(n, tuple(edges))
    if name == "has_triangle":
        return Graph(n, tuple(_random_bipartite(n, rng)[0]))
    if name == "triangle_free":
        base = Graph(n, tuple(_random_bipartite(n, rng)[0]))
        return Graph.from_edges(n, list(base.edges) + _plant(n, complete_graph(3), rng))
    # two_edge_strong: a one-way cycle has single-corridor pairs
    order = list(range(n))
    rng.shuffle(order)
    return Graph(n, tuple((order[i], order[(i + 1) % n]) for i in range(n)), directed=True)


def _reachable(g: Graph, s: int, t: int) -> bool:
    seen, stack = {s}, [s]
    while stack:
        u = stack.pop()
        if u == t:
            return True
        for w in g.out_adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def flip_count(g: Graph, fraction: float) -> int:
    # round-half-up rather than banker's rounding, so 0.5 flips never vanish
    return int(fraction * g.m + 0.5)


def perturb(g: Graph, fraction: float, seed: int) -> Graph:
    """Flip ``round(fraction * m)`` distinct vertex pairs chosen uniformly at random."""
    if not 0.0 <= fraction <= 1.0:
        raise GraphError(f"fraction must lie in [0, 1], got {fraction}")
    pairs = list(g.pairs())
    k = min(flip_count(g, fraction), len(pairs))
    rng = make_rng(seed, "perturb", g.n, g.m)
    return flip_pairs(g, rng.sample(pairs, k))


def flip_pairs(g: Graph, pairs: Iterable[tuple[int, int]]) -> Graph:
    edges = set(g.edges)
    for u, v in pairs:
        e = (u, v) if g.directed else (min(u, v), max(u, v))
        edges.symmetric_difference_update({e})
    return Graph(g.n, tuple(edges), g.directed)


# -- text format ------------------------------------------------------------

def write_graph(g: Graph, fh: TextIO) -> None:
    fh.write(f"{g.n} {g.m} {int(g.directed)}\n")
    for u, v in g.edges:
        fh.write(f"{u} {v}\n")


def read_graph(fh: TextIO) -> Graph:
    lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 3:
        raise GraphError("header must be 'n m d'")
    n, m, d = (int(x) for x in lines[0])
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header promises {m} edges, found {len(body)}")
    return Graph(n, tuple((int(u), int(v)) for u, v in body), bool(d))


def dumps(g: Graph) -> str:
    import io
    buf = io.StringIO()
    write_graph(g, buf)
    return buf.getvalue()


def loads(text: str) -> Graph:
    import io
    return read_graph(io.StringIO(text))
