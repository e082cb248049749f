"""Brute-force reference implementations used only by the tests.

None of these share code paths with the library beyond the Graph type.
"""

import itertools


def edge(g, u, v):
    return g.has_edge(u, v)


def partial_iso(g, h, pairs):
    for (a, b), (c, d) in itertools.product(pairs, repeat=2):
        if (a == c) != (b == d):
            return False
        if edge(g, a, c) != edge(h, b, d):
            return False
    return True


def naive_duplicator_wins(g, h, pairs, rounds):
    """Unmemoised minimax over every Spoiler pick (including re-picks)."""
    if rounds == 0:
        return True
    for side, x in [(0, x) for x in range(g.n)] + [(1, y) for y in range(h.n)]:
        other = h if side == 0 else g
        ok = False
        for y in range(other.n):
            pair = (x, y) if side == 0 else (y, x)
            nxt = pairs + [pair]
            if partial_iso(g, h, nxt) and naive_duplicator_wins(g, h, nxt, rounds - 1):
                ok = True
                break
        if not ok:
            return False
    return True


def naive_resilience(g, h, k_max):
    r = 0
    while r < k_max and naive_duplicator_wins(g, h, [], r + 1):
        r += 1
    return r


def automorphism_orbits(g):
    """Vertex orbits under the full automorphism group, by trying all permutations."""
    orbit = {v: {v} for v in range(g.n)}
    edges = set(g.edges)
    for perm in itertools.permutations(range(g.n)):
        mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in edges}
        if mapped == edges:
            for v in range(g.n):
                orbit[v].add(perm[v])
    return {frozenset(s) for s in orbit.values()}


def min_bichromatic_violations(g):
    """Fewest monochromatic edges over all 2^n colourings."""
    best = len(g.edges)
    for bits in range(1 << g.n):
        bad = sum(((bits >> u) & 1) == ((bits >> v) & 1) for u, v in g.edges)
        best = min(best, bad)
    return best


def simple_paths(d, s, t):
    """All simple directed s->t paths as lists of arcs."""
    out = []

    def walk(u, seen, arcs):
        if u == t:
            out.append(list(arcs))
            return
        for w in sorted(d.out_adj[u]):
            if w not in seen:
                walk(w, seen | {w}, arcs + [(u, w)])

    walk(s, {s}, [])
    return out


def has_two_arc_disjoint_paths(d, s, t):
    paths = [set(p) for p in simple_paths(d, s, t)]
    return any(not (a & b) for a, b in itertools.combinations(paths, 2))


def reachable_pairs(d, banned=None):
    pairs = set()
    for s in range(d.n):
        seen, stack = {s}, [s]
        while stack:
            u = stack.pop()
            for w in d.out_adj[u]:
                if (u, w) != banned and w not in seen:
                    seen.add(w)
                    stack.append(w)
        pairs |= {(s, t) for t in seen if t != s}
    return pairs
