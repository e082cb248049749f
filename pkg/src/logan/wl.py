"""1-WL colour refinement and depth-bounded vertex signatures.

Signatures hash the iterated neighbourhood colour multiset with a fixed
FNV-1a 64-bit hash, so values agree across runs, processes and machines.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graphs import Graph

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK
    return h


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    rounds: int

    @property
    def classes(self) -> list[list[int]]:
        """Vertices grouped by colour id, in colour order."""
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return [out[c] for c in sorted(out)]


def _neighbour_key(g: Graph, colors, v):
    if g.directed:
        return (tuple(sorted(colors[w] for w in g.out_adj[v])),
                tuple(sorted(colors[w] for w in g.in_adj[v])))
    return tuple(sorted(colors[w] for w in g.out_adj[v]))


def wl_refine(g: Graph, max_rounds: int) -> Coloring:
    """Colour refinement from the uniform colouring.

    Colour ids are ranks of the sorted (old colour, neighbour multiset)
    signatures, so ids depend only on the isomorphism type of the vertex.
    Stops early once a round no longer splits any class.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    colors = (0,) * g.n
    rounds = 0
    while rounds < max_rounds:
        sigs = [(colors[v], _neighbour_key(g, colors, v)) for v in range(g.n)]
        ids = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = tuple(ids[s] for s in sigs)
        rounds += 1
        if len(ids) == len(set(colors)):
            # partition unchanged, ids are already canonical
            colors = new
            break
        colors = new
    return Coloring(colors, rounds)


@lru_cache(maxsize=4096)
def wl_signatures(g: Graph, depth: int) -> tuple[int, ...]:
    """Per-vertex signature hashes after ``depth`` refinement steps."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    sigs = (fnv1a64(b"wl0"),) * g.n
    for _ in range(depth):
        nxt = []
        for v in range(g.n):
            text = f"{sigs[v]}:{_neighbour_key(g, sigs, v)}"
            nxt.append(fnv1a64(text.encode()))
        sigs = tuple(nxt)
    return sigs


def wl_signature(g: Graph, v: int, depth: int) -> int:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    return wl_signatures(g, depth)[v]


@lru_cache(maxsize=4096)
def signature_profile(g: Graph, depth: int) -> tuple[tuple[int, ...], ...]:
    """``profile[v][d]`` is the signature of ``v`` at depth ``d`` for ``d <= depth``."""
    layers = [wl_signatures(g, d) for d in range(depth + 1)]
    return tuple(tuple(layer[v] for layer in layers) for v in range(g.n))
