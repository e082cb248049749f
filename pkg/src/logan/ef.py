"""Ehrenfeucht-Fraisse games on finite (di)graphs.

Two engines compute round-resilience, the largest ``r`` for which
Duplicator survives the ``r``-round game:

* :func:`exact_round_resilience` runs full minimax with a memo on
  positions, for small instances only;
* :func:`approx_round_resilience` grows a frontier of partial maps one
  round at a time, restricted to the top-``b`` Spoiler moves per side and
  top-``b`` Duplicator replies per move, keeping at most ``S`` positions per
  round. The retained tree is then evaluated by minimax; positions that were
  dropped by the width cap are never probed and count as surviving.

With ``b >= max(|G|, |H|)`` and ``S`` at least the number of reachable
positions the two engines agree exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .graphs import Graph
from .wl import signature_profile

G_SIDE, H_SIDE = 0, 1
SIDE_NAMES = ("G", "H")

DEFAULT_EXACT_CAP = 10


class InstanceTooLarge(ValueError):
    """Raised when the exact engine is asked to search a graph above its cap."""


@dataclass(frozen=True)
class ProbeBudget:
    k: int = 3
    S: int = 16
    b: int = 4
    timeout_ms: float = 2000.0

    def __post_init__(self):
        if self.k < 1 or self.S < 1 or self.b < 1:
            raise ValueError(f"budget needs k, S, b >= 1, got {self}")
        if not self.timeout_ms > 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def exhaustive(cls, g: Graph, h: Graph, k: int) -> "ProbeBudget":
        """Budget large enough that the approximate engine performs full search."""
        return cls(k=k, S=10**12, b=max(g.n, h.n, 1), timeout_ms=1e12)


@dataclass(frozen=True)
class ProbeResult:
    """``complete`` is True when no budget cap pruned anything, so ``rounds`` is exact."""

    rounds: int
    timed_out: bool = False
    positions: int = 0
    complete: bool = False

    def __int__(self):
        return self.rounds


@dataclass
class SpoilerWitness:
    """A Spoiler strategy that wins within ``depth`` rounds.

    ``side``/``vertex`` is the first pick; ``responses`` maps each legal
    Duplicator answer to the continuation strategy. A fixed move sequence is
    not always enough (K_{1,3} against P_4 needs an adaptive second pick).
    """

    side: int
    vertex: int
    depth: int
    responses: dict[int, "SpoilerWitness"] = field(default_factory=dict)

    @property
    def moves(self) -> list[tuple[str, int]]:
        """Principal line: Spoiler picks along the lowest-numbered replies."""
        line, node = [], self
        while node is not None:
            line.append((SIDE_NAMES[node.side], node.vertex))
            node = node.responses[min(node.responses)] if node.responses else None
        return line

    def lines(self, indent: str = "") -> Iterator[str]:
        yield f"{indent}spoiler picks {SIDE_NAMES[self.side]}:{self.vertex}"
        other = SIDE_NAMES[1 - self.side]
        if not self.responses:
            yield f"{indent}  no duplicator answer in {other}"
        for y, sub in sorted(self.responses.items()):
            yield f"{indent}  if duplicator answers {other}:{y}"
            yield from sub.lines(indent + "    ")


def is_partial_isomorphism(g: Graph, h: Graph, pairs) -> bool:
    """Direct check of the definition, pair by pair."""
    pairs = list(pairs)
    for i, (a, b) in enumerate(pairs):
        if not (0 <= a < g.n and 0 <= b < h.n):
            return False
        for a2, b2 in pairs[i:]:
            if (a == a2) != (b == b2):
                return False
            if g.has_edge(a, a2) != h.has_edge(b, b2):
                return False
            if g.directed and g.has_edge(a2, a) != h.has_edge(b2, b):
                return False
    return True


class _Game:
    """Shared move generation for both engines.

    A position is a tuple of ``(a, b)`` pairs in play order. Re-picking a
    pebbled vertex forces the partner reply and only burns a round, so it is
    never a useful Spoiler move and is not generated.
    """

    def __init__(self, g: Graph, h: Graph):
        if g.directed != h.directed:
            raise ValueError("cannot compare a directed with an undirected graph")
        self.graphs = (g, h)
        self.out = (g.adj_mask, h.adj_mask)
        self.inn = (tuple(sum(1 << w for w in a) for a in g.in_adj),
                    tuple(sum(1 << w for w in a) for a in h.in_adj))
        self.directed = g.directed

    def pattern(self, side: int, x: int, pebbled: tuple[int, ...]) -> tuple:
        out, inn = self.out[side][x], self.inn[side][x]
        if self.directed:
            return tuple(((out >> p) & 1, (inn >> p) & 1) for p in pebbled)
        return tuple((out >> p) & 1 for p in pebbled)

    def replies(self, pairs, side: int, x: int) -> list[int]:
        """Answers on the other side that keep ``pairs + [pick]`` a partial isomorphism."""
        mine = tuple(p[side] for p in pairs)
        theirs = tuple(p[1 - side] for p in pairs)
        want = self.pattern(side, x, mine)
        used = set(theirs)
        return [y for y in range(self.graphs[1 - side].n)
                if y not in used and self.pattern(1 - side, y, theirs) == want]

    @staticmethod
    def extend(pairs, side: int, x: int, y: int):
        pair = (x, y) if side == G_SIDE else (y, x)
        return pairs + (pair,)


def _key(pairs) -> frozenset:
    return frozenset(pairs)


# -- exact engine -----------------------------------------------------------

class _ExactSolver:
    def __init__(self, g: Graph, h: Graph, cap: int):
        if max(g.n, h.n) > cap:
            raise InstanceTooLarge(f"exact EF search is capped at {cap} vertices, got {g.n} and {h.n}")
        self.game = _Game(g, h)
        self.memo: dict[tuple[frozenset, int], bool] = {}
        # try WL-compatible answers first; only affects speed
        depth = min(max(g.n, h.n), 4)
        self.profiles = (signature_profile(g, depth), signature_profile(h, depth))

    def moves(self, pairs):
        for side in (G_SIDE, H_SIDE):
            pebbled = {p[side] for p in pairs}
            for x in range(self.game.graphs[side].n):
                if x not in pebbled:
                    yield side, x

    def ordered_replies(self, pairs, side, x):
        mine, theirs = self.profiles[side], self.profiles[1 - side]
        ys = self.game.replies(pairs, side, x)
        ys.sort(key=lambda y: (-sum(a == b for a, b in zip(mine[x], theirs[y])), y != x, y))
        return ys

    def duplicator_wins(self, pairs, rounds: int) -> bool:
        if rounds == 0:
            return True
        key = (_key(pairs), rounds)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = True
        for side, x in self.moves(pairs):
            if not any(self.duplicator_wins(_Game.extend(pairs, side, x, y), rounds - 1)
                       for y in self.ordered_replies(pairs, side, x)):
                result = False
                break
        self.memo[key] = result
        return result

    def resilience(self, k_max: int) -> int:
        r = 0
        while r < k_max and self.duplicator_wins((), r + 1):
            r += 1
        return r

    def strategy(self, pairs, rounds: int) -> SpoilerWitness:
        """Spoiler strategy from a position Duplicator cannot hold for ``rounds``.

        Among winning picks, the one leaving Duplicator the fewest answers is
        preferred, which keeps the strategy tree small.
        """
        best = None
        for side, x in self.moves(pairs):
            ys = self.game.replies(pairs, side, x)
            if best is not None and len(ys) >= len(best[2]):
                continue
            nxt = [_Game.extend(pairs, side, x, y) for y in ys]
            if not any(self.duplicator_wins(p, rounds - 1) for p in nxt):
                best = (side, x, ys, nxt)
        if best is None:
            raise AssertionError("position is not a Spoiler win")
        side, x, ys, nxt = best
        return SpoilerWitness(side, x, rounds, {
            y: self.strategy(p, rounds - 1) for y, p in zip(ys, nxt)
        })


def exact_round_resilience(g: Graph, h: Graph, k_max: int, cap: int = DEFAULT_EXACT_CAP) -> int:
    """Largest ``r <= k_max`` such that Duplicator wins the ``r``-round game."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return _ExactSolver(g, h, cap).resilience(k_max)


def spoiler_witness(g: Graph, h: Graph, k_max: int, cap: int = DEFAULT_EXACT_CAP) -> Optional[SpoilerWitness]:
    """Shortest winning Spoiler strategy, or ``None`` if Duplicator survives ``k_max`` rounds."""
    solver = _ExactSolver(g, h, cap)
    r = solver.resilience(k_max)
    if r >= k_max:
        return None
    return solver.strategy((), r + 1)


def verify_witness(g: Graph, h: Graph, witness: SpoilerWitness, pairs=()) -> bool:
    """Replay ``witness`` against every Duplicator answer, by brute force."""
    if witness.depth < 1:
        return False
    side, x = witness.side, witness.vertex
    if any(p[side] == x for p in pairs):
        return False
    other = (g, h)[1 - side]
    for y in range(other.n):
        nxt = tuple(pairs) + (((x, y) if side == G_SIDE else (y, x)),)
        if not is_partial_isomorphism(g, h, nxt):
            continue
        # Duplicator has a legal answer; the strategy must cover it
        if witness.depth == 1:
            return False
        sub = witness.responses.get(y)
        if sub is None or sub.depth != witness.depth - 1:
            return False
        if not verify_witness(g, h, sub, nxt):
            return False
    return True


# -- budgeted engine --------------------------------------------------------

class _Node:
    __slots__ = ("pairs", "moves", "expanded")

    def __init__(self, pairs):
        self.pairs = pairs
        # moves[i] lists child keys for the i-th Spoiler move, None until expanded
        self.moves: Optional[list[list[frozenset]]] = None
        self.expanded = False


class _BudgetedProbe:
    def __init__(self, g: Graph, h: Graph, budget: ProbeBudget):
        self.game = _Game(g, h)
        self.budget = budget
        self.truncated = False
        self.same = g == h
        self.depth = budget.k
        self.profiles = (signature_profile(g, self.depth), signature_profile(h, self.depth))
        counts: dict[int, int] = {}
        for prof in self.profiles:
            for sig in prof:
                counts[sig[-1]] = counts.get(sig[-1], 0) + 1
        # rarest full-depth signature first, then vertex id
        self.move_order = tuple(
            sorted(range(len(prof)), key=lambda v, prof=prof: (counts[prof[v][-1]], v))
            for prof in self.profiles
        )

    def match_quality(self, side: int, x: int, y: int) -> int:
        mine, theirs = self.profiles[side][x], self.profiles[1 - side][y]
        return sum(a == b for a, b in zip(mine, theirs))

    def spoiler_moves(self, pairs) -> list[tuple[int, int]]:
        moves = []
        for side in (G_SIDE, H_SIDE):
            pebbled = {p[side] for p in pairs}
            picks = [x for x in self.move_order[side] if x not in pebbled]
            self.truncated |= len(picks) > self.budget.b
            moves.extend((side, x) for x in picks[: self.budget.b])
        return moves

    def duplicator_replies(self, pairs, side: int, x: int) -> list[int]:
        ys = self.game.replies(pairs, side, x)
        ys.sort(key=lambda y: (-self.match_quality(side, x, y), not (self.same and y == x), y))
        self.truncated |= len(ys) > self.budget.b
        return ys[: self.budget.b]

    def run(self) -> ProbeResult:
        deadline = time.perf_counter() + self.budget.timeout_ms / 1000.0
        root = _Node(())
        levels: list[dict[frozenset, _Node]] = [{_key(()): root}]
        total = 1
        for i in range(1, self.budget.k + 1):
            nxt: dict[frozenset, _Node] = {}
            self.truncated |= len(levels[-1]) > self.budget.S
            for node in list(levels[-1].values())[: self.budget.S]:
                node.moves = []
                for side, x in self.spoiler_moves(node.pairs):
                    children = []
                    for y in self.duplicator_replies(node.pairs, side, x):
                        child = _Game.extend(node.pairs, side, x, y)
                        key = _key(child)
                        if key not in nxt:
                            nxt[key] = _Node(child)
                        children.append(key)
                    node.moves.append(children)
                node.expanded = True
                if time.perf_counter() > deadline:
                    return ProbeResult(i - 1, timed_out=True, positions=total)
            total += len(nxt)
            levels.append(nxt)
            if self.value(levels, i) < i:
                return ProbeResult(i - 1, positions=total, complete=not self.truncated)
        return ProbeResult(self.budget.k, positions=total, complete=not self.truncated)

    @staticmethod
    def value(levels, horizon: int) -> int:
        """Rounds Duplicator survives from the root within ``horizon`` on the retained tree."""
        values: dict[frozenset, int] = {}
        for j in range(horizon, -1, -1):
            child_vals = values
            values = {}
            for key, node in levels[j].items():
                left = horizon - j
                if left == 0 or not node.expanded or not node.moves:
                    # leaf at the horizon, an unprobed position, or nothing left to pick
                    values[key] = left
                    continue
                best = left
                for children in node.moves:
                    v = max((1 + child_vals[c] for c in children), default=0)
                    best = min(best, v)
                    if best == 0:
                        break
                values[key] = best
        return values[_key(())]


def approx_round_resilience(g: Graph, h: Graph, budget: ProbeBudget = ProbeBudget()) -> ProbeResult:
    """Budgeted round-resilience estimate with an early exit per round."""
    return _BudgetedProbe(g, h, budget).run()


def pseudo_distance(r: int) -> float:
    """Monotone surrogate ``1 / (1 + r)``: smaller means harder to tell apart."""
    return 1.0 / (1.0 + r)
