"""Certificate-guided generation: one witness-driven repair per step, and
loss-monotone single-edge flips once the certificate holds."""

from __future__ import annotations

from dataclasses import dataclass, field

from .certificates import TheoryError, Witness, check, get_theory, two_edge_disjoint
from .ef import ProbeBudget
from .graphs import Graph, make_rng, random_graph
from .loss import LossWeights, PrototypeBank, logical_loss

P_INIT = 0.25


@dataclass(frozen=True)
class Step:
    witness: Witness | None
    action: str
    edge: tuple[int, int]
    loss: float

    def line(self) -> str:
        seen = self.witness.describe() if self.witness else "none"
        u, v = self.edge
        return f"{self.action} {u} {v} loss={self.loss:.6f} witness={seen}"


@dataclass
class RepairTrace:
    steps: list[Step] = field(default_factory=list)
    initial_loss: float = 0.0
    final_loss: float = 0.0
    satisfied: bool = False

    def lines(self) -> list[str]:
        head = [f"initial_loss={self.initial_loss:.6f}", f"final_loss={self.final_loss:.6f}",
                f"satisfied={int(self.satisfied)}", f"steps={len(self.steps)}"]
        return head + [s.line() for s in self.steps]


def _pick(rng, items):
    return items[rng.randrange(len(items))]


def repair_edit(g: Graph, theory, witness: Witness, rng) -> tuple[str, tuple[int, int]]:
    """The single-edge edit that removes ``witness``; returns (action, edge)."""
    theory = get_theory(theory)
    kind = witness.kind
    if kind == "odd_cycle" and theory.name == "bipartite":
        return "remove", _pick(rng, list(witness.edges))
    if kind == "extra_cycle_edge" and theory.name == "tree":
        return "remove", witness.edges[0]
    if kind == "triangle" and theory.name == "triangle_free":
        return "remove", _pick(rng, list(witness.edges))
    if kind == "kuratowski_subgraph" and theory.name == "planar" and witness.edges:
        return "remove", _pick(rng, list(witness.edges))
    if kind == "disconnecting_split" and not g.directed and theory.name in ("tree", "connected"):
        side = set(witness.vertices)
        return "add", (_pick(rng, sorted(side)), _pick(rng, [v for v in range(g.n) if v not in side]))
    if theory.name == "two_edge_strong":
        return _directed_repair(g, witness, rng)
    raise TheoryError(f"no repair for witness {kind!r} under theory {theory.name}")


def _directed_repair(d: Graph, witness: Witness, rng):
    kind = witness.kind
    if kind == "degree_deficit":
        (v,), (direction, _) = witness.vertices, witness.detail
        if direction == "in":
            cands = [u for u in range(d.n) if u != v and not d.has_edge(u, v)]
            return "add", (_pick(rng, cands), v)
        cands = [u for u in range(d.n) if u != v and not d.has_edge(v, u)]
        return "add", (v, _pick(rng, cands))
    if kind == "directed_bridge":
        (u, v), = witness.edges
        # a return arc puts the bridge on a cycle
        if not d.has_edge(v, u):
            return "add", (v, u)
        s, t = u, v
    elif kind in ("unit_cut", "disconnecting_split"):
        s, t = witness.detail
    else:
        raise TheoryError(f"no repair for witness {kind!r} under theory two_edge_strong")
    arc = witness.edges[0] if witness.edges else None
    # vertices s can still reach without the shared arc form the s-side of the cut
    side = _reach_without(d, s, arc)
    cands = [x for x in sorted(side) if x != t and not d.has_edge(x, t)]
    if not cands:
        cands = [x for x in range(d.n) if x != t and not d.has_edge(x, t)]
    return "add", (_pick(rng, cands), t)


def _reach_without(d: Graph, s: int, arc):
    seen, stack = {s}, [s]
    while stack:
        u = stack.pop()
        for w in d.out_adj[u]:
            if w not in seen and (u, w) != arc:
                seen.add(w)
                stack.append(w)
    return seen


def _apply(g: Graph, action: str, edge) -> Graph:
    u, v = edge
    return g.without_edge(u, v) if action == "remove" else g.with_edge(u, v)


def repair(g: Graph, theory, witness: Witness, seed: int) -> Graph:
    """Apply one minimal repair for ``witness``; the result may still violate ``theory``."""
    rng = make_rng(seed, "repair", witness.kind)
    return _apply(g, *repair_edit(g, theory, witness, rng))


def initial_graph(theory, n: int, seed: int) -> Graph:
    theory = get_theory(theory)
    g = random_graph(n, P_INIT, seed)
    if theory.directed:
        rng = make_rng(seed, "orient", n)
        arcs = [(u, v) if rng.random() < 0.5 else (v, u) for u, v in g.edges]
        g = Graph(n, tuple(arcs), directed=True)
    return g


def build(theory, n: int, bank: PrototypeBank, weights: LossWeights,
          budget: ProbeBudget = ProbeBudget(), max_iters: int = 500, seed: int = 0,
          start: Graph | None = None) -> tuple[Graph, RepairTrace]:
    """Repair-then-descend generation from a ``G(n, 0.25)`` start.

    Each iteration either repairs the witness the checker reports or, when
    the checker accepts, tries one random pair flip kept only if the logical
    loss does not increase. Returns the lowest-loss graph seen, preferring
    certificate-satisfying graphs on ties.
    """
    theory = get_theory(theory)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    rng = make_rng(seed, "build", theory.name, n)
    g = start if start is not None else initial_graph(theory, n, seed)

    def score(graph):
        result = check(theory, graph)
        return logical_loss(graph, bank, weights, budget).total, result

    loss, result = score(g)
    trace = RepairTrace(initial_loss=loss)
    best = (loss, not result.holds, g)
    pairs = list(g.pairs())
    for _ in range(max_iters):
        if loss == 0.0 and result.holds:
            break
        if not result.holds and result.witness is not None:
            witness = result.witness
            action, edge = repair_edit(g, theory, witness, rng)
            g = _apply(g, action, edge)
            loss, result = score(g)
            trace.steps.append(Step(witness, action, edge, loss))
        else:
            u, v = _pick(rng, pairs)
            cand = g.toggled(u, v)
            cand_loss, cand_result = score(cand)
            if cand_loss > loss:
                continue
            action = "remove" if g.has_edge(u, v) else "add"
            g, loss, result = cand, cand_loss, cand_result
            trace.steps.append(Step(None, action, (u, v), loss))
        key = (loss, not result.holds)
        if key < best[:2]:
            best = (loss, not result.holds, g)
    trace.final_loss, trace.satisfied = best[0], not best[1]
    return best[2], trace
