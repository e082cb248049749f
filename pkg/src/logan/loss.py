"""Logical loss: budgeted EF term against a prototype bank plus certificate terms."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .certificates import PropertyTheory, certificate_loss, check, get_theory
from .ef import ProbeBudget, approx_round_resilience
from .graphs import Graph, derive_seed, make_rng, sample_theory


@dataclass(frozen=True)
class PrototypeBank:
    theory: PropertyTheory
    prototypes: tuple[Graph, ...]

    def __post_init__(self):
        object.__setattr__(self, "theory", get_theory(self.theory))
        object.__setattr__(self, "prototypes", tuple(self.prototypes))
        if not self.prototypes:
            raise ValueError("a prototype bank needs at least one graph")
        for i, b in enumerate(self.prototypes):
            if not check(self.theory, b).holds:
                raise ValueError(f"prototype {i} does not satisfy {self.theory.name}")

    @property
    def M(self) -> int:
        return len(self.prototypes)

    def extended(self, *graphs: Graph) -> "PrototypeBank":
        return PrototypeBank(self.theory, self.prototypes + graphs)


def make_bank(theory, M: int, n: int, seed: int, spread: int = 2) -> PrototypeBank:
    """``M`` seeded theory samples with vertex counts drawn from ``n +- spread``."""
    theory = get_theory(theory)
    rng = make_rng(seed, "bank", theory.name, n, M)
    lo = max(n - spread, 3 if theory.name == "has_triangle" else 2)
    graphs = []
    for i in range(M):
        size = rng.randint(lo, max(lo, n + spread))
        graphs.append(sample_theory(theory, size, derive_seed(seed, "proto", theory.name, n, i)))
    return PrototypeBank(theory, tuple(graphs))


@dataclass(frozen=True)
class LossWeights:
    lambda_ef: float = 1.0
    lambda_p: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        weights = {get_theory(k).name: float(v) for k, v in dict(self.lambda_p).items()}
        object.__setattr__(self, "lambda_p", tuple(sorted(weights.items())))
        if self.lambda_ef < 0 or any(v < 0 for v in weights.values()):
            raise ValueError("loss weights must be nonnegative")
        if self.lambda_ef == 0 and not any(v > 0 for v in weights.values()):
            raise ValueError("at least one loss weight must be positive")

    @classmethod
    def default(cls, theory) -> "LossWeights":
        return cls(1.0, {get_theory(theory).name: 1.0})


@lru_cache(maxsize=65536)
def _probe(g: Graph, b: Graph, budget: ProbeBudget) -> int:
    return approx_round_resilience(g, b, budget).rounds


def ef_loss(g: Graph, bank: PrototypeBank, budget: ProbeBudget = ProbeBudget()) -> float:
    """``min_i (k - r(G, B_i)) / k`` with ``r`` from the budgeted engine."""
    k = budget.k
    best = k
    for proto in bank.prototypes:
        if proto.directed != g.directed:
            continue
        best = min(best, k - _probe(g, proto, budget))
        if best == 0:
            break
    return best / k


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    ef: float
    certificates: tuple[tuple[str, float], ...]

    def lines(self) -> list[str]:
        out = [f"total={self.total:.6f}", f"ef={self.ef:.6f}"]
        out += [f"{name}={value:.6f}" for name, value in self.certificates]
        return out


def logical_loss(g: Graph, bank: PrototypeBank, weights: LossWeights,
                 budget: ProbeBudget = ProbeBudget()) -> LossBreakdown:
    ef = ef_loss(g, bank, budget) if weights.lambda_ef > 0 else 0.0
    terms = tuple((name, certificate_loss(name, g)) for name, _ in weights.lambda_p)
    total = weights.lambda_ef * ef + sum(w * t for (_, w), (_, t) in zip(weights.lambda_p, terms))
    return LossBreakdown(total, ef, terms)


@dataclass(frozen=True)
class CurriculumState:
    k_current: int = 2
    k_max: int = 5
    threshold: float = 0.1
    window: int = 50
    history: tuple[float, ...] = ()

    def __post_init__(self):
        if not 2 <= self.k_current <= self.k_max:
            raise ValueError(f"k_current must lie in [2, {self.k_max}]")

    @property
    def fault_rate_window(self) -> float:
        return sum(self.history) / len(self.history) if self.history else 1.0


def curriculum_step(state: CurriculumState, batch_fault_rate: float) -> CurriculumState:
    """Record a batch fault rate; promote ``k`` once a full window stays below threshold."""
    if not 0.0 <= batch_fault_rate <= 1.0:
        raise ValueError("fault rate must lie in [0, 1]")
    history = tuple(deque(state.history + (batch_fault_rate,), maxlen=state.window))
    full = len(history) == state.window
    rate = sum(history) / len(history)
    if full and rate < state.threshold and state.k_current < state.k_max:
        return CurriculumState(state.k_current + 1, state.k_max, state.threshold, state.window, ())
    return CurriculumState(state.k_current, state.k_max, state.threshold, state.window, history)


def fault_rate(losses: Sequence[float]) -> float:
    """Fraction of samples whose EF term exposed a fault."""
    return sum(x > 0 for x in losses) / len(losses) if losses else 0.0
