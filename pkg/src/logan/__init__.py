"""Logic-bounded evaluation and generation of finite graphs."""

from .certificates import (THEORIES, CheckResult, PropertyTheory, Witness, certificate_loss, check,
                           directed_proxies, get_theory, two_edge_disjoint)
from .ef import (ProbeBudget, ProbeResult, SpoilerWitness, approx_round_resilience,
                 exact_round_resilience, spoiler_witness)
from .graphs import Graph, perturb, random_graph, sample_negative, sample_theory
from .loss import LossWeights, PrototypeBank, curriculum_step, ef_loss, logical_loss, make_bank
from .wl import wl_refine, wl_signature

__version__ = "0.1.0"
