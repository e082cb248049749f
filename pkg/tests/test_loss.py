import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logan.ef import ProbeBudget
from logan.graphs import Graph, cycle_graph, path_graph, random_graph, sample_theory, star_graph
from logan.loss import (CurriculumState, LossWeights, PrototypeBank, curriculum_step, ef_loss, fault_rate,
                        logical_loss, make_bank)

from oracles import naive_resilience

C4, C5, C6 = cycle_graph(4), cycle_graph(5), cycle_graph(6)


class TestBank:
    def test_rejects_violating_prototype(self):
        with pytest.raises(ValueError):
            PrototypeBank("bipartite", (C4, C5))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PrototypeBank("tree", ())

    def test_make_bank(self):
        bank = make_bank("tree", 12, 8, seed=3)
        assert bank.M == 12
        assert all(6 <= b.n <= 10 for b in bank.prototypes)
        assert make_bank("tree", 12, 8, seed=3) == bank


class TestEfLoss:
    def test_prototype_in_bank_is_zero(self):
        bank = make_bank("connected", 10, 8, seed=1)
        for b in bank.prototypes:
            assert ef_loss(b, bank, ProbeBudget(k=3)) == 0.0

    def test_c5_against_even_cycles(self):
        bank = PrototypeBank("bipartite", (C4, C6))
        k = 3
        best = max(naive_resilience(C5, b, k) for b in bank.prototypes)
        budget = ProbeBudget(k=k, S=10**6, b=12, timeout_ms=60_000)
        assert ef_loss(C5, bank, budget) == pytest.approx((k - best) / k)

    def test_range(self):
        bank = make_bank("tree", 5, 7, seed=2)
        for s in range(20):
            assert 0.0 <= ef_loss(random_graph(7, 0.4, s), bank, ProbeBudget(k=3)) <= 1.0

    def test_directed_prototypes_skipped_for_undirected(self):
        bank = make_bank("two_edge_strong", 3, 5, seed=0)
        assert ef_loss(C5, bank, ProbeBudget(k=2)) == 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(0, 10**6))
    def test_adding_prototypes_never_hurts(self, s1, s2):
        bank = make_bank("bipartite", 3, 6, seed=s1)
        g = random_graph(6, 0.4, s2)
        extra = sample_theory("bipartite", 6, s2)
        budget = ProbeBudget(k=3)
        assert ef_loss(g, bank.extended(extra), budget) <= ef_loss(g, bank, budget)


class TestLogicalLoss:
    def test_three_components_of_ten(self):
        # 10 vertices, three components
        g = Graph(10, ((0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (7, 8), (8, 9)))
        bank = PrototypeBank("connected", (path_graph(10),))
        out = logical_loss(g, bank, LossWeights(0.0, {"connected": 2.0}))
        assert out.total == pytest.approx(4 / 9)

    def test_combined_terms(self):
        bank = PrototypeBank("bipartite", (C4, C6))
        w = LossWeights(1.0, {"bipartite": 1.0})
        out = logical_loss(C5, bank, w, ProbeBudget(k=3))
        assert out.total == pytest.approx(out.ef + dict(out.certificates)["bipartite"])
        assert out.total > 0
        assert logical_loss(C6, bank, w, ProbeBudget(k=3)).total == 0.0

    def test_lines_are_key_value(self):
        out = logical_loss(star_graph(3), PrototypeBank("tree", (star_graph(3),)), LossWeights.default("tree"))
        assert out.lines()[0].startswith("total=") and all("=" in line for line in out.lines())

    @pytest.mark.parametrize("kw", [dict(lambda_ef=-1.0), dict(lambda_ef=0.0), dict(lambda_p={"tree": -0.5})])
    def test_weight_validation(self, kw):
        with pytest.raises(ValueError):
            LossWeights(**kw)

    def test_weight_aliases(self):
        assert LossWeights(1.0, {"connectivity": 1.0}).lambda_p == (("connected", 1.0),)


class TestCurriculum:
    def test_promotes_after_full_quiet_window(self):
        s = CurriculumState(window=3)
        for _ in range(2):
            s = curriculum_step(s, 0.0)
            assert s.k_current == 2
        s = curriculum_step(s, 0.05)
        assert s.k_current == 3 and s.history == ()

    def test_noisy_window_holds(self):
        s = CurriculumState(window=3)
        for r in (0.0, 0.0, 0.5, 0.0):
            s = curriculum_step(s, r)
        assert s.k_current == 2

    def test_stops_at_k_max(self):
        s = CurriculumState(k_current=5, window=1)
        assert curriculum_step(s, 0.0).k_current == 5

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0, 1), max_size=200), st.integers(1, 20))
    def test_invariants(self, rates, window):
        s = CurriculumState(window=window)
        for r in rates:
            nxt = curriculum_step(s, r)
            assert nxt.k_current in (s.k_current, s.k_current + 1)
            assert 2 <= nxt.k_current <= nxt.k_max
            assert len(nxt.history) <= window
            s = nxt

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            CurriculumState(k_current=1)
        with pytest.raises(ValueError):
            curriculum_step(CurriculumState(), 1.5)

    def test_fault_rate(self):
        assert fault_rate([0.0, 0.2, 0.0, 1.0]) == 0.5
        assert fault_rate([]) == 0.0
