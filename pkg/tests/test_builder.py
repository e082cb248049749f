import pytest

from logan.builder import P_INIT, build, initial_graph, repair
from logan.certificates import TheoryError, Witness, check, components, two_edge_disjoint, verify_witness
from logan.ef import ProbeBudget
from logan.graphs import Graph, cycle_graph, directed_cycle, path_graph, random_graph, sample_theory
from logan.loss import LossWeights, logical_loss, make_bank

BUDGET = ProbeBudget(k=3)


class TestRepair:
    def test_c5_becomes_path(self):
        c5 = cycle_graph(5)
        w = check("bipartite", c5).witness
        out = repair(c5, "bipartite", w, seed=0)
        assert out.m == 4 and len(components(out)) == 1
        assert check("bipartite", out).holds and check("tree", out).holds  # a P5

    def test_split_merges(self):
        g = Graph(6, ((0, 1), (1, 2), (3, 4), (4, 5)))
        w = check("connected", g).witness
        out = repair(g, "connected", w, seed=1)
        assert out.m == g.m + 1 and check("connected", out).holds

    def test_tree_cycle_edge(self):
        g = path_graph(6).with_edge(0, 5)
        out = repair(g, "tree", check("tree", g).witness, seed=0)
        assert check("tree", out).holds

    def test_triangle(self):
        g = Graph(4, ((0, 1), (1, 2), (0, 2), (2, 3)))
        out = repair(g, "triangle_free", check("triangle_free", g).witness, seed=3)
        assert out.m == 3 and check("triangle_free", out).holds

    def test_one_way_c4_unit_cut(self):
        d = directed_cycle(4)
        ok, arc = two_edge_disjoint(d, 0, 2)
        assert not ok
        w = Witness("unit_cut", arc, (arc,), detail=(0, 2))
        assert verify_witness(d, w)
        for seed in range(10):
            out = repair(d, "two_edge_strong", w, seed)
            (added,) = set(out.edges) - set(d.edges)
            assert added[1] == 2 and added != arc
            # either a second route exists now, or the bottleneck moved off the old arc
            ok2, arc2 = two_edge_disjoint(out, 0, 2)
            assert ok2 or arc2 != arc

    def test_removes_targeted_witness(self):
        for s in range(200):
            g = random_graph(8, 0.4, s)
            for theory in ("bipartite", "tree", "connected", "triangle_free", "planar"):
                w = check(theory, g).witness
                if w is None or w.partial:
                    continue
                out = repair(g, theory, w, seed=s)
                assert not verify_witness(out, w), (theory, s, w)

    def test_removes_directed_witnesses(self):
        for s in range(200):
            d = sample_theory("two_edge_strong", 4 + s % 4, s)
            d = d.without_edge(*d.edges[s % d.m])
            res = check("two_edge_strong", d)
            if res.holds:
                continue
            out = repair(d, "two_edge_strong", res.witness, seed=s)
            assert not verify_witness(out, res.witness)

    def test_unsupported_witness(self):
        with pytest.raises(TheoryError):
            repair(cycle_graph(5), "connected", check("bipartite", cycle_graph(5)).witness, 0)

    def test_seeded(self):
        g = cycle_graph(7)
        w = check("bipartite", g).witness
        assert repair(g, "bipartite", w, 4) == repair(g, "bipartite", w, 4)
        assert len({repair(g, "bipartite", w, s) for s in range(20)}) > 1


class TestBuild:
    def test_initial_graph(self):
        assert initial_graph("tree", 10, 3) == random_graph(10, P_INIT, 3)
        d = initial_graph("two_edge_strong", 10, 3)
        assert d.directed and d.m == random_graph(10, P_INIT, 3).m

    def test_connected_n8(self):
        bank = make_bank("connected", 20, 8, seed=0)
        for seed in range(10):
            g, trace = build("connected", 8, bank, LossWeights.default("connected"), BUDGET, 200, seed)
            assert check("connected", g).holds and trace.satisfied

    def test_tree_n8_rate(self):
        bank = make_bank("tree", 20, 8, seed=0)
        ok = sum(check("tree", build("tree", 8, bank, LossWeights.default("tree"), BUDGET, 500, s)[0]).holds
                 for s in range(100))
        assert ok >= 90

    def test_bipartite_start_needs_no_odd_cycle_repairs(self):
        bank = make_bank("bipartite", 10, 8, seed=0)
        start = sample_theory("bipartite", 8, 5)
        g, trace = build("bipartite", 8, bank, LossWeights.default("bipartite"), BUDGET, 100, 0, start=start)
        assert all(st.witness is None for st in trace.steps)
        assert check("bipartite", g).holds

    def test_two_edge_strong(self):
        bank = make_bank("two_edge_strong", 5, 6, seed=0)
        g, trace = build("two_edge_strong", 6, bank, LossWeights(0.0, {"two_edge_strong": 1.0}), BUDGET, 300, 2)
        assert check("two_edge_strong", g).holds

    def test_replay_and_monotone_best(self):
        bank = make_bank("tree", 10, 10, seed=1)
        w = LossWeights.default("tree")
        for seed in range(5):
            g1, t1 = build("tree", 10, bank, w, BUDGET, 100, seed)
            g2, t2 = build("tree", 10, bank, w, BUDGET, 100, seed)
            assert g1 == g2 and t1.lines() == t2.lines()
            assert t1.final_loss <= t1.initial_loss
            assert t1.final_loss <= min([s.loss for s in t1.steps], default=t1.initial_loss)
            assert logical_loss(g1, bank, w, BUDGET).total == pytest.approx(t1.final_loss)

    def test_single_edge_edits(self):
        bank = make_bank("connected", 10, 10, seed=1)
        _, trace = build("connected", 10, bank, LossWeights.default("connected"), BUDGET, 50, 7)
        assert all(s.action in ("add", "remove") and len(s.edge) == 2 for s in trace.steps)

    def test_max_iters(self):
        with pytest.raises(ValueError):
            build("tree", 6, make_bank("tree", 2, 6, 0), LossWeights.default("tree"), BUDGET, 0)
