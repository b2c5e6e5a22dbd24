"""Metrics: distributions, entropy, rank vectors, communities, walks."""

import math
import random

import pytest

from honvis.analytics import (CommunityAssignment, aggregate_pagerank_by_port,
                              detect_communities, entropy_rate,
                              first_order_port_distribution, kgram_divergence,
                              node_entropy, node_kld_vs_first_order,
                              out_distribution, pagerank, pagerank_delta,
                              simulate_walks, stationary_distribution,
                              PageRankScores, analytics_report)
from honvis.errors import UsageError
from honvis.fixtures import merge_trajectories, random_trajectories
from honvis.honbuild import (EdgeStats, FirstOrderNetwork, build_fon,
                             build_hon, rewire_network)
from honvis.ingest import Hop, Trajectory, TrajectorySet
from oracles import dense_rank_oracle, set_partitions, undirected_modularity

MERGE = merge_trajectories()
FON = build_fon(MERGE)
HON = build_hon(MERGE, min_support=3)


def traj_set(*port_lists):
    return TrajectorySet(trajectories=[
        Trajectory(f"t{i}", [Hop(p, "container", 1) for p in ports])
        for i, ports in enumerate(port_lists)])


def fon_graph(edges: dict) -> FirstOrderNetwork:
    net = FirstOrderNetwork()
    for (s, d), w in edges.items():
        net.nodes.add(s)
        net.nodes.add(d)
        net.edges[(s, d)] = EdgeStats(weight=w)
    return net


def nid(label: str) -> int:
    return HON.node_by_label(label).node_id


class TestOutDistribution:
    def test_split_hub_node_is_deterministic_in_both_projections(self):
        assert out_distribution(HON, nid("M|A"), "node").probs == {"X": 1.0}
        assert out_distribution(HON, nid("M|A"), "port").probs == {"X": 1.0}

    def test_first_order_hub_splits_evenly(self):
        assert out_distribution(FON, "M").probs == {"X": 0.5, "Y": 0.5}

    def test_projections_differ_at_branch_sources(self):
        assert out_distribution(HON, nid("A"), "node").probs == {"M|A": 1.0}
        assert out_distribution(HON, nid("A"), "port").probs == {"M": 1.0}

    def test_sink_is_flagged_empty(self):
        d = out_distribution(FON, "X")
        assert d.sink and d.probs == {}

    def test_unknown_node_rejected(self):
        with pytest.raises(UsageError):
            out_distribution(FON, "NOPE")
        with pytest.raises(UsageError):
            out_distribution(HON, 999)

    def test_port_fold_matches_fon(self):
        for port in FON.nodes:
            folded = first_order_port_distribution(HON, port)
            direct = out_distribution(FON, port)
            assert folded.sink == direct.sink
            assert folded.probs == pytest.approx(direct.probs)


class TestNodeEntropy:
    def test_point_mass_is_zero(self):
        assert node_entropy(HON, nid("M|A")) == 0.0

    def test_even_split_is_one_bit(self):
        assert node_entropy(FON, "M") == pytest.approx(1.0, abs=1e-12)

    def test_quarter_quarter_half(self):
        net = fon_graph({("N", "X"): 1, ("N", "Y"): 1, ("N", "Z"): 2})
        assert node_entropy(net, "N") == pytest.approx(1.5, abs=1e-12)


class TestNodeKld:
    def test_split_hub_diverges_one_bit(self):
        assert node_kld_vs_first_order(HON, nid("M|A")) == pytest.approx(1.0, abs=1e-12)
        assert node_kld_vs_first_order(HON, nid("M|B")) == pytest.approx(1.0, abs=1e-12)

    def test_order1_nodes_are_zero(self):
        for label in ("A", "B", "M", "X", "Y"):
            assert node_kld_vs_first_order(HON, nid(label)) == 0.0

    def test_redundant_dependency_is_zero(self):
        # force-retain [M|A] on a corpus where M's behavior never varies
        ts = traj_set(["A", "M", "X"], ["A", "M", "X"])
        deps = {("A",), ("M",), ("X",), ("M", "A")}
        hon = rewire_network(ts, deps, max_order=5)
        node = hon.node_by_label("M|A").node_id
        assert node_kld_vs_first_order(hon, node) == pytest.approx(0.0, abs=1e-12)


class TestStationary:
    def test_two_cycle_is_even(self):
        net = fon_graph({("A", "B"): 1, ("B", "A"): 1})
        result = stationary_distribution(net, teleport=0.01)
        assert result.probs == pytest.approx({"A": 0.5, "B": 0.5}, abs=1e-9)
        assert result.converged

    def test_single_dangling_node(self):
        net = fon_graph({})
        net.nodes.add("A")
        assert stationary_distribution(net).probs == {"A": pytest.approx(1.0)}

    def test_three_cycle_uniform(self):
        net = fon_graph({("A", "B"): 1, ("B", "C"): 1, ("C", "A"): 1})
        probs = stationary_distribution(net).probs
        assert probs == pytest.approx({k: 1 / 3 for k in "ABC"}, abs=1e-9)

    def test_oracle_agreement(self):
        for net in (FON, HON):
            mine = stationary_distribution(net, teleport=0.01)
            if hasattr(net, "node_by_label"):
                nodes = [n.node_id for n in net.nodes]
            else:
                nodes = sorted(net.nodes)
            ref = dense_rank_oracle(
                nodes, {k: e.weight for k, e in net.edges.items()}, jump=0.01)
            for k in nodes:
                assert mine.probs[k] == pytest.approx(ref[k], abs=1e-8)

    def test_mass_one(self):
        assert sum(stationary_distribution(HON).probs.values()) == pytest.approx(1.0, abs=1e-9)


class TestEntropyRate:
    def test_merge_fon_rate_is_hub_mass(self):
        pi = stationary_distribution(FON, 0.01).probs
        assert entropy_rate(FON, 0.01) == pytest.approx(pi["M"], abs=1e-12)

    def test_merge_hon_rate_is_zero(self):
        # every rewired node is deterministic
        assert entropy_rate(HON, 0.01) == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_cycle(self):
        net = fon_graph({("A", "B"): 3, ("B", "C"): 3, ("C", "A"): 3})
        assert entropy_rate(net) == pytest.approx(0.0, abs=1e-12)

    def test_hon_never_exceeds_fon(self):
        for seed in range(12):
            ts = random_trajectories(seed)
            fon, hon = build_fon(ts), build_hon(ts, min_support=2)
            assert entropy_rate(hon) <= entropy_rate(fon) + 1e-9


class TestPageRank:
    def test_two_node_symmetry(self):
        net = fon_graph({("A", "B"): 2, ("B", "A"): 2})
        scores = pagerank(net).scores
        assert scores == pytest.approx({"A": 0.5, "B": 0.5}, abs=1e-10)

    def test_star_hub_dominates(self):
        net = fon_graph({("A", "H"): 1, ("B", "H"): 1, ("C", "H"): 1})
        scores = pagerank(net).scores
        assert scores["H"] > max(scores[k] for k in "ABC")

    def test_oracle_agreement_on_merge(self):
        for net in (FON, HON):
            mine = pagerank(net, damping=0.85)
            nodes = ([n.node_id for n in net.nodes]
                     if hasattr(net, "node_by_label") else sorted(net.nodes))
            ref = dense_rank_oracle(
                nodes, {k: e.weight for k, e in net.edges.items()}, jump=0.15)
            for k in nodes:
                assert mine.scores[k] == pytest.approx(ref[k], abs=1e-8)

    def test_oracle_agreement_on_small_random_networks(self):
        tested = 0
        for seed in range(40):
            ts = random_trajectories(seed)
            hon = build_hon(ts, min_support=2)
            if len(hon.nodes) > 20:
                continue
            mine = pagerank(hon)
            ref = dense_rank_oracle([n.node_id for n in hon.nodes],
                                    {k: e.weight for k, e in hon.edges.items()},
                                    jump=0.15)
            for k in ref:
                assert mine.scores[k] == pytest.approx(ref[k], abs=1e-8)
            tested += 1
        assert tested >= 10

    def test_sums_to_one(self):
        for seed in range(10):
            hon = build_hon(random_trajectories(seed), min_support=2)
            assert sum(pagerank(hon).scores.values()) == pytest.approx(1.0, abs=1e-8)


class TestPortAggregation:
    def test_hand_sum(self):
        scores = PageRankScores(scores={nid("M|A"): 0.2, nid("M|B"): 0.3},
                                damping=0.85, iterations_used=1, residual=0.0)
        assert aggregate_pagerank_by_port(scores, HON).scores == {"M": pytest.approx(0.5)}

    def test_order1_only_network_is_identity(self):
        ts = random_trajectories(4)
        hon = build_hon(ts, max_order=1)
        node_scores = pagerank(hon)
        port_scores = aggregate_pagerank_by_port(node_scores, hon)
        for node in hon.nodes:
            assert port_scores.scores[node.port] == pytest.approx(
                node_scores.scores[node.node_id])

    def test_port_scores_sum_to_one(self):
        port_scores = aggregate_pagerank_by_port(pagerank(HON), HON)
        assert sum(port_scores.scores.values()) == pytest.approx(1.0, abs=1e-8)


class TestPageRankDelta:
    def _scores(self, d):
        return PageRankScores(scores=d, damping=0.85, iterations_used=1, residual=0.0)

    def test_equal_scores_zero_delta(self):
        s = self._scores({"A": 0.6, "B": 0.4})
        assert pagerank_delta(s, self._scores(dict(s.scores))) == {"A": 0.0, "B": 0.0}

    def test_hand_arithmetic(self):
        delta = pagerank_delta(self._scores({"A": 0.6, "B": 0.4}),
                               self._scores({"A": 0.5, "B": 0.5}))
        assert delta == pytest.approx({"A": 0.1, "B": -0.1})

    def test_missing_port_counts_as_zero(self):
        delta = pagerank_delta(self._scores({"A": 1.0}), self._scores({"B": 1.0}))
        assert delta == pytest.approx({"A": 1.0, "B": -1.0})

    def test_deltas_sum_to_zero_on_merge(self):
        fon_pr = pagerank(FON)
        port_pr = aggregate_pagerank_by_port(pagerank(HON), HON)
        assert sum(pagerank_delta(fon_pr, port_pr).values()) == pytest.approx(0.0, abs=1e-8)

    def test_argmax_invariant_under_weight_scaling(self):
        def argmax_delta(scale):
            ts = merge_trajectories()
            fon, hon = build_fon(ts), build_hon(ts, min_support=3)
            for net in (fon, hon):
                for stats in net.edges.values():
                    stats.weight *= scale
            delta = pagerank_delta(pagerank(fon),
                                   aggregate_pagerank_by_port(pagerank(hon), hon))
            return max(delta, key=lambda p: (delta[p], p))

        assert argmax_delta(1) == argmax_delta(10)


TWO_CLIQUES = {("a", "b"): 5, ("a", "c"): 5, ("b", "c"): 5,
               ("d", "e"): 5, ("d", "f"): 5, ("e", "f"): 5,
               ("c", "d"): 1}


class TestCommunities:
    def test_two_cliques_split_as_brute_force_says(self):
        nodes = list("abcdef")
        best_q, best_parts = -2.0, None
        for partition in set_partitions(nodes):
            q = undirected_modularity(nodes, TWO_CLIQUES, partition)
            if q > best_q:
                best_q, best_parts = q, partition
        assert sorted(map(sorted, best_parts)) == [list("abc"), list("def")]

        result = detect_communities(fon_graph(TWO_CLIQUES), seed=1)
        groups = {}
        for node, c in result.assignment.items():
            groups.setdefault(c, set()).add(node)
        assert sorted(map(sorted, groups.values())) == [list("abc"), list("def")]
        assert result.modularity == pytest.approx(best_q, abs=1e-12)

    def test_edgeless_graph_is_singletons(self):
        net = fon_graph({})
        net.nodes.update("ABC")
        result = detect_communities(net)
        assert sorted(result.assignment.values()) == [0, 1, 2]
        assert result.modularity == 0.0

    def test_seeded_determinism(self):
        runs = [detect_communities(HON, seed=42) for _ in range(5)]
        assert all(r == runs[0] for r in runs)

    def test_assignment_is_total_and_dense(self):
        result = detect_communities(HON, seed=0)
        assert set(result.assignment) == {n.node_id for n in HON.nodes}
        cids = set(result.assignment.values())
        assert cids == set(range(len(cids)))

    def test_beats_singleton_partition(self):
        for seed in range(6):
            hon = build_hon(random_trajectories(seed), min_support=2)
            result = detect_communities(hon, seed=seed)
            keys, _ = [n.node_id for n in hon.nodes], None
            singletons = [[k] for k in keys]
            sym = {}
            for (s, d), e in hon.edges.items():
                key = (min(s, d), max(s, d))
                sym[key] = sym.get(key, 0.0) + e.weight
            if sym:
                q_single = undirected_modularity(keys, sym, singletons)
                assert result.modularity >= q_single - 1e-12


class TestWalks:
    def test_deterministic_chain(self):
        net = fon_graph({("A", "B"): 1, ("B", "C"): 1})
        for walk in simulate_walks(net, 20, 3, seed=0):
            assert walk[:1] != ["C"]  # sinks never start
            full = {"A": ["A", "B", "C"], "B": ["B", "C"]}
            assert walk == full[walk[0]]

    def test_memory_is_respected_on_hon(self):
        for walk in simulate_walks(HON, 200, 3, seed=5):
            for i in range(len(walk) - 2):
                if walk[i] == "A" and walk[i + 1] == "M":
                    assert walk[i + 2] == "X"

    def test_fon_walks_forget(self):
        walks = simulate_walks(FON, 500, 3, seed=5)
        tails = {tuple(w) for w in walks if w[:2] == ("A", "M") or w[:2] == ["A", "M"]}
        assert ("A", "M", "X") in tails and ("A", "M", "Y") in tails

    def test_same_seed_identical(self):
        assert simulate_walks(HON, 50, 4, seed=9) == simulate_walks(HON, 50, 4, seed=9)

    def test_start_distribution_excludes_sinks(self):
        walks = simulate_walks(FON, 300, 1, seed=2)
        assert {w[0] for w in walks} <= {"A", "B", "M"}


class TestKgramDivergence:
    def test_identical_corpora(self):
        ts = merge_trajectories()
        assert kgram_divergence(ts, ts, k=3) == 0.0

    def test_disjoint_support_is_max(self):
        a = [["A", "B", "C"]]
        b = [["D", "E", "F"]]
        assert kgram_divergence(a, b, k=3) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self):
        a = simulate_walks(FON, 100, 3, seed=1)
        b = merge_trajectories()
        assert kgram_divergence(a, b) == pytest.approx(kgram_divergence(b, a), abs=1e-12)

    def test_hon_walks_beat_fon_walks_on_merge(self):
        hon_walks = simulate_walks(HON, 2000, 3, seed=3)
        fon_walks = simulate_walks(FON, 2000, 3, seed=3)
        ref = merge_trajectories()
        assert kgram_divergence(hon_walks, ref) < kgram_divergence(fon_walks, ref)

    def test_too_short_raises(self):
        with pytest.raises(UsageError):
            kgram_divergence([["A"]], [["B"]], k=3)


class TestReport:
    def test_report_is_internally_consistent(self):
        report = analytics_report(FON, HON, seed=0)
        assert set(report.node_metrics) == {n.node_id for n in HON.nodes}
        assert report.entropy_rate_hon <= report.entropy_rate_fon + 1e-9
        assert sum(report.hon_port_pagerank.scores.values()) == pytest.approx(1.0, abs=1e-8)
        assert sum(report.pagerank_delta.values()) == pytest.approx(0.0, abs=1e-8)
        ma = report.node_metrics[nid("M|A")]
        assert ma.kld_bits == pytest.approx(1.0, abs=1e-12)
        assert ma.kld_norm == pytest.approx(1.0)
        # rewiring drains the plain hub node; nothing flows out of it
        assert report.node_metrics[nid("M")].entropy_bits == 0.0
