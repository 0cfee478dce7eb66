"""Network generation and mutation tests."""

import math

import numpy as np
import pytest

from hypersim.topology import (
    Network,
    NetworkConfig,
    NodeKind,
    NodeProfile,
    activate_honeypots,
    class_p_v,
    compute_reachability,
    criticality,
    effective_encryption_vul,
    generate_network,
    hide_edges,
    overall_vulnerability,
    rewire_and_reconnect,
)


def make_node(i=0, kind=NodeKind.IOT, importance=3, sv=3.0, ev=5.0, uv=4.0,
              t_rekey=1, reachability=0.0):
    return NodeProfile(
        id=i, kind=kind, importance=importance, reachability=reachability,
        sv=np.full(5, float(sv)), ev=np.full(5, float(ev)), uv=float(uv),
        t_rekey=t_rekey,
    )


def empty_network(n, mean_degree=5.0):
    nodes = [make_node(i) for i in range(n)]
    return Network(nodes, mean_degree_target=mean_degree)


class TestGeneration:
    def test_mean_degree_matches_binomial_expectation(self):
        # Expected mean degree (n-1)p; check the average over seeds stays
        # within 3 sigma of the binomial aggregate.
        cfg = NetworkConfig(n_ws=25, n_db=25, n_iot=450, n_lh=0, n_hh=0, p_r=0.05)
        n, p = cfg.n_legit, 0.05
        total_pairs = 0
        total_edges = 0
        for seed in range(30):
            net = generate_network(cfg, np.random.default_rng(seed))
            total_edges += net.edge_count()
            total_pairs += n * (n - 1) // 2
        sigma = math.sqrt(total_pairs * p * (1 - p))
        assert abs(total_edges - total_pairs * p) < 3 * sigma
        assert abs(2 * total_edges / (30 * n) - (n - 1) * p) < 0.5

    def test_honeypot_counts_and_deactivation(self):
        cfg = NetworkConfig(n_ws=25, n_db=25, n_iot=450, n_lh=50, n_hh=25)
        net = generate_network(cfg, np.random.default_rng(1))
        pots = net.honeypot_ids()
        assert len(pots) == 75
        assert all(not net.nodes[i].honeypot_active for i in pots)
        assert not net.honeypots_active

    def test_honeypots_have_zero_importance_and_criticality(self):
        cfg = NetworkConfig(n_ws=5, n_db=5, n_iot=40, n_lh=6, n_hh=3)
        net = generate_network(cfg, np.random.default_rng(2))
        for i in net.honeypot_ids():
            assert net.nodes[i].importance == 0
            assert criticality(net.nodes[i]) == 0.0

    def test_rejects_bad_connection_probability(self):
        with pytest.raises(ValueError):
            generate_network(NetworkConfig(p_r=0.0), np.random.default_rng(0))
        with pytest.raises(ValueError):
            generate_network(NetworkConfig(p_r=1.5), np.random.default_rng(0))

    def test_rejects_zero_legitimate_nodes(self):
        cfg = NetworkConfig(n_ws=0, n_db=0, n_iot=0, n_lh=5, n_hh=5)
        with pytest.raises(ValueError):
            generate_network(cfg, np.random.default_rng(0))

    def test_vuln_upper_bound_override(self):
        cfg = NetworkConfig(n_ws=5, n_db=5, n_iot=40, n_lh=2, n_hh=1, vuln_upper=3)
        net = generate_network(cfg, np.random.default_rng(3))
        for i in net.legit_ids():
            assert net.nodes[i].sv.max() <= 3
        for i in net.honeypot_ids():
            assert net.nodes[i].sv.min() >= 7  # honeypot lure unaffected


class TestReachability:
    def test_path_graph_center_is_maximal(self):
        net = empty_network(3)
        net.add_edge(0, 1)
        net.add_edge(1, 2)
        r = compute_reachability(net)
        # Node 1 sits on the single shortest path 0-2; endpoints intermediate
        # nothing.
        assert r[1] == 1.0
        assert r[0] == 0.0 and r[2] == 0.0

    def test_complete_graph_all_zero(self):
        net = empty_network(4)
        for i in range(4):
            for j in range(i + 1, 4):
                net.add_edge(i, j)
        r = compute_reachability(net)
        assert np.all(r == 0.0)

    def test_single_node_zero(self):
        net = empty_network(1)
        assert compute_reachability(net)[0] == 0.0

    def test_excludes_evicted_nodes(self):
        net = empty_network(4)
        net.add_edge(0, 1)
        net.add_edge(1, 2)
        net.add_edge(2, 3)
        net.evict(1)
        # only the 2-3 edge remains, so nothing intermediates anything
        r = compute_reachability(net)
        assert np.all(r == 0.0)


class TestVulnerabilityArithmetic:
    def test_criticality_direct(self):
        node = make_node(importance=8, reachability=0.25)
        assert criticality(node) == pytest.approx(0.2)

    def test_criticality_zero_cases(self):
        assert criticality(make_node(importance=0, reachability=0.9)) == 0.0
        assert criticality(make_node(importance=7, reachability=0.0)) == 0.0

    def test_effective_encryption_closed_form(self):
        assert effective_encryption_vul(8.0, 1) == pytest.approx(8 * math.exp(-1), abs=1e-12)
        assert effective_encryption_vul(8.0, 1) == pytest.approx(2.9430, abs=1e-4)

    def test_effective_encryption_zero_and_monotone(self):
        assert effective_encryption_vul(0.0, 7) == 0.0
        v10 = effective_encryption_vul(8.0, 10)
        v1000 = effective_encryption_vul(8.0, 1000)
        assert v1000 >= v10
        assert v1000 < 8.0

    def test_effective_encryption_rejects_bad_clock(self):
        with pytest.raises(ValueError):
            effective_encryption_vul(5.0, 0)

    def test_overall_vulnerability_constant_entries(self):
        node = make_node(sv=5, ev=5, uv=5.0, t_rekey=10**9)
        vul, p_v = overall_vulnerability(node)
        assert vul == pytest.approx(5.0, abs=1e-6)
        assert p_v == pytest.approx(0.5, abs=1e-7)

    def test_overall_vulnerability_zero(self):
        node = make_node(sv=0, ev=0, uv=0.0)
        assert overall_vulnerability(node) == (0.0, 0.0)

    def test_overall_vulnerability_hand_case(self):
        # sv entries 4, effective ev entries 6, uv 5: (20 + 30 + 5) / 11 = 5.
        node = make_node(sv=4, ev=6, uv=5.0, t_rekey=10**9)
        vul, p_v = overall_vulnerability(node)
        assert vul == pytest.approx(5.0, abs=1e-6)
        assert p_v == pytest.approx(0.5, abs=1e-7)

    def test_class_p_v_uses_selected_classes(self):
        node = make_node(sv=2, ev=8, uv=6.0, t_rekey=10**9)
        assert class_p_v(node, ("sv",)) == pytest.approx(0.2, abs=1e-6)
        assert class_p_v(node, ("uv",)) == pytest.approx(0.6, abs=1e-6)
        assert class_p_v(node, ("sv", "ev")) == pytest.approx(0.5, abs=1e-6)

    def test_p_v_bounds_hold_after_mutations(self):
        rng = np.random.default_rng(5)
        cfg = NetworkConfig(n_ws=3, n_db=3, n_iot=30, n_lh=3, n_hh=2)
        net = generate_network(cfg, rng)
        for _ in range(20):
            rewire_and_reconnect(net, rng)
            for node in net.nodes:
                _, p_v = overall_vulnerability(node)
                assert 0.0 <= p_v <= 1.0
                assert node.sv.min() >= 0 and node.sv.max() <= 10


class TestRewiring:
    def _iot_net(self, rng, p=0.2):
        cfg = NetworkConfig(n_ws=2, n_db=2, n_iot=30, n_lh=0, n_hh=0, p_r=p)
        return generate_network(cfg, rng)

    def test_zero_probability_changes_nothing(self):
        rng = np.random.default_rng(7)
        net = self._iot_net(rng)
        for node in net.nodes:
            node.rewire_prob = 0.0
        before = net.edges()
        rewire_and_reconnect(net, rng)
        assert net.edges() == before

    def test_degree_preserved_for_rewired_nodes(self):
        rng = np.random.default_rng(8)
        net = self._iot_net(rng)
        degrees_before = sum(net.degree(i) for i in net.legit_ids())
        rewire_and_reconnect(net, rng)
        assert sum(net.degree(i) for i in net.legit_ids()) == degrees_before

    def test_reconnection_frequency_matches_bernoulli(self):
        # A freshly isolated clean node redraws its random-graph row; over
        # trials the chance of at least one new link is 1 - (1-p)^k.
        p = 0.05
        hits = 0
        trials = 100
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            net = empty_network(20, mean_degree=(20 - 1) * p)
            for node in net.nodes:
                node.rewire_prob = p
            # node 0 isolated and clean; everyone else connected in a ring
            for i in range(1, 19):
                net.add_edge(i, i + 1)
            rewire_and_reconnect(net, rng)
            if net.degree(0) > 0:
                hits += 1
        k = 19
        expect = 1 - (1 - p) ** k
        sigma = math.sqrt(trials * expect * (1 - expect))
        assert abs(hits - trials * expect) < 3 * sigma

    def test_compromised_isolated_node_not_reconnected(self):
        # The reconnection pass skips compromised nodes; keep everyone
        # else's mobility off so nothing rewires onto node 0 by chance.
        rng = np.random.default_rng(9)
        net = empty_network(10)
        net.nodes[0].rewire_prob = 1.0
        net.nodes[0].compromised = True
        for i in range(1, 9):
            net.add_edge(i, i + 1)
        rewire_and_reconnect(net, rng)
        assert net.degree(0) == 0


class TestHoneypotWiring:
    def _net_with_pots(self, seed=11):
        cfg = NetworkConfig(n_ws=5, n_db=5, n_iot=50, n_lh=10, n_hh=5, p_r=0.1)
        return generate_network(cfg, np.random.default_rng(seed))

    def test_tier_sizes_scale_with_three_victims_per_pot(self):
        net = self._net_with_pots()
        activate_honeypots(net)
        hh = {i for i in net.honeypot_ids()
              if net.nodes[i].kind is NodeKind.HONEYPOT_HH}
        lh = {i for i in net.honeypot_ids()
              if net.nodes[i].kind is NodeKind.HONEYPOT_LH}
        hh_victims = [v for v in net.legit_ids() if net.honeypot_in[v] & hh]
        lh_victims = [v for v in net.legit_ids() if net.honeypot_in[v] & lh]
        assert len(hh_victims) == 3 * len(hh)
        assert len(lh_victims) == 3 * len(lh)
        assert not set(hh_victims) & set(lh_victims)

    def test_most_vulnerable_tier_feeds_high_interaction(self):
        net = self._net_with_pots()
        activate_honeypots(net)
        hh = {i for i in net.honeypot_ids()
              if net.nodes[i].kind is NodeKind.HONEYPOT_HH}
        scored = sorted(
            ((-overall_vulnerability(net.nodes[i])[0], i) for i in net.legit_ids())
        )
        top = [i for _, i in scored[:15]]
        for v in top:
            assert net.honeypot_in[v] & hh

    def test_outgoing_edges_confined_to_honeypots(self):
        net = self._net_with_pots()
        activate_honeypots(net)
        for h in net.honeypot_ids():
            assert all(net.nodes[o].is_honeypot for o in net.honeypot_out[h])
            assert not net.adj[h]

    def test_idempotent_and_flags(self):
        net = self._net_with_pots()
        activate_honeypots(net)
        wiring = [set(s) for s in net.honeypot_in]
        activate_honeypots(net)
        assert [set(s) for s in net.honeypot_in] == wiring
        assert all(net.nodes[i].honeypot_active for i in net.honeypot_ids())

    def test_no_honeypots_is_noop(self):
        cfg = NetworkConfig(n_ws=2, n_db=2, n_iot=10, n_lh=0, n_hh=0)
        net = generate_network(cfg, np.random.default_rng(12))
        activate_honeypots(net)
        assert not net.honeypots_active


class TestHiddenEdges:
    def test_budget_is_floor_of_percentage(self):
        rng = np.random.default_rng(13)
        net = empty_network(30)
        edges = 0
        for i in range(30):
            for j in range(i + 1, 30):
                if rng.random() < 0.25:
                    net.add_edge(i, j)
                    edges += 1
        compute_reachability(net)
        hide_edges(net, 20.0)
        assert len(net.hidden) == int(0.2 * edges)
        assert net.hidden <= {(min(a, b), max(a, b)) for a, b in net.edges()}

    def test_zero_percent_hides_nothing(self):
        net = empty_network(5)
        net.add_edge(0, 1)
        hide_edges(net, 0.0)
        assert net.hidden == set()

    def test_star_graph_hides_leaf_to_center_first(self):
        net = empty_network(6)
        net.nodes[0].importance = 9
        for i in range(1, 6):
            net.add_edge(0, i)
            net.nodes[i].importance = 1
        compute_reachability(net)  # center gets reachability 1, leaves 0
        hide_edges(net, 40.0)  # floor(0.4 * 5) = 2 edges
        assert len(net.hidden) == 2
        for a, b in net.hidden:
            assert 0 in (a, b)

    def test_rejects_out_of_range_percent(self):
        net = empty_network(3)
        with pytest.raises(ValueError):
            hide_edges(net, -1.0)
        with pytest.raises(ValueError):
            hide_edges(net, 101.0)


class TestEviction:
    def test_eviction_clears_all_incident_edges(self):
        net = empty_network(5)
        for j in range(1, 5):
            net.add_edge(0, j)
        net.honeypot_in[0] = {99}
        net.evict(0)
        assert net.degree(0) == 0
        assert all(0 not in net.adj[j] for j in range(1, 5))
        assert net.honeypot_in[0] == set()
        assert net.nodes[0].evicted

    def test_honeypot_containment_after_mutations(self):
        rng = np.random.default_rng(14)
        cfg = NetworkConfig(n_ws=3, n_db=3, n_iot=24, n_lh=4, n_hh=2, p_r=0.15)
        net = generate_network(cfg, rng)
        activate_honeypots(net)
        for _ in range(10):
            rewire_and_reconnect(net, rng)
            for h in net.honeypot_ids():
                reachable = set(net.honeypot_out[h])
                assert all(net.nodes[o].is_honeypot for o in reachable)
