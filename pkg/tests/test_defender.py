"""Defender agent tests: detector counters, eviction policy, strategies."""

import math

import numpy as np
import pytest

from hypersim.catalog import Stage
from hypersim.defender import (
    DefenderState,
    NidsCounters,
    assess_eviction,
    deception_intel_update,
    defender_subgame_probs,
    defender_uncertainty,
    defense_impact,
    execute_defense,
    nids_sweep,
)
from hypersim.topology import (
    Network,
    NetworkConfig,
    NodeKind,
    NodeProfile,
    effective_encryption_vul,
    generate_network,
)


def make_node(i, importance=3, reachability=0.0, sv=3.0, ev=5.0, uv=4.0):
    return NodeProfile(
        id=i, kind=NodeKind.IOT, importance=importance, reachability=reachability,
        sv=np.full(5, float(sv)), ev=np.full(5, float(ev)), uv=float(uv),
    )


class TestDefenderUncertainty:
    def test_closed_form_fresh(self):
        g = defender_uncertainty(1, ad=0.5, mu=8.0)
        assert g == pytest.approx(1 - math.exp(-4.0), abs=1e-12)
        assert g == pytest.approx(0.9817, abs=1e-4)

    def test_zero_detectability_means_certainty(self):
        assert defender_uncertainty(25, 0.0, 8.0) == 0.0

    def test_long_monitoring_shrinks_uncertainty(self):
        g40 = defender_uncertainty(40, 0.5, 8.0)
        g4 = defender_uncertainty(4, 0.5, 8.0)
        assert g40 == pytest.approx(1 - math.exp(-0.1), abs=1e-12)
        assert g40 == pytest.approx(0.0952, abs=1e-4)
        assert g40 < g4

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            defender_uncertainty(0, 0.3, 8.0)
        with pytest.raises(ValueError):
            defender_uncertainty(1, 1.2, 8.0)
        with pytest.raises(ValueError):
            defender_uncertainty(1, 0.3, -1.0)


class TestDefenseImpact:
    def test_boundaries_and_value(self):
        assert defense_impact(0.0) == 1.0
        assert defense_impact(1.0) == 0.0
        assert defense_impact(0.003) == pytest.approx(0.997)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            defense_impact(1.2)


class TestNids:
    def test_pseudo_count_initialization(self):
        nids = NidsCounters.from_rates(p_fp=0.01, p_fn=0.1, scale=100.0)
        assert nids.tp == 90 and nids.fn == 10
        assert nids.tn == 99 and nids.fp == 1
        assert nids.p_fn == pytest.approx(0.1)
        assert nids.p_fp == pytest.approx(0.01)
        assert nids.tpr == pytest.approx(0.9)

    def test_perfect_detector_flags_everything(self):
        net = Network([make_node(i) for i in range(5)], 2.0)
        for i in (1, 3):
            net.nodes[i].compromised = True
        nids = NidsCounters(tp=1, fn=0, fp=0, tn=1)  # p_fn = 0
        flagged = nids_sweep(net, nids, set(), np.random.default_rng(0))
        assert flagged >= {1, 3}

    def test_detection_frequency(self):
        nids = NidsCounters.from_rates(0.01, 0.1)
        rng = np.random.default_rng(1)
        trials = 10_000
        hits = 0
        for _ in range(trials):
            net = Network([make_node(0), make_node(1)], 1.0)
            net.nodes[0].compromised = True
            hits += 0 in nids_sweep(net, nids, set(), rng, fp_sample=0)
        expect = 0.9
        sigma = math.sqrt(trials * expect * (1 - expect))
        assert abs(hits - trials * expect) < 3 * sigma

    def test_false_positive_sampling_bound(self):
        net = Network([make_node(i) for i in range(50)], 2.0)
        nids = NidsCounters(tp=90, fn=10, fp=10**9, tn=1)  # p_fp ~ 1
        flagged = nids_sweep(net, nids, set(), np.random.default_rng(2), fp_sample=10)
        assert len(flagged) == 10
        flagged = nids_sweep(net, nids, set(), np.random.default_rng(3), fp_sample=0)
        assert len(flagged) == 50

    def test_already_detected_not_reflagged(self):
        net = Network([make_node(0)], 1.0)
        net.nodes[0].compromised = True
        nids = NidsCounters(tp=1, fn=0, fp=0, tn=1)
        flagged = nids_sweep(net, nids, {0}, np.random.default_rng(4))
        assert flagged == set()

    def test_intel_update_arithmetic(self):
        nids = NidsCounters.from_rates(0.01, 0.1)
        deception_intel_update(nids, 1)
        assert nids.tp == 91 and nids.tn == 100
        assert nids.p_fn == pytest.approx(10 / 101)
        assert nids.p_fn < 0.1 and nids.p_fp < 0.01

    def test_intel_update_noop_and_bulk(self):
        nids = NidsCounters.from_rates(0.01, 0.1)
        deception_intel_update(nids, 0)
        assert nids.tp == 90
        deception_intel_update(nids, 50)
        assert nids.p_fn == pytest.approx(10 / 150)

    def test_intel_never_raises_error_rates(self):
        nids = NidsCounters.from_rates(0.01, 0.1)
        for _ in range(200):
            p_fn, p_fp = nids.p_fn, nids.p_fp
            deception_intel_update(nids, 1)
            assert nids.p_fn <= p_fn and nids.p_fp <= p_fp


class TestEvictionPolicy:
    def test_threshold_is_strict(self):
        node = make_node(0, importance=10, reachability=0.25)  # c = 0.25
        assert assess_eviction(node, th_risk=0.2)
        node = make_node(0, importance=10, reachability=0.2)  # c = 0.2
        assert not assess_eviction(node, th_risk=0.2)

    def test_zero_criticality_never_evicted(self):
        node = make_node(0, importance=0, reachability=1.0)
        assert not assess_eviction(node, th_risk=0.0)


class TestExecuteDefense:
    def _net(self, seed=5):
        cfg = NetworkConfig(n_ws=3, n_db=3, n_iot=24, n_lh=4, n_hh=2, p_r=0.15)
        return generate_network(cfg, np.random.default_rng(seed))

    def test_firewall_tightens_perimeter_only(self):
        net = self._net()
        uv_before = [n.uv for n in net.nodes]
        execute_defense(1, net, DefenderState(), 0.01, 20.0,
                        np.random.default_rng(6))
        assert net.perimeter_exposure == pytest.approx(0.99)
        assert [n.uv for n in net.nodes] == uv_before

    def test_patching_lowers_software_scores(self):
        net = self._net()
        before = net.nodes[0].sv.copy()
        execute_defense(2, net, DefenderState(), 0.01, 20.0,
                        np.random.default_rng(7))
        assert np.allclose(net.nodes[0].sv, before * 0.99)

    def test_rekey_resets_encryption_decay(self):
        net = self._net()
        node = net.nodes[0]
        node.ev = np.full(5, 8.0)
        node.t_rekey = 7
        before = effective_encryption_vul(8.0, node.t_rekey)
        assert before == pytest.approx(8 * math.exp(-1 / 7), abs=1e-9)
        execute_defense(3, net, DefenderState(), 0.01, 20.0,
                        np.random.default_rng(8))
        after = effective_encryption_vul(8.0, node.t_rekey)
        assert after == pytest.approx(8 * math.exp(-1), abs=1e-9)
        assert after < before

    def test_rekey_idempotent_within_round(self):
        net = self._net()
        state = DefenderState()
        execute_defense(3, net, state, 0.01, 20.0, np.random.default_rng(9))
        clocks = [n.t_rekey for n in net.nodes]
        execute_defense(3, net, state, 0.01, 20.0, np.random.default_rng(10))
        assert [n.t_rekey for n in net.nodes] == clocks

    def test_mass_eviction_clears_detected_only(self):
        net = self._net()
        state = DefenderState()
        state.detected_compromised = {0, 1}
        net.nodes[2].compromised = True  # false negative stays
        out = execute_defense(4, net, state, 0.01, 20.0, np.random.default_rng(11))
        assert sorted(out.evicted_nodes) == [0, 1]
        assert state.detected_compromised == set()
        assert net.nodes[0].evicted and net.nodes[1].evicted
        assert not net.nodes[2].evicted

    def test_honeypot_activation_marks_deception(self):
        net = self._net()
        out = execute_defense(5, net, DefenderState(), 0.01, 20.0,
                              np.random.default_rng(12))
        assert out.deception_active
        assert net.honeypots_active

    def test_one_round_deceptions_register(self):
        net = self._net()
        state = DefenderState()
        for q in (6, 7, 8):
            state.active_deceptions = set()
            out = execute_defense(q, net, state, 0.01, 20.0,
                                  np.random.default_rng(13))
            assert out.deception_active
            assert q in state.active_deceptions
        assert len(net.hidden) == int(0.2 * net.edge_count())

    def test_trim_strategies_never_raise_scores(self):
        net = self._net()
        state = DefenderState()
        before_sv = [n.sv.copy() for n in net.nodes]
        before_uv = [n.uv for n in net.nodes]
        for q in (1, 2, 3):
            execute_defense(q, net, state, 0.01, 20.0, np.random.default_rng(14))
        for node, sv, uv in zip(net.nodes, before_sv, before_uv):
            assert np.all(node.sv <= sv + 1e-12)
            assert node.uv <= uv + 1e-12

    def test_costs_follow_catalog(self):
        net = self._net()
        state = DefenderState()
        costs = [execute_defense(q, net, state, 0.01, 20.0,
                                 np.random.default_rng(15)).dc
                 for q in range(1, 9)]
        assert costs == [1, 2, 3, 3, 3, 1, 2, 2]

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            execute_defense(9, self._net(), DefenderState(), 0.01, 20.0,
                            np.random.default_rng(16))


class TestSubgameBelief:
    def test_masked_stage_split(self):
        probs = defender_subgame_probs(0.2, Stage.E)
        assert probs[0] == pytest.approx(0.2)
        assert probs[3] == pytest.approx(0.8)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.count_nonzero(probs) == 2

    def test_certainty_boundary(self):
        probs = defender_subgame_probs(0.0, Stage.M)
        assert probs[5] == 1.0 and probs.sum() == 1.0

    def test_total_uncertainty_boundary(self):
        probs = defender_subgame_probs(1.0, Stage.D)
        assert probs[0] == 1.0 and probs.sum() == 1.0

    def test_rejects_bad_uncertainty(self):
        with pytest.raises(ValueError):
            defender_subgame_probs(-0.1, Stage.R)
