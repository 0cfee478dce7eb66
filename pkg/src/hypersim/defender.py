"""Defender agent: the always-on intrusion detector with Beta-counter error
rates, the risk-based eviction policy, and execution of the eight defense
strategies including the deception set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import DECEPTION_DEFENSES, DEFENSE_COST, FULL_GAME, Stage
from .hnf import BeliefState
from .topology import Network, activate_honeypots, criticality, hide_edges


@dataclass
class NidsCounters:
    """Detector quality as pseudo-counts; rates derive from the counters.

    Counter updates come from deception-sourced attack intelligence, so the
    true-positive rate can only improve over a run.
    """

    tp: float = 90.0
    fn: float = 10.0
    fp: float = 1.0
    tn: float = 99.0

    @classmethod
    def from_rates(cls, p_fp: float, p_fn: float, scale: float = 100.0) -> "NidsCounters":
        return cls(
            tp=(1.0 - p_fn) * scale,
            fn=p_fn * scale,
            fp=p_fp * scale,
            tn=(1.0 - p_fp) * scale,
        )

    @property
    def p_fn(self) -> float:
        return self.fn / (self.tp + self.fn)

    @property
    def p_fp(self) -> float:
        return self.fp / (self.tn + self.fp)

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn)


@dataclass
class DefenderState:
    """Defender-side mutable state for one run."""

    t_monitor: int = 1
    mu: float = 8.0
    nids: NidsCounters = field(default_factory=NidsCounters)
    detected_compromised: set[int] = field(default_factory=set)
    belief: BeliefState = field(default_factory=lambda: BeliefState("defender"))
    uncertainty: float = 0.0
    active_deceptions: set[int] = field(default_factory=set)


def defender_uncertainty(t_monitor: int, ad: float, mu: float) -> float:
    """Uncertainty about the attacker: shrinks the longer the current
    attacker has been observed, grows with the attacker's ability to dodge
    deception-based monitoring."""
    if t_monitor < 1:
        raise ValueError(f"t_monitor must be >= 1, got {t_monitor}")
    if not 0.0 <= ad <= 1.0:
        raise ValueError(f"ad must be in [0, 1], got {ad}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    return 1.0 - math.exp(-mu * ad / t_monitor)


def defense_impact(ai_k: float) -> float:
    """Defense effectiveness is the complement of the attack impact."""
    if not 0.0 <= ai_k <= 1.0:
        raise ValueError(f"attack impact must be in [0, 1], got {ai_k}")
    return 1.0 - ai_k


def nids_sweep(
    net: Network,
    nids: NidsCounters,
    already_detected: set[int],
    rng: np.random.Generator,
    fp_sample: int = 0,
) -> set[int]:
    """One detector pass. Every compromised, live, not-yet-flagged node is
    flagged with probability 1 - p_fn; every clean node is falsely flagged
    with probability p_fp. ``fp_sample`` > 0 bounds the false-positive
    evaluation to that many randomly sampled clean nodes per pass. Returns
    the newly flagged node ids."""
    flagged: set[int] = set()
    clean: list[int] = []
    for i in net.active_legit_ids():
        node = net.nodes[i]
        if node.compromised:
            if i not in already_detected and rng.random() < (1.0 - nids.p_fn):
                flagged.add(i)
        else:
            clean.append(i)

    if fp_sample > 0 and len(clean) > fp_sample:
        picks = rng.choice(len(clean), size=fp_sample, replace=False)
        clean = [clean[int(p)] for p in sorted(picks)]
    for i in clean:
        if i not in already_detected and rng.random() < nids.p_fp:
            flagged.add(i)
    return flagged


def deception_intel_update(nids: NidsCounters, trapped_rounds: int) -> None:
    """Fold deception-sourced attack intelligence into the detector: one
    true-positive and one true-negative credit per monitoring interval."""
    if trapped_rounds <= 0:
        return
    nids.tp += trapped_rounds
    nids.tn += trapped_rounds


def assess_eviction(node, th_risk: float) -> bool:
    """Evict a flagged node only when its criticality exceeds the risk
    threshold; low-risk intrusions are left in place to keep feeding the
    detector."""
    return criticality(node) > th_risk


@dataclass
class DefenseOutcome:
    """Result of executing one defense strategy."""

    strategy: int
    dc: float
    deception_active: bool
    evicted_nodes: list[int] = field(default_factory=list)


def execute_defense(
    q: int,
    net: Network,
    state: DefenderState,
    eps2: float,
    c_nt: float,
    rng: np.random.Generator,
) -> DefenseOutcome:
    """Apply defense strategy ``q`` to the network.

    DS1 tightens the firewall, shaving the vulnerability exposed to outside
    attackers; it does nothing against an attacker already holding a
    foothold. DS2 patches software vulnerabilities everywhere, DS3 rekeys,
    DS4 evicts every currently flagged node, DS5 activates the honeypot
    lures, DS6-DS8 arm the one-round deceptions (falsified vulnerability
    info, fake keys, hidden edges).
    """
    if not 1 <= q <= 8:
        raise ValueError(f"unknown defense strategy {q}")
    out = DefenseOutcome(
        strategy=q,
        dc=DEFENSE_COST[q - 1],
        deception_active=q in DECEPTION_DEFENSES,
    )
    if q == 1:
        net.perimeter_exposure = max(0.0, net.perimeter_exposure * (1.0 - eps2))
    elif q == 2:
        for i in net.active_legit_ids():
            node = net.nodes[i]
            node.sv = np.maximum(0.0, node.sv * (1.0 - eps2))
    elif q == 3:
        for i in net.active_legit_ids():
            net.nodes[i].t_rekey = 1
    elif q == 4:
        for i in sorted(state.detected_compromised):
            if not net.nodes[i].evicted:
                net.evict(i)
                out.evicted_nodes.append(i)
        state.detected_compromised.clear()
    elif q == 5:
        activate_honeypots(net)
    elif q == 6:
        state.active_deceptions.add(6)
    elif q == 7:
        state.active_deceptions.add(7)
    elif q == 8:
        hide_edges(net, c_nt)
        state.active_deceptions.add(8)

    if out.deception_active:
        state.active_deceptions.add(q)
    return out


def defender_subgame_probs(g_d: float, believed_stage: Stage) -> np.ndarray:
    """Belief over the seven subgames: with confidence 1 - g the defender
    pins the attacker's true stage; the remaining mass falls back to the
    full game."""
    if not 0.0 <= g_d <= 1.0:
        raise ValueError(f"g must be in [0, 1], got {g_d}")
    probs = np.zeros(7)
    probs[FULL_GAME] = g_d
    probs[int(believed_stage)] += 1.0 - g_d
    return probs
