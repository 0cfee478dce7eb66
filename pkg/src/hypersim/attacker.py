"""Attacker agent: kill-chain progression, deception-distorted perception,
victim selection by attack-path value, and execution of the eight attack
strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import ATTACK_COST, EXPLOITED_CLASSES, KEY_ATTACKS, Stage
from .hnf import BeliefState
from .topology import (
    Network,
    NodeKind,
    NodeProfile,
    VULN_MAX,
    class_p_v,
    criticality,
    overall_vulnerability,
)


@dataclass
class AttackerState:
    """One attacker generation's mutable state."""

    stage: Stage = Stage.R
    location: int | None = None
    t_monitor: int = 1
    deception_detect: float = 0.25  # chance to see through a deception
    collected_importance: float = 0.0
    attack_path: list[int] = field(default_factory=list)
    in_honeynet: bool = False
    trapped_in: int | None = None
    belief: BeliefState = field(default_factory=lambda: BeliefState("attacker"))
    uncertainty: float = 0.0


@dataclass
class AttackerView:
    """What the attacker can see this round, after deception effects."""

    candidates: list[int]
    perceived: dict[int, tuple[np.ndarray, np.ndarray, float, int]]
    believed_honeypots: set[int]
    deceived: bool = False  # fell for falsified vulnerability info

    def perceived_p_v(self, node_id: int, classes: tuple[str, ...]) -> float:
        sv, ev, uv, t_rekey = self.perceived[node_id]
        fake = NodeProfile(id=node_id, kind=NodeKind.IOT, importance=0,
                           sv=sv, ev=ev, uv=uv, t_rekey=t_rekey)
        return class_p_v(fake, classes)


@dataclass
class AttackOutcome:
    """Result of one attack execution."""

    strategy: int
    success: bool = False
    compromised_nodes: list[int] = field(default_factory=list)
    ai: float = 0.0
    stage_advance: bool = False
    exfiltrated: bool = False
    trapped: bool = False
    nullified: bool = False
    exposed_bots: list[int] = field(default_factory=list)


def attacker_uncertainty(
    t_monitor: int,
    last_defense: tuple[int, float] | None,
    ad: float,
    lam: float,
    standing_dec: float = 0.0,
) -> float:
    """Perceived uncertainty: decays with monitoring time, grows with the
    quality of any deception in use. ``last_defense`` is the (id, cost) of
    the defense the attacker is reacting to; non-deceptions contribute
    nothing. ``standing_dec`` carries persistent deceptions (an activated
    honeynet keeps confusing the attacker even on rounds the defender plays
    something else)."""
    if t_monitor < 1:
        raise ValueError(f"t_monitor must be >= 1, got {t_monitor}")
    if not 0.0 <= ad <= 1.0:
        raise ValueError(f"ad must be in [0, 1], got {ad}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    dec = float(standing_dec)
    if last_defense is not None:
        ds_id, dc = last_defense
        if ds_id in (5, 6, 7, 8):
            dec = max(dec, float(dc))
    df = 1.0 + (1.0 - ad) * dec
    return 1.0 - math.exp(-lam * df / t_monitor)


def _true_scores(node: NodeProfile) -> tuple[np.ndarray, np.ndarray, float, int]:
    return node.sv.copy(), node.ev.copy(), node.uv, node.t_rekey


def _inverted_scores(node: NodeProfile) -> tuple[np.ndarray, np.ndarray, float, int]:
    return (
        VULN_MAX - node.sv,
        VULN_MAX - node.ev,
        VULN_MAX - node.uv,
        node.t_rekey,
    )


def perceive(
    net: Network,
    state: AttackerState,
    active_deceptions: frozenset[int] | set[int],
    rng: np.random.Generator,
    known_deceptions: frozenset[int] | set[int] = frozenset(),
) -> AttackerView:
    """Build the attacker's view of its surroundings.

    From a foothold the view covers adjacent nodes reachable over non-hidden
    edges plus any honeypot lures wired to the foothold; from outside it
    covers the whole legitimate surface. Honeypot neighbors are unmasked
    (and dropped from targeting) with probability ad for a low-interaction
    pot and ad/2 for a high-interaction one. Falsified vulnerability info
    inverts every perceived score, but only when the attacker neither
    observed the falsification strategy being played (``known_deceptions``)
    nor sees through it on its detection draw.
    """
    if state.location is None:
        raw = [i for i in net.active_legit_ids()]
    else:
        loc = state.location
        raw = []
        for j in sorted(net.adj[loc]):
            if (min(loc, j), max(loc, j)) in net.hidden:
                continue
            if not net.nodes[j].evicted:
                raw.append(j)
        if net.honeypots_active:
            raw.extend(sorted(net.honeypot_in[loc]))

    unmasked: set[int] = set()
    candidates: list[int] = []
    for j in raw:
        node = net.nodes[j]
        if node.is_honeypot:
            p_unmask = state.deception_detect
            if node.kind is NodeKind.HONEYPOT_HH:
                p_unmask /= 2.0
            if rng.random() < p_unmask:
                unmasked.add(j)
                continue
        candidates.append(j)

    deceived = False
    if 6 in active_deceptions and 6 not in known_deceptions:
        deceived = rng.random() >= state.deception_detect

    perceived = {}
    for j in candidates:
        node = net.nodes[j]
        perceived[j] = _inverted_scores(node) if deceived else _true_scores(node)

    return AttackerView(
        candidates=candidates,
        perceived=perceived,
        believed_honeypots=unmasked,
        deceived=deceived,
    )


def apv(view: AttackerView, net: Network, node_id: int, attack: int) -> float:
    """Attack-path value of a candidate: already-compromised nodes are free
    to leverage; fresh ones weigh perceived exploitability against the
    strategy's cost."""
    if net.nodes[node_id].compromised and not net.nodes[node_id].evicted:
        return 1.0
    ac = ATTACK_COST[attack - 1]
    cost_factor = 1.0 if ac == 0 else 1.0 - math.exp(-1.0 / ac)
    return cost_factor * view.perceived_p_v(node_id, EXPLOITED_CLASSES[attack])


def choose_victim(
    view: AttackerView,
    net: Network,
    attack: int,
    exclude: set[int] | None = None,
) -> int | None:
    """Highest-value candidate for this attack, ties to the lower node id.
    Nodes already on the attack path are skipped."""
    exclude = exclude or set()
    best: tuple[float, int] | None = None
    for j in view.candidates:
        if j in exclude:
            continue
        value = apv(view, net, j, attack)
        if best is None or value > best[0] or (value == best[0] and j < best[1]):
            best = (value, j)
    return best[1] if best else None


def _compromise(net: Network, state: AttackerState, victim: int) -> None:
    net.nodes[victim].compromised = True
    state.collected_importance += net.nodes[victim].importance
    state.location = victim
    state.attack_path.append(victim)


def _relocate(net: Network, state: AttackerState, victim: int) -> None:
    state.location = victim
    state.attack_path.append(victim)


def _impact(net: Network, newly: list[int]) -> float:
    n_legit = sum(1 for node in net.nodes if not node.is_honeypot)
    return sum(criticality(net.nodes[j]) for j in newly) / n_legit


def _raise_clamped(value: float, eps: float) -> float:
    return min(VULN_MAX, max(0.0, value * (1.0 + eps)))


def execute_attack(
    k: int,
    state: AttackerState,
    net: Network,
    view: AttackerView,
    active_deceptions: frozenset[int] | set[int],
    eps1: float,
    th_c: float,
    rng: np.random.Generator,
    contained: set[int] | None = None,
) -> AttackOutcome:
    """Run attack strategy ``k`` against the current view.

    Any compromise attempt landing on a still-masked honeypot traps the
    attacker in the honeynet. Key-exploiting attacks under live fake keys
    are nullified with probability 1 - ad. ``contained`` nodes (flagged
    compromises deliberately left in place under monitoring) cannot source
    epidemic traffic. Realized impact is the summed criticality of newly
    compromised nodes over the legitimate node count; from the exploitation
    stage onward the attack counts as successful only when that impact is
    positive.
    """
    out = AttackOutcome(strategy=k)
    path_set = set(state.attack_path)
    contained = contained or set()
    # Attacks launched from outside pass through the firewall perimeter.
    exposure = net.perimeter_exposure if state.location is None else 1.0

    if k == 1:
        victim = choose_victim(view, net, 1, exclude=path_set)
        if victim is None:
            return out
        _, p_v = overall_vulnerability(net.nodes[victim])
        if rng.random() < p_v * exposure * math.exp(-1.0 / state.t_monitor):
            out.success = True
            if state.stage in (Stage.R, Stage.D):
                out.stage_advance = True
        return out

    if k == 3:
        sources = sorted(
            n.id for n in net.nodes
            if n.compromised and not n.evicted and not n.is_honeypot
            and n.id not in contained
        )
        newly: list[int] = []
        for src in sources:
            # A bot spraying exploit traffic into a honeypot lure gives
            # itself away to the monitoring side.
            if net.honeypots_active and net.honeypot_in[src]:
                out.exposed_bots.append(src)
            for j in sorted(net.adj[src]):
                node = net.nodes[j]
                if node.compromised or node.evicted or node.is_honeypot:
                    continue
                if rng.random() < class_p_v(node, EXPLOITED_CLASSES[3]):
                    node.compromised = True
                    state.collected_importance += node.importance
                    newly.append(j)
        out.compromised_nodes = newly
        out.ai = _impact(net, newly)
        out.success = out.ai > 0.0
        out.stage_advance = out.success and state.stage >= Stage.E
        return out

    # Single-victim strategies: AS2, AS4..AS8.
    victim = choose_victim(view, net, k, exclude=path_set)
    if victim is None:
        if k == 8 and state.collected_importance > th_c:
            out.exfiltrated = True
            out.success = True
        return out
    victim_node = net.nodes[victim]

    if victim_node.is_honeypot:
        state.in_honeynet = True
        state.trapped_in = victim
        out.trapped = True
        return out

    if victim_node.compromised:
        # Leverage existing footholds: free relocation along the path, no
        # new impact and no stage progress.
        _relocate(net, state, victim)
        return out

    if k == 4:
        victim_node.uv = _raise_clamped(victim_node.uv, eps1)
    if k == 7:
        targets = (
            sorted(net.adj[state.location]) if state.location is not None else [victim]
        )
        for j in targets:
            node = net.nodes[j]
            if not node.evicted and not node.is_honeypot:
                node.ev = np.minimum(VULN_MAX, node.ev * (1.0 + eps1))

    nullified = False
    if k in KEY_ATTACKS and 7 in active_deceptions:
        nullified = rng.random() < (1.0 - state.deception_detect)
        out.nullified = nullified

    p_hit = class_p_v(victim_node, EXPLOITED_CLASSES[k]) * exposure
    if not nullified and rng.random() < p_hit:
        _compromise(net, state, victim)
        out.compromised_nodes = [victim]
        out.ai = _impact(net, [victim])
        out.success = True
        if state.stage is Stage.D or state.stage >= Stage.E:
            out.stage_advance = True

    if k == 8 and state.collected_importance > th_c:
        out.exfiltrated = True
        out.success = True

    return out


def advance_or_reset(
    state: AttackerState,
    outcome: AttackOutcome | None,
    foothold_evicted: bool,
    unmask_escape: bool,
    ad_range: tuple[float, float],
    rng: np.random.Generator,
) -> tuple[AttackerState, bool]:
    """End-of-round bookkeeping: advance the clock and stage, or replace the
    attacker after exfiltration, foothold eviction, or a honeynet escape.
    The Dirichlet counts persist across attacker generations."""
    replaced = (
        (outcome is not None and outcome.exfiltrated)
        or foothold_evicted
        or unmask_escape
    )
    if replaced:
        fresh = AttackerState(
            deception_detect=float(rng.uniform(ad_range[0], ad_range[1])),
            belief=state.belief,
        )
        return fresh, True

    if outcome is not None and outcome.stage_advance and state.stage < Stage.DE:
        state.stage = Stage(state.stage + 1)
    state.t_monitor += 1
    return state, False
