"""Round orchestration for the four comparison schemes, system-failure
detection, and seeded Monte Carlo aggregation.

Within a round the defense always lands before the attack so interception
effects (fake keys, honeypot lures, hidden edges) are in place when the
attack arrives. A trapped attacker keeps choosing and paying for attacks,
but they land in the honeynet and never touch the real network; every
trapped round feeds attack intelligence to the detector.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import attacker as atk
from . import defender as dfd
from . import hnf
from .catalog import (
    ATTACK_COST,
    DECEPTION_DEFENSES,
    DEFENSE_COST,
    Stage,
    defense_set,
    subgame_strategies,
)
from .topology import (
    Network,
    NetworkConfig,
    NodeKind,
    compute_reachability,
    criticality,
    generate_network,
    rewire_and_reconnect,
)

SCHEMES = ("dd-pi", "no-dd-pi", "dd-ipi", "no-dd-ipi")


@dataclass
class SchemeConfig:
    """Everything one simulation run needs, defaults per the experiment
    design's notation table."""

    scheme: str = "dd-ipi"
    heu_mode: str = "random_fallback"
    # Informed-play rule per side; `selection` overrides both when set.
    # The attacker chases utility (cheap, effective strategies); the defender
    # spreads play across its subgame per its learned distribution. Under
    # uncertainty the attacker swaps its informed pick for a uniform draw
    # from the subgame with probability g.
    attacker_selection: str = "argmax"
    defender_selection: str = "smoothed"
    selection: str | None = None
    lam: float = 0.8
    mu: float = 8.0
    rho1: float = 1.0 / 3.0
    rho2: float = 1.0 / 2.0
    th_risk: float = 0.2
    th_c: float = 150.0
    eps1: float = 0.1
    eps2: float = 0.01
    c_nt: float = 20.0
    p_fp0: float = 0.01
    p_fn0: float = 0.1
    nids_scale: float = 100.0
    fp_sample: int = 0  # 0 sweeps every clean node; >0 bounds the sample
    ad_min: float = 0.0
    ad_max: float = 0.5
    network: NetworkConfig = field(default_factory=NetworkConfig)
    round_cap: int = 1000
    master_seed: int = 2024
    collect_distributions: bool = False

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; pick one of {SCHEMES}")
        for name, value in (("rho1", self.rho1), ("rho2", self.rho2)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a fraction in [0, 1], got {value}")
        if not 0.0 <= self.ad_min <= self.ad_max <= 1.0:
            raise ValueError("need 0 <= ad_min <= ad_max <= 1")

    @property
    def dd_enabled(self) -> bool:
        return self.scheme.startswith("dd")

    @property
    def perfect_info(self) -> bool:
        return self.scheme.endswith("-pi")

    @property
    def attacker_policy(self) -> str:
        return self.selection or self.attacker_selection

    @property
    def defender_policy(self) -> str:
        return self.selection or self.defender_selection


@dataclass
class RoundRecord:
    """Metrics for one game round."""

    run_id: int
    round: int
    scheme: str
    stage: int
    as_id: int
    ds_id: int
    g_attack: float
    g_defense: float
    aheu: float
    dheu: float
    attack_cost: float
    defense_cost: float
    attack_impact: float
    defense_impact: float
    tpr: float
    fpr: float
    compromised: int
    importance_fraction: float
    system_failure: bool


@dataclass
class RunSummary:
    """Per-run aggregate."""

    run_id: int
    seed: int
    scheme: str
    mttsf: int
    censored: bool
    final_tpr: float
    final_fpr: float
    mean_attack_cost: float
    mean_defense_cost: float
    mean_aheu: float
    mean_dheu: float
    as_freq: np.ndarray
    ds_freq: np.ndarray
    rounds: list[RoundRecord]
    distributions: list[np.ndarray] | None = None


@dataclass
class World:
    """Mutable state owned by one run."""

    net: Network
    attacker: atk.AttackerState
    defender: dfd.DefenderState
    rng: np.random.Generator
    compromised_by: dict[int, int] = field(default_factory=dict)
    last_defense: tuple[int, float] | None = None
    dist_log: list[np.ndarray] | None = None


def _cumulative_attack_impacts(world: World) -> np.ndarray:
    """Per-strategy realized impact: summed criticality of the standing
    compromises each strategy produced, over the legitimate node count."""
    n_legit = sum(1 for n in world.net.nodes if not n.is_honeypot)
    ai = np.zeros(8)
    for node_id, strategy in world.compromised_by.items():
        node = world.net.nodes[node_id]
        if node.compromised and not node.evicted:
            ai[strategy - 1] += criticality(node)
    return ai / n_legit


def check_system_failure(net: Network, rho1: float, rho2: float) -> bool:
    """Failure when the standing compromised-importance share reaches rho1
    or the surviving-node share falls to rho2. Honeypots are excluded from
    both ratios."""
    total_importance = 0.0
    compromised_importance = 0.0
    alive = 0
    original = 0
    for node in net.nodes:
        if node.is_honeypot:
            continue
        original += 1
        total_importance += node.importance
        if not node.evicted:
            alive += 1
            if node.compromised:
                compromised_importance += node.importance
    if total_importance > 0 and compromised_importance / total_importance >= rho1:
        return True
    return alive / original <= rho2


def _log_dist(world: World, vec: np.ndarray) -> None:
    if world.dist_log is not None:
        world.dist_log.append(np.asarray(vec, dtype=np.float64).copy())


def step(world: World, cfg: SchemeConfig, run_id: int, round_idx: int) -> RoundRecord:
    """Play one round and return its record."""
    net, attacker, defender, rng = world.net, world.attacker, world.defender, world.rng
    ad = attacker.deception_detect
    stage = attacker.stage
    trapped = attacker.in_honeynet

    # 1. Uncertainty going into the decisions. The attacker reacts to the
    # defense it last saw; round one starts from a plain system view.
    if cfg.perfect_info:
        g_attack_decide = 0.0
        g_defense = 0.0
    else:
        g_attack_decide = atk.attacker_uncertainty(
            attacker.t_monitor, world.last_defense, ad, cfg.lam,
            standing_dec=DEFENSE_COST[4] if net.honeypots_active else 0.0,
        )
        g_defense = dfd.defender_uncertainty(defender.t_monitor, ad, cfg.mu)
    attacker.uncertainty = g_attack_decide
    defender.uncertainty = g_defense

    # 2. Subgame choice: the attacker plays its stage, the defender samples
    # between the believed stage and the full game.
    kappa_attacker = int(stage)
    subgame_probs = dfd.defender_subgame_probs(g_defense, stage)
    _log_dist(world, subgame_probs)
    if g_defense > 0.0 and rng.random() < subgame_probs[0]:
        kappa_defender = 0
    else:
        kappa_defender = int(stage)

    # 3. Utilities and hypergame expected utilities over each side's subgame.
    ai_vec = _cumulative_attack_impacts(world)
    di_vec = 1.0 - ai_vec
    matrix = hnf.minmax_normalize(
        hnf.build_utility_matrix(ai_vec, ATTACK_COST, di_vec, DEFENSE_COST)
    )

    cms = np.array(
        [
            hnf.strategy_probs(defender.belief.gamma_attack, subgame_strategies(k)[0])
            for k in range(7)
        ]
    )
    s_defender = hnf.belief_summary(subgame_probs, cms)
    _log_dist(world, s_defender)

    attack_set = subgame_strategies(kappa_attacker)[0]
    believed_ds = subgame_strategies(kappa_attacker)[1]
    s_attacker = hnf.strategy_probs(attacker.belief.gamma_defense, believed_ds)
    _log_dist(world, s_attacker)

    ds_candidates = defense_set(kappa_defender, cfg.dd_enabled)
    dheu_values = [
        hnf.heu(q, g_defense, s_defender, matrix.cu.T, cfg.heu_mode,
                opponent_set=subgame_strategies(kappa_defender)[0])
        for q in ds_candidates
    ]
    chosen_ds = hnf.select_strategy(
        ds_candidates,
        dheu_values,
        cfg.defender_policy,
        rng,
        costs=[DEFENSE_COST[q - 1] for q in ds_candidates],
        counts=defender.belief.own_play[kappa_defender],
    )
    dheu = dheu_values[ds_candidates.index(chosen_ds)]

    aheu_values = [
        hnf.heu(p, g_attack_decide, s_attacker, matrix.ru, cfg.heu_mode,
                opponent_set=believed_ds)
        for p in attack_set
    ]
    chosen_as = hnf.select_strategy(
        attack_set,
        aheu_values,
        cfg.attacker_policy,
        rng,
        costs=[ATTACK_COST[p - 1] for p in attack_set],
        counts=attacker.belief.own_play[kappa_attacker],
    )

    if world.dist_log is not None:
        _log_dist(world, hnf.strategy_probs(attacker.belief.gamma_attack, attack_set))
        _log_dist(
            world,
            hnf.strategy_probs(
                defender.belief.gamma_defense, subgame_strategies(kappa_defender)[1]
            ),
        )

    # 4. Defense executes first; one-round deception effects start fresh.
    defender.active_deceptions = set()
    net.hidden = set()
    defense_out = dfd.execute_defense(chosen_ds, net, defender, cfg.eps2, cfg.c_nt, rng)

    # The recorded attacker uncertainty reflects the defense actually taken
    # this round (the deception in front of the attacker right now). Facing
    # that much uncertainty, the attacker abandons its informed pick for a
    # random strategy from its subgame.
    if cfg.perfect_info:
        g_attack = 0.0
    else:
        g_attack = atk.attacker_uncertainty(
            attacker.t_monitor, (chosen_ds, defense_out.dc), ad, cfg.lam,
            standing_dec=DEFENSE_COST[4] if net.honeypots_active else 0.0,
        )
    if g_attack > 0.0 and rng.random() < g_attack:
        chosen_as = attack_set[int(rng.integers(len(attack_set)))]
    aheu = aheu_values[attack_set.index(chosen_as)]

    # 5. Attack executes against the post-defense world. Plays made from
    # inside the honeynet never reach real nodes. An attacker that observed
    # the falsified-vulnerability strategy being played cannot be misled by
    # the planted information.
    outcome: atk.AttackOutcome | None = None
    if not trapped:
        known: set[int] = set()
        if 6 in defender.active_deceptions:
            if g_attack <= 0.0 or rng.random() >= g_attack:
                known.add(6)
        view = atk.perceive(net, attacker, defender.active_deceptions, rng,
                            known_deceptions=known)
        outcome = atk.execute_attack(
            chosen_as, attacker, net, view, defender.active_deceptions,
            cfg.eps1, cfg.th_c, rng, contained=defender.detected_compromised,
        )
        for node_id in outcome.compromised_nodes:
            world.compromised_by[node_id] = chosen_as
    realized_ai = outcome.ai if outcome is not None else 0.0

    # 6. Detector sweep, eviction policy, deception-sourced intelligence.
    # Without deception every flag is evicted on the spot. With deception
    # only high-risk flags are cut loose; low-risk true compromises are
    # detained as intelligence sources and low-risk false positives are
    # reassessed and released.
    newly_flagged = dfd.nids_sweep(
        net, defender.nids, defender.detected_compromised, rng, cfg.fp_sample
    )
    if outcome is not None:
        newly_flagged.update(
            b for b in outcome.exposed_bots
            if b not in defender.detected_compromised
        )
    for node_id in sorted(newly_flagged):
        node = net.nodes[node_id]
        if not cfg.dd_enabled:
            net.evict(node_id)
        elif dfd.assess_eviction(node, cfg.th_risk):
            net.evict(node_id)
        elif node.compromised:
            defender.detected_compromised.add(node_id)

    # Attack intelligence: one credit per monitoring interval for a deception
    # engagement (honeynet residence, a swallowed fake key, or swallowed
    # honey information) and one for intruders deliberately detained under
    # observation.
    intel = 0
    if attacker.in_honeynet or (outcome is not None and (
        outcome.nullified or outcome.exposed_bots
    )) or (not trapped and outcome is not None and view.deceived):
        intel += 1
    if defender.detected_compromised:
        intel += 1
    dfd.deception_intel_update(defender.nids, intel)

    # 7. Both sides learn from what they observed this round.
    hnf.update_beliefs(attacker.belief, chosen_ds, g_attack, kappa_attacker, rng)
    hnf.update_beliefs(defender.belief, chosen_as, g_defense, kappa_defender, rng)
    attacker.belief.record_own(chosen_as, kappa_attacker)
    defender.belief.record_own(chosen_ds, kappa_defender)

    # 8. Mobility rewiring, reconnection, fresh reachability.
    rewire_and_reconnect(net, rng)
    compute_reachability(net)

    # 9. Clocks advance; a finished attacker is replaced by a fresh one.
    for node in net.nodes:
        if not node.evicted:
            node.t_rekey += 1
    escape = False
    if attacker.in_honeynet and attacker.trapped_in is not None:
        p_escape = ad
        if net.nodes[attacker.trapped_in].kind is NodeKind.HONEYPOT_HH:
            p_escape /= 2.0
        escape = rng.random() < p_escape
    foothold_evicted = (
        attacker.location is not None and net.nodes[attacker.location].evicted
    )
    world.attacker, replaced = atk.advance_or_reset(
        attacker, outcome, foothold_evicted, escape, (cfg.ad_min, cfg.ad_max), rng
    )
    if replaced:
        defender.t_monitor = 1
    else:
        defender.t_monitor += 1
    world.last_defense = (chosen_ds, defense_out.dc)

    # 10. Emit the record.
    n_compromised = 0
    compromised_importance = 0.0
    total_importance = 0.0
    for node in net.nodes:
        if node.is_honeypot:
            continue
        total_importance += node.importance
        if node.compromised and not node.evicted:
            n_compromised += 1
            compromised_importance += node.importance
    return RoundRecord(
        run_id=run_id,
        round=round_idx,
        scheme=cfg.scheme,
        stage=int(stage),
        as_id=chosen_as,
        ds_id=chosen_ds,
        g_attack=g_attack,
        g_defense=g_defense,
        aheu=aheu,
        dheu=dheu,
        attack_cost=float(ATTACK_COST[chosen_as - 1]),
        defense_cost=float(defense_out.dc),
        attack_impact=realized_ai,
        defense_impact=dfd.defense_impact(realized_ai),
        tpr=defender.nids.tpr,
        fpr=defender.nids.p_fp,
        compromised=n_compromised,
        importance_fraction=(
            compromised_importance / total_importance if total_importance else 0.0
        ),
        system_failure=check_system_failure(net, cfg.rho1, cfg.rho2),
    )


def _new_attacker(cfg: SchemeConfig, rng: np.random.Generator) -> atk.AttackerState:
    return atk.AttackerState(
        deception_detect=float(rng.uniform(cfg.ad_min, cfg.ad_max))
    )


def run(cfg: SchemeConfig, seed: int, run_id: int = 0) -> RunSummary:
    """Play rounds until system failure or the round cap; fully determined
    by (cfg, seed)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    net = generate_network(cfg.network, rng)
    world = World(
        net=net,
        attacker=_new_attacker(cfg, rng),
        defender=dfd.DefenderState(
            mu=cfg.mu,
            nids=dfd.NidsCounters.from_rates(cfg.p_fp0, cfg.p_fn0, cfg.nids_scale),
        ),
        rng=rng,
        dist_log=[] if cfg.collect_distributions else None,
    )

    records: list[RoundRecord] = []
    failed = False
    for t in range(1, cfg.round_cap + 1):
        record = step(world, cfg, run_id, t)
        records.append(record)
        if record.system_failure:
            failed = True
            break

    as_freq = np.zeros(8)
    ds_freq = np.zeros(8)
    for r in records:
        as_freq[r.as_id - 1] += 1
        ds_freq[r.ds_id - 1] += 1
    as_freq /= len(records)
    ds_freq /= len(records)

    return RunSummary(
        run_id=run_id,
        seed=seed,
        scheme=cfg.scheme,
        mttsf=len(records),
        censored=not failed,
        final_tpr=records[-1].tpr,
        final_fpr=records[-1].fpr,
        mean_attack_cost=float(np.mean([r.attack_cost for r in records])),
        mean_defense_cost=float(np.mean([r.defense_cost for r in records])),
        mean_aheu=float(np.mean([r.aheu for r in records])),
        mean_dheu=float(np.mean([r.dheu for r in records])),
        as_freq=as_freq,
        ds_freq=ds_freq,
        rounds=records,
        distributions=world.dist_log,
    )


CURVE_METRICS = (
    "g_attack",
    "g_defense",
    "aheu",
    "dheu",
    "attack_cost",
    "defense_cost",
    "tpr",
)

SUMMARY_METRICS = (
    "mttsf",
    "final_tpr",
    "final_fpr",
    "mean_attack_cost",
    "mean_defense_cost",
    "mean_aheu",
    "mean_dheu",
)


@dataclass
class MonteCarloResult:
    scheme: str
    n_runs: int
    summaries: list[RunSummary]
    stats: dict[str, tuple[float, float]]  # metric -> (mean, stderr)
    curves: dict[str, np.ndarray]  # per-round means over runs still alive


def derive_seeds(master_seed: int, n_runs: int) -> list[int]:
    """Deterministic, distinct per-run seeds from one master seed."""
    return [
        int(np.random.SeedSequence((master_seed, i)).generate_state(1, np.uint64)[0])
        for i in range(n_runs)
    ]


def monte_carlo(cfg: SchemeConfig, n_runs: int, master_seed: int | None = None) -> MonteCarloResult:
    """Independent seeded runs plus deterministic aggregation. Per-round
    curves average only over the runs still alive at each round."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seeds = derive_seeds(
        cfg.master_seed if master_seed is None else master_seed, n_runs
    )
    summaries = [run(cfg, seed, run_id=i) for i, seed in enumerate(seeds)]

    stats: dict[str, tuple[float, float]] = {}
    for metric in SUMMARY_METRICS:
        values = np.array([getattr(s, metric) for s in summaries], dtype=np.float64)
        mean = float(values.mean())
        stderr = float(values.std(ddof=1) / np.sqrt(n_runs)) if n_runs > 1 else 0.0
        stats[metric] = (mean, stderr)

    horizon = max(s.mttsf for s in summaries)
    curves: dict[str, np.ndarray] = {}
    for metric in CURVE_METRICS:
        curve = np.full(horizon, np.nan)
        for t in range(horizon):
            alive = [s.rounds[t] for s in summaries if s.mttsf > t]
            if alive:
                curve[t] = float(np.mean([getattr(r, metric) for r in alive]))
        curves[metric] = curve

    return MonteCarloResult(
        scheme=cfg.scheme,
        n_runs=n_runs,
        summaries=summaries,
        stats=stats,
        curves=curves,
    )


def config_for_scheme(base: SchemeConfig, scheme: str) -> SchemeConfig:
    """Clone a config onto another scheme."""
    return replace(base, scheme=scheme)
