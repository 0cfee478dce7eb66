"""Hypergame normal form machinery: zero-sum utility grids, subgame-restricted
strategy distributions learned from Dirichlet counts, belief mixtures over
subgames, expected utility, and the uncertainty-weighted hypergame expected
utility (HEU).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import FULL_GAME, N_STRATEGIES, subgame_strategies

# Exploration floor of the "smoothed" selection policy: each candidate gets
# this much base weight on top of its normalized-utility share.
SMOOTHING_PRIOR = 0.5

__all__ = [
    "UtilityMatrix",
    "BeliefState",
    "build_utility_matrix",
    "minmax_normalize",
    "subgame_strategies",
    "strategy_probs",
    "belief_summary",
    "expected_utility",
    "heu",
    "update_beliefs",
    "select_strategy",
]


@dataclass
class UtilityMatrix:
    """Paired row/column utilities on the full strategy grid.

    ``ru[p, q]`` is the row player's utility when the row player takes
    strategy p+1 against column strategy q+1; ``cu[p, q]`` is the column
    player's utility in the same cell. Before normalization the game is
    exactly zero-sum cell by cell.
    """

    ru: np.ndarray
    cu: np.ndarray
    normalized: bool = False

    @property
    def m(self) -> int:
        return self.ru.shape[0]

    @property
    def n(self) -> int:
        return self.ru.shape[1]


def build_utility_matrix(
    ai: Sequence[float],
    ac: Sequence[float],
    di: Sequence[float],
    dc: Sequence[float],
) -> UtilityMatrix:
    """Zero-sum utilities: attacker gain is attack impact plus the defender's
    spend, attacker loss is its own spend plus the defense impact; the
    defender's cell value is the exact negation."""
    ai = np.asarray(ai, dtype=np.float64)
    di = np.asarray(di, dtype=np.float64)
    ac = np.asarray(ac, dtype=np.float64)
    dc = np.asarray(dc, dtype=np.float64)
    for name, impacts in (("ai", ai), ("di", di)):
        if impacts.min() < 0.0 or impacts.max() > 1.0:
            raise ValueError(f"{name} impacts must lie in [0, 1]")
    ru = (ai[:, None] + dc[None, :]) - (ac[:, None] + di[None, :])
    cu = (di[None, :] + ac[:, None]) - (dc[None, :] + ai[:, None])
    return UtilityMatrix(ru=ru, cu=cu)


def _minmax(x: np.ndarray) -> np.ndarray:
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return np.full_like(x, 0.5)
    return (x - lo) / (hi - lo)


def minmax_normalize(u: UtilityMatrix) -> UtilityMatrix:
    """Map each side's utilities into [0, 1] independently; a constant side
    maps to the neutral 0.5. Affine, so every argmax is preserved."""
    if u.ru.size == 0:
        raise ValueError("cannot normalize an empty matrix")
    return UtilityMatrix(ru=_minmax(u.ru), cu=_minmax(u.cu), normalized=True)


@dataclass
class BeliefState:
    """Dirichlet strategy-frequency counts held by one player.

    ``gamma_attack`` counts attack strategies, ``gamma_defense`` defense
    strategies. The vector covering the owner's own strategies is exact play
    history; the opponent vector accrues through noisy observation. Own play
    is additionally tallied per subgame (``own_play[kappa]``), which is what
    the repeated-game distribution play samples from.
    """

    owner: str  # "attacker" | "defender"
    gamma_attack: np.ndarray = field(
        default_factory=lambda: np.zeros(N_STRATEGIES)
    )
    gamma_defense: np.ndarray = field(
        default_factory=lambda: np.zeros(N_STRATEGIES)
    )
    own_play: np.ndarray = field(
        default_factory=lambda: np.zeros((7, N_STRATEGIES))
    )

    def own_counts(self) -> np.ndarray:
        return self.gamma_attack if self.owner == "attacker" else self.gamma_defense

    def opponent_counts(self) -> np.ndarray:
        return self.gamma_defense if self.owner == "attacker" else self.gamma_attack

    def record_own(self, strategy: int, subgame: int = FULL_GAME) -> None:
        self.own_counts()[strategy - 1] += 1.0
        self.own_play[subgame, strategy - 1] += 1.0


def strategy_probs(counts: Sequence[float], strategy_set: Sequence[int]) -> np.ndarray:
    """Distribution over all 8 strategies restricted to ``strategy_set``.

    With no history inside the set the distribution is uniform over the set;
    otherwise each member's probability is its count share. Strategies
    outside the set get probability 0.
    """
    counts = np.asarray(counts, dtype=np.float64)
    out = np.zeros(N_STRATEGIES)
    members = [s - 1 for s in strategy_set]
    total = counts[members].sum()
    if total <= 0.0:
        for s in members:
            out[s] = 1.0 / len(members)
    else:
        for s in members:
            out[s] = counts[s] / total
    return out


def belief_summary(p_subgame: Sequence[float], cms: Sequence[Sequence[float]]) -> np.ndarray:
    """Mix the per-subgame column distributions by the subgame belief
    probabilities: S_j = sum_k P_k * c_kj."""
    p_subgame = np.asarray(p_subgame, dtype=np.float64)
    cms = np.asarray(cms, dtype=np.float64)
    return p_subgame @ cms


def expected_utility(row_strategy: int, s: Sequence[float], u: np.ndarray) -> float:
    """Expected utility of a row strategy against column distribution ``s``."""
    s = np.asarray(s, dtype=np.float64)
    return float(s @ u[row_strategy - 1])


def heu(
    row_strategy: int,
    g: float,
    s: Sequence[float],
    u: np.ndarray,
    mode: str = "random_fallback",
    opponent_set: Sequence[int] | None = None,
) -> float:
    """Hypergame expected utility of one row strategy under uncertainty g.

    The certain share (1-g) is the expected utility against the believed
    column distribution. The uncertain share is either the pessimistic
    worst-column term n * S_w * u_iw (mode "pessimistic") or, by default, the
    expected utility against a uniform draw from the opponent's strategies in
    the current subgame (mode "random_fallback"); ``opponent_set`` names that
    subgame's opponent strategies and defaults to every column.
    """
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"uncertainty g must be in [0, 1], got {g}")
    s = np.asarray(s, dtype=np.float64)
    row = u[row_strategy - 1]
    eu_belief = float(s @ row)
    if mode == "pessimistic":
        w = int(np.argmin(row))
        uncertain = len(row) * float(s[w]) * float(row[w])
    elif mode == "random_fallback":
        cols = (
            [q - 1 for q in opponent_set]
            if opponent_set is not None
            else list(range(len(row)))
        )
        uncertain = float(row[cols].mean())
    else:
        raise ValueError(f"unknown HEU mode {mode!r}")
    return (1.0 - g) * eu_belief + g * uncertain


def update_beliefs(
    belief: BeliefState,
    true_opponent_strategy: int,
    g: float,
    subgame: int,
    rng: np.random.Generator,
) -> None:
    """Record one observation of the opponent's strategy.

    With probability 1-g the true strategy's count is incremented; otherwise
    a uniformly random strategy from the believed subgame's opponent set is
    credited instead. The total count always grows by exactly one.
    """
    counts = belief.opponent_counts()
    attack_set, defense_set_ = subgame_strategies(subgame)
    opponent_set = defense_set_ if belief.owner == "attacker" else attack_set
    if g > 0.0 and rng.random() < g:
        observed = opponent_set[int(rng.integers(len(opponent_set)))]
    else:
        observed = true_opponent_strategy
    counts[observed - 1] += 1.0


def select_strategy(
    candidates: Sequence[int],
    heu_values: Sequence[float],
    policy: str,
    rng: np.random.Generator,
    costs: Sequence[float] | None = None,
    counts: Sequence[float] | None = None,
) -> int:
    """Pick one strategy id from ``candidates``.

    argmax: highest HEU, value ties broken by lower cost; strategies still
        tied after the cost rule are equivalent rows of the game, so one is
        drawn at random (seeded) to avoid locking onto the lowest id.
    proportional: sample with probability proportional to the HEU values,
        shifted to be nonnegative when needed.
    smoothed: probability proportional to the min-max normalized HEU plus a
        uniform exploration floor, so utility shapes play without starving
        any subgame member.
    dirichlet: sample from the player's own play history with a uniform
        prior (count + 1), the repeated-game distribution play; ``counts``
        must be the owner's full 8-entry count vector.
    """
    candidates = list(candidates)
    values = np.asarray(heu_values, dtype=np.float64)
    if policy not in ("argmax", "proportional", "smoothed", "dirichlet"):
        raise ValueError(f"unknown selection policy {policy!r}")
    if not candidates:
        raise ValueError("no candidate strategies")
    if len(candidates) == 1:
        return candidates[0]

    if policy == "argmax":
        cost_of = (
            {c: costs[k] for k, c in enumerate(candidates)}
            if costs is not None
            else {c: 0.0 for c in candidates}
        )
        best_key = max(
            (values[k], -cost_of[candidates[k]]) for k in range(len(candidates))
        )
        tied = [
            candidates[k]
            for k in range(len(candidates))
            if (values[k], -cost_of[candidates[k]]) == best_key
        ]
        if len(tied) == 1:
            return tied[0]
        return tied[int(rng.integers(len(tied)))]
    if policy in ("proportional", "smoothed"):
        if policy == "smoothed":
            weights = _minmax(values) + SMOOTHING_PRIOR
        else:
            lo = float(values.min())
            weights = values - lo if lo < 0.0 else values.copy()
        total = weights.sum()
        if total <= 0.0:
            weights = np.full(len(candidates), 1.0 / len(candidates))
        else:
            weights = weights / total
        return candidates[_sample_index(weights, rng)]
    if counts is None:
        raise ValueError("dirichlet policy requires the owner's counts")
    counts = np.asarray(counts, dtype=np.float64)
    weights = np.array([counts[c - 1] + 1.0 for c in candidates])
    weights = weights / weights.sum()
    return candidates[_sample_index(weights, rng)]


def _sample_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    draw = rng.random() * cum[-1]
    return int(np.searchsorted(cum, draw, side="right").clip(0, len(weights) - 1))
