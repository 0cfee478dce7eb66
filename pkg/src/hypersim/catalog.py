"""Strategy catalog: kill-chain stages, per-strategy attributes, subgame sets.

Strategy ids are 1-based (AS1..AS8, DS1..DS8) everywhere in the public API;
internal arrays index them at ``id - 1``.
"""

from __future__ import annotations

from enum import IntEnum


class Stage(IntEnum):
    """Kill-chain stage; the integer value doubles as the subgame index."""

    R = 1    # reconnaissance
    D = 2    # delivery
    E = 3    # exploitation
    C2 = 4   # command and control
    M = 5    # lateral movement
    DE = 6   # data exfiltration


FULL_GAME = 0
N_STRATEGIES = 8

# Attack cost per AS1..AS8 (integer effort, 1=low .. 3=high).
ATTACK_COST = (1, 3, 3, 3, 1, 3, 2, 3)

# Defense cost per DS1..DS8.
DEFENSE_COST = (1, 2, 3, 3, 3, 1, 2, 2)

# Deception strategies: their cost feeds the attacker's uncertainty growth.
DECEPTION_DEFENSES = frozenset({5, 6, 7, 8})

# Key-exploiting attacks that fake keys (DS7) can nullify.
KEY_ATTACKS = frozenset({2, 6, 7, 8})

# Vulnerability classes exploited per attack strategy, keyed by attack id.
SV, EV, UV = "sv", "ev", "uv"
EXPLOITED_CLASSES = {
    1: (UV,),
    2: (SV, EV),
    3: (SV,),
    4: (SV, UV),
    5: (UV,),
    6: (EV,),
    7: (EV,),
    8: (SV, EV),
}

# Subgame catalog: (attack set, defense set) per subgame index 0..6.
# Index 0 is the full game; 1..6 follow the kill-chain stages.
_SUBGAMES: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    FULL_GAME: ((1, 2, 3, 4, 5, 6, 7, 8), (1, 2, 3, 4, 5, 6, 7, 8)),
    Stage.R: ((1,), (1, 8)),
    Stage.D: ((1, 2), (1, 2)),
    Stage.E: ((1, 2, 3, 4, 5, 7), (3, 4, 5, 7)),
    Stage.C2: ((1, 2, 3, 4, 5, 6, 7), (3, 4, 5, 6, 7, 8)),
    Stage.M: ((1, 2, 3, 4, 5, 6, 7), (3, 4, 5, 6, 7, 8)),
    Stage.DE: ((1, 2, 3, 4, 5, 6, 7, 8), (3, 4, 5, 6, 7, 8)),
}


def subgame_strategies(subgame: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return (attack strategy ids, defense strategy ids) for a subgame."""
    try:
        return _SUBGAMES[int(subgame)]
    except KeyError:
        raise ValueError(f"unknown subgame {subgame!r}") from None


def defense_set(subgame: int, dd_enabled: bool) -> tuple[int, ...]:
    """Defense strategies the defender may actually play in a subgame.

    Without defensive deception the DS5-DS8 strategies are off the table.
    """
    ds = subgame_strategies(subgame)[1]
    if dd_enabled:
        return ds
    return tuple(q for q in ds if q not in DECEPTION_DEFENSES)
