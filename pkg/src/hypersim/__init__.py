"""Seeded Monte Carlo simulation of a repeated attacker-defender hypergame
with defensive deception over a generated network."""

from .catalog import (
    ATTACK_COST,
    DECEPTION_DEFENSES,
    DEFENSE_COST,
    Stage,
    subgame_strategies,
)
from .engine import (
    MonteCarloResult,
    RoundRecord,
    RunSummary,
    SchemeConfig,
    SCHEMES,
    check_system_failure,
    monte_carlo,
    run,
)
from .topology import Network, NetworkConfig, NodeProfile, generate_network

__version__ = "0.1.0"

__all__ = [
    "ATTACK_COST",
    "DECEPTION_DEFENSES",
    "DEFENSE_COST",
    "MonteCarloResult",
    "Network",
    "NetworkConfig",
    "NodeProfile",
    "RoundRecord",
    "RunSummary",
    "SCHEMES",
    "SchemeConfig",
    "Stage",
    "check_system_failure",
    "generate_network",
    "monte_carlo",
    "run",
    "subgame_strategies",
    "__version__",
]
