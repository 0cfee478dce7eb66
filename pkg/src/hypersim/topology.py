"""Network generation and mutation: node profiles, random graph wiring,
honeypot lures, mobility rewiring, eviction reconnection, edge hiding, and
the vulnerability arithmetic every other module leans on.

Vulnerability scores follow the CVSS convention: every entry lives in
[0, 10]. A node carries 5 software entries (sv), 5 encryption entries (ev)
whose effective value decays with the time since the last rekey, and one
unknown-vulnerability entry (uv), 11 entries total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _accel

VULN_MAX = 10.0


class NodeKind(IntEnum):
    WEB_SERVER = 0
    DATABASE = 1
    IOT = 2
    HONEYPOT_LH = 3
    HONEYPOT_HH = 4


HONEYPOT_KINDS = (NodeKind.HONEYPOT_LH, NodeKind.HONEYPOT_HH)

# Deployment-phase attribute ranges per node kind:
# (importance lo/hi, software vuln lo/hi, encryption vuln lo/hi, unknown lo/hi)
# Honeypots advertise exploitable software and weak keys as their lure; an
# unknown vulnerability cannot be advertised, so their uv is ordinary.
KIND_RANGES = {
    NodeKind.WEB_SERVER: ((8, 10), (3, 7), (1, 3), (4, 8)),
    NodeKind.DATABASE: ((8, 10), (3, 7), (1, 3), (4, 8)),
    NodeKind.IOT: ((1, 5), (1, 5), (5, 10), (4, 8)),
    NodeKind.HONEYPOT_LH: ((0, 0), (7, 10), (9, 10), (3, 7)),
    NodeKind.HONEYPOT_HH: ((0, 0), (7, 10), (9, 10), (3, 7)),
}

N_SV = 5
N_EV = 5


@dataclass
class NodeProfile:
    """Per-node record: role, compromise state, and vulnerability vectors."""

    id: int
    kind: NodeKind
    importance: int
    reachability: float = 0.0
    sv: np.ndarray = field(default_factory=lambda: np.zeros(N_SV))
    ev: np.ndarray = field(default_factory=lambda: np.zeros(N_EV))
    uv: float = 0.0
    compromised: bool = False
    evicted: bool = False
    rewire_prob: float = 0.0
    t_rekey: int = 1
    honeypot_active: bool = False

    @property
    def is_honeypot(self) -> bool:
        return self.kind in HONEYPOT_KINDS


@dataclass
class NetworkConfig:
    """Node counts and wiring parameters for network generation."""

    n_ws: int = 25
    n_db: int = 25
    n_iot: int = 450
    n_lh: int = 50
    n_hh: int = 25
    p_r: float = 0.05
    # Optional override of the software-vulnerability upper bound: when set,
    # legitimate nodes draw sv entries uniformly from [1, vuln_upper].
    vuln_upper: int | None = None

    @property
    def n_legit(self) -> int:
        return self.n_ws + self.n_db + self.n_iot

    @property
    def n_honeypots(self) -> int:
        return self.n_lh + self.n_hh


class Network:
    """Mutable network state.

    Legitimate nodes share an undirected adjacency. Honeypots only receive
    directed in-edges from legitimate nodes (the lure wiring) and keep
    directed out-edges exclusively to other honeypots, so an attacker routed
    into the honeynet can never walk back out to a real node.
    """

    def __init__(self, nodes: list[NodeProfile], mean_degree_target: float):
        self.nodes = nodes
        self.adj: list[set[int]] = [set() for _ in nodes]
        self.honeypot_in: list[set[int]] = [set() for _ in nodes]  # victim -> honeypots
        self.honeypot_out: list[set[int]] = [set() for _ in nodes]
        self.hidden: set[tuple[int, int]] = set()
        self.mean_degree_target = mean_degree_target
        self.honeypots_active = False
        # Share of each node's vulnerability exposed through the perimeter;
        # firewall tightening (DS1) shrinks it, throttling outside attackers.
        self.perimeter_exposure = 1.0
        for h in self.honeypot_ids():
            self.honeypot_out[h] = {o for o in self.honeypot_ids() if o != h}

    # -- structure queries ------------------------------------------------

    def legit_ids(self) -> list[int]:
        return [n.id for n in self.nodes if not n.is_honeypot]

    def honeypot_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.is_honeypot]

    def active_legit_ids(self) -> list[int]:
        return [n.id for n in self.nodes if not n.is_honeypot and not n.evicted]

    def neighbors(self, i: int) -> set[int]:
        return self.adj[i]

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return sorted(
            (i, j) for i in range(len(self.nodes)) for j in self.adj[i] if i < j
        )

    # -- mutation ---------------------------------------------------------

    def add_edge(self, i: int, j: int) -> None:
        if i == j:
            raise ValueError("self loops are not allowed")
        self.adj[i].add(j)
        self.adj[j].add(i)

    def remove_edge(self, i: int, j: int) -> None:
        self.adj[i].discard(j)
        self.adj[j].discard(i)
        self.hidden.discard((min(i, j), max(i, j)))

    def evict(self, i: int) -> None:
        """Remove a node from service: clears every incident edge."""
        node = self.nodes[i]
        node.evicted = True
        for j in sorted(self.adj[i]):
            self.remove_edge(i, j)
        self.honeypot_in[i] = set()


def criticality(node: NodeProfile) -> float:
    """Security criticality in [0, 1]: importance times reachability, scaled
    down by the maximum importance score so downstream impact terms stay
    normalized."""
    return node.importance * node.reachability / 10.0


def effective_encryption_vul(ev_score: float, t_rekey: int) -> float:
    """Encryption vulnerability actually exploitable after ``t_rekey`` rounds
    without a rekey; longer-lived keys expose more of the raw score."""
    if t_rekey < 1:
        raise ValueError(f"t_rekey must be >= 1, got {t_rekey}")
    return ev_score * math.exp(-1.0 / t_rekey)


def overall_vulnerability(node: NodeProfile) -> tuple[float, float]:
    """Mean over all 11 vulnerability entries (effective ev values) and its
    normalized form used as a compromise probability."""
    decay = math.exp(-1.0 / node.t_rekey)
    total = float(node.sv.sum()) + float(node.ev.sum()) * decay + node.uv
    vulnerability = total / (N_SV + N_EV + 1)
    return vulnerability, vulnerability / VULN_MAX


def class_p_v(node: NodeProfile, classes: tuple[str, ...]) -> float:
    """Compromise probability restricted to the exploited vulnerability
    classes (union of entries, averaged, normalized)."""
    entries: list[float] = []
    for cls in classes:
        if cls == "sv":
            entries.extend(float(x) for x in node.sv)
        elif cls == "ev":
            decay = math.exp(-1.0 / node.t_rekey)
            entries.extend(float(x) * decay for x in node.ev)
        elif cls == "uv":
            entries.append(node.uv)
        else:
            raise ValueError(f"unknown vulnerability class {cls!r}")
    if not entries:
        return 0.0
    return sum(entries) / len(entries) / VULN_MAX


def _sample_entries(rng: np.random.Generator, lo: int, hi: int, n: int) -> np.ndarray:
    return rng.integers(lo, hi + 1, size=n).astype(np.float64)


def generate_network(cfg: NetworkConfig, rng: np.random.Generator) -> Network:
    """Build the deployment-phase network.

    Legitimate node pairs are connected independently with probability
    ``cfg.p_r``; honeypots start deactivated with no lure wiring.
    """
    if not 0.0 < cfg.p_r <= 1.0:
        raise ValueError(f"connection probability must be in (0, 1], got {cfg.p_r}")
    if cfg.n_legit <= 0:
        raise ValueError("need at least one legitimate node")

    kinds = (
        [NodeKind.WEB_SERVER] * cfg.n_ws
        + [NodeKind.DATABASE] * cfg.n_db
        + [NodeKind.IOT] * cfg.n_iot
        + [NodeKind.HONEYPOT_LH] * cfg.n_lh
        + [NodeKind.HONEYPOT_HH] * cfg.n_hh
    )
    nodes = []
    for i, kind in enumerate(kinds):
        (imp_lo, imp_hi), sv_rng, ev_rng, uv_rng = KIND_RANGES[kind]
        if cfg.vuln_upper is not None and kind not in HONEYPOT_KINDS:
            sv_rng = (1, int(cfg.vuln_upper))
        node = NodeProfile(
            id=i,
            kind=kind,
            importance=int(rng.integers(imp_lo, imp_hi + 1)),
            sv=_sample_entries(rng, *sv_rng, N_SV),
            ev=_sample_entries(rng, *ev_rng, N_EV),
            uv=float(rng.integers(uv_rng[0], uv_rng[1] + 1)),
            rewire_prob=cfg.p_r,
        )
        nodes.append(node)

    net = Network(nodes, mean_degree_target=(cfg.n_legit - 1) * cfg.p_r)

    # Erdos-Renyi wiring over legitimate nodes only.
    legit = net.legit_ids()
    n = len(legit)
    draws = rng.random((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            if draws[a, b] < cfg.p_r:
                net.add_edge(legit[a], legit[b])

    compute_reachability(net)
    return net


def compute_reachability(net: Network) -> np.ndarray:
    """Betweenness centrality over the live legitimate topology, scaled into
    [0, 1] by the maximum score; honeypots and evicted nodes score 0.

    Returns the per-node reachability array and writes it onto the profiles.
    """
    alive = net.active_legit_ids()
    n = len(alive)
    pos = {node_id: k for k, node_id in enumerate(alive)}

    counts = np.zeros(n, dtype=np.int64)
    for node_id in alive:
        counts[pos[node_id]] = len(net.adj[node_id])
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.zeros(int(indptr[-1]), dtype=np.int64)
    cursor = indptr[:-1].copy()
    for node_id in alive:
        k = pos[node_id]
        for j in sorted(net.adj[node_id]):
            indices[cursor[k]] = pos[j]
            cursor[k] += 1

    raw = _accel.betweenness(indptr, indices, n)
    top = raw.max() if n else 0.0
    scaled = raw / top if top > 0 else np.zeros(n)

    out = np.zeros(len(net.nodes))
    for node in net.nodes:
        if node.is_honeypot or node.evicted:
            node.reachability = 0.0
        else:
            node.reachability = float(scaled[pos[node.id]])
        out[node.id] = node.reachability
    return out


def rewire_and_reconnect(net: Network, rng: np.random.Generator) -> None:
    """One mobility pass plus the post-eviction reconnection pass.

    Each live IoT node rewires one link with its own probability, keeping its
    degree; isolated, non-compromised legitimate nodes then redraw their
    random-graph row until they are back at the mean-degree target.
    """
    alive = net.active_legit_ids()
    alive_set = set(alive)

    for i in alive:
        node = net.nodes[i]
        if node.kind is not NodeKind.IOT or not net.adj[i]:
            continue
        if rng.random() >= node.rewire_prob:
            continue
        neighbors = sorted(net.adj[i])
        candidates = sorted(alive_set - net.adj[i] - {i})
        if not candidates:
            continue
        drop = neighbors[int(rng.integers(len(neighbors)))]
        gain = candidates[int(rng.integers(len(candidates)))]
        net.remove_edge(i, drop)
        net.add_edge(i, gain)

    target = max(1, round(net.mean_degree_target))
    for i in alive:
        node = net.nodes[i]
        if net.adj[i] or node.compromised:
            continue
        for j in alive:
            if j == i or j in net.adj[i]:
                continue
            if rng.random() < node.rewire_prob:
                net.add_edge(i, j)
                if net.degree(i) >= target:
                    break


def _vulnerability_ranking(net: Network) -> list[int]:
    """Live legitimate node ids, most vulnerable first, id-ascending on ties."""
    scored = [
        (-overall_vulnerability(net.nodes[i])[0], i) for i in net.active_legit_ids()
    ]
    return [i for _, i in sorted(scored)]


def activate_honeypots(net: Network) -> None:
    """Wire the honeypot lures and switch the honeypots on.

    The most vulnerable tier (three victims per high-interaction honeypot)
    gains a directed edge into the HH pool; the next tier feeds the LH pool.
    Idempotent once active.
    """
    if net.honeypots_active:
        return
    hh = [i for i in net.honeypot_ids() if net.nodes[i].kind is NodeKind.HONEYPOT_HH]
    lh = [i for i in net.honeypot_ids() if net.nodes[i].kind is NodeKind.HONEYPOT_LH]
    if not hh and not lh:
        return

    ranked = _vulnerability_ranking(net)
    n_hh_victims = math.ceil(3 * len(hh))
    n_lh_victims = math.ceil(3 * len(lh))
    hh_victims = ranked[:n_hh_victims]
    lh_victims = ranked[n_hh_victims : n_hh_victims + n_lh_victims]

    for k, victim in enumerate(hh_victims):
        net.honeypot_in[victim].add(hh[k % len(hh)])
    for k, victim in enumerate(lh_victims):
        net.honeypot_in[victim].add(lh[k % len(lh)])

    for i in net.honeypot_ids():
        net.nodes[i].honeypot_active = True
    net.honeypots_active = True


def hide_edges(net: Network, c_nt: float) -> None:
    """Hide a percentage of edges from the attacker's view.

    Walking nodes by descending criticality, each node conceals the edge to
    its most critical neighbor, repeating until the budget
    ``floor(c_nt/100 * |edges|)`` is met or no candidates remain. Hidden
    edges stay functional for the defender.
    """
    if not 0.0 <= c_nt <= 100.0:
        raise ValueError(f"c_nt must be a percentage in [0, 100], got {c_nt}")
    net.hidden = set()
    budget = int(c_nt / 100.0 * net.edge_count())
    if budget <= 0:
        return

    by_crit = sorted(
        net.active_legit_ids(), key=lambda i: (-criticality(net.nodes[i]), i)
    )
    while len(net.hidden) < budget:
        hidden_before = len(net.hidden)
        for i in by_crit:
            choices = [
                (-criticality(net.nodes[j]), j)
                for j in net.adj[i]
                if (min(i, j), max(i, j)) not in net.hidden
            ]
            if not choices:
                continue
            _, j = min(choices)
            net.hidden.add((min(i, j), max(i, j)))
            if len(net.hidden) >= budget:
                break
        if len(net.hidden) == hidden_before:
            break
