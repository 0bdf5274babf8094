"""Level-controlled gossip over a leveled, sectored sensor field.

Levels are hop counts from the base station; sectors are equiangular wedges
around it.  During a gossip event a node transmits with the probability of
its own level, and only copies arriving from a strictly outer level are
acted on.  Each node forwards an event at most once.

Every trial owns one uniform draw per node (node-id order) from its
``(seed, trial)`` substream and a node transmits iff its draw is below its
level probability.  Using common random numbers this way makes the
per-trial outcome monotone in every level probability.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigTooShort, InputError, NodeAtBaseStation, Unreachable
from .streams import chunked, uniforms


@dataclass(frozen=True)
class Field:
    nodes: dict  # node id -> (x, y) in metres
    base_station: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "nodes", {k: (float(x), float(y)) for k, (x, y) in self.nodes.items()})
        object.__setattr__(self, "base_station", tuple(float(c) for c in self.base_station))

    @property
    def ids(self) -> list:
        return sorted(self.nodes)

    def in_range(self, a, b) -> bool:
        return math.dist(a, b) <= self.radius

    def neighbors(self) -> dict:
        ids = self.ids
        adj = {v: [] for v in ids}
        for i, u in enumerate(ids):
            for v in ids[i + 1:]:
                if self.in_range(self.nodes[u], self.nodes[v]):
                    adj[u].append(v)
                    adj[v].append(u)
        return adj


@dataclass
class Leveling:
    level: dict
    unreachable: frozenset = frozenset()

    @property
    def max_level(self) -> int:
        return max(self.level.values(), default=0)


@dataclass
class Sectoring:
    sectors: int
    sector: dict


@dataclass(frozen=True)
class GossipConfig:
    """Per-level transmit probabilities ``P_1, P_2, ...`` (level 1 first).

    Outer levels must transmit strictly less often than inner ones; pass
    ``strict=False`` to study configurations outside that rule.
    """

    probabilities: tuple
    strict: bool = True

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if not probs:
            raise InputError("at least one level probability is required")
        if any(not 0 <= p <= 1 for p in probs):
            raise InputError("level probabilities must lie in [0, 1]")
        if self.strict and any(a <= b for a, b in zip(probs, probs[1:])):
            raise InputError(f"level probabilities must be strictly decreasing outward, got {probs}")
        object.__setattr__(self, "probabilities", probs)

    def at(self, level: int) -> float:
        if level > len(self.probabilities):
            raise ConfigTooShort(f"no probability configured for level {level}")
        return self.probabilities[level - 1]


@dataclass
class SimReport:
    delivery: float
    mean_transmissions: float
    trials: int
    seed: int
    traces: list = field(default_factory=list)


def assign_levels(field: Field) -> Leveling:
    adj = field.neighbors()
    level = {}
    queue = deque()
    for v in field.ids:
        if field.in_range(field.nodes[v], field.base_station):
            level[v] = 1
            queue.append(v)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    return Leveling(level, frozenset(v for v in field.ids if v not in level))


def sector_of(point, base_station, K: int) -> int:
    dx, dy = point[0] - base_station[0], point[1] - base_station[1]
    if dx == 0 and dy == 0:
        raise NodeAtBaseStation("angle undefined for a node at the base station")
    angle = math.degrees(math.atan2(dy, dx))
    if angle < 0:
        angle += 360.0
    if angle >= 360.0:
        angle = 0.0
    return min(int(angle // (360.0 / K)), K - 1)


def assign_sectors(field: Field, K: int) -> Sectoring:
    if int(K) != K or K < 1:
        raise InputError(f"sector count must be a positive integer, got {K!r}")
    return Sectoring(K, {v: sector_of(field.nodes[v], field.base_station, K) for v in field.ids})


def locate(node, leveling: Leveling, sectoring: Sectoring) -> tuple[int, int]:
    if node not in leveling.level:
        raise Unreachable(f"node {node!r} has no level")
    return leveling.level[node], sectoring.sector[node]


def analytic_line_delivery(config: GossipConfig, origin_level: int) -> float:
    if origin_level < 1:
        raise InputError("origin level must be >= 1")
    if origin_level > len(config.probabilities):
        raise ConfigTooShort(f"no probability configured for level {origin_level}")
    return math.prod(config.probabilities[:origin_level])


def _plan(field: Field, leveling: Leveling, config: GossipConfig, origin):
    if origin not in field.nodes:
        raise InputError(f"unknown origin {origin!r}")
    if origin not in leveling.level:
        raise Unreachable(f"origin {origin!r} cannot reach the base station")
    if leveling.max_level > len(config.probabilities):
        raise ConfigTooShort(
            f"field has {leveling.max_level} levels, config covers {len(config.probabilities)}"
        )
    ids = field.ids
    col = {v: i for i, v in enumerate(ids)}
    adj = field.neighbors()
    origin_level = leveling.level[origin]
    # only nodes strictly inside the origin's level can ever receive an accepted copy
    active = sorted(
        (v for v in ids if v in leveling.level and leveling.level[v] < origin_level),
        key=lambda v: (-leveling.level[v], col[v]),
    )
    senders = {
        v: [u for u in adj[v] if u in leveling.level and leveling.level[u] > leveling.level[v]]
        for v in active
    }
    threshold = np.array([config.at(leveling.level[v]) if v in leveling.level else 0.0 for v in ids])
    return ids, col, active, senders, threshold


def gossip_trials(field: Field, leveling: Leveling, config: GossipConfig, origin, trials: int, seed: int):
    """Per-trial outcomes: ``(delivered, transmitted)`` boolean arrays.

    ``transmitted`` has one column per node in sorted id order.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    ids, col, active, senders, threshold = _plan(field, leveling, config, origin)
    delivered = np.zeros(trials, dtype=bool)
    transmitted = np.zeros((trials, len(ids)), dtype=bool)
    for idx in chunked(trials):
        coin = uniforms(seed, idx, len(ids)) < threshold
        sent = np.zeros_like(coin)
        sent[:, col[origin]] = coin[:, col[origin]]
        # outer levels are settled before inner ones read them
        for v in active:
            heard = np.zeros(len(idx), dtype=bool)
            for u in senders[v]:
                heard |= sent[:, col[u]]
            sent[:, col[v]] = heard & coin[:, col[v]]
        level_one = [col[v] for v in ids if leveling.level.get(v) == 1]
        delivered[idx] = sent[:, level_one].any(axis=1) if level_one else False
        transmitted[idx] = sent
    return delivered, transmitted


def trial_trace(field: Field, leveling: Leveling, transmitted_row, origin) -> list[tuple]:
    """Forwarding hops of one trial as ``(sender, sender level, trigger, trigger level)``.

    ``trigger`` is the outer neighbour whose copy was accepted (smallest id
    among several); it is ``None`` for the originating transmission.
    """
    ids = field.ids
    sent = {v for v, flag in zip(ids, transmitted_row) if flag}
    adj = field.neighbors()
    hops = []
    for v in sorted(sent, key=lambda v: (-leveling.level[v], v)):
        if v == origin:
            hops.append((v, leveling.level[v], None, None))
            continue
        triggers = sorted(u for u in adj[v] if u in sent and leveling.level[u] > leveling.level[v])
        trigger = triggers[0] if triggers else None
        hops.append((v, leveling.level[v], trigger, leveling.level.get(trigger)))
    return hops


def format_trace(traces) -> str:
    """Line-oriented trace dump: ``trial sender level trigger trigger_level``."""
    lines = []
    for trial, hops in traces:
        for sender, level, trigger, trigger_level in hops:
            t = "-" if trigger is None else trigger
            tl = "-" if trigger_level is None else trigger_level
            lines.append(f"{trial}\t{sender}\t{level}\t{t}\t{tl}")
    return "\n".join(lines) + ("\n" if lines else "")


def simulate_gossip(
    field: Field,
    leveling: Leveling,
    config: GossipConfig,
    origin,
    trials: int,
    seed: int,
    keep_traces: int = 0,
) -> SimReport:
    """Delivery probability and mean transmissions per event.

    ``keep_traces`` retains the forwarding trace of the first that many
    trials for inspection.
    """
    delivered, transmitted = gossip_trials(field, leveling, config, origin, trials, seed)
    traces = [
        (t, trial_trace(field, leveling, transmitted[t], origin))
        for t in range(min(keep_traces, trials))
    ]
    return SimReport(
        delivery=float(delivered.mean()),
        mean_transmissions=float(transmitted.sum(axis=1).mean()),
        trials=trials,
        seed=seed,
        traces=traces,
    )
