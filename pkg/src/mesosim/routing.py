"""Reactive route choice over periodically refreshed shortest-path trees.

For every destination appearing in demand, the router keeps one
attractiveness weight per link. Every refresh it rebuilds the
shortest-path tree into the destination from current link costs,
encodes tree membership as a 0/1 indicator b, and blends it into the
running weights:

    B = (1 - route_weight) * B_prev + route_weight * b

starting from B equal to the free-flow indicator. Platoons at a node
then sample their outgoing link with probability B / sum(B) over the
node's candidates. The smoothing damps the volatility of instantaneous
costs; route_weight = 1 reduces to pure follow-the-latest-tree routing.
"""

from __future__ import annotations

import random
from collections import defaultdict
from heapq import heappop, heappush

from . import kinematics
from .errors import ConsistencyError, NoCandidate

_CONVEXITY_TOL = 1e-12


class AttractivenessTable:
    """Per-destination, per-link sampling weights plus routing metadata.

    B maps destination name to {link name: weight}. reach maps
    destination name to the set of nodes with a directed path to it
    (used as the fallback filter when a weight row decays to zero).
    tree_computations counts shortest-path builds, including the
    free-flow initialization.
    """

    __slots__ = ("B", "reach", "last_update_step", "tree_computations")

    def __init__(self):
        self.B: dict[str, dict[str, float]] = {}
        self.reach: dict[str, set[str]] = {}
        self.last_update_step = 0
        self.tree_computations = 0


def shortest_costs(links, costs: dict[str, float], z: str) -> dict[str, float]:
    """Cost of the cheapest directed path from every node into z.

    Runs a single-destination search on the reverse graph. Nodes with no
    path to z are absent from the result. links is any iterable with
    name/from_node/to_node fields; costs maps link name to seconds.
    """
    incoming: dict[str, list[tuple[str, float]]] = defaultdict(list)
    for link in links:
        incoming[link.to_node].append((link.from_node, costs[link.name]))
    dist = {z: 0.0}
    heap = [(0.0, z)]
    while heap:
        d, node = heappop(heap)
        if d > dist.get(node, float("inf")):
            continue
        for tail, cost in incoming[node]:
            nd = cost + d
            if nd < dist.get(tail, float("inf")):
                dist[tail] = nd
                heappush(heap, (nd, tail))
    return dist


def shortest_path_indicator(links, costs: dict[str, float], z: str) -> dict[str, int]:
    """0/1 per link: 1 iff the link starts the cheapest route from its tail to z.

    Exactly one outgoing link per reaching node is marked; cost ties
    break on the lexicographically smallest link name. Links whose tail
    cannot reach z stay 0.
    """
    dist = shortest_costs(links, costs, z)
    by_tail: dict[str, list] = defaultdict(list)
    for link in links:
        by_tail[link.from_node].append(link)
    b = {link.name: 0 for link in links}
    for tail, outs in by_tail.items():
        if tail == z or tail not in dist:
            continue
        best = None
        for link in outs:
            d_head = dist.get(link.to_node)
            if d_head is None:
                continue
            key = (costs[link.name] + d_head, link.name)
            if best is None or key < best:
                best = key
        if best is not None:
            b[best[1]] = 1
    return b


def update_attractiveness(
    B_prev: dict[str, float], b: dict[str, int], lam: float
) -> dict[str, float]:
    """Blend the fresh tree indicator into the previous weights.

    Elementwise convex combination (1-lam)*B_prev + lam*b over the union
    of keys; each result must land between the two inputs.
    """
    keys = list(B_prev)
    for key in b:
        if key not in B_prev:
            keys.append(key)
    out = {}
    for key in keys:
        prev = B_prev.get(key, 0.0)
        new = float(b.get(key, 0))
        value = (1.0 - lam) * prev + lam * new
        lo, hi = (prev, new) if prev <= new else (new, prev)
        if value < lo - _CONVEXITY_TOL or value > hi + _CONVEXITY_TOL:
            raise ConsistencyError(
                f"attractiveness update left [{lo}, {hi}]: {value} for {key}"
            )
        out[key] = value
    return out


def choose_outgoing(platoon, node, table: AttractivenessTable, rng: random.Random):
    """Sample the platoon's next link among the node's outgoing links.

    Weights come from the platoon's destination row; when the row sums
    to zero (possible on decayed or unreachable rows) the choice falls
    back to a uniform draw over the outgoing links that can still reach
    the destination by topology alone.
    """
    candidates = node.outgoing
    if not candidates:
        raise NoCandidate(f"node {node.name} has no outgoing links")
    if len(candidates) == 1:
        return candidates[0]
    z = platoon.destination
    row = table.B.get(z)
    if row:
        total = 0.0
        weights = []
        for link in candidates:
            w = row.get(link.name, 0.0)
            weights.append(w)
            total += w
        if total > 0.0:
            r = rng.random() * total
            acc = 0.0
            last_positive = None
            for link, w in zip(candidates, weights):
                if w <= 0.0:
                    continue
                acc += w
                last_positive = link
                if r < acc:
                    return link
            return last_positive
    reach = table.reach.get(z, frozenset())
    fallback = [link for link in candidates if link.spec.to_node in reach]
    if not fallback:
        raise NoCandidate(f"no outgoing link from {node.name} reaches {z}")
    if len(fallback) == 1:
        return fallback[0]
    idx = int(rng.random() * len(fallback))
    if idx >= len(fallback):
        idx = len(fallback) - 1
    return fallback[idx]


def maybe_refresh(world, i: int) -> AttractivenessTable:
    """Rebuild all destination trees when step i falls on the refresh cadence.

    Off-cadence steps are a no-op. On refresh, link costs are measured
    from current mean speeds and every destination row is re-blended.
    """
    table = world.attractiveness
    if i % world.config.route_update_interval != 0:
        return table
    v_min = world.config.v_min
    costs = {
        link.name: kinematics.instantaneous_travel_time(link, v_min)
        for link in world.links
    }
    specs = [link.spec for link in world.links]
    lam = world.config.route_weight
    for z in table.B:
        b = shortest_path_indicator(specs, costs, z)
        table.B[z] = update_attractiveness(table.B[z], b, lam)
        table.tree_computations += 1
    table.last_update_step = i
    return table
