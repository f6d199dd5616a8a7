"""Inter-link platoon transfers at nodes.

A node moves platoons between the links that meet there. Per step it
draws a processing order over the competing incoming links by repeated
weighted sampling on their merge priorities, then gives each link one
transfer attempt: the head platoon standing at the link end may hop to
its chosen outgoing link if that link has strictly more entrance room
than one platoon's jam footprint. Blocked attempts are normal outcomes;
the platoon simply waits.

Origin queues take part in the same competition as a virtual incoming
link with the default merge priority, so demand entering the network
obeys the same space rule as circulating traffic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import routing
from .kinematics import LinkState, Platoon
from .scenario import DEFAULT_MERGE_PRIORITY, NodeSpec

# weight of an origin waiting queue when competing with incoming links
ORIGIN_QUEUE_PRIORITY = DEFAULT_MERGE_PRIORITY


@dataclass(frozen=True)
class TransferEvent:
    """One platoon hop between two links, logged for analysis."""

    t: float
    platoon_id: int
    from_link: str
    to_link: str


def vacant_space(link: LinkState) -> float:
    """Entrance room on a link: the rearmost platoon's position, meters.

    An empty link offers its whole length. A platoon may enter only if
    this exceeds the link's per-platoon jam footprint, strictly.
    """
    platoons = link.platoons
    if not platoons:
        return link.length
    return platoons[-1].x


def select_incoming_order(incoming, alphas, rng: random.Random) -> list:
    """Random processing order over incoming links, priority-weighted.

    Draws repeatedly without replacement with probability
    alpha_l / sum(alpha of the not-yet-drawn links), so higher-priority
    links tend to go first but every link is eventually selected.
    """
    remaining = list(zip(incoming, alphas))
    order = []
    while len(remaining) > 1:
        total = 0.0
        for _, w in remaining:
            total += w
        r = rng.random() * total
        acc = 0.0
        chosen = len(remaining) - 1
        for k, (_, w) in enumerate(remaining):
            acc += w
            if r < acc:
                chosen = k
                break
        order.append(remaining.pop(chosen)[0])
    if remaining:
        order.append(remaining[0][0])
    return order


def signal_permits(node: NodeSpec, t: float, link) -> bool:
    """Whether the node's signal lets the given incoming link discharge at t.

    Unsignalized nodes always permit. Otherwise the active phase is the
    one covering ((t + offset) mod cycle) in the cyclic phase sequence.
    """
    plan = node.signal
    if plan is None:
        return True
    name = getattr(link, "name", link)
    phase_t = (t + plan.offset) % plan.cycle
    acc = 0.0
    for duration, permitted in plan.phases:
        acc += duration
        if phase_t < acc:
            return name in permitted
    # phase_t == cycle can only arise from float roundoff; wraps to phase 0
    return name in plan.phases[0][1]


def process_node(node, world, t: float, rng: random.Random) -> list[TransferEvent]:
    """Run one step of transfers at a node; returns the logged events.

    Competitors are the signal-permitted incoming links whose head stands
    at the link end, plus the node's origin queue when platoons wait
    there. Each gets one attempt in the sampled order. A transfer moves
    the platoon to the start of its cached outgoing-link choice (sampled
    on first need, kept until the node is crossed) provided the receiver
    has strictly more entrance room than its jam footprint.
    """
    events: list[TransferEvent] = []
    candidates = []
    weights = []
    for link in node.incoming:
        platoons = link.platoons
        if not platoons:
            continue
        head = platoons[0]
        if head.x < link.length or head.destination == node.name:
            continue
        if not signal_permits(node.spec, t, link.name):
            continue
        candidates.append(link)
        weights.append(link.spec.merge_priority)
    queue = world.waiting.get(node.name)
    if queue:
        candidates.append(None)
        weights.append(ORIGIN_QUEUE_PRIORITY)
    if not candidates:
        return events
    if len(candidates) == 1:
        order = candidates
    else:
        order = select_incoming_order(candidates, weights, rng)

    for source in order:
        platoon: Platoon = queue[0] if source is None else source.platoons[0]
        target = platoon.next_choice
        if target is None:
            target = routing.choose_outgoing(platoon, node, world.attractiveness, rng)
            platoon.next_choice = target
        if vacant_space(target) > target.spacing:
            if source is None:
                queue.popleft()
                platoon.state = "running"
                platoon.insert_t = t
                world.running_count += 1
            else:
                source.platoons.popleft()
                source.exited_count += 1
                events.append(TransferEvent(t, platoon.id, source.name, target.name))
            target.platoons.append(platoon)
            target.entered_count += 1
            platoon.link = target
            platoon.x = 0.0
            platoon.v = target.u
            platoon.next_choice = None
    return events


def finalize_arrival(platoon: Platoon, t: float) -> Platoon:
    """Absorb a platoon standing at the end of a link at its destination.

    The destination accepts unconditionally (no space check). Platoons
    not yet at the link end are returned unchanged.
    """
    link = platoon.link
    if link is None or platoon.x < link.length:
        return platoon
    assert link.platoons[0] is platoon
    link.platoons.popleft()
    link.exited_count += 1
    platoon.link = None
    platoon.state = "arrived"
    platoon.arrival_t = t
    platoon.v = 0.0
    return platoon
