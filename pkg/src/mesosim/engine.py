"""Fixed-step simulation loop: clock, demand generation, and phase order.

Each step runs five phases in a fixed sequence:

1. route refresh (on cadence),
2. node phase: arrivals finalized, then transfers, in node list order,
3. link phase: every link's platoons advance one step,
4. demand generation into origin waiting queues,
5. logging: one record per link and one trajectory point per running
   platoon, stamped with the step's end time.

All randomness flows through one seeded generator consumed in this
deterministic order, so a scenario plus a seed fixes every output bit.
Within a step, the node phase reads positions produced by the previous
link phase; a platoon created in phase 4 is first considered for
insertion in the next step's node phase.
"""

from __future__ import annotations

import random
from collections import deque

from . import node_transfer, routing
from .errors import ConsistencyError
from .kinematics import LinkState, Platoon, update_link
from .routing import AttractivenessTable, shortest_path_indicator
from .scenario import DemandSpec, LinkSpec, NodeSpec, SimConfig

_ACC_TOL = 1e-9


class NodeRuntime:
    """A node plus its resolved incoming/outgoing link states."""

    __slots__ = ("spec", "name", "incoming", "outgoing")

    def __init__(self, spec: NodeSpec):
        self.spec = spec
        self.name = spec.name
        self.incoming: list[LinkState] = []
        self.outgoing: list[LinkState] = []

    def __repr__(self):
        return f"NodeRuntime({self.name}, in={len(self.incoming)}, out={len(self.outgoing)})"


class RunLog:
    """Append-only record of everything the analyzer needs.

    link_records holds one (t, link, platoon_count, mean_speed,
    entered_cum, exited_cum) tuple per link per step, stamped with the
    step end time; counts are in platoon units. trajectories maps
    platoon id to its (t, link, x, v) point list.
    """

    __slots__ = (
        "dt",
        "platoon_size",
        "duration",
        "link_meta",
        "link_records",
        "transfer_events",
        "trajectories",
        "sealed",
    )

    def __init__(self, dt: float, platoon_size: int, duration: float, link_meta):
        self.dt = dt
        self.platoon_size = platoon_size
        self.duration = duration
        self.link_meta: dict[str, LinkSpec] = link_meta
        self.link_records: list[tuple[float, str, int, float, int, int]] = []
        self.transfer_events: list[node_transfer.TransferEvent] = []
        self.trajectories: dict[int, list] = {}
        self.sealed = False


def _nodes_reaching(links, z: str) -> set[str]:
    """Set of nodes with a directed path to z (z included)."""
    incoming: dict[str, list[str]] = {}
    for link in links:
        incoming.setdefault(link.to_node, []).append(link.from_node)
    seen = {z}
    frontier = [z]
    while frontier:
        here = frontier.pop()
        for tail in incoming.get(here, ()):
            if tail not in seen:
                seen.add(tail)
                frontier.append(tail)
    return seen


class World:
    """Complete mutable simulation state, assembled from a validated scenario."""

    def __init__(
        self,
        config: SimConfig,
        nodes: list[NodeSpec],
        links: list[LinkSpec],
        demands: list[DemandSpec],
        duration: float,
    ):
        self.config = config
        self.duration = duration
        dt = config.time_step
        self.total_steps = int(round(duration / dt))
        self.node_specs = list(nodes)
        self.demands = list(demands)

        self.links = [LinkState(spec, config.platoon_size) for spec in links]
        self.links_by_name = {link.name: link for link in self.links}
        runtimes = {spec.name: NodeRuntime(spec) for spec in nodes}
        for link in self.links:
            runtimes[link.spec.from_node].outgoing.append(link)
            runtimes[link.spec.to_node].incoming.append(link)
        self.node_runtimes = [runtimes[spec.name] for spec in nodes]
        self.nodes_by_name = runtimes

        self.waiting: dict[str, deque[Platoon]] = {}
        for demand in demands:
            self.waiting.setdefault(demand.origin, deque())
        self.accumulators = [0.0] * len(demands)
        self.platoons: list[Platoon] = []

        self.generated_platoons = 0
        self.arrived_platoons = 0
        self.stranded_platoons = 0
        self.running_count = 0

        self.rng = random.Random(config.seed)
        self.clock = 0
        self.log = RunLog(
            dt, config.platoon_size, duration, {link.name: link.spec for link in self.links}
        )

        specs = [link.spec for link in self.links]
        free_costs = {link.name: link.length / link.u for link in self.links}
        table = AttractivenessTable()
        for demand in demands:
            z = demand.destination
            if z in table.B:
                continue
            table.reach[z] = _nodes_reaching(specs, z)
            b0 = shortest_path_indicator(specs, free_costs, z)
            table.B[z] = {name: float(v) for name, v in b0.items()}
            table.tree_computations += 1
        self.attractiveness = table

    def counts(self) -> dict[str, int]:
        """Platoon totals by state, for conservation checks and stats."""
        waiting = sum(len(q) for q in self.waiting.values())
        return {
            "generated": self.generated_platoons,
            "waiting": waiting,
            "running": self.running_count,
            "arrived": self.arrived_platoons,
            "stranded": self.stranded_platoons,
        }


def generate_demand(world: World, t: float) -> list[Platoon]:
    """Accumulate active demand bands and emit whole platoons.

    Each band gains flow*dt vehicles per active step; every time an
    accumulator reaches one platoon's worth, a waiting platoon is
    created at the band's origin with depart_t = t. Fractions carry
    over, so a band's total vehicle count is met exactly when it is a
    platoon multiple.
    """
    created: list[Platoon] = []
    cfg = world.config
    dt = cfg.time_step
    dn = cfg.platoon_size
    accumulators = world.accumulators
    for idx, demand in enumerate(world.demands):
        if t < demand.t_start or t >= demand.t_end or demand.flow <= 0.0:
            continue
        acc = accumulators[idx] + demand.flow * dt
        while acc >= dn - _ACC_TOL:
            acc -= dn
            platoon = Platoon(len(world.platoons), demand.origin, demand.destination, t)
            world.platoons.append(platoon)
            world.waiting[demand.origin].append(platoon)
            world.log.trajectories[platoon.id] = platoon.trajectory
            world.generated_platoons += 1
            created.append(platoon)
        accumulators[idx] = acc
    return created


def step(world: World) -> World:
    """Advance the simulation by one time step (five phases, fixed order)."""
    i = world.clock
    if i >= world.total_steps:
        raise ConsistencyError("step called past the simulation horizon")
    dt = world.config.time_step
    t = i * dt

    routing.maybe_refresh(world, i)

    rng = world.rng
    events = world.log.transfer_events
    for node in world.node_runtimes:
        for link in node.incoming:
            platoons = link.platoons
            if platoons:
                head = platoons[0]
                if head.x >= link.length and head.destination == node.name:
                    node_transfer.finalize_arrival(head, t)
                    world.arrived_platoons += 1
                    world.running_count -= 1
        new_events = node_transfer.process_node(node, world, t, rng)
        if new_events:
            events.extend(new_events)

    for link in world.links:
        update_link(link, dt)

    generate_demand(world, t)

    t_next = (i + 1) * dt
    records = world.log.link_records
    for link in world.links:
        platoons = link.platoons
        count = len(platoons)
        entered = link.entered_count
        exited = link.exited_count
        if entered < exited or entered - exited != count:
            raise ConsistencyError(
                f"link {link.name}: entered {entered} / exited {exited} "
                f"inconsistent with {count} platoons on link"
            )
        records.append((t_next, link.name, count, link.mean_speed, entered, exited))
        for platoon in platoons:
            platoon.trajectory.append((t_next, link.name, platoon.x, platoon.v))

    counts = world.counts()
    if counts["generated"] != counts["waiting"] + counts["running"] + counts["arrived"]:
        raise ConsistencyError(f"platoon conservation violated: {counts}")

    world.clock = i + 1
    return world


def run(world: World) -> World:
    """Step to the horizon, mark unfinished platoons stranded, seal the log."""
    while world.clock < world.total_steps:
        step(world)
    for queue in world.waiting.values():
        for platoon in queue:
            platoon.state = "stranded"
            world.stranded_platoons += 1
    for link in world.links:
        for platoon in link.platoons:
            platoon.state = "stranded"
            world.stranded_platoons += 1
    world.log.sealed = True
    return world
