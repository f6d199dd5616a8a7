"""Scenario data model and CSV ingestion.

A scenario is three CSV files (nodes, links, demand) plus a global
configuration. All types here are immutable; ``build_world`` assembles
them into the mutable simulation state.

CSV formats (UTF-8, comma-separated, exact headers):

    nodes:  name,x,y[,signal]
    links:  name,from,to,length,free_flow_speed,jam_density,merge_priority
    demand: orig,dest,start_t,end_t,flow

The optional signal cell uses the grammar ``offset:dur1:linkA|linkB;dur2:linkC``
(semicolon-separated phases, pipe-separated permitted incoming links).
An empty cell means the node is unsignalized.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

from .errors import (
    DuplicateNode,
    ParseError,
    UnknownNode,
    UnreachableDemand,
    ValidationError,
)

log = logging.getLogger(__name__)

DEFAULT_MERGE_PRIORITY = 0.5


@dataclass(frozen=True)
class SimConfig:
    """Global simulation parameters.

    Attributes
    ----------
    reaction_time : float
        Per-vehicle following lag in seconds. Together with ``platoon_size``
        it sets the time step: dt = reaction_time * platoon_size.
    platoon_size : int
        Number of vehicles aggregated into one simulated platoon.
    duration : float
        Simulated horizon in seconds. Rounded up to a whole number of time
        steps by ``build_world`` if needed.
    seed : int
        Seed for the single RNG stream that drives all stochastic choices.
    route_update_interval : int
        Shortest-path refresh period, in time steps.
    route_weight : float
        Smoothing weight in [0, 1] blending the new shortest-path indicator
        into link attractiveness (1 = follow the latest tree exactly).
    v_min : float
        Floor speed in m/s used when converting link state to travel cost,
        so fully stopped links get a large finite cost.
    """

    reaction_time: float = 1.0
    platoon_size: int = 5
    duration: float = 3600.0
    seed: int = 0
    route_update_interval: int = 60
    route_weight: float = 0.5
    v_min: float = 1.0

    def __post_init__(self):
        if self.reaction_time <= 0:
            raise ValidationError("reaction_time must be positive")
        if not isinstance(self.platoon_size, int) or self.platoon_size < 1:
            raise ValidationError("platoon_size must be a positive integer")
        if self.duration <= 0:
            raise ValidationError("duration must be positive")
        if not isinstance(self.route_update_interval, int) or self.route_update_interval < 1:
            raise ValidationError("route_update_interval must be a positive integer")
        if not 0.0 <= self.route_weight <= 1.0:
            raise ValidationError("route_weight must lie in [0, 1]")
        if self.v_min <= 0:
            raise ValidationError("v_min must be positive")

    @property
    def time_step(self) -> float:
        """Simulation step width dt = reaction_time * platoon_size, seconds."""
        return self.reaction_time * self.platoon_size


@dataclass(frozen=True)
class SignalPlan:
    """Fixed-time signal: cyclic phases of (duration, permitted incoming links)."""

    phases: tuple[tuple[float, frozenset[str]], ...]
    offset: float = 0.0

    def __post_init__(self):
        if not self.phases:
            raise ValidationError("signal plan needs at least one phase")
        for dur, _ in self.phases:
            if dur <= 0:
                raise ValidationError("signal phase durations must be positive")

    @property
    def cycle(self) -> float:
        return sum(dur for dur, _ in self.phases)


@dataclass(frozen=True)
class NodeSpec:
    """A network node; x/y are plot coordinates only."""

    name: str
    x: float
    y: float
    signal: SignalPlan | None = None


@dataclass(frozen=True)
class LinkSpec:
    """A directed road segment with triangular-FD parameters."""

    name: str
    from_node: str
    to_node: str
    length: float
    free_flow_speed: float
    jam_density: float
    merge_priority: float = DEFAULT_MERGE_PRIORITY

    def __post_init__(self):
        if self.from_node == self.to_node:
            raise ValidationError(f"link {self.name}: self-loops are not allowed")
        if self.length <= 0:
            raise ValidationError(f"link {self.name}: length must be positive")
        if self.free_flow_speed <= 0:
            raise ValidationError(f"link {self.name}: free_flow_speed must be positive")
        if self.jam_density <= 0:
            raise ValidationError(f"link {self.name}: jam_density must be positive")
        if self.merge_priority <= 0:
            raise ValidationError(f"link {self.name}: merge_priority must be positive")

    @property
    def jam_spacing(self) -> float:
        """Minimum per-vehicle spacing at standstill, meters (1/jam_density)."""
        return 1.0 / self.jam_density

    @property
    def free_flow_time(self) -> float:
        return self.length / self.free_flow_speed


@dataclass(frozen=True)
class DemandSpec:
    """A constant-rate demand band between one origin-destination pair."""

    origin: str
    destination: str
    t_start: float
    t_end: float
    flow: float

    def __post_init__(self):
        if self.origin == self.destination:
            raise ValidationError("demand origin and destination must differ")
        if self.t_start >= self.t_end:
            raise ValidationError("demand band needs t_start < t_end")
        if self.t_start < 0:
            raise ValidationError("demand t_start must be non-negative")
        if self.flow < 0:
            raise ValidationError("demand flow must be non-negative")

    @property
    def total_vehicles(self) -> float:
        return (self.t_end - self.t_start) * self.flow


def _float_field(row_idx: int, name: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(row_idx, f"field {name!r}: {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(row_idx, f"field {name!r}: {raw!r} is not finite")
    return value


def _reader(text: str, expected: list[str], optional: list[str] | None = None):
    """Yield (row_index, row_dict), checking the header first."""
    rows = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(rows)]
    except StopIteration:
        raise ParseError(0, "empty file, header row missing") from None
    allowed = expected + (optional or [])
    if header[: len(expected)] != expected or header not in (expected, allowed):
        raise ParseError(0, f"expected header {','.join(allowed)!r}, got {','.join(header)!r}")
    for idx, row in enumerate(rows, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(expected) or len(row) > len(allowed):
            raise ParseError(idx, f"expected {len(expected)}-{len(allowed)} fields, got {len(row)}")
        yield idx, dict(zip(header, (cell.strip() for cell in row)))


def parse_signal(cell: str, row_idx: int) -> SignalPlan:
    """Parse ``offset:dur1:linkA|linkB;dur2:linkC`` into a SignalPlan."""
    head, sep, rest = cell.partition(":")
    if not sep:
        raise ParseError(row_idx, f"signal {cell!r}: missing ':' after offset")
    offset = _float_field(row_idx, "signal offset", head)
    phases = []
    for phase_text in rest.split(";"):
        dur_text, sep, links_text = phase_text.partition(":")
        if not sep:
            raise ParseError(row_idx, f"signal phase {phase_text!r}: missing ':' after duration")
        dur = _float_field(row_idx, "signal phase duration", dur_text)
        if dur <= 0:
            raise ParseError(row_idx, f"signal phase duration must be positive, got {dur}")
        links = frozenset(name.strip() for name in links_text.split("|") if name.strip())
        if not links:
            raise ParseError(row_idx, f"signal phase {phase_text!r} permits no links")
        phases.append((dur, links))
    return SignalPlan(phases=tuple(phases), offset=offset)


def parse_nodes(text: str) -> list[NodeSpec]:
    """Parse the nodes CSV. Raises DuplicateNode on repeated names."""
    nodes: list[NodeSpec] = []
    seen: set[str] = set()
    for idx, row in _reader(text, ["name", "x", "y"], optional=["signal"]):
        name = row["name"]
        if not name:
            raise ParseError(idx, "node name must not be empty")
        if name in seen:
            raise DuplicateNode(f"node name {name!r} appears more than once")
        seen.add(name)
        signal_cell = row.get("signal", "")
        signal = parse_signal(signal_cell, idx) if signal_cell else None
        nodes.append(
            NodeSpec(
                name=name,
                x=_float_field(idx, "x", row["x"]),
                y=_float_field(idx, "y", row["y"]),
                signal=signal,
            )
        )
    return nodes


def parse_links(text: str) -> list[LinkSpec]:
    """Parse the links CSV. A blank merge_priority falls back to the default."""
    links: list[LinkSpec] = []
    seen: set[str] = set()
    header = ["name", "from", "to", "length", "free_flow_speed", "jam_density", "merge_priority"]
    for idx, row in _reader(text, header):
        name = row["name"]
        if not name:
            raise ParseError(idx, "link name must not be empty")
        if name in seen:
            raise ValidationError(f"link name {name!r} appears more than once")
        seen.add(name)
        priority_cell = row["merge_priority"]
        priority = (
            _float_field(idx, "merge_priority", priority_cell)
            if priority_cell
            else DEFAULT_MERGE_PRIORITY
        )
        links.append(
            LinkSpec(
                name=name,
                from_node=row["from"],
                to_node=row["to"],
                length=_float_field(idx, "length", row["length"]),
                free_flow_speed=_float_field(idx, "free_flow_speed", row["free_flow_speed"]),
                jam_density=_float_field(idx, "jam_density", row["jam_density"]),
                merge_priority=priority,
            )
        )
    return links


def parse_demand(text: str) -> list[DemandSpec]:
    """Parse the demand CSV into DemandSpec rows in file order."""
    demands: list[DemandSpec] = []
    for idx, row in _reader(text, ["orig", "dest", "start_t", "end_t", "flow"]):
        demands.append(
            DemandSpec(
                origin=row["orig"],
                destination=row["dest"],
                t_start=_float_field(idx, "start_t", row["start_t"]),
                t_end=_float_field(idx, "end_t", row["end_t"]),
                flow=_float_field(idx, "flow", row["flow"]),
            )
        )
    return demands


def serialize_nodes(nodes: list[NodeSpec]) -> str:
    """Inverse of parse_nodes (used for round-trip checks and fixtures)."""
    out = ["name,x,y,signal"]
    for n in nodes:
        sig = ""
        if n.signal is not None:
            phases = ";".join(
                f"{dur:g}:{'|'.join(sorted(links))}" for dur, links in n.signal.phases
            )
            sig = f"{n.signal.offset:g}:{phases}"
        out.append(f"{n.name},{n.x:g},{n.y:g},{sig}")
    return "\n".join(out) + "\n"


def serialize_links(links: list[LinkSpec]) -> str:
    out = ["name,from,to,length,free_flow_speed,jam_density,merge_priority"]
    for l in links:
        out.append(
            f"{l.name},{l.from_node},{l.to_node},{l.length:g},"
            f"{l.free_flow_speed:g},{l.jam_density:g},{l.merge_priority:g}"
        )
    return "\n".join(out) + "\n"


def serialize_demand(demands: list[DemandSpec]) -> str:
    out = ["orig,dest,start_t,end_t,flow"]
    for d in demands:
        out.append(f"{d.origin},{d.destination},{d.t_start:g},{d.t_end:g},{d.flow:g}")
    return "\n".join(out) + "\n"


def build_world(
    config: SimConfig,
    nodes: list[NodeSpec],
    links: list[LinkSpec],
    demands: list[DemandSpec],
):
    """Cross-validate the scenario and assemble the simulation World.

    Checks endpoint resolution, per-link platoon capacity, signal coverage,
    and OD reachability; rounds the duration up to a whole number of steps;
    seeds the RNG; and initializes route attractiveness from free-flow costs.
    """
    from .engine import World  # deferred: engine depends on scenario types

    node_names = set()
    for n in nodes:
        if n.name in node_names:
            raise DuplicateNode(f"node name {n.name!r} appears more than once")
        node_names.add(n.name)

    dt = config.time_step
    for l in links:
        if l.from_node not in node_names:
            raise UnknownNode(f"link {l.name}: unknown from node {l.from_node!r}")
        if l.to_node not in node_names:
            raise UnknownNode(f"link {l.name}: unknown to node {l.to_node!r}")
        min_len = l.jam_spacing * config.platoon_size
        if l.length < min_len:
            raise ValidationError(
                f"link {l.name}: length {l.length} m cannot hold one platoon "
                f"(needs at least {min_len} m)"
            )

    incoming_names: dict[str, set[str]] = {n.name: set() for n in nodes}
    for l in links:
        incoming_names[l.to_node].add(l.name)
    for n in nodes:
        if n.signal is None:
            continue
        permitted = set()
        for _, phase_links in n.signal.phases:
            unknown = phase_links - incoming_names[n.name]
            if unknown:
                raise ValidationError(
                    f"node {n.name}: signal permits {sorted(unknown)} which are "
                    f"not incoming links of this node"
                )
            permitted |= phase_links
        missing = incoming_names[n.name] - permitted
        if missing:
            raise ValidationError(
                f"node {n.name}: incoming links {sorted(missing)} appear in no signal phase"
            )

    duration = config.duration
    steps = duration / dt
    if abs(steps - round(steps)) > 1e-9:
        adjusted = math.ceil(steps - 1e-9) * dt
        log.info(
            "duration %.6g s is not a multiple of the %.6g s time step; rounded up to %.6g s",
            duration,
            dt,
            adjusted,
        )
        duration = adjusted

    adjacency: dict[str, set[str]] = {n.name: set() for n in nodes}
    for l in links:
        adjacency[l.from_node].add(l.to_node)

    reachable_cache: dict[str, set[str]] = {}

    def reachable_from(origin: str) -> set[str]:
        if origin not in reachable_cache:
            seen = {origin}
            frontier = [origin]
            while frontier:
                here = frontier.pop()
                for nxt in adjacency[here]:
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            reachable_cache[origin] = seen
        return reachable_cache[origin]

    for d in demands:
        if d.origin not in node_names:
            raise UnknownNode(f"demand origin {d.origin!r} is not a node")
        if d.destination not in node_names:
            raise UnknownNode(f"demand destination {d.destination!r} is not a node")
        if d.t_end > duration:
            raise ValidationError(
                f"demand band ends at {d.t_end} s, beyond the {duration} s horizon"
            )
        if d.destination not in reachable_from(d.origin):
            raise UnreachableDemand(
                f"no directed path from {d.origin!r} to {d.destination!r}"
            )

    return World(config=config, nodes=nodes, links=links, demands=demands, duration=duration)
