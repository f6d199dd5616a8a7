"""Post-run analysis: trip statistics, flow measures, and CSV export.

All operations read the sealed run log (plus the finished world where
platoon attributes are needed) and never mutate simulation state, so
they are safe to call repeatedly and in any order.

Network-level density and flow follow the generalized definitions over
a time bin: density is accumulated vehicle-time divided by (total road
length * bin width), flow is accumulated vehicle-distance divided by
the same. On stationary traffic these reduce to the usual point
measures, and their ratio is the space-mean speed.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

from .errors import DisconnectedPath, UnknownLink, ValidationError
from .routing import shortest_costs

DEFAULT_MFD_BIN = 300.0


@dataclass(frozen=True)
class TripStats:
    """Network-wide trip totals, in vehicle units.

    total_travel_time counts waiting at the origin as part of the trip;
    stranded trips contribute the time from departure to the horizon.
    total_delay compares completed trips against the free-flow shortest
    time between their endpoints on an empty network, so it includes
    time lost to detours as well as to queues.
    """

    completed_trips: int
    stranded_trips: int
    total_travel_time: float
    average_travel_time: float
    total_delay: float


@dataclass(frozen=True)
class MFDPoint:
    """One time bin of network mean density (veh/m) and flow (veh/s)."""

    t_bin: float
    density: float
    flow: float


def basic_stats(log, world) -> TripStats:
    """Aggregate per-platoon trip times into network totals."""
    dn = world.config.platoon_size
    duration = world.duration

    baselines: dict[str, dict[str, float]] = {}
    free_costs = {link.name: link.length / link.u for link in world.links}
    specs = [link.spec for link in world.links]

    completed = 0
    stranded = 0
    total_time = 0.0
    total_delay = 0.0
    for platoon in world.platoons:
        if platoon.state == "arrived":
            trip = platoon.arrival_t - platoon.depart_t
            completed += 1
            total_time += trip
            z = platoon.destination
            if z not in baselines:
                baselines[z] = shortest_costs(specs, free_costs, z)
            total_delay += trip - baselines[z][platoon.origin]
        elif platoon.state == "stranded":
            stranded += 1
            total_time += duration - platoon.depart_t

    counted = completed + stranded
    average = total_time / counted if counted else 0.0
    return TripStats(
        completed_trips=completed * dn,
        stranded_trips=stranded * dn,
        total_travel_time=total_time * dn,
        average_travel_time=average,
        total_delay=total_delay * dn,
    )


def cumulative_counts(log, link: str) -> list[tuple[float, int, int]]:
    """Per-step cumulative vehicles having entered (A) and left (D) the link."""
    if link not in log.link_meta:
        raise UnknownLink(f"no link named {link!r} in this run")
    dn = log.platoon_size
    return [
        (t, entered * dn, exited * dn)
        for t, name, _count, _speed, entered, exited in log.link_records
        if name == link
    ]


def mfd_points(log, world, bin_s: float = DEFAULT_MFD_BIN) -> list[MFDPoint]:
    """Network density/flow per time bin, generalized over all links.

    bin_s must be a positive multiple of the time step. The last bin may
    be shorter than bin_s when the horizon is not a bin multiple; it is
    normalized by its actual width.
    """
    dt = log.dt
    if bin_s <= 0 or abs(bin_s / dt - round(bin_s / dt)) > 1e-9:
        raise ValidationError(f"bin {bin_s} s is not a positive multiple of dt {dt} s")
    total_length = sum(spec.length for spec in log.link_meta.values())
    duration = log.duration
    n_bins = max(1, int(-(-duration // bin_s)))
    time_sum = [0.0] * n_bins
    dist_sum = [0.0] * n_bins
    dn = log.platoon_size
    for t, _name, count, mean_speed, _entered, _exited in log.link_records:
        if not count:
            continue
        idx = int((t - dt) / bin_s + 1e-9)
        vehicles = count * dn
        time_sum[idx] += vehicles * dt
        dist_sum[idx] += vehicles * mean_speed * dt
    points = []
    for idx in range(n_bins):
        start = idx * bin_s
        width = min(bin_s, duration - start)
        norm = total_length * width
        points.append(
            MFDPoint(t_bin=start, density=time_sum[idx] / norm, flow=dist_sum[idx] / norm)
        )
    return points


def time_space_points(log, link_sequence: list[str]) -> dict[int, list[tuple[float, float]]]:
    """Per-platoon (t, cumulative distance) polylines along a corridor.

    The corridor must chain head to tail; positions on later links are
    offset by the preceding lengths. Platoons covering only part of the
    corridor contribute the part they covered.
    """
    if not link_sequence:
        return {}
    offsets = {}
    running = 0.0
    previous = None
    for name in link_sequence:
        spec = log.link_meta.get(name)
        if spec is None:
            raise UnknownLink(f"no link named {name!r} in this run")
        if previous is not None and previous.to_node != spec.from_node:
            raise DisconnectedPath(
                f"link {name!r} does not start where {previous.name!r} ends"
            )
        offsets[name] = running
        running += spec.length
        previous = spec
    polylines: dict[int, list[tuple[float, float]]] = {}
    for pid, trajectory in log.trajectories.items():
        points = [
            (t, offsets[name] + x)
            for t, name, x, _v in trajectory
            if name in offsets
        ]
        if points:
            polylines[pid] = points
    return polylines


def export_bin(log) -> float:
    """The step multiple nearest the default MFD bin, capped at the horizon."""
    bin_s = max(1, round(DEFAULT_MFD_BIN / log.dt)) * log.dt
    return min(bin_s, log.duration)


def _fmt(value: float) -> str:
    """Deterministic number rendering: up to 6 significant digits."""
    return format(value, ".6g")


def export_csv(log, world, out_dir: str) -> list[str]:
    """Write vehicles.csv, links.csv, summary.csv, and mfd.csv into out_dir.

    Rendering is deterministic (6 significant digits, LF endings), so
    re-exporting the same run reproduces the files byte for byte.
    """
    os.makedirs(out_dir, exist_ok=True)
    dn = log.platoon_size
    paths = []

    path = os.path.join(out_dir, "vehicles.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "platoon_id", "orig", "dest", "link", "x", "v"])
        for platoon in world.platoons:
            pid = platoon.id
            orig = platoon.origin
            dest = platoon.destination
            for t, name, x, v in platoon.trajectory:
                writer.writerow([_fmt(t), pid, orig, dest, name, _fmt(x), _fmt(v)])
    paths.append(path)

    path = os.path.join(out_dir, "links.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "link", "count", "mean_speed", "A", "D"])
        for t, name, count, mean_speed, entered, exited in log.link_records:
            writer.writerow(
                [_fmt(t), name, count * dn, _fmt(mean_speed), entered * dn, exited * dn]
            )
    paths.append(path)

    stats = basic_stats(log, world)
    path = os.path.join(out_dir, "summary.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            [
                "completed_trips",
                "stranded_trips",
                "total_travel_time",
                "average_travel_time",
                "total_delay",
            ]
        )
        writer.writerow(
            [
                stats.completed_trips,
                stats.stranded_trips,
                _fmt(stats.total_travel_time),
                _fmt(stats.average_travel_time),
                _fmt(stats.total_delay),
            ]
        )
    paths.append(path)

    path = os.path.join(out_dir, "mfd.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t_bin", "density", "flow"])
        for point in mfd_points(log, world, export_bin(log)):
            writer.writerow([_fmt(point.t_bin), _fmt(point.density), _fmt(point.flow)])
    paths.append(path)

    return paths
