"""Link dynamics: platoon motion and link-level instantaneous quantities.

Each platoon bundles a fixed number of vehicles and moves along a link
according to a discretized car-following rule with two regimes:

    X(t + dt) = min(X(t) + u*dt,  X_leader(t) - delta*dn)

i.e. free flow capped by the leader's previous position minus the jam
footprint of one platoon. Because the time step equals reaction_time *
platoon_size, the congested branch needs exactly the one-step-old leader
position, so updates run front-to-back against a pre-update snapshot.

The triangular flow-density relation this induces has capacity
u / (u*tau + delta) at the critical density, with congested waves moving
backward at delta/tau.
"""

from __future__ import annotations

from collections import deque

from .errors import ConsistencyError
from .scenario import LinkSpec

_SPACING_TOL = 1e-9


class Platoon:
    """A group of platoon_size vehicles simulated as one moving unit.

    Position x is measured in meters from the start of the current link.
    The trajectory log accumulates (t, link_name, x, v) tuples, one per
    step spent on a link. States: waiting (in an origin queue), running
    (on a link), arrived, stranded (unfinished at horizon end).
    """

    __slots__ = (
        "id",
        "origin",
        "destination",
        "depart_t",
        "state",
        "link",
        "x",
        "v",
        "arrival_t",
        "insert_t",
        "next_choice",
        "trajectory",
    )

    def __init__(self, pid: int, origin: str, destination: str, depart_t: float):
        self.id = pid
        self.origin = origin
        self.destination = destination
        self.depart_t = depart_t
        self.state = "waiting"
        self.link: LinkState | None = None
        self.x = 0.0
        self.v = 0.0
        self.arrival_t: float | None = None
        self.insert_t: float | None = None
        # outgoing link chosen at the current node; kept until the node is crossed
        self.next_choice: LinkState | None = None
        self.trajectory: list[tuple[float, str, float, float]] = []

    def __repr__(self):
        return (
            f"Platoon(id={self.id}, {self.origin}->{self.destination}, "
            f"state={self.state}, link={self.link.name if self.link else None}, "
            f"x={self.x:.1f})"
        )


class LinkState:
    """Runtime state of one link: its spec plus the platoons currently on it.

    platoons[0] is the front platoon (nearest the link end); new entrants
    append at the back with x = 0. entered_count / exited_count are
    cumulative platoon counts used for cumulative-curve analysis.
    """

    __slots__ = (
        "spec",
        "name",
        "length",
        "u",
        "spacing",
        "platoons",
        "entered_count",
        "exited_count",
        "mean_speed",
        "cost_cache",
    )

    def __init__(self, spec: LinkSpec, platoon_size: int):
        self.spec = spec
        self.name = spec.name
        self.length = spec.length
        self.u = spec.free_flow_speed
        # minimum front-to-back gap between consecutive platoons
        self.spacing = spec.jam_spacing * platoon_size
        self.platoons: deque[Platoon] = deque()
        self.entered_count = 0
        self.exited_count = 0
        self.mean_speed = spec.free_flow_speed
        self.cost_cache = spec.length / spec.free_flow_speed

    def __repr__(self):
        return f"LinkState({self.name}, platoons={len(self.platoons)})"


def advance_platoon(
    x_self: float,
    x_leader_prev: float | None,
    u: float,
    dt: float,
    delta: float,
    dn: int,
) -> float:
    """Next position of a platoon under the two-regime motion rule.

    Parameters
    ----------
    x_self : float
        Current position of the platoon, meters from link start.
    x_leader_prev : float or None
        The leader platoon's position at the start of the step, or None
        when the platoon has no leader on its link.
    u : float
        Link free-flow speed, m/s.
    dt : float
        Step width, seconds.
    delta : float
        Jam spacing, meters per vehicle.
    dn : int
        Vehicles per platoon.

    Returns
    -------
    float
        min(x_self + u*dt, x_leader_prev - delta*dn), or the free-flow
        term alone without a leader. Never below x_self; the floor only
        matters for corrupted inputs, valid states cannot trigger it.
    """
    x_new = x_self + u * dt
    if x_leader_prev is not None:
        bound = x_leader_prev - delta * dn
        if bound < x_new:
            x_new = bound
    if x_new < x_self:
        return x_self
    return x_new


def update_link(link: LinkState, dt: float) -> LinkState:
    """Move every platoon on the link one step forward, front-to-back.

    Each platoon advances against its leader's pre-update position; the
    front platoon is capped at the link length and waits there for a
    node transfer. Speeds are logged as (x_new - x_old) / dt and the
    link's mean speed is refreshed (free-flow speed when empty).
    """
    platoons = link.platoons
    if not platoons:
        link.mean_speed = link.u
        return link
    length = link.length
    free_move = link.u * dt
    spacing = link.spacing
    leader_x_old = None
    leader_x_new = 0.0
    speed_sum = 0.0
    for platoon in platoons:
        x_old = platoon.x
        x_new = x_old + free_move
        if leader_x_old is None:
            if x_new > length:
                x_new = length
        else:
            bound = leader_x_old - spacing
            if bound < x_new:
                x_new = bound
            if x_new < x_old:
                x_new = x_old
            if leader_x_new - x_new < spacing - _SPACING_TOL:
                raise ConsistencyError(
                    f"link {link.name}: spacing violated between platoons at "
                    f"{leader_x_new:.3f} and {x_new:.3f} (minimum {spacing})"
                )
        v = (x_new - x_old) / dt
        platoon.x = x_new
        platoon.v = v
        speed_sum += v
        leader_x_old = x_old
        leader_x_new = x_new
    link.mean_speed = speed_sum / len(platoons)
    return link


def instantaneous_travel_time(link: LinkState, v_min: float) -> float:
    """Current cost of traversing the link, seconds.

    Empty links cost their free-flow time; otherwise length over the mean
    of the platoon speeds logged in the latest step, floored at v_min so
    a fully stopped link stays finitely expensive.
    """
    if not link.platoons:
        return link.length / link.u
    v_bar = link.mean_speed
    if v_bar < v_min:
        v_bar = v_min
    return link.length / v_bar


def link_capacity(u: float, tau: float, delta: float) -> float:
    """Saturation flow u / (u*tau + delta) in vehicles per second.

    This is where the free-flow branch (slope u) and the congested branch
    (slope -delta/tau) of the triangular flow-density relation intersect.
    """
    return u / (u * tau + delta)
