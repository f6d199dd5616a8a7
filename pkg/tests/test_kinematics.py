"""Platoon motion, link updates, and link-level quantities."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mesosim import (
    ConsistencyError,
    LinkSpec,
    LinkState,
    Platoon,
    advance_platoon,
    instantaneous_travel_time,
    link_capacity,
    update_link,
)


def make_link(length=1000.0, u=20.0, kappa=0.2, platoon_size=5, positions=()):
    """A standalone LinkState holding platoons at the given front-to-back positions."""
    spec = LinkSpec(name="L", from_node="A", to_node="B", length=length,
                    free_flow_speed=u, jam_density=kappa)
    link = LinkState(spec, platoon_size)
    for i, x in enumerate(positions):
        p = Platoon(i, "A", "B", 0.0)
        p.state = "running"
        p.link = link
        p.x = x
        link.platoons.append(p)
        link.entered_count += 1
    return link


def test_advance_follows_leader():
    assert advance_platoon(100.0, 200.0, 20.0, 5.0, 5.0, 5) == pytest.approx(175.0)


def test_advance_free_flow():
    assert advance_platoon(100.0, None, 20.0, 5.0, 5.0, 5) == pytest.approx(200.0)


def test_advance_jam_spaced_pair_stays_put():
    assert advance_platoon(100.0, 125.0, 20.0, 5.0, 5.0, 5) == pytest.approx(100.0)


def test_advance_never_moves_backward():
    # guard for corrupted input: leader closer than the jam gap
    assert advance_platoon(100.0, 90.0, 20.0, 5.0, 5.0, 5) == pytest.approx(100.0)


def test_update_single_free_platoon():
    link = make_link(positions=[0.0])
    update_link(link, 5.0)
    assert link.platoons[0].x == pytest.approx(100.0)
    assert link.platoons[0].v == pytest.approx(20.0)
    assert link.mean_speed == pytest.approx(20.0)


def test_update_caps_at_link_end():
    link = make_link(positions=[995.0])
    update_link(link, 5.0)
    assert link.platoons[0].x == pytest.approx(1000.0)
    assert link.platoons[0].v == pytest.approx(1.0)


def test_update_empty_link_is_noop():
    link = make_link()
    update_link(link, 5.0)
    assert not link.platoons
    assert link.mean_speed == pytest.approx(20.0)


def test_update_uses_pre_update_leader_position():
    # the follower must see the leader at 100, not at its new 200
    link = make_link(positions=[100.0, 75.0])
    update_link(link, 5.0)
    front, back = link.platoons
    assert front.x == pytest.approx(200.0)
    assert back.x == pytest.approx(75.0)
    assert back.v == pytest.approx(0.0)


def test_update_detects_spacing_violation():
    # blocked front platoon pins the gap below the jam spacing
    link = make_link(positions=[1000.0, 990.0])
    with pytest.raises(ConsistencyError):
        update_link(link, 5.0)


def test_instantaneous_empty_link():
    link = make_link()
    assert instantaneous_travel_time(link, 0.1) == pytest.approx(50.0)


def test_instantaneous_stopped_link_uses_floor():
    link = make_link(positions=[1000.0])
    update_link(link, 5.0)
    assert link.mean_speed == pytest.approx(0.0)
    assert instantaneous_travel_time(link, 0.1) == pytest.approx(10000.0)


def test_instantaneous_single_free_platoon():
    link = make_link(positions=[100.0])
    update_link(link, 5.0)
    assert instantaneous_travel_time(link, 0.1) == pytest.approx(50.0)


def test_capacity_reference_values():
    assert link_capacity(20.0, 1.0, 5.0) == pytest.approx(0.8)
    assert link_capacity(5.0, 1.0, 5.0) == pytest.approx(0.5)


def test_capacity_asymptote_is_inverse_reaction_time():
    assert link_capacity(1e9, 1.0, 5.0) == pytest.approx(1.0, rel=1e-6)
    assert link_capacity(1e9, 2.0, 5.0) == pytest.approx(0.5, rel=1e-6)


def test_capacity_monotone_in_speed():
    caps = [link_capacity(u, 1.0, 5.0) for u in (1.0, 5.0, 20.0, 100.0)]
    assert caps == sorted(caps)


def _oracle_sweep(positions, length, u, dt, delta, dn):
    """Reference update: one advance_platoon per platoon against the old state."""
    out = []
    for i, x in enumerate(positions):
        if i == 0:
            out.append(min(x + u * dt, length))
        else:
            out.append(advance_platoon(x, positions[i - 1], u, dt, delta, dn))
    return out


@st.composite
def _spaced_link_states(draw):
    n = draw(st.integers(min_value=0, max_value=6))
    u = draw(st.integers(min_value=1, max_value=40))
    length = draw(st.integers(min_value=200, max_value=5000))
    # gaps at or above the 25 m jam gap; whole chain must fit on the link
    gaps = draw(st.lists(st.integers(min_value=25, max_value=200), min_size=max(n - 1, 0), max_size=max(n - 1, 0)))
    assume(sum(gaps) <= length)
    front = draw(st.integers(min_value=sum(gaps), max_value=length))
    positions = []
    x = float(front)
    for i in range(n):
        positions.append(x)
        if i < n - 1:
            x -= gaps[i]
    return float(length), float(u), positions


@settings(max_examples=120)
@given(_spaced_link_states())
def test_update_matches_single_platoon_rule(case):
    length, u, positions = case
    link = make_link(length=length, u=u, positions=positions)
    expected = _oracle_sweep(positions, length, u, 5.0, 5.0, 5)
    update_link(link, 5.0)
    got = [p.x for p in link.platoons]
    assert got == pytest.approx(expected)
    # post-update invariants: ordering kept, spacing kept, nobody off the link
    for front_p, back_p in zip(link.platoons, list(link.platoons)[1:]):
        assert front_p.x - back_p.x >= 25.0 - 1e-9
    for p, x_old in zip(link.platoons, positions):
        assert x_old - 1e-9 <= p.x <= length + 1e-9


@settings(max_examples=60)
@given(
    st.integers(min_value=100, max_value=8000),
    st.integers(min_value=1, max_value=40),
)
def test_free_flow_steps_to_link_end(length, u):
    """A lone platoon reaches the link end in exactly ceil((L/u)/dt) updates."""
    dt = 5.0
    link = make_link(length=float(length), u=float(u), positions=[0.0])
    steps = 0
    while link.platoons[0].x < length:
        update_link(link, dt)
        steps += 1
        assert steps < 10000
    assert steps == math.ceil(length / u / dt - 1e-12)


def test_platoon_initial_state():
    p = Platoon(3, "A", "B", 40.0)
    assert p.state == "waiting"
    assert p.link is None
    assert p.trajectory == []
    assert p.insert_t is None and p.arrival_t is None
