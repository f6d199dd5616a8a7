"""Shared scenario builders and fixture paths for the test suite."""

from __future__ import annotations

import os

import pytest

from mesosim import (
    SimConfig,
    build_world,
    parse_demand,
    parse_links,
    parse_nodes,
    run,
)

DEMOS = os.path.join(os.path.dirname(__file__), os.pardir, "demos")

# verdict lines registered by the acceptance tests, echoed after the run
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])

UROBOROS_DURATION = 5000.0
UROBOROS_RING = ("WN", "NE", "ES", "SW")
PARALLEL_DURATION = 8000.0
SIOUX_DURATION = 7200.0


def demo_path(*parts: str) -> str:
    return os.path.join(DEMOS, *parts)


def read_demo(*parts: str) -> str:
    with open(demo_path(*parts), "r", encoding="utf-8") as f:
        return f.read()


def make_world(nodes_text: str, links_text: str, demand_text: str, **config):
    return build_world(
        SimConfig(**config),
        parse_nodes(nodes_text),
        parse_links(links_text),
        parse_demand(demand_text),
    )


def single_link_texts(length: float = 1000.0, u: float = 20.0):
    nodes = "name,x,y\nA,0,0\nB,1000,0\n"
    links = f"name,from,to,length,free_flow_speed,jam_density,merge_priority\nAB,A,B,{length:g},{u:g},0.2,\n"
    return nodes, links


def chain_texts(l1: float = 1000.0, l2: float = 1000.0):
    nodes = "name,x,y\nA,0,0\nB,1000,0\nC,2000,0\n"
    links = (
        "name,from,to,length,free_flow_speed,jam_density,merge_priority\n"
        f"L1,A,B,{l1:g},20,0.2,\n"
        f"L2,B,C,{l2:g},20,0.2,\n"
    )
    return nodes, links


def bottleneck_world(duration: float = 3000.0, seed: int = 0):
    """A feeder link discharging into a long sink link under excess demand."""
    nodes = "name,x,y\nF,0,0\nM,2000,0\nE,12000,0\n"
    links = (
        "name,from,to,length,free_flow_speed,jam_density,merge_priority\n"
        "FM,F,M,2000,20,0.2,\n"
        "ME,M,E,10000,20,0.2,\n"
    )
    demand = f"orig,dest,start_t,end_t,flow\nF,E,0,{duration:g},1.2\n"
    return make_world(nodes, links, demand, duration=duration, seed=seed)


def merge_world(duration: float, seed: int = 0, alpha1: float = 2.0, alpha2: float = 0.5):
    """Two saturated feeders with given merge priorities joining one sink link."""
    nodes = "name,x,y\nF1,0,0\nF2,0,200\nM,500,0\nE,2500,0\n"
    links = (
        "name,from,to,length,free_flow_speed,jam_density,merge_priority\n"
        f"IN1,F1,M,500,20,0.2,{alpha1:g}\n"
        f"IN2,F2,M,500,20,0.2,{alpha2:g}\n"
        "OUT,M,E,2000,20,0.2,\n"
    )
    demand = (
        "orig,dest,start_t,end_t,flow\n"
        f"F1,E,0,{duration:g},0.9\n"
        f"F2,E,0,{duration:g},0.9\n"
    )
    return make_world(nodes, links, demand, duration=duration, seed=seed)


def uroboros_world(managed: bool = False, seed: int = 0, duration: float = UROBOROS_DURATION):
    links_file = "links_managed.csv" if managed else "links.csv"
    return make_world(
        read_demo("uroboros", "nodes.csv"),
        read_demo("uroboros", links_file),
        read_demo("uroboros", "demand.csv"),
        duration=duration,
        seed=seed,
    )


def parallel_world(seed: int = 0, duration: float = PARALLEL_DURATION):
    return make_world(
        read_demo("parallel", "nodes.csv"),
        read_demo("parallel", "links.csv"),
        read_demo("parallel", "demand.csv"),
        duration=duration,
        seed=seed,
        route_update_interval=12,
        route_weight=0.5,
    )


def sioux_falls_world(seed: int = 0):
    return make_world(
        read_demo("sioux_falls", "nodes.csv"),
        read_demo("sioux_falls", "links.csv"),
        read_demo("sioux_falls", "demand.csv"),
        duration=SIOUX_DURATION,
        seed=seed,
        route_update_interval=120,
    )


@pytest.fixture(scope="session")
def uroboros_default_run():
    return run(uroboros_world(managed=False))


@pytest.fixture(scope="session")
def uroboros_managed_run():
    return run(uroboros_world(managed=True))


@pytest.fixture(scope="session")
def bottleneck_run():
    return run(bottleneck_world())
