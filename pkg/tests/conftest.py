import math

import pytest

from manetsim.engine import Engine
from manetsim.geometry import Position
from manetsim.mobility import WaypointState
from manetsim.protocols import build_protocol
from manetsim.schemas import ScenarioConfig


def static_config(n, **overrides):
    """Zero-mobility scenario; defaults sized for small hand-built topologies."""
    fields = dict(
        n_nodes=n,
        area_w_m=500.0,
        area_h_m=500.0,
        duration_s=30.0,
        speed_mps=0.0,
        pause_min_s=0.0,
        pause_max_s=0.0,
        loss_probability=0.0,
        seed=1,
    )
    fields.update(overrides)
    return ScenarioConfig(**fields)


def place(engine: Engine, positions) -> None:
    """Pin every node at an explicit position (overrides the random initial draw)."""
    states = []
    for p in positions:
        pos = Position(*p)
        states.append(WaypointState(pos, pos, 0.0, 0.0, 0.0, math.inf))
    engine.states = states


def build_static(positions, protocol="EELAR", **overrides):
    cfg = static_config(len(positions), protocol=protocol, **overrides)
    engine = Engine(cfg)
    place(engine, positions)
    proto = build_protocol(protocol, engine)
    engine.protocol = proto
    return engine, proto


@pytest.fixture
def chain3():
    """S - M - D in a line, 200 m spacing (only multi-hop path possible)."""
    return [(50.0, 250.0), (250.0, 250.0), (450.0, 250.0)]
