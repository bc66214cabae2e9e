"""Random waypoint mobility, sampled lazily at event times."""

import math
import random
from dataclasses import dataclass

from .geometry import Position
from .schemas import ScenarioConfig


@dataclass(slots=True)
class WaypointState:
    current: Position
    waypoint: Position
    speed: float
    leg_start_time: float
    arrival_time: float
    pause_until: float


def _new_leg(cfg: ScenarioConfig, start: Position, t: float, rng: random.Random) -> WaypointState:
    wx = rng.uniform(0.0, cfg.area_w_m)
    wy = rng.uniform(0.0, cfg.area_h_m)
    lo, hi = cfg.speed_range
    speed = rng.uniform(lo, hi)
    pause = rng.uniform(cfg.pause_min_s, cfg.pause_max_s)
    if speed <= 0.0:
        # zero-mobility scenario: park at the current position forever
        return WaypointState(start, start, 0.0, t, t, math.inf)
    leg = math.hypot(wx - start[0], wy - start[1])
    arrival = t + leg / speed
    return WaypointState(start, Position(wx, wy), speed, t, arrival, arrival + pause)


def init_positions(cfg: ScenarioConfig, rng: random.Random) -> list[WaypointState]:
    """Initial states: positions uniform over the area, first leg drawn at t=0."""
    states = []
    for _ in range(cfg.n_nodes):
        x = rng.uniform(0.0, cfg.area_w_m)
        y = rng.uniform(0.0, cfg.area_h_m)
        states.append(_new_leg(cfg, Position(x, y), 0.0, rng))
    return states


def position_at(state: WaypointState, t: float) -> Position:
    """Position on the current leg; clamped at the waypoint during the pause."""
    if t < state.leg_start_time:
        raise ValueError(f"t={t} precedes leg start {state.leg_start_time}")
    if t >= state.arrival_time:
        return state.waypoint
    frac = (t - state.leg_start_time) / (state.arrival_time - state.leg_start_time)
    cx, cy = state.current
    wx, wy = state.waypoint
    return Position(cx + (wx - cx) * frac, cy + (wy - cy) * frac)


def advance(cfg: ScenarioConfig, state: WaypointState, t: float, rng: random.Random) -> WaypointState:
    """Draw the next leg; t must be at or past arrival + pause."""
    if t < state.pause_until:
        raise ValueError(f"t={t} precedes end of pause {state.pause_until}")
    return _new_leg(cfg, state.waypoint, t, rng)
