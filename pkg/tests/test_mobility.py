import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from manetsim import mobility
from manetsim.geometry import Position
from manetsim.schemas import ScenarioConfig


def cfg(**kw):
    fields = dict(n_nodes=50, area_w_m=1500.0, area_h_m=1500.0)
    fields.update(kw)
    return ScenarioConfig(**fields)


class TestInitPositions:
    def test_all_inside_area(self):
        states = mobility.init_positions(cfg(), random.Random("1:mob"))
        assert len(states) == 50
        for s in states:
            assert 0 <= s.current[0] <= 1500 and 0 <= s.current[1] <= 1500
            assert 0 <= s.waypoint[0] <= 1500 and 0 <= s.waypoint[1] <= 1500

    def test_empty(self):
        assert mobility.init_positions(cfg(n_nodes=0), random.Random(1)) == []

    def test_same_seed_identical(self):
        a = mobility.init_positions(cfg(), random.Random("7:mob"))
        b = mobility.init_positions(cfg(), random.Random("7:mob"))
        assert a == b


class TestPositionAt:
    def leg(self, speed=10.0):
        return mobility.WaypointState(
            Position(0, 0), Position(100, 0), speed, 0.0, 100.0 / speed, 100.0 / speed + 2.0
        )

    def test_uniform_motion(self):
        assert mobility.position_at(self.leg(), 5.0) == Position(50.0, 0.0)

    def test_clamp_at_waypoint(self):
        st_ = self.leg()
        assert mobility.position_at(st_, 10.0) == Position(100.0, 0.0)
        assert mobility.position_at(st_, 11.5) == Position(100.0, 0.0)

    def test_degenerate_leg(self):
        st_ = mobility.WaypointState(Position(5, 5), Position(5, 5), 0.0, 0.0, 0.0, math.inf)
        for t in (0.0, 3.0, 1e6):
            assert mobility.position_at(st_, t) == Position(5, 5)

    def test_before_leg_start(self):
        st_ = mobility.WaypointState(Position(0, 0), Position(1, 0), 1.0, 10.0, 11.0, 12.0)
        with pytest.raises(ValueError):
            mobility.position_at(st_, 9.0)


class TestAdvance:
    def test_new_leg_timing(self):
        c = cfg(pause_min_s=2.0, pause_max_s=2.0, speed_mps=10.0)
        st_ = mobility.WaypointState(Position(0, 0), Position(100, 0), 10.0, 0.0, 10.0, 12.0)
        nxt = mobility.advance(c, st_, 12.0, random.Random(3))
        assert nxt.leg_start_time == 12.0
        assert nxt.current == Position(100, 0)

    def test_degenerate_speed_interval(self):
        c = cfg(speed_mps=15.0)
        st_ = mobility.WaypointState(Position(0, 0), Position(10, 0), 15.0, 0.0, 10 / 15, 10 / 15)
        rng = random.Random(5)
        for _ in range(20):
            st_ = mobility.advance(c, st_, st_.pause_until, rng)
            assert st_.speed == 15.0

    def test_deterministic(self):
        c = cfg()
        st_ = mobility.WaypointState(Position(0, 0), Position(100, 0), 10.0, 0.0, 10.0, 12.0)
        a = mobility.advance(c, st_, 12.0, random.Random(9))
        b = mobility.advance(c, st_, 12.0, random.Random(9))
        assert a == b

    def test_too_early_raises(self):
        c = cfg()
        st_ = mobility.WaypointState(Position(0, 0), Position(100, 0), 10.0, 0.0, 10.0, 12.0)
        with pytest.raises(ValueError):
            mobility.advance(c, st_, 11.0, random.Random(1))


class TestTrajectoryProperties:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.floats(1.0, 30.0))
    def test_containment_and_speed_bound(self, seed, speed):
        c = cfg(n_nodes=1, speed_mps=speed, area_w_m=800.0, area_h_m=600.0)
        rng = random.Random(f"{seed}:mob")
        state = mobility.init_positions(c, rng)[0]
        leg_rng = random.Random(f"{seed}:mob:0")
        prev = mobility.position_at(state, 0.0)
        t = 0.0
        for _ in range(200):
            t += 0.37
            while t >= state.pause_until:
                state = mobility.advance(c, state, state.pause_until, leg_rng)
            p = mobility.position_at(state, t)
            assert -1e-9 <= p[0] <= 800 + 1e-9 and -1e-9 <= p[1] <= 600 + 1e-9
            moved = math.dist(prev, p)
            assert moved <= speed * 0.37 + 1e-6
            prev = p

    def test_identical_seeds_identical_trajectories(self):
        c = cfg(n_nodes=3)

        def trajectory():
            states = mobility.init_positions(c, random.Random("11:mob"))
            rngs = [random.Random(f"11:mob:{i}") for i in range(3)]
            out = []
            for step in range(50):
                t = step * 1.7
                for i in range(3):
                    while t >= states[i].pause_until:
                        states[i] = mobility.advance(c, states[i], states[i].pause_until, rngs[i])
                    out.append(mobility.position_at(states[i], t))
            return out

        assert trajectory() == trajectory()
