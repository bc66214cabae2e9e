import random

import pytest

from manetsim.metrics import RunCounters
from manetsim.packets import BEACON, DATA
from manetsim.schemas import ScenarioConfig
from manetsim.traffic import generate_flows


def cfg(**kw):
    fields = dict(n_nodes=100, duration_s=500.0, cbr_rate_pps=2.0)
    fields.update(kw)
    return ScenarioConfig(**fields)


class TestGenerateFlows:
    def test_twenty_percent_of_100(self):
        flows = generate_flows(cfg(), random.Random("1:traffic"))
        assert len(flows) == 20

    def test_twenty_percent_of_50(self):
        flows = generate_flows(cfg(n_nodes=50), random.Random("1:traffic"))
        assert len(flows) == 10

    def test_sources_distinct_and_never_self(self):
        flows = generate_flows(cfg(), random.Random("3:traffic"))
        sources = [f.source for f in flows]
        assert len(set(sources)) == len(sources)
        for f in flows:
            assert f.source != f.destination
            assert 0 <= f.destination < 100

    def test_sends_per_flow(self):
        f = generate_flows(cfg(), random.Random(1))[0]
        ticks = 0
        t = f.start
        while t < f.end:
            ticks += 1
            t += 1.0 / f.rate
        assert ticks == 1000

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            generate_flows(cfg(n_nodes=1), random.Random(1))

    def test_deterministic(self):
        a = generate_flows(cfg(), random.Random("5:traffic"))
        b = generate_flows(cfg(), random.Random("5:traffic"))
        assert a == b


class TestCounters:
    def test_duplicate_delivery_ignored(self):
        c = RunCounters(cfg())
        c.record_data_sent((0, 0), 0, 1)
        assert c.record_delivered((0, 0))
        assert not c.record_delivered((0, 0))
        assert c.data_delivered == 1

    def test_forwarding_does_not_touch_data_sent(self):
        c = RunCounters(cfg())
        c.record_data_sent((0, 0), 0, 1)
        c.record_tx(0, DATA)
        c.record_tx(5, DATA)  # a forwarder
        c.record_rx(5)
        assert c.data_sent == 1

    def test_broadcast_counts_one_per_transmission(self):
        c = RunCounters(cfg())
        c.record_tx(-1, BEACON)
        for receiver in range(30):
            c.record_rx(receiver)
        assert c.control_sent[BEACON] == 1

    def test_per_flow_sums(self):
        c = RunCounters(cfg())
        for i in range(7):
            c.record_data_sent((0, i), 0, 1)
        for i in range(5):
            c.record_data_sent((2, i), 2, 3)
        rep = c.finalize()
        assert sum(f.sent for f in rep.flows) == rep.data_sent == 12


class TestFinalize:
    def test_overhead(self):
        c = RunCounters(cfg())
        for i in range(5):
            c.record_data_sent((0, i), 0, 1)
            c.record_delivered((0, i))
        for _ in range(10):
            c.record_tx(0, BEACON)
        rep = c.finalize()
        assert rep.control_overhead == pytest.approx(2.0)

    def test_delivery_ratio(self):
        c = RunCounters(cfg())
        for i in range(100):
            c.record_data_sent((0, i), 0, 1)
        for i in range(95):
            c.record_delivered((0, i))
        assert c.finalize().delivery_ratio == pytest.approx(0.95)

    def test_zero_delivered_overhead_undefined(self):
        c = RunCounters(cfg())
        c.record_data_sent((0, 0), 0, 1)
        c.record_tx(0, BEACON)
        rep = c.finalize()
        assert rep.control_overhead is None
        assert rep.delivery_ratio == 0.0

    def test_energy_counters(self):
        c = RunCounters(cfg(n_nodes=2, energy_enabled=True, energy_tx_j=2.0, energy_rx_j=0.5))
        c.record_tx(0, DATA)
        c.record_tx(0, BEACON)
        c.record_rx(1)
        rep = c.finalize()
        assert rep.energy.joules[0] == pytest.approx(4.0)
        assert rep.energy.joules[1] == pytest.approx(0.5)

    def test_energy_strictly_increasing_in_control(self):
        base = RunCounters(cfg(n_nodes=1, energy_enabled=True))
        more = RunCounters(cfg(n_nodes=1, energy_enabled=True))
        for c in (base, more):
            c.record_tx(0, DATA)
        for _ in range(10):
            more.record_tx(0, BEACON)
        assert more.finalize().energy.joules[0] > base.finalize().energy.joules[0]
