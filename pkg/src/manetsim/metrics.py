"""Run counters and the final report: delivery ratio and control overhead."""

from collections import Counter

from .packets import DATA, PacketId
from .schemas import EnergyStats, FlowStats, MetricsReport, ScenarioConfig


class RunCounters:
    """Monotone per-run counters; one instance owned by a single engine."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.data_sent = 0
        self.control_sent: Counter = Counter()
        self.delivered_pids: set[PacketId] = set()
        self.flow_sent: Counter = Counter()
        self.flow_delivered: Counter = Counter()
        self.pid_flow: dict[PacketId, tuple[int, int]] = {}
        self.tx_count: Counter = Counter()
        self.rx_count: Counter = Counter()

    def record_data_sent(self, pid: PacketId, src: int, dst: int) -> None:
        self.data_sent += 1
        self.flow_sent[(src, dst)] += 1
        self.pid_flow[pid] = (src, dst)

    def record_delivered(self, pid: PacketId) -> bool:
        """Count a DATA arrival at its destination; duplicates are ignored."""
        if pid in self.delivered_pids:
            return False
        self.delivered_pids.add(pid)
        flow = self.pid_flow.get(pid)
        if flow is not None:
            self.flow_delivered[flow] += 1
        return True

    def record_tx(self, sender: int, kind: str) -> None:
        self.tx_count[sender] += 1
        if kind != DATA:
            self.control_sent[kind] += 1

    def record_rx(self, receiver: int) -> None:
        self.rx_count[receiver] += 1

    @property
    def data_delivered(self) -> int:
        return len(self.delivered_pids)

    def finalize(self) -> MetricsReport:
        delivered = self.data_delivered
        control_total = sum(self.control_sent.values())
        overhead = control_total / delivered if delivered > 0 else None
        ratio = delivered / self.data_sent if self.data_sent > 0 else None
        flows = [
            FlowStats(source=s, destination=d, sent=n, delivered=self.flow_delivered[(s, d)])
            for (s, d), n in sorted(self.flow_sent.items())
        ]
        energy = None
        if self.cfg.energy_enabled:
            nodes = range(self.cfg.n_nodes)
            energy = EnergyStats(
                tx_count={i: self.tx_count[i] for i in nodes},
                rx_count={i: self.rx_count[i] for i in nodes},
                joules={
                    i: self.tx_count[i] * self.cfg.energy_tx_j + self.rx_count[i] * self.cfg.energy_rx_j
                    for i in nodes
                },
            )
        return MetricsReport(
            data_sent=self.data_sent,
            data_delivered=delivered,
            control_sent=dict(sorted(self.control_sent.items())),
            control_total=control_total,
            control_overhead=overhead,
            delivery_ratio=ratio,
            flows=flows,
            energy=energy,
        )
