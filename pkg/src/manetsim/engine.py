"""Deterministic discrete-event engine with a unit-disk radio and a base station.

Events are totally ordered by (time, sequence). Arrivals produced by one
transmission share a single heap entry and are processed in ascending receiver
order, which is equivalent to scheduling one arrival event per receiver with
consecutive sequence numbers.
"""

import heapq
import random
from dataclasses import dataclass
from typing import IO, Optional

from . import mobility
from .geometry import Position
from .metrics import RunCounters
from .packets import BROADCAST, BS_ID, DATA, Packet, PacketId
from .schemas import ScenarioConfig

_DELIVER = 0
_TIMER = 1
_TICK = 2

class SchedulingError(ValueError):
    """Raised when an event is scheduled in the past."""


@dataclass(slots=True)
class Event:
    time: float
    kind: str
    target: int
    payload: object = None
    sequence: int = -1


def _entity_name(i: int) -> str:
    if i == BS_ID:
        return "BS"
    if i == BROADCAST:
        return "*"
    return str(i)


class Engine:
    def __init__(self, cfg: ScenarioConfig, trace: Optional[IO[str]] = None):
        self.cfg = cfg
        self.now = 0.0
        self.counters = RunCounters(cfg)
        self.protocol = None  # set by the runner before start
        self._heap: list = []
        self._seq = 0
        self._pid_seq: dict[int, int] = {}
        self._trace = trace

        self.range_sq = cfg.tx_range_m * cfg.tx_range_m
        self.latency = cfg.per_hop_latency_s
        self.loss_p = cfg.loss_probability
        self._loss_rng = random.Random(f"{cfg.seed}:loss")

        init_rng = random.Random(f"{cfg.seed}:mob")
        self.states = mobility.init_positions(cfg, init_rng)
        self._leg_rngs = [random.Random(f"{cfg.seed}:mob:{i}") for i in range(cfg.n_nodes)]
        self._pos_time = -1.0
        self._pos_cache: list[Position] = []

    # -- positions ---------------------------------------------------------

    def pos(self, i: int, t: float) -> Position:
        st = self.states[i]
        if t >= st.pause_until:
            rng = self._leg_rngs[i]
            while t >= st.pause_until:
                st = mobility.advance(self.cfg, st, st.pause_until, rng)
            self.states[i] = st
        return mobility.position_at(st, t)

    def positions(self, t: float) -> list[Position]:
        if t != self._pos_time:
            self._pos_cache = [self.pos(i, t) for i in range(self.cfg.n_nodes)]
            self._pos_time = t
        return self._pos_cache

    def neighbors(self, i: int, t: float) -> list[int]:
        """Mobile nodes within tx range of node i (boundary inclusive)."""
        pos = self.positions(t)
        xi, yi = pos[i]
        rsq = self.range_sq
        out = []
        for j in range(self.cfg.n_nodes):
            if j == i:
                continue
            dx = pos[j][0] - xi
            dy = pos[j][1] - yi
            if dx * dx + dy * dy <= rsq:
                out.append(j)
        return out

    def in_range(self, a: int, b: int, t: float) -> bool:
        if a == BS_ID or b == BS_ID:
            return True
        pos = self.positions(t)
        dx = pos[a][0] - pos[b][0]
        dy = pos[a][1] - pos[b][1]
        return dx * dx + dy * dy <= self.range_sq

    # -- scheduling --------------------------------------------------------

    def _push(self, t: float, kind: int, payload) -> int:
        seq = self._seq
        self._seq = seq + 1
        heapq.heappush(self._heap, (t, seq, kind, payload))
        return seq

    def schedule(self, event: Event) -> None:
        if event.time < self.now:
            raise SchedulingError(f"event at t={event.time} is before now={self.now}")
        if event.kind == "timer-expiry":
            payload = event.payload if isinstance(event.payload, tuple) else (event.payload,)
            tag = payload[0]
            data = payload[1] if len(payload) > 1 else None
            event.sequence = self._push(event.time, _TIMER, (event.target, tag, data))
        elif event.kind == "packet-arrival":
            pkt, receivers = event.payload
            event.sequence = self._push(event.time, _DELIVER, (pkt, tuple(receivers)))
        else:
            raise ValueError(f"cannot schedule event kind {event.kind!r} directly")

    def timer_at(self, t: float, target: int, tag: str, data=None) -> None:
        if t < self.now:
            raise SchedulingError(f"timer at t={t} is before now={self.now}")
        self._push(t, _TIMER, (target, tag, data))

    def next_pid(self, origin: int) -> PacketId:
        n = self._pid_seq.get(origin, 0)
        self._pid_seq[origin] = n + 1
        return (origin, n)

    # -- radio -------------------------------------------------------------

    def broadcast(self, sender: int, pkt: Packet, t: float) -> list[int]:
        """Transmit to every entity in range; returns ids the packet reaches."""
        pkt.transmitter = sender
        self.counters.record_tx(sender, pkt.kind)
        if sender == BS_ID:
            receivers = list(range(self.cfg.n_nodes))
        else:
            receivers = self.neighbors(sender, t)
        if self.loss_p > 0.0:
            draw = self._loss_rng.random
            p = self.loss_p
            receivers = [r for r in receivers if draw() >= p]
        if receivers:
            self._push(t + self.latency, _DELIVER, (pkt, tuple(receivers)))
        return receivers

    def multicast(self, sender: int, pkt: Packet, receivers: list[int], t: float) -> list[int]:
        """One transmission delivered to an explicit receiver set (BS flooding an area)."""
        pkt.transmitter = sender
        self.counters.record_tx(sender, pkt.kind)
        if self.loss_p > 0.0:
            draw = self._loss_rng.random
            p = self.loss_p
            receivers = [r for r in receivers if draw() >= p]
        if receivers:
            self._push(t + self.latency, _DELIVER, (pkt, tuple(receivers)))
        return receivers

    def unicast(self, sender: int, receiver: int, pkt: Packet, t: float) -> bool:
        """Transmit to one entity; range failure is reported back to the protocol."""
        pkt.transmitter = sender
        self.counters.record_tx(sender, pkt.kind)
        if not self.in_range(sender, receiver, t):
            self.protocol.on_unicast_fail(sender, receiver, pkt, t)
            return False
        if self.loss_p > 0.0 and self._loss_rng.random() < self.loss_p:
            return False  # silently lost; link-layer feedback only for range failures
        self._push(t + self.latency, _DELIVER, (pkt, (receiver,)))
        return True

    # -- flows ---------------------------------------------------------------

    def start_flow(self, src: int, dst: int, start: float, interval: float) -> None:
        self._push(start, _TICK, (src, dst, interval))

    def inject_data(self, src: int, dst: int, t: float) -> None:
        """Schedule a single data origination (no recurring flow)."""
        self._push(t, _TICK, (src, dst, 0.0))

    # -- main loop -----------------------------------------------------------

    def run_until(self, t_end: float) -> None:
        heap = self._heap
        while heap and heap[0][0] <= t_end:
            t, _seq, kind, payload = heapq.heappop(heap)
            self.now = t
            if kind == _DELIVER:
                pkt, receivers = payload
                self._deliver(pkt, receivers, t)
            elif kind == _TICK:
                src, dst, interval = payload
                self._tick(src, dst, interval, t)
            else:
                target, tag, data = payload
                if self._trace is not None:
                    self._trace.write(
                        f"{t:.6f}\ttimer-expiry\t{tag}\t-\t-\t{_entity_name(target)}\t0\t-\n"
                    )
                self.protocol.on_timer(target, tag, data, t)
        self.now = t_end

    def _deliver(self, pkt: Packet, receivers: tuple, t: float) -> None:
        counters = self.counters
        trace = self._trace
        proto = self.protocol
        is_data = pkt.kind == DATA
        for r in receivers:
            counters.record_rx(r)
            if trace is not None:
                trace.write(
                    f"{t:.6f}\tpacket-arrival\t{pkt.kind}\t{_entity_name(pkt.origin)}\t"
                    f"{_entity_name(pkt.dst)}\t{_entity_name(r)}\t{pkt.hop_count}\t"
                    f"{pkt.pid[0]}:{pkt.pid[1]}\n"
                )
            if is_data and r == pkt.dst:
                counters.record_delivered(pkt.pid)
            proto.on_packet(r, pkt, t)

    def _tick(self, src: int, dst: int, interval: float, t: float) -> None:
        pid = self.next_pid(src)
        self.counters.record_data_sent(pid, src, dst)
        if self._trace is not None:
            self._trace.write(
                f"{t:.6f}\ttraffic-tick\tDATA\t{src}\t{dst}\t{src}\t0\t{pid[0]}:{pid[1]}\n"
            )
        self.protocol.on_data(src, dst, pid, t)
        if interval > 0.0 and t + interval < self.cfg.duration_s:
            self._push(t + interval, _TICK, (src, dst, interval))
