"""On-demand distance-vector routing: RREQ flood, reverse-path RREP, RERR.

Lite model: sequence numbers only arbitrate entry freshness, routes carry a
fixed lifetime (no refresh on use), link breaks are detected by the range
check at transmission time.
"""

from dataclasses import dataclass, field

from ..packets import BROADCAST, DATA, HELLO, RERR, RREP, RREQ, Packet
from .base import Protocol


@dataclass(slots=True)
class Route:
    next_hop: int
    hops: int
    seq: int
    expires: float
    precursors: set = field(default_factory=set)


@dataclass(slots=True)
class Pending:
    rreq_id: int
    attempt: int
    buffer: list


class Aodv(Protocol):
    name = "AODV"

    def __init__(self, engine):
        super().__init__(engine)
        n = self.cfg.n_nodes
        self.table: list[dict[int, Route]] = [{} for _ in range(n)]
        self.seq = [0] * n
        self.rreq_counter = [0] * n
        self.rreq_seen: list[set] = [set() for _ in range(n)]
        self.pending: list[dict[int, Pending]] = [{} for _ in range(n)]
        self.hop_limit = max(2 * n, 16)

    def start(self) -> None:
        if self.cfg.hello_enabled:
            for i in range(self.cfg.n_nodes):
                self.engine.timer_at(self.cfg.hello_period_s, i, "hello")

    # -- routing table ---------------------------------------------------------

    def fresh_route(self, node: int, dst: int, t: float):
        rt = self.table[node].get(dst)
        if rt is None:
            return None
        if rt.expires <= t:
            del self.table[node][dst]
            return None
        return rt

    def _install(self, node: int, dst: int, next_hop: int, hops: int, seq: int, t: float) -> None:
        cur = self.table[node].get(dst)
        if cur is None or seq > cur.seq or (seq == cur.seq and hops < cur.hops):
            self.table[node][dst] = Route(next_hop, hops, seq, t + self.cfg.route_lifetime_s)

    # -- discovery ---------------------------------------------------------------

    def on_data(self, src: int, dst: int, pid, t: float) -> None:
        pkt = Packet(kind=DATA, origin=src, dst=dst, pid=pid, size=self.cfg.data_bytes, created=t)
        self._send_or_discover(src, pkt, t)

    def _send_or_discover(self, node: int, pkt: Packet, t: float) -> None:
        rt = self.fresh_route(node, pkt.dst, t)
        if rt is not None:
            self.engine.unicast(node, rt.next_hop, pkt, t)
            return
        pend = self.pending[node].get(pkt.dst)
        if pend is not None:
            pend.buffer.append(pkt)
            return
        self.pending[node][pkt.dst] = Pending(rreq_id=-1, attempt=0, buffer=[pkt])
        self._discover(node, pkt.dst, 0, t)

    def _discover(self, node: int, dst: int, attempt: int, t: float) -> None:
        self.seq[node] += 1
        self.rreq_counter[node] += 1
        rid = self.rreq_counter[node]
        pend = self.pending[node][dst]
        pend.rreq_id = rid
        pend.attempt = attempt
        self.rreq_seen[node].add((node, rid))
        rreq = self.control_packet(
            RREQ, node, BROADCAST, t, subject=dst, rreq_id=rid, origin_seq=self.seq[node]
        )
        self.engine.broadcast(node, rreq, t)
        self.engine.timer_at(t + self.cfg.aodv_discovery_timeout_s, node, "disc", (dst, rid))

    def on_timer(self, target: int, tag: str, data, t: float) -> None:
        if tag == "disc":
            dst, rid = data
            pend = self.pending[target].get(dst)
            if pend is None or pend.rreq_id != rid:
                return
            if pend.attempt < self.cfg.aodv_retries:
                self._discover(target, dst, pend.attempt + 1, t)
            else:
                del self.pending[target][dst]  # buffered packets dropped
        elif tag == "hello":
            pkt = self.control_packet(HELLO, target, BROADCAST, t)
            self.engine.broadcast(target, pkt, t)
            self.engine.timer_at(t + self.cfg.hello_period_s, target, "hello")

    # -- packet handling ----------------------------------------------------------

    def on_packet(self, node: int, pkt: Packet, t: float) -> None:
        kind = pkt.kind
        if kind == DATA:
            self._handle_data(node, pkt, t)
        elif kind == RREQ:
            self._handle_rreq(node, pkt, t)
        elif kind == RREP:
            self._handle_rrep(node, pkt, t)
        elif kind == RERR:
            self._handle_rerr(node, pkt, t)

    def _handle_rreq(self, node: int, pkt: Packet, t: float) -> None:
        key = (pkt.origin, pkt.rreq_id)
        if key in self.rreq_seen[node]:
            return
        self.rreq_seen[node].add(key)
        self._install(node, pkt.origin, pkt.transmitter, pkt.hop_count + 1, pkt.origin_seq, t)
        dst = pkt.subject
        if node == dst:
            self.seq[node] += 1
            rrep = self.control_packet(
                RREP, node, pkt.origin, t, subject=dst, dst_seq=self.seq[node], hops_from_dst=0
            )
            self._forward_rrep(node, rrep, t)
            return
        rt = self.fresh_route(node, dst, t)
        if rt is not None:
            rrep = self.control_packet(
                RREP, node, pkt.origin, t, subject=dst, dst_seq=rt.seq, hops_from_dst=rt.hops
            )
            self._forward_rrep(node, rrep, t)
            return
        if pkt.hop_count < self.hop_limit:
            self.engine.broadcast(node, pkt.clone(hop_count=pkt.hop_count + 1), t)

    def _forward_rrep(self, node: int, rrep: Packet, t: float) -> None:
        back = self.fresh_route(node, rrep.dst, t)
        if back is None:
            return
        fwd = self.fresh_route(node, rrep.subject, t)
        if fwd is not None:
            fwd.precursors.add(back.next_hop)
        self.engine.unicast(node, back.next_hop, rrep, t)

    def _handle_rrep(self, node: int, pkt: Packet, t: float) -> None:
        self._install(node, pkt.subject, pkt.transmitter, pkt.hops_from_dst + 1, pkt.dst_seq, t)
        if node == pkt.dst:
            pend = self.pending[node].pop(pkt.subject, None)
            if pend is not None:
                rt = self.fresh_route(node, pkt.subject, t)
                if rt is not None:
                    limit = self.cfg.send_buffer_timeout_s
                    for data_pkt in pend.buffer:
                        if t - data_pkt.created <= limit:
                            self.engine.unicast(node, rt.next_hop, data_pkt, t)
            return
        self._forward_rrep(node, pkt.clone(hops_from_dst=pkt.hops_from_dst + 1), t)

    def _handle_data(self, node: int, pkt: Packet, t: float) -> None:
        if node == pkt.dst:
            return
        if pkt.hop_count >= self.hop_limit:
            return
        rt = self.fresh_route(node, pkt.dst, t)
        if rt is None:
            # no usable entry mid-path: report back so the upstream cleans up
            rerr = self.control_packet(RERR, node, pkt.transmitter, t, subjects=(pkt.dst,))
            self.engine.unicast(node, pkt.transmitter, rerr, t)
            return
        rt.precursors.add(pkt.transmitter)
        self.engine.unicast(node, rt.next_hop, pkt.clone(hop_count=pkt.hop_count + 1), t)

    def on_unicast_fail(self, sender: int, receiver: int, pkt: Packet, t: float) -> None:
        if pkt.kind == DATA:
            self._link_break(sender, receiver, t)

    def _link_break(self, node: int, lost_hop: int, t: float) -> None:
        table = self.table[node]
        broken = sorted(dst for dst, rt in table.items() if rt.next_hop == lost_hop)
        if not broken:
            return
        predecessors = set()
        for dst in broken:
            predecessors.update(table[dst].precursors)
            del table[dst]
        for pred in sorted(predecessors):
            rerr = self.control_packet(RERR, node, pred, t, subjects=tuple(broken))
            self.engine.unicast(node, pred, rerr, t)

    def _handle_rerr(self, node: int, pkt: Packet, t: float) -> None:
        table = self.table[node]
        invalid = []
        predecessors = set()
        for dst in pkt.subjects:
            rt = table.get(dst)
            if rt is not None and rt.next_hop == pkt.transmitter:
                invalid.append(dst)
                predecessors.update(rt.precursors)
                del table[dst]
        if not invalid:
            return
        for pred in sorted(predecessors):
            rerr = self.control_packet(RERR, node, pred, t, subjects=tuple(invalid))
            self.engine.unicast(node, pred, rerr, t)
