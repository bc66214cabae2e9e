"""Sector-based routing through a base station.

The base station keeps a position table refreshed by periodic beacons and
classifies every node into one of k angular sectors. Sources ask the base
station for the destination's sector: cross-sector data is relayed through
the base station, same-sector data is greedily flooded toward the
destination's last known position.
"""

import math
from dataclasses import dataclass

from ..geometry import Position, area_of_position
from ..packets import (
    BEACON,
    BROADCAST,
    BS_ID,
    DATA,
    DST_ID_RP,
    DST_POS_REQ,
    ID_RP,
    POS_REQ,
    Packet,
)
from .base import Protocol

# duplicate-suppression sets are cleared when they grow past this bound
SEEN_CAP = 1 << 18

# how long a source waits before repeating an unanswered destination query
QUERY_RETRY_S = 1.0


@dataclass(slots=True)
class PTEntry:
    position: Position
    area: int
    last_update: float
    reachable: bool
    notified_area: int = 0  # sector last acknowledged to the node (0 = never)


@dataclass(slots=True)
class DstInfo:
    area: int
    position: Position
    same_area: bool
    updated: float


class Eelar(Protocol):
    name = "EELAR"

    def __init__(self, engine):
        super().__init__(engine)
        cfg = self.cfg
        n = cfg.n_nodes
        self.bs_position = Position(cfg.area_w_m / 2.0, cfg.area_h_m / 2.0)
        self.k = cfg.n_areas
        self.pt: dict[int, PTEntry] = {}
        # nodes waiting for a targeted refresh of some destination's entry
        self.refresh_waiters: dict[int, list[int]] = {}
        self.my_area = [0] * n
        self.seen: list[set] = [set() for _ in range(n)]
        self.dst_info: list[dict[int, DstInfo]] = [{} for _ in range(n)]
        self.pending: list[dict[int, list]] = [{} for _ in range(n)]
        self.query_at: list[dict[int, float]] = [{} for _ in range(n)]

    # -- position table maintenance -----------------------------------------

    def start(self) -> None:
        eng = self.engine
        for i in range(self.cfg.n_nodes):
            self._send_pos_req(i, 0.0)
        eng.timer_at(self.cfg.beacon_period_s, BS_ID, "beacon")

    def _send_pos_req(self, node: int, t: float) -> None:
        pkt = self.control_packet(POS_REQ, node, BS_ID, t, position=self.engine.pos(node, t))
        self.engine.unicast(node, BS_ID, pkt, t)

    def on_timer(self, target: int, tag: str, data, t: float) -> None:
        if tag != "beacon":
            return
        pkt = self.control_packet(BEACON, BS_ID, BROADCAST, t)
        self.engine.broadcast(BS_ID, pkt, t)
        timeout = self.cfg.unreachable_timeout
        for entry in self.pt.values():
            if entry.reachable and t - entry.last_update > timeout:
                entry.reachable = False
        self.engine.timer_at(t + self.cfg.beacon_period_s, BS_ID, "beacon")

    def _bs_handle_pos_req(self, node: int, pos: Position, t: float) -> None:
        area = area_of_position(self.bs_position, pos, self.k)
        entry = self.pt.get(node)
        if entry is None:
            entry = PTEntry(pos, area, t, True)
            self.pt[node] = entry
        else:
            entry.position = pos
            entry.area = area
            entry.last_update = t
            entry.reachable = True
        waiters = self.refresh_waiters.pop(node, None)
        if waiters:
            for requester in waiters:
                self._bs_send_dst_reply(requester, node, t)
        if entry.notified_area != area:
            entry.notified_area = area
            reply = self.control_packet(ID_RP, BS_ID, node, t, area=area)
            self.engine.unicast(BS_ID, node, reply, t)

    def _bs_handle_dst_query(self, requester: int, dst: int, t: float) -> None:
        entry = self.pt.get(dst)
        if entry is None or not entry.reachable:
            reply = self.control_packet(DST_ID_RP, BS_ID, requester, t, subject=dst, unreachable=True)
            self.engine.unicast(BS_ID, requester, reply, t)
            return
        if t - entry.last_update > self.cfg.staleness_s:
            waiters = self.refresh_waiters.setdefault(dst, [])
            waiters.append(requester)
            if len(waiters) == 1:
                poke = self.control_packet(BEACON, BS_ID, dst, t)
                self.engine.unicast(BS_ID, dst, poke, t)
            return
        self._bs_send_dst_reply(requester, dst, t)

    def _bs_send_dst_reply(self, requester: int, dst: int, t: float) -> None:
        entry = self.pt[dst]
        src_entry = self.pt.get(requester)
        same = src_entry is not None and src_entry.area == entry.area
        reply = self.control_packet(
            DST_ID_RP,
            BS_ID,
            requester,
            t,
            subject=dst,
            area=entry.area,
            position=entry.position,
            same_area=same,
        )
        self.engine.unicast(BS_ID, requester, reply, t)

    # -- data path -----------------------------------------------------------

    def on_data(self, src: int, dst: int, pid, t: float) -> None:
        info = self.dst_info[src].get(dst)
        if info is not None and t - info.updated <= self.cfg.dst_cache_ttl:
            self._send_data(src, dst, pid, t, info)
            return
        self.pending[src].setdefault(dst, []).append(pid)
        asked = self.query_at[src].get(dst)
        if asked is None or t - asked > QUERY_RETRY_S:
            self.query_at[src][dst] = t
            query = self.control_packet(DST_POS_REQ, src, BS_ID, t, subject=dst)
            self.engine.unicast(src, BS_ID, query, t)

    def _send_data(self, src: int, dst: int, pid, t: float, info: DstInfo) -> None:
        if info.same_area:
            sp = self.engine.pos(src, t)
            dx = info.position[0] - sp[0]
            dy = info.position[1] - sp[1]
            pkt = Packet(
                kind=DATA,
                origin=src,
                dst=dst,
                pid=pid,
                size=self.cfg.data_bytes,
                created=t,
                dest_position=info.position,
                ref_dist_sq=dx * dx + dy * dy,
            )
            self._remember(src, pid)
            self.engine.broadcast(src, pkt, t)
        else:
            pkt = Packet(
                kind=DATA,
                origin=src,
                dst=dst,
                pid=pid,
                size=self.cfg.data_bytes,
                created=t,
                to_bs=True,
            )
            self.engine.unicast(src, BS_ID, pkt, t)

    def _remember(self, node: int, pid) -> None:
        seen = self.seen[node]
        if len(seen) >= SEEN_CAP:
            seen.clear()
        seen.add(pid)

    def forward_decision(self, node: int, pkt: Packet, t: float) -> bool:
        """Greedy filter: forward only from strictly closer to the stamped target."""
        if pkt.to_bs:
            return False
        if pkt.pid in self.seen[node]:
            return False
        self._remember(node, pkt.pid)
        p = self.engine.positions(t)[node]
        dx = pkt.dest_position[0] - p[0]
        dy = pkt.dest_position[1] - p[1]
        d_sq = dx * dx + dy * dy
        if d_sq >= pkt.ref_dist_sq:
            return False
        if self.cfg.forward_rule == "prev-hop-distance":
            self.engine.broadcast(node, pkt.clone(hop_count=pkt.hop_count + 1, ref_dist_sq=d_sq), t)
        else:
            self.engine.broadcast(node, pkt.clone(hop_count=pkt.hop_count + 1), t)
        return True

    def _bs_relay(self, pkt: Packet, t: float) -> None:
        entry = self.pt.get(pkt.dst)
        if entry is None or not entry.reachable:
            return  # destination unknown to the base station: packet dropped
        if self.cfg.bs_relay == "direct":
            self.engine.unicast(BS_ID, pkt.dst, pkt.clone(hop_count=pkt.hop_count + 1), t)
            return
        # flood-dest-area: hand one copy to every registered node in the
        # destination's sector; they forward greedily toward its last position
        receivers = sorted(
            i for i, e in self.pt.items() if e.reachable and e.area == entry.area and i != pkt.origin
        )
        if not receivers:
            return
        copy = pkt.clone(
            hop_count=pkt.hop_count + 1,
            to_bs=False,
            dest_position=entry.position,
            ref_dist_sq=math.inf,
        )
        self.engine.multicast(BS_ID, copy, receivers, t)

    # -- dispatch -------------------------------------------------------------

    def on_packet(self, node: int, pkt: Packet, t: float) -> None:
        kind = pkt.kind
        if kind == DATA:
            if node == BS_ID:
                if pkt.to_bs:
                    self._bs_relay(pkt, t)
            elif node == pkt.dst:
                self._remember(node, pkt.pid)
            else:
                self.forward_decision(node, pkt, t)
        elif kind == BEACON:
            self._send_pos_req(node, t)
        elif kind == POS_REQ:
            self._bs_handle_pos_req(pkt.origin, pkt.position, t)
        elif kind == ID_RP:
            self.my_area[node] = pkt.area
        elif kind == DST_POS_REQ:
            self._bs_handle_dst_query(pkt.origin, pkt.subject, t)
        elif kind == DST_ID_RP:
            self._handle_dst_reply(node, pkt, t)

    def _handle_dst_reply(self, node: int, pkt: Packet, t: float) -> None:
        dst = pkt.subject
        self.query_at[node].pop(dst, None)
        queued = self.pending[node].pop(dst, [])
        if pkt.unreachable:
            return  # queued sends are dropped, already counted as sent
        info = DstInfo(pkt.area, pkt.position, pkt.same_area, t)
        self.dst_info[node][dst] = info
        for pid in queued:
            self._send_data(node, dst, pid, t, info)
