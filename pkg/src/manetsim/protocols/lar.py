"""Location-aided route discovery over source routes.

Scheme 1 restricts the request flood to the smallest axis-aligned rectangle
covering the source and the destination's expected disk; scheme 2 admits a
forwarder only if it is not much farther from the destination's last known
position than the transmitting node. Positions are learned from overheard
discovery packets; with no location on file the discovery degenerates to a
plain network-wide flood.

Sources keep the packet that hit a broken link and retransmit it once after
re-discovery (send-buffer recovery).
"""

from dataclasses import dataclass
from typing import Optional

from ..geometry import Position, distance
from ..packets import BROADCAST, DATA, LAR_RREP, LAR_RREQ, RERR, Packet, Rect
from .base import Protocol


def lar1_request_zone(src_pos: Position, dst_expected: Position, dst_radius: float) -> Rect:
    """Smallest axis-aligned rectangle covering the source and the expected disk."""
    if dst_radius < 0:
        raise ValueError("expected-zone radius must be >= 0")
    return (
        min(src_pos[0], dst_expected[0] - dst_radius),
        max(src_pos[0], dst_expected[0] + dst_radius),
        min(src_pos[1], dst_expected[1] - dst_radius),
        max(src_pos[1], dst_expected[1] + dst_radius),
    )


def zone_contains(zone: Rect, p: Position) -> bool:
    return zone[0] <= p[0] <= zone[1] and zone[2] <= p[1] <= zone[3]


def lar2_forward(d_j: float, d_i: float, delta: float) -> bool:
    """Scheme 2 rule: forward iff the receiver is within delta of the sender's distance."""
    return d_j <= d_i + delta


@dataclass(slots=True)
class Pending:
    rreq_id: int
    attempt: int
    buffer: list


class Lar(Protocol):
    def __init__(self, engine, scheme: int = 1):
        super().__init__(engine)
        self.scheme = scheme
        self.name = f"LAR{scheme}"
        n = self.cfg.n_nodes
        self.loc_cache: list[dict[int, tuple[Position, float]]] = [{} for _ in range(n)]
        self.route_cache: list[dict[int, tuple[tuple, float]]] = [{} for _ in range(n)]
        self.rreq_counter = [0] * n
        self.rreq_seen: list[set] = [set() for _ in range(n)]
        self.pending: list[dict[int, Pending]] = [{} for _ in range(n)]
        self.retransmitted: list[set] = [set() for _ in range(n)]

    # -- location service stand-in -------------------------------------------

    def locate_destination(self, node: int, dst: int) -> Optional[tuple[Position, float]]:
        """Last known position of dst and its timestamp, if any packet told us."""
        return self.loc_cache[node].get(dst)

    def warm_location(self, node: int, dst: int, pos: Position, t: float) -> None:
        self.loc_cache[node][dst] = (pos, t)

    # -- sending ----------------------------------------------------------------

    def on_data(self, src: int, dst: int, pid, t: float) -> None:
        pkt = Packet(kind=DATA, origin=src, dst=dst, pid=pid, size=self.cfg.data_bytes, created=t)
        self._send_or_discover(src, pkt, t)

    def _fresh_route(self, node: int, dst: int, t: float):
        entry = self.route_cache[node].get(dst)
        if entry is None:
            return None
        route, learned = entry
        if t - learned > self.cfg.route_lifetime_s:
            del self.route_cache[node][dst]
            return None
        return route

    def _send_or_discover(self, node: int, pkt: Packet, t: float) -> None:
        route = self._fresh_route(node, pkt.dst, t)
        if route is not None:
            self.engine.unicast(node, route[1], pkt.clone(route=route, route_idx=0), t)
            return
        pend = self.pending[node].get(pkt.dst)
        if pend is not None:
            pend.buffer.append(pkt)
            return
        self.pending[node][pkt.dst] = Pending(rreq_id=-1, attempt=0, buffer=[pkt])
        self._discover(node, pkt.dst, 0, t)

    def _discover(self, node: int, dst: int, attempt: int, t: float) -> None:
        self.rreq_counter[node] += 1
        rid = self.rreq_counter[node]
        pend = self.pending[node][dst]
        pend.rreq_id = rid
        pend.attempt = attempt
        self.rreq_seen[node].add((node, rid))
        my_pos = self.engine.pos(node, t)
        known = self.loc_cache[node].get(dst)
        zone = None
        dst_prev = None
        prev_dist = 0.0
        # a failed restricted discovery is retried as a plain flood
        if known is not None and attempt == 0:
            dst_prev, seen_at = known
            if self.scheme == 1:
                radius = self.cfg.lar_vmax * (t - seen_at)
                zone = lar1_request_zone(my_pos, dst_prev, radius)
            else:
                prev_dist = distance(my_pos, dst_prev)
        rreq = self.control_packet(
            LAR_RREQ,
            node,
            BROADCAST,
            t,
            subject=dst,
            rreq_id=rid,
            route=(node,),
            position=my_pos,
            request_zone=zone,
            dest_position=dst_prev,
            prev_dist=prev_dist,
        )
        self.engine.broadcast(node, rreq, t)
        self.engine.timer_at(t + self.cfg.aodv_discovery_timeout_s, node, "disc", (dst, rid))

    def on_timer(self, target: int, tag: str, data, t: float) -> None:
        if tag != "disc":
            return
        dst, rid = data
        pend = self.pending[target].get(dst)
        if pend is None or pend.rreq_id != rid:
            return
        if pend.attempt < self.cfg.aodv_retries:
            self._discover(target, dst, pend.attempt + 1, t)
        else:
            del self.pending[target][dst]

    # -- packet handling -----------------------------------------------------------

    def on_packet(self, node: int, pkt: Packet, t: float) -> None:
        kind = pkt.kind
        if kind == DATA:
            self._forward_data(node, pkt, t)
        elif kind == LAR_RREQ:
            self._handle_rreq(node, pkt, t)
        elif kind == LAR_RREP:
            self._handle_rrep(node, pkt, t)
        elif kind == RERR:
            self._handle_rerr(node, pkt, t)

    def _handle_rreq(self, node: int, pkt: Packet, t: float) -> None:
        # every request carries the source's position
        self.loc_cache[node][pkt.origin] = (pkt.position, pkt.created)
        key = (pkt.origin, pkt.rreq_id)
        if key in self.rreq_seen[node]:
            return
        self.rreq_seen[node].add(key)
        if node == pkt.subject:
            route = pkt.route + (node,)
            rrep = self.control_packet(
                LAR_RREP,
                node,
                pkt.origin,
                t,
                route=route,
                route_idx=len(route) - 2,
                position=self.engine.pos(node, t),
            )
            self.engine.unicast(node, route[-2], rrep, t)
            return
        if node in pkt.route:
            return
        my_pos = self.engine.positions(t)[node]
        if pkt.request_zone is not None and not zone_contains(pkt.request_zone, my_pos):
            return
        fwd = pkt.clone(route=pkt.route + (node,), hop_count=pkt.hop_count + 1)
        if self.scheme == 2 and pkt.dest_position is not None:
            d_j = distance(my_pos, pkt.dest_position)
            if not lar2_forward(d_j, pkt.prev_dist, self.cfg.lar_delta_m):
                return
            fwd.prev_dist = d_j
        self.engine.broadcast(node, fwd, t)

    def _handle_rrep(self, node: int, pkt: Packet, t: float) -> None:
        # the reply carries the destination's position at reply time
        self.loc_cache[node][pkt.origin] = (pkt.position, pkt.created)
        route = pkt.route
        if node == pkt.dst:
            dst = route[-1]
            self.route_cache[node][dst] = (route, t)
            pend = self.pending[node].pop(dst, None)
            if pend is not None:
                limit = self.cfg.send_buffer_timeout_s
                for data_pkt in pend.buffer:
                    if t - data_pkt.created <= limit:
                        self.engine.unicast(node, route[1], data_pkt.clone(route=route, route_idx=0), t)
            return
        idx = pkt.route_idx
        if idx > 0:
            self.engine.unicast(node, route[idx - 1], pkt.clone(route_idx=idx - 1), t)

    def _forward_data(self, node: int, pkt: Packet, t: float) -> None:
        if node == pkt.dst:
            return
        idx = pkt.route_idx + 1
        route = pkt.route
        if idx >= len(route) - 1 or route[idx] != node:
            return
        self.engine.unicast(
            node, route[idx + 1], pkt.clone(route_idx=idx, hop_count=pkt.hop_count + 1), t
        )

    # -- route maintenance ------------------------------------------------------------

    def _drop_route_via(self, node: int, link: tuple) -> None:
        u, v = link
        cache = self.route_cache[node]
        for dst in list(cache):
            route = cache[dst][0]
            for i in range(len(route) - 1):
                if route[i] == u and route[i + 1] == v:
                    del cache[dst]
                    break

    def on_unicast_fail(self, sender: int, receiver: int, pkt: Packet, t: float) -> None:
        if pkt.kind != DATA:
            return
        link = (sender, receiver)
        self._drop_route_via(sender, link)
        if sender == pkt.origin:
            self._recover(sender, pkt, t)
            return
        route = pkt.route
        idx = route.index(sender)
        rerr = self.control_packet(
            RERR,
            sender,
            pkt.origin,
            t,
            broken_link=link,
            route=route,
            route_idx=idx - 1,
            failed_pid=pkt.pid,
            subject=pkt.dst,
        )
        self.engine.unicast(sender, route[idx - 1], rerr, t)

    def _handle_rerr(self, node: int, pkt: Packet, t: float) -> None:
        self._drop_route_via(node, pkt.broken_link)
        idx = pkt.route_idx
        if node != pkt.dst:
            if idx > 0:
                self.engine.unicast(node, pkt.route[idx - 1], pkt.clone(route_idx=idx - 1), t)
            return
        lost = Packet(
            kind=DATA,
            origin=node,
            dst=pkt.subject,
            pid=pkt.failed_pid,
            size=self.cfg.data_bytes,
            created=t,
        )
        self._recover(node, lost, t)

    def _recover(self, node: int, pkt: Packet, t: float) -> None:
        """Retransmit a packet lost to a link break, at most once per packet."""
        if pkt.pid in self.retransmitted[node]:
            return
        self.retransmitted[node].add(pkt.pid)
        self._send_or_discover(node, pkt.clone(route=(), route_idx=0), t)
