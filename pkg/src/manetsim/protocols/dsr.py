"""Source routing: network-wide RREQ flood accumulating the hop list.

The destination answers every request copy it hears, and intermediate nodes
answer from their own route cache (filled while forwarding earlier replies),
so a source typically holds several routes of mixed age. Broken links purge
matching cached routes; there is no packet salvaging, the next send simply
tries the next cached route or re-discovers.
"""

from dataclasses import dataclass

from ..packets import BROADCAST, DATA, RERR, RREP, RREQ, Packet
from .base import Protocol


@dataclass(slots=True)
class Pending:
    rreq_id: int
    attempt: int
    buffer: list


class Dsr(Protocol):
    name = "DSR"

    def __init__(self, engine):
        super().__init__(engine)
        n = self.cfg.n_nodes
        self.cache: list[dict[int, list]] = [{} for _ in range(n)]  # dst -> [(route, learned_t)]
        self.rreq_counter = [0] * n
        self.rreq_seen: list[set] = [set() for _ in range(n)]
        self.pending: list[dict[int, Pending]] = [{} for _ in range(n)]

    # -- route cache -------------------------------------------------------------

    def fresh_source_route(self, node: int, dst: int, t: float):
        """A route fresh enough to initiate sends with (sender's window)."""
        return self._lookup(node, dst, t, self.cfg.route_lifetime_s)

    def cached_route(self, node: int, dst: int, t: float):
        """A route still servable from the cache (longer window; may be stale)."""
        return self._lookup(node, dst, t, self.cfg.dsr_cache_lifetime_s)

    def _lookup(self, node: int, dst: int, t: float, window: float):
        entries = self.cache[node].get(dst)
        if not entries:
            return None
        keep = [e for e in entries if t - e[1] <= self.cfg.dsr_cache_lifetime_s]
        if keep:
            self.cache[node][dst] = keep
        else:
            del self.cache[node][dst]
            return None
        for route, learned in keep:
            if t - learned <= window:
                return route
        return None

    def _cache_route(self, node: int, route: tuple, t: float) -> None:
        dst = route[-1]
        entries = self.cache[node].setdefault(dst, [])
        lifetime = self.cfg.dsr_cache_lifetime_s
        entries[:] = [e for e in entries if t - e[1] <= lifetime]
        if len(entries) >= self.cfg.dsr_cache_size:
            return
        if any(e[0] == route for e in entries):
            return
        entries.append((route, t))

    def _purge_link(self, node: int, link: tuple, t: float) -> None:
        u, v = link
        cache = self.cache[node]
        for dst in list(cache):
            kept = []
            for route, learned in cache[dst]:
                broken = False
                for i in range(len(route) - 1):
                    if route[i] == u and route[i + 1] == v:
                        broken = True
                        break
                if not broken:
                    kept.append((route, learned))
            if kept:
                cache[dst] = kept
            else:
                del cache[dst]

    # -- sending and discovery ------------------------------------------------------

    def on_data(self, src: int, dst: int, pid, t: float) -> None:
        pkt = Packet(kind=DATA, origin=src, dst=dst, pid=pid, size=self.cfg.data_bytes, created=t)
        self._send_or_discover(src, pkt, t)

    def _send_or_discover(self, node: int, pkt: Packet, t: float) -> None:
        route = self.fresh_source_route(node, pkt.dst, t)
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
        rreq = self.control_packet(
            RREQ, node, BROADCAST, t, subject=dst, rreq_id=rid, route=(node,)
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

    # -- packet handling --------------------------------------------------------------

    def on_packet(self, node: int, pkt: Packet, t: float) -> None:
        kind = pkt.kind
        if kind == DATA:
            self._forward_data(node, pkt, t)
        elif kind == RREQ:
            self._handle_rreq(node, pkt, t)
        elif kind == RREP:
            self._handle_rrep(node, pkt, t)
        elif kind == RERR:
            self._handle_rerr(node, pkt, t)

    def _handle_rreq(self, node: int, pkt: Packet, t: float) -> None:
        if node == pkt.subject:
            # answer every copy that arrives: each one carries a distinct route
            route = pkt.route + (node,)
            rrep = self.control_packet(
                RREP, node, pkt.origin, t, route=route, route_idx=len(route) - 1
            )
            self.engine.unicast(node, route[-2], rrep.clone(route_idx=len(route) - 2), t)
            return
        key = (pkt.origin, pkt.rreq_id)
        if key in self.rreq_seen[node] or node in pkt.route:
            return
        self.rreq_seen[node].add(key)
        cached = self.cached_route(node, pkt.subject, t)
        if cached is not None and not any(hop in pkt.route for hop in cached[1:]):
            # answer from cache with the (possibly stale) suffix through us
            route = pkt.route + cached
            rrep = self.control_packet(
                RREP, node, pkt.origin, t, route=route, route_idx=len(pkt.route) - 1
            )
            self.engine.unicast(node, pkt.route[-1], rrep, t)
            return
        self.engine.broadcast(
            node, pkt.clone(route=pkt.route + (node,), hop_count=pkt.hop_count + 1), t
        )

    def _handle_rrep(self, node: int, pkt: Packet, t: float) -> None:
        route = pkt.route
        if node == pkt.dst:
            self._cache_route(node, route, t)
            dst = route[-1]
            pend = self.pending[node].pop(dst, None)
            if pend is not None:
                use = self.fresh_source_route(node, dst, t)
                if use is not None:
                    limit = self.cfg.send_buffer_timeout_s
                    for data_pkt in pend.buffer:
                        if t - data_pkt.created <= limit:
                            self.engine.unicast(node, use[1], data_pkt.clone(route=use, route_idx=0), t)
            return
        idx = pkt.route_idx
        if idx > 0:
            # relaying a reply teaches us the suffix from here to the destination
            self._cache_route(node, route[idx:], t)
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

    def on_unicast_fail(self, sender: int, receiver: int, pkt: Packet, t: float) -> None:
        if pkt.kind != DATA:
            return
        link = (sender, receiver)
        self._purge_link(sender, link, t)
        if sender == pkt.origin:
            return  # the source sees the break directly; next send re-routes
        route = pkt.route
        idx = route.index(sender)
        rerr = self.control_packet(
            RERR, sender, pkt.origin, t, broken_link=link, route=route, route_idx=idx
        )
        self.engine.unicast(sender, route[idx - 1], rerr.clone(route_idx=idx - 1), t)

    def _handle_rerr(self, node: int, pkt: Packet, t: float) -> None:
        self._purge_link(node, pkt.broken_link, t)
        idx = pkt.route_idx
        if node != pkt.dst and idx > 0:
            self.engine.unicast(node, pkt.route[idx - 1], pkt.clone(route_idx=idx - 1), t)
