"""Packet record shared by all protocols: a tagged union over `kind`."""

from dataclasses import dataclass, replace
from typing import Optional

from .geometry import Position

# Packet kinds
DATA = "DATA"
BEACON = "BEACON"
POS_REQ = "PosReq"
ID_RP = "IDRp"
DST_POS_REQ = "DstPosReq"
DST_ID_RP = "DstIDRp"
RREQ = "RREQ"
RREP = "RREP"
RERR = "RERR"
HELLO = "HELLO"
LAR_RREQ = "LAR_RREQ"
LAR_RREP = "LAR_RREP"

CONTROL_KINDS = frozenset(
    {BEACON, POS_REQ, ID_RP, DST_POS_REQ, DST_ID_RP, RREQ, RREP, RERR, HELLO, LAR_RREQ, LAR_RREP}
)

# Entity id of the base station (mobile nodes are 0..n-1)
BS_ID = -1

PacketId = tuple[int, int]
Rect = tuple[float, float, float, float]  # x_min, x_max, y_min, y_max


@dataclass(slots=True)
class Packet:
    kind: str
    origin: int
    dst: int  # receiver entity; BROADCAST for flooded packets
    pid: PacketId
    size: int
    created: float
    hop_count: int = 0
    transmitter: int = 0  # last hop, rewritten per transmission

    # DATA under the sector protocol
    to_bs: bool = False
    dest_position: Optional[Position] = None
    ref_dist_sq: float = 0.0  # squared forwarding threshold distance to dest_position

    # position maintenance / destination queries
    subject: int = 0  # the node a query/reply/error is about
    position: Optional[Position] = None
    area: int = 0
    same_area: bool = False
    unreachable: bool = False

    # on-demand route discovery
    rreq_id: int = 0
    origin_seq: int = 0
    dst_seq: int = 0
    hops_from_dst: int = 0
    route: tuple[int, ...] = ()
    route_idx: int = 0
    request_zone: Optional[Rect] = None
    prev_dist: float = 0.0  # LAR scheme 2 running distance
    broken_link: tuple[int, int] = (0, 0)
    failed_pid: Optional[PacketId] = None
    subjects: tuple[int, ...] = ()  # route-error destination list

    def clone(self, **changes) -> "Packet":
        return replace(self, **changes)


BROADCAST = -2
