"""Conservation checks over packet traces.

A trace line is tab-separated:
time, event-kind, packet-kind, origin, destination, current-node, hop_count, packet_id
"""

from dataclasses import dataclass, field


class TraceViolation(AssertionError):
    pass


@dataclass
class TraceSummary:
    data_sent: int = 0
    data_delivered: int = 0
    per_flow_sent: dict = field(default_factory=dict)
    per_flow_delivered: dict = field(default_factory=dict)


def check_trace(lines) -> TraceSummary:
    """Verify counter conservation; raises TraceViolation on any breach."""
    origin_time: dict[str, float] = {}
    flow_of: dict[str, tuple[str, str]] = {}
    delivered: set[str] = set()
    summary = TraceSummary()
    last_t = 0.0

    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 8:
            raise TraceViolation(f"line {lineno}: expected 8 fields, got {len(parts)}")
        t_s, event, kind, origin, dst, current, _hop, pid = parts
        t = float(t_s)
        if t < last_t:
            raise TraceViolation(f"line {lineno}: time went backwards ({t} < {last_t})")
        last_t = t

        if event == "traffic-tick":
            if pid in origin_time:
                raise TraceViolation(f"line {lineno}: duplicate origination of {pid}")
            origin_time[pid] = t
            flow_of[pid] = (origin, dst)
            summary.data_sent += 1
            key = (origin, dst)
            summary.per_flow_sent[key] = summary.per_flow_sent.get(key, 0) + 1
        elif event == "packet-arrival" and kind == "DATA":
            sent_at = origin_time.get(pid)
            if sent_at is None:
                raise TraceViolation(f"line {lineno}: DATA {pid} arrived but was never originated")
            if t < sent_at:
                raise TraceViolation(f"line {lineno}: DATA {pid} arrived before its origination")
            if current == dst and pid not in delivered:
                # later duplicate copies reaching the destination do not count
                delivered.add(pid)
                summary.data_delivered += 1
                key = flow_of[pid]
                summary.per_flow_delivered[key] = summary.per_flow_delivered.get(key, 0) + 1

    if summary.data_delivered > summary.data_sent:
        raise TraceViolation("delivered more data packets than were sent")
    if sum(summary.per_flow_sent.values()) != summary.data_sent:
        raise TraceViolation("per-flow sent counts do not add up to the global count")
    return summary


def check_trace_matches_report(summary: TraceSummary, data_sent: int, data_delivered: int) -> None:
    if summary.data_sent != data_sent:
        raise TraceViolation(
            f"trace says {summary.data_sent} sent, report says {data_sent}"
        )
    if summary.data_delivered != data_delivered:
        raise TraceViolation(
            f"trace says {summary.data_delivered} delivered, report says {data_delivered}"
        )
