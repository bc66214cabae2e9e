import io

import pytest

from manetsim import runner
from manetsim.tracecheck import TraceViolation, check_trace, check_trace_matches_report


def run_with_trace(**kw):
    buf = io.StringIO()
    cfg = runner.preset_config("desk", **kw)
    report = runner.run_scenario(cfg, trace=buf)
    return report, buf.getvalue().splitlines()


@pytest.mark.parametrize("protocol", ["EELAR", "LAR1", "AODV", "DSR"])
def test_real_runs_conserve(protocol):
    report, lines = run_with_trace(protocol=protocol, seed=2, duration_s=30.0)
    summary = check_trace(lines)
    check_trace_matches_report(summary, report.data_sent, report.data_delivered)
    assert summary.data_delivered <= summary.data_sent
    assert sum(summary.per_flow_sent.values()) == summary.data_sent


def test_duplicate_arrivals_count_once():
    report, lines = run_with_trace(protocol="EELAR", seed=1, duration_s=10.0)
    delivered = [
        l for l in lines
        if l.split("\t")[1] == "packet-arrival" and l.split("\t")[2] == "DATA"
        and l.split("\t")[4] == l.split("\t")[5]
    ]
    # a late duplicate copy of an already-delivered packet must not add a delivery
    parts = delivered[0].split("\t")
    parts[0] = f"{99.0:.6f}"
    summary = check_trace(lines + ["\t".join(parts)])
    assert summary.data_delivered == report.data_delivered


def test_unsent_arrival_detected():
    _, lines = run_with_trace(protocol="EELAR", seed=1, duration_s=10.0)
    forged = lines + [f"{99.0:.6f}\tpacket-arrival\tDATA\t0\t1\t1\t0\t0:9999"]
    with pytest.raises(TraceViolation, match="never originated"):
        check_trace(forged)


def test_counts_match_report_guard():
    report, lines = run_with_trace(protocol="AODV", seed=3, duration_s=10.0)
    summary = check_trace(lines)
    with pytest.raises(TraceViolation):
        check_trace_matches_report(summary, report.data_sent + 1, report.data_delivered)
