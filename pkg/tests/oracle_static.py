"""Reachability oracles and the exhaustive static-topology comparison.

Every scenario is a subset of a 3x3 grid of candidate positions (200 m
spacing, so only orthogonal grid neighbors are within the 250 m radio
range), zero mobility, zero loss. Each protocol's delivery of a single
probe packet must agree with its reachability oracle.
"""

import itertools
from collections import deque

from conftest import build_static
from manetsim.geometry import Position, area_of_position, distance

GRID = [(50.0 + 200.0 * (i % 3), 50.0 + 200.0 * (i // 3)) for i in range(9)]
CENTER = Position(250.0, 250.0)
RANGE = 250.0
K = 6


def unit_disk_edges(positions):
    n = len(positions)
    adj = {i: [] for i in range(n)}
    for a in range(n):
        for b in range(a + 1, n):
            if distance(Position(*positions[a]), Position(*positions[b])) <= RANGE:
                adj[a].append(b)
                adj[b].append(a)
    return adj


def bfs_reachable(adj, src, dst, allowed=None):
    if allowed is not None and (src not in allowed or dst not in allowed):
        return False
    seen = {src}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        if cur == dst:
            return True
        for nxt in adj[cur]:
            if nxt not in seen and (allowed is None or nxt in allowed):
                seen.add(nxt)
                queue.append(nxt)
    return False


def oracle_eelar(positions, src, dst):
    s_pos, d_pos = Position(*positions[src]), Position(*positions[dst])
    same = area_of_position(CENTER, s_pos, K) == area_of_position(CENTER, d_pos, K)
    if not same:
        return True  # the base station covers all nodes
    ref = distance(s_pos, d_pos)
    allowed = {src, dst}
    for i, p in enumerate(positions):
        if distance(Position(*p), d_pos) < ref:
            allowed.add(i)
    return bfs_reachable(unit_disk_edges(positions), src, dst, allowed)


def oracle_plain_bfs(positions, src, dst):
    return bfs_reachable(unit_disk_edges(positions), src, dst)


def oracle_lar1_zone(positions, src, dst):
    # warmed location, zero speed: zone is exactly the S-D bounding box
    x0, x1 = sorted((positions[src][0], positions[dst][0]))
    y0, y1 = sorted((positions[src][1], positions[dst][1]))
    allowed = {
        i
        for i, p in enumerate(positions)
        if x0 <= p[0] <= x1 and y0 <= p[1] <= y1
    }
    return bfs_reachable(unit_disk_edges(positions), src, dst, allowed)


def simulate_delivery(positions, src, dst, protocol, warm_location):
    """One probe packet; returns True iff it reaches dst."""
    engine, proto = build_static(
        list(positions),
        protocol=protocol,
        duration_s=10.0,
        aodv_retries=0,
        lar_vmax_mps=0.0,
    )
    if protocol != "EELAR":
        engine.protocol.start()
    else:
        proto.start()
    if warm_location and protocol in ("LAR1", "LAR2"):
        proto.warm_location(src, dst, Position(*positions[dst]), 0.0)
    engine.inject_data(src, dst, 0.5)
    engine.run_until(10.0)
    return engine.counters.data_delivered == 1


CASES = [
    # (protocol, warm location cache, oracle)
    ("EELAR", False, oracle_eelar),
    ("AODV", False, oracle_plain_bfs),
    ("DSR", False, oracle_plain_bfs),
    ("LAR1", False, oracle_plain_bfs),  # no location on file: fallback flood
    ("LAR1", True, oracle_lar1_zone),
]


def enumerate_scenarios(max_exhaustive_size=5, max_size=8):
    """(positions, src, dst) triples over grid subsets.

    All ordered pairs for small subsets; a deterministic pair sample for the
    larger ones to keep the exhaustive sweep inside its time budget.
    """
    for size in range(2, max_size + 1):
        for combo in itertools.combinations(range(9), size):
            positions = tuple(GRID[i] for i in combo)
            if size <= max_exhaustive_size:
                pairs = itertools.permutations(range(size), 2)
            else:
                pairs = [(0, size - 1), (size - 1, 0), (1, size - 2), (0, 1), (2, size - 1), (size - 1, 2)]
            for src, dst in pairs:
                yield positions, src, dst


def run_comparison(scenarios):
    """Returns (checked, disagreements) across all protocols and scenarios."""
    checked = 0
    disagreements = []
    for positions, src, dst in scenarios:
        for protocol, warm, oracle in CASES:
            expected = oracle(positions, src, dst)
            actual = simulate_delivery(positions, src, dst, protocol, warm)
            checked += 1
            if actual != expected:
                disagreements.append((protocol, warm, positions, src, dst, expected, actual))
    return checked, disagreements
