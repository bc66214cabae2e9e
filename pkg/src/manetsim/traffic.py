"""CBR traffic pattern: a seeded fraction of nodes send fixed-rate flows."""

import random
from dataclasses import dataclass

from .schemas import ScenarioConfig


@dataclass(slots=True)
class CbrFlow:
    source: int
    destination: int
    rate: float  # packets per second
    packet_size: int
    start: float
    end: float


def generate_flows(cfg: ScenarioConfig, rng: random.Random) -> list[CbrFlow]:
    """round(cbr_fraction * n) flows with distinct sources, random destinations."""
    if cfg.n_nodes < 2:
        raise ValueError("CBR traffic needs at least 2 nodes")
    n_flows = round(cfg.cbr_fraction * cfg.n_nodes)
    if n_flows == 0:
        return []
    sources = rng.sample(range(cfg.n_nodes), n_flows)
    flows = []
    for src in sources:
        dst = rng.randrange(cfg.n_nodes - 1)
        if dst >= src:
            dst += 1
        flows.append(
            CbrFlow(
                source=src,
                destination=dst,
                rate=cfg.cbr_rate_pps,
                packet_size=cfg.data_bytes,
                start=0.0,
                end=cfg.duration_s,
            )
        )
    return flows
