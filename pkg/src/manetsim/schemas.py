"""Pydantic models shared by the core runner, the HTTP service, and the CLI."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

ProtocolName = Literal["EELAR", "LAR1", "LAR2", "AODV", "DSR"]

ExperimentName = Literal[
    "overhead-vs-speed",
    "delivery-vs-speed",
    "overhead-vs-n",
    "delivery-vs-n",
    "overhead-vs-areas",
]

PresetName = Literal["table2", "desk"]


class ScenarioConfig(BaseModel):
    """One simulation run. Defaults are the full-scale reference settings."""

    model_config = ConfigDict(extra="forbid")

    duration_s: float = Field(500.0, ge=0.0)
    area_w_m: float = Field(1500.0, gt=0.0)
    area_h_m: float = Field(1500.0, gt=0.0)
    n_nodes: int = Field(100, ge=0)
    tx_range_m: float = Field(250.0, gt=0.0)
    data_bytes: int = Field(512, gt=0)
    control_bytes: int = Field(64, gt=0)
    cbr_fraction: float = Field(0.20, ge=0.0, le=1.0)
    cbr_rate_pps: float = Field(2.0, gt=0.0)

    # Mobility: a single speed gives the degenerate interval (every leg at
    # exactly that speed); min/max override it for a uniform interval.
    speed_mps: float = Field(15.0, ge=0.0)
    speed_min_mps: Optional[float] = Field(None, ge=0.0)
    speed_max_mps: Optional[float] = Field(None, ge=0.0)
    pause_min_s: float = Field(0.0, ge=0.0)
    pause_max_s: float = Field(3.0, ge=0.0)

    protocol: ProtocolName = "EELAR"
    n_areas: int = Field(6, ge=1)
    seed: int = 1

    # Radio
    per_hop_latency_s: float = Field(0.002, ge=0.0)
    loss_probability: float = Field(0.0, ge=0.0, le=1.0)

    # Base-station position maintenance
    beacon_period_s: float = Field(1.0, gt=0.0)
    staleness_s: float = Field(2.0, gt=0.0)
    unreachable_timeout_s: Optional[float] = Field(None, gt=0.0)
    dst_cache_ttl_s: Optional[float] = Field(None, gt=0.0)
    dst_drift_budget_m: float = Field(100.0, gt=0.0)
    forward_rule: Literal["source-distance", "prev-hop-distance"] = "source-distance"
    bs_relay: Literal["direct", "flood-dest-area"] = "direct"

    # Baseline protocol knobs
    aodv_discovery_timeout_s: float = Field(2.0, gt=0.0)
    aodv_retries: int = Field(2, ge=0)
    send_buffer_timeout_s: float = Field(2.0, gt=0.0)
    route_lifetime_s: float = Field(5.0, gt=0.0)
    lar_delta_m: float = Field(0.0, ge=0.0)
    # expected-zone speed bound: a deployment constant (the fastest node the
    # network is provisioned for), not the scenario's current average
    lar_vmax_mps: Optional[float] = Field(30.0, ge=0.0)
    hello_enabled: bool = False
    hello_period_s: float = Field(1.0, gt=0.0)
    dsr_cache_size: int = Field(3, ge=1)
    dsr_cache_lifetime_s: float = Field(8.0, gt=0.0)

    # Optional per-node energy counters
    energy_enabled: bool = False
    energy_tx_j: float = Field(0.0008, ge=0.0)
    energy_rx_j: float = Field(0.0003, ge=0.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ScenarioConfig":
        lo, hi = self.speed_range
        if lo > hi:
            raise ValueError("speed_min_mps must not exceed speed_max_mps")
        if self.pause_min_s > self.pause_max_s:
            raise ValueError("pause_min_s must not exceed pause_max_s")
        return self

    @property
    def speed_range(self) -> tuple[float, float]:
        lo = self.speed_mps if self.speed_min_mps is None else self.speed_min_mps
        hi = self.speed_mps if self.speed_max_mps is None else self.speed_max_mps
        return lo, hi

    @property
    def unreachable_timeout(self) -> float:
        if self.unreachable_timeout_s is not None:
            return self.unreachable_timeout_s
        return 3.0 * self.beacon_period_s

    @property
    def dst_cache_ttl(self) -> float:
        """How long a source may reuse a destination reply.

        Unless pinned, the window is drift-bounded: the cached position is
        trusted only while the destination cannot have moved farther than
        the drift budget.
        """
        if self.dst_cache_ttl_s is not None:
            return self.dst_cache_ttl_s
        vmax = self.speed_range[1]
        if vmax <= 0.0:
            return float("inf")
        return self.dst_drift_budget_m / vmax

    @property
    def lar_vmax(self) -> float:
        return self.speed_range[1] if self.lar_vmax_mps is None else self.lar_vmax_mps


class FlowStats(BaseModel):
    source: int
    destination: int
    sent: int
    delivered: int


class EnergyStats(BaseModel):
    tx_count: dict[int, int]
    rx_count: dict[int, int]
    joules: dict[int, float]


class MetricsReport(BaseModel):
    """Counters and derived ratios for one finished run."""

    data_sent: int
    data_delivered: int
    control_sent: dict[str, int]
    control_total: int
    # None means undefined (no delivered data packets); serialized as NA in CSV
    control_overhead: Optional[float]
    delivery_ratio: Optional[float]
    flows: list[FlowStats]
    energy: Optional[EnergyStats] = None


class SweepSpec(BaseModel):
    """A named experiment: one protocol set swept over one parameter."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    preset: PresetName = "desk"
    protocols: Optional[list[ProtocolName]] = None
    values: Optional[list[float]] = None
    seeds: list[int] = Field(default=[1, 2, 3], min_length=1)
    workers: int = Field(1, ge=1)
    overrides: dict[str, float] = Field(default_factory=dict)


class SweepRow(BaseModel):
    experiment: str
    protocol: str
    param_name: str
    param_value: float
    seed: str  # seed number or the literal "mean"
    data_sent: float
    data_delivered: float
    control_total: float
    control_overhead: Optional[float]
    delivery_ratio: Optional[float]


class RunRequest(BaseModel):
    config: ScenarioConfig
    include_trace: bool = False


class RunResponse(BaseModel):
    report: MetricsReport
    csv_row: str
    trace: Optional[str] = None


class SweepResponse(BaseModel):
    rows: list[SweepRow]
    csv: str


class ExperimentInfo(BaseModel):
    name: str
    param_name: str
    metric: str
    protocols: list[str]
    values: dict[str, list[float]]  # preset name -> default swept values
