"""Single runs, named experiment sweeps, CSV assembly, and plot series."""

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional

from .engine import Engine
from .protocols import build_protocol
from .schemas import MetricsReport, ScenarioConfig, SweepRow, SweepSpec
from .traffic import generate_flows

CSV_COLUMNS = [
    "experiment",
    "protocol",
    "param_name",
    "param_value",
    "seed",
    "data_sent",
    "data_delivered",
    "control_total",
    "control_overhead",
    "delivery_ratio",
]

DEFAULT_PROTOCOLS = ["EELAR", "LAR1", "AODV", "DSR"]

PRESETS: dict[str, dict] = {
    # Reference settings: 1500x1500 m, 500 s, beacon every second.
    "table2": {},
    # Small fast variant for CI-sized experiments. The beacon period is
    # stretched so position-maintenance traffic keeps roughly the reference
    # ratio to data traffic (25 nodes instead of 100, 1/5 of the beacon rate).
    "desk": {
        "duration_s": 100.0,
        "area_w_m": 500.0,
        "area_h_m": 500.0,
        "n_nodes": 25,
        "beacon_period_s": 5.0,
    },
}


@dataclass(frozen=True)
class Experiment:
    name: str
    param: str
    metric: str
    protocols: tuple[str, ...]
    values: dict[str, tuple[float, ...]]  # preset -> swept values
    overrides: dict[str, dict]  # preset -> extra config fields


EXPERIMENTS: dict[str, Experiment] = {}


def _experiment(name, param, metric, protocols, values, overrides=None):
    EXPERIMENTS[name] = Experiment(
        name, param, metric, tuple(protocols), values, overrides or {"table2": {}, "desk": {}}
    )


_SPEEDS = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0)

_experiment(
    "overhead-vs-speed",
    "speed_mps",
    "control_overhead",
    DEFAULT_PROTOCOLS,
    {"table2": _SPEEDS, "desk": _SPEEDS},
)
_experiment(
    "delivery-vs-speed",
    "speed_mps",
    "delivery_ratio",
    DEFAULT_PROTOCOLS,
    {"table2": _SPEEDS, "desk": _SPEEDS},
)
_experiment(
    "overhead-vs-n",
    "n_nodes",
    "control_overhead",
    DEFAULT_PROTOCOLS,
    {"table2": (50, 100, 150, 200, 250), "desk": (25, 50, 75, 100, 125)},
    {"table2": {"speed_mps": 15.0}, "desk": {"speed_mps": 15.0}},
)
_experiment(
    "delivery-vs-n",
    "n_nodes",
    "delivery_ratio",
    DEFAULT_PROTOCOLS,
    {"table2": (50, 100, 150, 200, 250), "desk": (25, 50, 75, 100, 125)},
    {"table2": {"speed_mps": 15.0}, "desk": {"speed_mps": 15.0}},
)
# The areas sweep runs at the largest scale of each preset family so the
# sector geometry has room to matter (the reference experiment used the
# densest network for it).
_experiment(
    "overhead-vs-areas",
    "n_areas",
    "control_overhead",
    ["EELAR"],
    {"table2": tuple(range(1, 21)), "desk": (1, 2, 4, 6, 8, 12, 16, 20)},
    {
        "table2": {"n_nodes": 250, "speed_mps": 15.0},
        "desk": {"area_w_m": 1200.0, "area_h_m": 1200.0, "n_nodes": 30, "speed_mps": 15.0},
    },
)

_INT_PARAMS = {"n_nodes", "n_areas"}


def run_scenario(cfg: ScenarioConfig, trace: Optional[IO[str]] = None) -> MetricsReport:
    """One deterministic run; same config and seed always give the same report."""
    engine = Engine(cfg, trace)
    protocol = build_protocol(cfg.protocol, engine)
    engine.protocol = protocol
    if cfg.duration_s > 0:
        protocol.start()
        flows = generate_flows(cfg, random.Random(f"{cfg.seed}:traffic"))
        for flow in flows:
            engine.start_flow(flow.source, flow.destination, flow.start, 1.0 / flow.rate)
    engine.run_until(cfg.duration_s)
    return engine.counters.finalize()


def preset_config(name: str, **overrides) -> ScenarioConfig:
    return ScenarioConfig(**{**PRESETS[name], **overrides})


def sweep_configs(spec: SweepSpec) -> list[tuple[str, float, int, ScenarioConfig]]:
    """Expanded (protocol, value, seed, config) list in deterministic order."""
    exp = EXPERIMENTS[spec.experiment]
    protocols = list(spec.protocols) if spec.protocols else list(exp.protocols)
    if exp.param == "n_areas" and protocols != ["EELAR"]:
        raise ValueError("the sector-count sweep runs the sector protocol only")
    values = list(spec.values) if spec.values else list(exp.values[spec.preset])
    base = {**PRESETS[spec.preset], **exp.overrides[spec.preset], **spec.overrides}
    out = []
    for protocol in protocols:
        for value in values:
            v = int(value) if exp.param in _INT_PARAMS else float(value)
            for seed in spec.seeds:
                cfg = ScenarioConfig(
                    **{**base, exp.param: v, "protocol": protocol, "seed": seed}
                )
                out.append((protocol, float(v), seed, cfg))
    return out


def _run_job(cfg: ScenarioConfig) -> MetricsReport:
    return run_scenario(cfg)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """All raw rows plus one mean row per (protocol, param value)."""
    exp = EXPERIMENTS[spec.experiment]
    jobs = sweep_configs(spec)
    configs = [cfg for _, _, _, cfg in jobs]
    if spec.workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            reports = list(pool.map(_run_job, configs, chunksize=1))
    else:
        reports = [run_scenario(cfg) for cfg in configs]

    rows = []
    groups: dict[tuple[str, float], list[MetricsReport]] = {}
    group_order = []
    for (protocol, value, seed, _), report in zip(jobs, reports):
        rows.append(
            SweepRow(
                experiment=spec.experiment,
                protocol=protocol,
                param_name=exp.param,
                param_value=value,
                seed=str(seed),
                data_sent=report.data_sent,
                data_delivered=report.data_delivered,
                control_total=report.control_total,
                control_overhead=report.control_overhead,
                delivery_ratio=report.delivery_ratio,
            )
        )
        key = (protocol, value)
        if key not in groups:
            groups[key] = []
            group_order.append(key)
        groups[key].append(report)

    for protocol, value in group_order:
        members = groups[(protocol, value)]
        rows.append(
            SweepRow(
                experiment=spec.experiment,
                protocol=protocol,
                param_name=exp.param,
                param_value=value,
                seed="mean",
                data_sent=_mean([r.data_sent for r in members]),
                data_delivered=_mean([r.data_delivered for r in members]),
                control_total=_mean([r.control_total for r in members]),
                control_overhead=_mean_opt([r.control_overhead for r in members]),
                delivery_ratio=_mean_opt([r.delivery_ratio for r in members]),
            )
        )
    return rows


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs)


def _mean_opt(xs: list[Optional[float]]) -> Optional[float]:
    if any(x is None for x in xs):
        return None
    return _mean(xs)


def _fmt_count(x: float) -> str:
    if x is None:
        return "NA"
    if float(x) == int(x):
        return str(int(x))
    return f"{x:.6f}"


def _fmt_ratio(x: Optional[float]) -> str:
    return "NA" if x is None else f"{x:.6f}"


def row_to_csv(row: SweepRow) -> str:
    return ",".join(
        [
            row.experiment,
            row.protocol,
            row.param_name,
            _fmt_count(row.param_value),
            row.seed,
            _fmt_count(row.data_sent),
            _fmt_count(row.data_delivered),
            _fmt_count(row.control_total),
            _fmt_ratio(row.control_overhead),
            _fmt_ratio(row.delivery_ratio),
        ]
    )


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(row_to_csv(r) for r in rows)
    return "\n".join(lines) + "\n"


def report_csv_row(cfg: ScenarioConfig, report: MetricsReport) -> str:
    """Single-run CSV line using the sweep schema (param column carries the seed)."""
    row = SweepRow(
        experiment="run",
        protocol=cfg.protocol,
        param_name="seed",
        param_value=float(cfg.seed),
        seed=str(cfg.seed),
        data_sent=report.data_sent,
        data_delivered=report.data_delivered,
        control_total=report.control_total,
        control_overhead=report.control_overhead,
        delivery_ratio=report.delivery_ratio,
    )
    return ",".join(CSV_COLUMNS) + "\n" + row_to_csv(row) + "\n"


def mean_rows(rows: list[SweepRow]) -> list[SweepRow]:
    return [r for r in rows if r.seed == "mean"]


def emit_plot_data(rows: list[SweepRow], experiment: str, outdir: Path) -> list[Path]:
    """One two-column (param, mean metric) series file per protocol."""
    exp = EXPERIMENTS[experiment]
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    series: dict[str, list[tuple[float, Optional[float]]]] = {}
    for row in mean_rows(rows):
        series.setdefault(row.protocol, []).append(
            (row.param_value, getattr(row, exp.metric))
        )
    written = []
    for protocol in sorted(series):
        path = outdir / f"{experiment}.{protocol}.tsv"
        points = sorted(series[protocol])
        body = "".join(f"{_fmt_count(p)}\t{_fmt_ratio(v)}\n" for p, v in points)
        path.write_text(body)
        written.append(path)
    return written
