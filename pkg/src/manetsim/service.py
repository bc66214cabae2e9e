"""HTTP surface over the simulator: single runs, experiment sweeps, presets."""

import io

from fastapi import FastAPI, HTTPException

from . import runner
from .schemas import (
    ExperimentInfo,
    RunRequest,
    RunResponse,
    ScenarioConfig,
    SweepResponse,
    SweepSpec,
)


def create_app() -> FastAPI:
    app = FastAPI(title="manetsim", version="0.1.0")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/presets")
    def presets() -> dict[str, ScenarioConfig]:
        return {name: runner.preset_config(name) for name in runner.PRESETS}

    @app.get("/experiments")
    def experiments() -> list[ExperimentInfo]:
        return [
            ExperimentInfo(
                name=e.name,
                param_name=e.param,
                metric=e.metric,
                protocols=list(e.protocols),
                values={preset: list(vals) for preset, vals in e.values.items()},
            )
            for e in runner.EXPERIMENTS.values()
        ]

    @app.post("/run")
    def run(req: RunRequest) -> RunResponse:
        trace_buf = io.StringIO() if req.include_trace else None
        report = runner.run_scenario(req.config, trace=trace_buf)
        return RunResponse(
            report=report,
            csv_row=runner.report_csv_row(req.config, report),
            trace=trace_buf.getvalue() if trace_buf is not None else None,
        )

    @app.post("/sweep")
    def sweep(spec: SweepSpec) -> SweepResponse:
        try:
            rows = runner.run_sweep(spec)
        except KeyError as exc:
            raise HTTPException(status_code=422, detail=f"unknown name: {exc}") from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SweepResponse(rows=rows, csv=runner.rows_to_csv(rows))

    return app


app = create_app()
