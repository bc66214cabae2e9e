"""Thin command-line client for the simulation service.

All verbs go through the HTTP API: against a remote server when --url is
given, otherwise against the service mounted in-process.
"""

import json
import sys
from pathlib import Path

import click
import httpx

from .runner import EXPERIMENTS, emit_plot_data
from .schemas import ScenarioConfig, SweepRow

_CHOICES = {
    "protocol": ["EELAR", "LAR1", "LAR2", "AODV", "DSR"],
    "forward_rule": ["source-distance", "prev-hop-distance"],
    "bs_relay": ["direct", "flood-dest-area"],
}

_PRESET_CHOICE = click.Choice(["table2", "desk"])


def _client(url):
    if url:
        return httpx.Client(base_url=url, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import app

    return TestClient(app)


def _config_options(command):
    """Mirror every ScenarioConfig field as a --flag (unset flags keep defaults)."""
    for name, field in reversed(list(ScenarioConfig.model_fields.items())):
        opt = "--" + name.replace("_", "-")
        if name in _CHOICES:
            ftype = click.Choice(_CHOICES[name])
        elif field.annotation is bool:
            ftype = click.BOOL
        elif field.annotation is int:
            ftype = int
        else:
            ftype = float
        command = click.option(opt, name, type=ftype, default=None, help=f"config field {name}")(command)
    return command


def load_config_file(path: Path) -> dict:
    """Flat `key = value` document; values are JSON literals or bare strings."""
    fields = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise click.ClickException(f"{path}:{lineno}: expected key = value")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        try:
            fields[key] = json.loads(value)
        except json.JSONDecodeError:
            fields[key] = value.strip('"')
    return fields


def _build_config_fields(config_path, preset, flag_values) -> dict:
    from .runner import PRESETS

    fields = {}
    if preset:
        fields.update(PRESETS[preset])
    if config_path:
        fields.update(load_config_file(Path(config_path)))
    fields.update({k: v for k, v in flag_values.items() if v is not None})
    return fields


def _post(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        if isinstance(detail, list):
            for err in detail:
                loc = ".".join(str(p) for p in err.get("loc", []) if p != "body")
                click.echo(f"invalid config: {loc}: {err.get('msg')}", err=True)
        else:
            click.echo(f"invalid request: {detail}", err=True)
        sys.exit(2)
    resp.raise_for_status()
    return resp.json()


@click.group()
@click.option("--url", default=None, help="base URL of a running service (default: in-process)")
@click.pass_context
def main(ctx, url):
    """Discrete-event MANET routing simulator."""
    ctx.obj = url


def _run_request(ctx, config_path, preset, flags, include_trace):
    fields = _build_config_fields(config_path, preset, flags)
    with _client(ctx.obj) as client:
        return _post(client, "/run", {"config": fields, "include_trace": include_trace})


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--preset", type=_PRESET_CHOICE, default=None)
@click.option("--trace-out", type=click.Path(), default=None, help="also write a packet trace")
@click.option("--out", type=click.Path(), default=None, help="write the report JSON here")
@click.option("--csv", "as_csv", is_flag=True, help="print the one-line CSV row instead of JSON")
@_config_options
@click.pass_context
def run(ctx, config_path, preset, trace_out, out, as_csv, **flags):
    """Run a single scenario and print its metrics report."""
    data = _run_request(ctx, config_path, preset, flags, include_trace=trace_out is not None)
    if trace_out:
        Path(trace_out).write_text(data["trace"])
    body = data["csv_row"] if as_csv else json.dumps(data["report"], indent=2) + "\n"
    if out:
        Path(out).write_text(body)
    else:
        click.echo(body, nl=False)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--preset", type=_PRESET_CHOICE, default=None)
@click.option("--out", type=click.Path(), default=None, help="write the trace here (default stdout)")
@_config_options
@click.pass_context
def trace(ctx, config_path, preset, out, **flags):
    """Run a single scenario and emit its packet trace."""
    data = _run_request(ctx, config_path, preset, flags, include_trace=True)
    if out:
        Path(out).write_text(data["trace"])
    else:
        click.echo(data["trace"], nl=False)


@main.command()
@click.option("--experiment", required=True, type=click.Choice(sorted(EXPERIMENTS)))
@click.option("--preset", type=_PRESET_CHOICE, default="desk")
@click.option("--protocols", default=None, help="comma-separated protocol list")
@click.option("--values", default=None, help="comma-separated swept values")
@click.option("--seeds", default=None, help="comma-separated seeds (default 1,2,3)")
@click.option("--workers", type=int, default=1)
@click.option("--out", type=click.Path(), default=None, help="write CSV here (default stdout)")
@click.option("--plot-dir", type=click.Path(), default=None, help="write per-protocol series files")
@click.pass_context
def sweep(ctx, experiment, preset, protocols, values, seeds, workers, out, plot_dir):
    """Run a named experiment over protocols, parameter values, and seeds."""
    spec = {"experiment": experiment, "preset": preset, "workers": workers}
    if protocols:
        spec["protocols"] = [p.strip() for p in protocols.split(",")]
    if values:
        spec["values"] = [float(v) for v in values.split(",")]
    if seeds:
        spec["seeds"] = [int(s) for s in seeds.split(",")]
    with _client(ctx.obj) as client:
        data = _post(client, "/sweep", spec)
    if out:
        Path(out).write_text(data["csv"])
    else:
        click.echo(data["csv"], nl=False)
    if plot_dir:
        rows = [SweepRow(**r) for r in data["rows"]]
        for path in emit_plot_data(rows, experiment, Path(plot_dir)):
            click.echo(f"wrote {path}", err=True)


@main.command()
@click.pass_context
def experiments(ctx):
    """List the named experiments and their defaults."""
    with _client(ctx.obj) as client:
        resp = client.get("/experiments")
        resp.raise_for_status()
    click.echo(json.dumps(resp.json(), indent=2))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Serve the HTTP API."""
    import uvicorn

    uvicorn.run("manetsim.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
