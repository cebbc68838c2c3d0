"""Command-line client for the ropesweep service.

Each subcommand reads knot/isotopy JSON files, posts the payload to the
service, and prints the JSON response.  By default the requests run
against an in-process instance of the app, so no server is needed; pass
``--server URL`` to talk to a running instance instead.

Exit codes: 0 success, 2 validation error, 3 numeric failure.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

VALIDATION_EXIT = 2
NUMERIC_EXIT = 3


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service.app import app

    # sync bridge onto the in-process ASGI app; no server required
    return TestClient(app)


def _fail(message: str, code: int):
    click.echo(message, err=True)
    sys.exit(code)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        _fail(f"file not found: {path}", VALIDATION_EXIT)
    except json.JSONDecodeError as exc:
        _fail(f"invalid JSON in {path}: {exc}", VALIDATION_EXIT)


def _post(server: str | None, endpoint: str, payload: dict):
    try:
        with _client(server) as client:
            response = client.post(endpoint, json=payload)
    except httpx.HTTPError as exc:
        _fail(f"request failed: {exc}", NUMERIC_EXIT)
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail", response.text)
    except Exception:
        detail = response.text
    code = VALIDATION_EXIT if response.status_code in (400, 422) else NUMERIC_EXIT
    _fail(f"error ({response.status_code}): {detail}", code)


def _emit(data):
    click.echo(json.dumps(data, indent=2))


def _config_payload(lam, keyframes, time_samples, seed):
    return {
        "lambda": lam,
        "keyframe_count": keyframes,
        "time_samples": time_samples,
        "seed": seed,
    }


@click.group()
@click.option("--server", default=None, envvar="ROPESWEEP_SERVER",
              help="Base URL of a running service; defaults to in-process.")
@click.pass_context
def main(ctx, server):
    """Geometric quantities of thick polygonal knots and their isotopies."""
    ctx.obj = server


@main.command()
@click.argument("knot", type=click.Path())
@click.pass_obj
def thickness(server, knot):
    """Thickness breakdown of a knot."""
    _emit(_post(server, "/thickness", {"knot": _load_json(knot)}))


@main.command()
@click.argument("knot", type=click.Path())
@click.pass_obj
def rop(server, knot):
    """Ropelength (length / thickness) of a knot."""
    _emit(_post(server, "/rop", {"knot": _load_json(knot)}))


@main.command()
@click.argument("isotopy", type=click.Path())
@click.option("--csv", "as_csv", is_flag=True, help="Per-interval table instead of JSON.")
@click.pass_obj
def sweep(server, isotopy, as_csv):
    """Swept area of an isotopy path."""
    data = _post(server, "/sweep", {"isotopy": _load_json(isotopy)})
    if as_csv:
        click.echo("interval,area")
        for k, value in enumerate(data["per_interval"]):
            click.echo(f"{k},{value!r}")
        click.echo(f"total,{data['total']!r}")
    else:
        _emit(data)


@main.command()
@click.argument("knot0", type=click.Path())
@click.argument("knot1", type=click.Path())
@click.option("--plane", nargs=3, type=float, default=None,
              help="Plane normal nx ny nz for the single-plane bound.")
@click.pass_obj
def bound(server, knot0, knot1, plane):
    """Calibration lower bounds between two knots."""
    payload = {"knot0": _load_json(knot0), "knot1": _load_json(knot1)}
    if plane:
        payload["plane"] = list(plane)
    _emit(_post(server, "/bound", payload))


@main.command()
@click.argument("isotopy", type=click.Path())
@click.option("--lambda", "lam", type=float, required=True, help="Length level.")
@click.option("--time-samples", type=int, default=64, show_default=True)
@click.pass_obj
def admissible(server, isotopy, lam, time_samples):
    """Check thickness/length admissibility of a path at a level."""
    payload = {
        "isotopy": _load_json(isotopy),
        "lambda": lam,
        "time_samples": time_samples,
    }
    _emit(_post(server, "/admissible", payload))


@main.command()
@click.argument("knot0", type=click.Path())
@click.argument("knot1", type=click.Path())
@click.option("--lambda", "lam", type=float, required=True, help="Length level.")
@click.option("--keyframes", type=int, default=16, show_default=True)
@click.option("--time-samples", type=int, default=33, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def optimize(server, knot0, knot1, lam, keyframes, time_samples, seed):
    """Upper bound on the swept-area cost between two knots."""
    payload = {
        "knot0": _load_json(knot0),
        "knot1": _load_json(knot1),
        "config": _config_payload(lam, keyframes, time_samples, seed),
    }
    _emit(_post(server, "/optimize", payload))


@main.command("merge-scale")
@click.argument("knot0", type=click.Path())
@click.argument("knot1", type=click.Path())
@click.option("--lambda-lo", type=float, required=True)
@click.option("--lambda-hi", type=float, required=True)
@click.option("--keyframes", type=int, default=16, show_default=True)
@click.option("--time-samples", type=int, default=33, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def merge_scale(server, knot0, knot1, lambda_lo, lambda_hi, keyframes, time_samples, seed):
    """Bisected upper bound on the merge scale of two knots."""
    payload = {
        "knot0": _load_json(knot0),
        "knot1": _load_json(knot1),
        "lambda_lo": lambda_lo,
        "lambda_hi": lambda_hi,
        "config": _config_payload(lambda_hi, keyframes, time_samples, seed),
    }
    _emit(_post(server, "/merge-scale", payload))


@main.command("lambda-sweep")
@click.argument("knot0", type=click.Path())
@click.argument("knot1", type=click.Path())
@click.option("--levels", required=True,
              help="Comma-separated increasing length levels.")
@click.option("--keyframes", type=int, default=16, show_default=True)
@click.option("--time-samples", type=int, default=33, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "as_csv", is_flag=True, help="Level table instead of JSON.")
@click.pass_obj
def lambda_sweep(server, knot0, knot1, levels, keyframes, time_samples, seed, as_csv):
    """Warm-started upper bounds over increasing levels."""
    try:
        level_values = [float(x) for x in levels.split(",") if x.strip()]
    except ValueError:
        _fail(f"could not parse levels {levels!r}", VALIDATION_EXIT)
    if not level_values:
        _fail("need at least one level", VALIDATION_EXIT)
    payload = {
        "knot0": _load_json(knot0),
        "knot1": _load_json(knot1),
        "levels": level_values,
        "config": _config_payload(max(level_values), keyframes, time_samples, seed),
    }
    data = _post(server, "/lambda-sweep", payload)
    if as_csv:
        click.echo("lambda,upper_bound")
        for row in data["results"]:
            upper = row["upper_bound"]
            click.echo(f"{row['level_lambda']!r},{'inf' if upper is None else repr(upper)}")
    else:
        _emit(data)


@main.command()
@click.argument("knot", type=click.Path())
@click.option("--u", nargs=3, type=float, required=True, help="Projection direction.")
@click.pass_obj
def diagram(server, knot, u):
    """Gauss code and crossings of a projected knot."""
    _emit(_post(server, "/diagram", {"knot": _load_json(knot), "u": list(u)}))


@main.command()
@click.argument("isotopies", nargs=-1, required=True, type=click.Path())
@click.option("--u", nargs=3, type=float, required=True, help="Projection direction.")
@click.option("--lambda", "lam", type=float, default=None, help="Level recorded on the graph.")
@click.option("--time-resolution", type=int, default=256, show_default=True)
@click.pass_obj
def graph(server, isotopies, u, lam, time_resolution):
    """Swept-area weighted transition graph from isotopy files."""
    payload = {
        "isotopies": [_load_json(p) for p in isotopies],
        "u": list(u),
        "lambda": lam,
        "time_resolution": time_resolution,
    }
    _emit(_post(server, "/graph", payload))


@main.command()
@click.argument("graph_file", type=click.Path())
@click.argument("code0")
@click.argument("code1")
@click.pass_obj
def ddist(server, graph_file, code0, code1):
    """Shortest weighted path between diagram signatures."""
    payload = {"graph": _load_json(graph_file), "code0": code0, "code1": code1}
    _emit(_post(server, "/ddist", payload))


@main.command()
@click.argument("family")
@click.option("--param", "-p", multiple=True, help="Family parameter as name=value.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def generate(server, family, param, seed):
    """Emit a corpus knot as JSON (one knot per file)."""
    parameters = {}
    for item in param:
        if "=" not in item:
            _fail(f"parameter {item!r} is not name=value", VALIDATION_EXIT)
        name, _, value = item.partition("=")
        try:
            parameters[name.strip()] = float(value)
        except ValueError:
            _fail(f"parameter {item!r} has a non-numeric value", VALIDATION_EXIT)
    payload = {"family": family, "parameters": parameters, "seed": seed}
    _emit(_post(server, "/generate", payload))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
