"""Command-line entry point: a thin client of the HTTP service.

Subcommands build a request, send it (in-process by default, or to a
remote ``--server``), and write whatever comes back.  All computation,
validation, and formatting live behind the service boundary, so a remote
deployment and the local CLI cannot drift apart.

The environment variable ``MPBANDIT_OUT_DIR`` supplies the directory for
relative output paths.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import click
import httpx

from . import __version__
from .scenarios import PRESETS, Scenario, resolve_scenario


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # In-process ASGI transport: same request/response path as a real
    # deployment, no sockets involved.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette warns about its httpx shim
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


def _scenario_payload(spec: str) -> tuple[dict, Scenario | None]:
    """Preset names pass through by name; files are resolved client-side."""
    if spec in PRESETS:
        return {"preset": spec}, PRESETS[spec]
    try:
        scenario = resolve_scenario(spec)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    payload = {
        "name": scenario.name,
        "arms": list(scenario.arms),
        "L": scenario.plays,
    }
    if scenario.gammas is not None:
        payload["gammas"] = list(scenario.gammas)
    return payload, scenario


def _out_path(out: str) -> Path:
    path = Path(out)
    if not path.is_absolute():
        path = Path(os.environ.get("MPBANDIT_OUT_DIR", ".")) / path
    return path


@click.group()
@click.version_option(version=__version__, prog_name="mpbandit")
def main():
    """Multiple-play bandit simulations."""


@main.command()
@click.option("--scenario", required=True, help="Preset name or scenario file path.")
@click.option("--policy", default=None, help="Policy name (mp-ts, imp-ts, bc-mp-ts, cucb, mp-kl-ucb).")
@click.option("--T", "horizon", type=int, default=None, help="Number of rounds.")
@click.option("--runs", type=int, default=None, help="Number of independent runs.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--workers", type=int, default=1, show_default=True, help="Parallel worker count.")
@click.option("--checkpoints", default=None, help="Comma-separated checkpoint rounds.")
@click.option("--out", required=True, help="Output CSV path (relative paths go under MPBANDIT_OUT_DIR).")
@click.option("--server", default=None, help="Base URL of a running service; default is in-process.")
def run(scenario, policy, horizon, runs, seed, workers, checkpoints, out, server):
    """Run a batch and write the regret CSV plus its metadata sidecar."""
    payload, sc = _scenario_payload(scenario)
    policy = policy or (sc.policy if sc else None)
    horizon = horizon if horizon is not None else (sc.horizon if sc else None)
    runs = runs if runs is not None else (sc.n_runs if sc and sc.n_runs else 100)
    seed = seed if seed is not None else (sc.seed if sc and sc.seed is not None else 0)
    if policy is None:
        raise click.ClickException("no policy given (flag --policy or scenario file key)")
    if horizon is None:
        raise click.ClickException("no horizon given (flag --T or scenario file key)")
    cps = None
    if checkpoints:
        cps = [int(c) for c in checkpoints.split(",")]
    elif sc and sc.checkpoints:
        cps = list(sc.checkpoints)

    request = {
        "scenario": payload,
        "policy": policy,
        "horizon": horizon,
        "n_runs": runs,
        "seed": seed,
        "workers": workers,
        "checkpoints": cps,
    }
    with _client(server) as client:
        body = _post(client, "/run", request)

    csv_path = _out_path(out)
    try:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(body["csv"], encoding="utf-8")
        meta_path = csv_path.with_suffix("").with_name(csv_path.with_suffix("").name + ".meta.json")
        meta_path.write_text(body["meta"], encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot write output: {exc}") from None
    click.echo(f"wrote {csv_path} and {meta_path}")


@main.command()
@click.option("--scenario", required=True, help="Preset name or scenario file path.")
@click.option("--at", type=float, default=None, help="Also report coefficient * ln(T) at this T.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--server", default=None, help="Base URL of a running service; default is in-process.")
def lowerbound(scenario, at, as_json, server):
    """Per-arm terms and total coefficient of the asymptotic regret floor."""
    payload, sc = _scenario_payload(scenario)
    with _client(server) as client:
        body = _post(client, "/lowerbound", {"scenario": payload, "at": at})
    if as_json:
        click.echo(json.dumps(body, indent=2, sort_keys=True))
        return
    name = sc.name if sc else scenario
    click.echo(f"regret-floor report for {name}")
    for term in body["per_arm"]:
        click.echo(
            "  arm %d: gap=%.17g kl=%.17g coefficient=%.17g"
            % (term["arm"], term["gap"], term["kl"], term["coefficient"])
        )
    click.echo("total coefficient: %.17g" % body["total_coefficient"])
    if body.get("value_at") is not None:
        click.echo("value at T=%g: %.17g" % (at, body["value_at"]))
    if body.get("note"):
        click.echo(f"note: {body['note']}")


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--server", default=None, help="Base URL of a running service; default is in-process.")
def scenarios(as_json, server):
    """List built-in scenario presets."""
    with _client(server) as client:
        resp = client.get("/scenarios")
        if resp.status_code != 200:
            raise click.ClickException(f"/scenarios failed ({resp.status_code})")
        body = resp.json()
    if as_json:
        click.echo(json.dumps(body, indent=2, sort_keys=True))
        return
    for info in body:
        kind = "cascade" if info["cascade"] else "plain"
        click.echo(
            "%-16s K=%-4d L=%-3d %-8s policies: %s"
            % (info["name"], info["n_arms"], info["plays"], kind, ", ".join(info["policies"]))
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("mpbandit.service:app", host=host, port=port)


if __name__ == "__main__":
    main(prog_name="mpbandit")
