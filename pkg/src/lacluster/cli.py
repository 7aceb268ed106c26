"""Command-line client for the clustering service.

``run`` reads the dataset locally, ships it to the HTTP API (an in-process
instance by default, or a remote server via ``--server``) and writes the
returned result table to disk.  ``serve`` starts the API under uvicorn.
Every option can also be supplied through a ``LACLUSTER_<COMMAND>_<OPTION>``
environment variable.
"""

from __future__ import annotations

import asyncio

import click
import httpx

from . import __version__
from .harness import ResultRecord, load_dataset, load_labels, write_results

ENV_PREFIX = "LACLUSTER"


def _post(path: str, payload: dict, server: str | None):
    """POST to a remote server, or to an in-process app when none is given."""
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)

    async def call():
        from .api import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://lacluster") as client:
            return await client.post(path, json=payload)

    return asyncio.run(call())


def _records_from_payload(rows: list[dict]) -> list[ResultRecord]:
    return [ResultRecord(**row) for row in rows]


@click.group(context_settings={"auto_envvar_prefix": ENV_PREFIX})
@click.version_option(__version__)
def main():
    """Label-guided clustering benchmark client."""


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Delimited numeric text file, one point per row.")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False),
              help="Optional ground-truth labels, one integer per line.")
@click.option("--k", default=10, show_default=True, help="Number of clusters.")
@click.option("--mode", type=click.Choice(["kmedian", "kmeans"]), default="kmedian",
              show_default=True)
@click.option("--alpha", default=0.2, show_default=True,
              help="Corruption rate for the simulated predictor.")
@click.option("--epsilon", default=0.5, show_default=True)
@click.option("--delta", default=0.1, show_default=True)
@click.option("--seeds", default="0,1,2,3,4,5,6,7,8,9", show_default=True,
              help="Comma-separated seed list.")
@click.option("--sweep", is_flag=True, help="Tune the solver alpha over ten candidates.")
@click.option("--cap-trials", type=int, default=None)
@click.option("--cap-q-size", type=int, default=None)
@click.option("--cap-r-size", type=int, default=None)
@click.option("--cap-subsets", type=int, default=None)
@click.option("--cap-grid-points", type=int, default=None)
@click.option("--cap-candidates", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), help="Result file path.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--header", is_flag=True, help="Skip the dataset's first row.")
@click.option("--timing/--no-timing", default=True, show_default=True,
              help="Record solver wall times (disable for byte-stable output).")
@click.option("--server", default=None,
              help="Base URL of a running service; defaults to in-process.")
def run(dataset, labels, k, mode, alpha, epsilon, delta, seeds, sweep,
        cap_trials, cap_q_size, cap_r_size, cap_subsets, cap_grid_points,
        cap_candidates, out, fmt, header, timing, server):
    """Run the benchmark protocol and write the result table."""
    try:
        seed_list = [int(s) for s in seeds.split(",") if s.strip() != ""]
        X = load_dataset(dataset, header=header)
        gt = None
        if labels:
            gt, _ = load_labels(labels, X.shape[0])
        caps = {"max_trials": cap_trials, "max_q_size": cap_q_size,
                "max_r_size": cap_r_size, "max_subsets_per_trial": cap_subsets,
                "max_grid_points": cap_grid_points,
                "max_candidates_per_cluster": cap_candidates}
        payload = {
            "points": X.tolist(),
            "labels": None if gt is None else gt.tolist(),
            "k": k, "mode": mode, "alpha_true": alpha, "epsilon": epsilon,
            "delta": delta, "seeds": seed_list, "sweep": sweep,
            "timing": timing, "caps": caps,
        }
        resp = _post("/experiment", payload, server)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    except httpx.HTTPError as exc:
        raise click.ClickException(f"request failed: {exc}") from exc
    if resp.status_code != 200:
        raise click.ClickException(f"service error {resp.status_code}: {resp.text}")

    body = resp.json()
    records = _records_from_payload(body["records"])
    if out:
        write_results(records, out, fmt)
        click.echo(f"wrote {len(records)} records to {out}")
    for rec in records:
        if rec.seed == -1 and rec.method.endswith(":mean"):
            click.echo(f"{rec.method} alpha_used={rec.alpha_used:g} "
                       f"cost={rec.cost:.4f} ari={rec.ari:.4f} nmi={rec.nmi:.4f}")
    if body.get("best_alpha") is not None:
        click.echo(f"best alpha: {body['best_alpha']:g}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("lacluster.api.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
