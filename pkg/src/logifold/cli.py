"""Thin command-line client for the logifold service.

Commands read and write the file formats of ``model_io`` locally and call
the service endpoints for all actual work.  By default requests run against
an in-process instance of the app; ``--server`` targets a remote one.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from . import model_io
from .errors import LogifoldError


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _post(server, path, payload) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    body = resp.json()
    if resp.status_code != 200:
        name = body.get("error", f"HTTP{resp.status_code}")
        detail = body.get("detail", body)
        raise click.ClickException(f"{name}: {detail}")
    return body


def _write_or_print(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; "
              "default runs the service in-process.")
@click.pass_context
def main(ctx, server):
    ctx.obj = {"server": server}


@main.command("compile")
@click.argument("mlp_file", type=click.Path(exists=True))
@click.option("--out", default=None, help="Path for the serialized graph (JSON).")
@click.option("--seed", default=0, show_default=True,
              help="Seed for sampling-based chamber discovery.")
@click.option("--budget", default=100_000, show_default=True,
              help="Maximum number of graph vertices.")
@click.pass_context
def cmd_compile(ctx, mlp_file, out, seed, budget):
    """Compile an MLP weight file into a linear logical graph."""
    try:
        mlp = model_io.load_mlp(mlp_file)
    except LogifoldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    payload = {
        "mlp": {
            "input_dim": mlp.input_dim,
            "head": mlp.head,
            "layers": [{"weights": l.weights.tolist(), "bias": l.bias.tolist()}
                       for l in mlp.layers],
        },
        "discovery": {"seed": seed, "max_regions": budget},
    }
    body = _post(ctx.obj["server"], "/compile", payload)
    doc = {"seed": body["seed"], "graph": body["graph"]}
    _write_or_print(json.dumps(doc, sort_keys=True, indent=1) + "\n", out)
    click.echo(f"vertices={body['num_vertices']} sinks={body['num_sinks']} "
               f"arrows={body['num_arrows']} "
               f"first_level_chambers={body['first_level_chambers']}",
               err=True)


@main.command("combine")
@click.argument("prediction_files", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--truth", "truth_file", required=True, type=click.Path(exists=True),
              help="Ground-truth file (instance_id,label lines).")
@click.option("--ladder", default=None,
              help="Comma-separated thresholds overriding the default ladder.")
@click.option("--routing", "routing_file", default=None, type=click.Path(exists=True),
              help="Routing spec: filter=<id> then coarse,expert lines.")
@click.option("--out", default=None, help="Path for the TSV table.")
@click.pass_context
def cmd_combine(ctx, prediction_files, truth_file, ladder, routing_file, out):
    """Combine prediction files into a threshold-accuracy table."""
    try:
        matrices = [model_io.load_predictions(p) for p in prediction_files]
        truth = model_io.load_ground_truth(truth_file)
        routing = model_io.load_routing(routing_file) if routing_file else None
    except LogifoldError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")
    payload = {
        "predictions": [
            {"model_id": m.model_id, "labels": m.vocab,
             "instance_ids": m.instance_ids, "rows": m.rows.tolist()}
            for m in matrices
        ],
        "truth": {"instance_ids": truth.instance_ids, "labels": truth.labels},
    }
    if ladder:
        payload["ladder"] = [float(t) for t in ladder.split(",")]
    if routing:
        payload["routing"] = {"filter": routing[0], "coarse_map": routing[1]}
    body = _post(ctx.obj["server"], "/combine", payload)
    _write_or_print(body["tsv"], out)


@main.command("theory")
@click.option("--n", "n", required=True, type=int, help="Per-classifier size budget.")
@click.option("--k", "k", required=True, type=int, help="Family cardinality.")
@click.option("--depth", default=8, show_default=True,
              help="Dyadic depth of the search grid.")
@click.option("--mode", default="auto", show_default=True,
              type=click.Choice(["auto", "exhaustive", "random"]))
@click.option("--budget", default=200_000, show_default=True,
              help="Max candidate breakpoint sets for exhaustive search.")
@click.option("--seed", default=0, show_default=True)
@click.option("--families", default=200, show_default=True,
              help="Number of random consistent families to check.")
@click.option("--out", default=None, help="Path for the text report.")
@click.pass_context
def cmd_theory(ctx, n, k, depth, mode, budget, seed, families, out):
    """Best-agreement search and proof-quantity checks on random families."""
    payload = {"n": n, "k": k, "depth": depth, "mode": mode, "budget": budget,
               "seed": seed, "families": families, "family_seed": seed}
    body = _post(ctx.obj["server"], "/theory", payload)
    _write_or_print(body["text"], out)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
