"""Command-line front end.

Subcommands: ``exact``, ``estimate``, and the ``bench`` group (``table``,
``curve``, ``converge``).  Every output embeds the full configuration and
seed, so rerunning an embedded config reproduces the file bit for bit.
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path
from urllib.parse import parse_qsl, urlsplit

import click

from . import bench as bench_mod
from .bench import EXACT_INDEX_FNS, approx_curve, convergence_bench, run_example_table
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    FaithShapError,
    NumericError,
    ParseError,
    ValidityError,
)
from .estimators import ESTIMATOR_KINDS, EstimateConfig, estimate
from .games import ValueFunction, builtin_game, load_value_function
from .metrics import avg_squared_distance, precision_at_k
from .coalitions import binom


def _config(**kv) -> dict:
    from . import __version__

    return {"version": __version__, **kv}


def parse_game_spec(text: str) -> ValueFunction:
    """A game argument is either a JSON file path or ``builtin:name?k=v&...``."""
    if text.startswith("builtin:"):
        rest = text[len("builtin:") :]
        split = urlsplit(rest)
        name = split.path
        params: dict[str, object] = {}
        for key, raw in parse_qsl(split.query):
            if key == "subset":
                params[key] = [int(tok) for tok in raw.split(",") if tok]
                continue
            try:
                params[key] = int(raw)
            except ValueError:
                try:
                    params[key] = float(raw)
                except ValueError:
                    params[key] = raw
        return builtin_game(name, **params)
    path = Path(text)
    if not path.exists():
        raise ConfigError(f"game file {text!r} does not exist")
    return load_value_function(path)


def _game_descriptor(text: str) -> str:
    return text


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        click.echo(text)


def _write_csv(path: str | None, header_comment: dict, fieldnames: list[str], rows: list[dict]) -> None:
    def emit(fh):
        fh.write("# config: " + json.dumps(header_comment) + "\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)

    if path:
        with open(path, "w", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)


@click.group()
def cli() -> None:
    """Game-theoretic feature-interaction indices: exact, estimated, benchmarked."""


@cli.command("exact")
@click.option("--game", "game_spec", required=True, help="Game JSON file or builtin:name?k=v")
@click.option("--index", "kind", required=True, type=click.Choice(sorted(EXACT_INDEX_FNS)))
@click.option("--order", type=int, required=True, help="Maximum interaction order")
@click.option("--out", type=click.Path(), default=None, help="Output JSON path (stdout if omitted)")
def exact_cmd(game_spec: str, kind: str, order: int, out: str | None) -> None:
    """Compute an exact interaction index."""
    game = parse_game_spec(game_spec)
    index = EXACT_INDEX_FNS[kind](game, order)
    payload = index.to_dict()
    payload["config"] = _config(command="exact", game=_game_descriptor(game_spec), index=kind, order=order)
    _write_json(out, payload)


@cli.command("estimate")
@click.option("--game", "game_spec", required=True)
@click.option("--estimator", required=True, type=click.Choice(sorted(ESTIMATOR_KINDS)))
@click.option("--order", type=int, required=True)
@click.option("--budget", type=int, required=True, help="Distinct value evaluations allowed")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True, help="l1 penalty")
@click.option(
    "--checkpoint-every",
    type=int,
    default=None,
    help="Emit a metric trace (CSV) against the exact index every N evaluations",
)
@click.option("--out", type=click.Path(), default=None)
def estimate_cmd(game_spec, estimator, order, budget, seed, lam, checkpoint_every, out) -> None:
    """Estimate an index under an evaluation budget.

    Without --checkpoint-every the estimated index is written as JSON; with
    it, the exact index is computed too and a CSV metric trace is emitted.
    """
    game = parse_game_spec(game_spec)
    cfg = EstimateConfig(
        kind=estimator,
        order=order,
        budget=budget,
        seed=seed,
        lam=lam,
        checkpoint_every=checkpoint_every,
    )
    report = estimate(game, cfg)
    config = _config(command="estimate", game=_game_descriptor(game_spec), estimator=estimator, **cfg.to_dict())
    if checkpoint_every is None:
        payload = report.index.to_dict()
        payload["evaluations_used"] = report.evaluations_used
        payload["config"] = config
        _write_json(out, payload)
        return
    exact_index = bench_mod.GROUND_TRUTH_FNS[estimator](game, order)
    k = min(10, binom(game.d, order))
    rows = []
    for evals, snapshot in report.checkpoints:
        rows.append(
            {
                "evaluations": evals,
                "avg_sq_distance": avg_squared_distance(exact_index, snapshot),
                f"precision_at_{k}": precision_at_k(exact_index, snapshot, k),
            }
        )
    _write_csv(out, config, ["evaluations", "avg_sq_distance", f"precision_at_{k}"], rows)


@cli.group("bench")
def bench_group() -> None:
    """Reproduce the analytic tables, curves, and convergence comparisons."""


@bench_group.command("table")
@click.option("--example", type=click.Choice(["1", "2"]), required=True)
@click.option("--p", type=float, default=None, help="Non-cooperation probability (example 1)")
@click.option("--order", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Also write the table as JSON")
def bench_table(example: str, p: float | None, order: int, out: str | None) -> None:
    """Exact index values for the builtin 11-player example games."""
    result = run_example_table(int(example), p, order)
    has_o2 = order >= 2
    header = f"{'index':<22}{'order 1':>10}" + (f"{'order 2':>10}" if has_o2 else "") + f"{'empty':>10}"
    click.echo(header)
    for kind, row in result.tables.items():
        line = f"{kind:<22}{row['order1']:>10.3f}"
        if has_o2:
            line += f"{row['order2']:>10.3f}"
        line += f"{row['empty']:>10.3f}" if "empty" in row else f"{'-':>10}"
        click.echo(line)
    if out:
        payload = result.to_dict()
        payload["config"] = _config(command="bench table", **result.params)
        _write_json(out, payload)


@bench_group.command("curve")
@click.option("--example", type=click.Choice(["1", "2"]), required=True)
@click.option("--p", type=float, default=None)
@click.option("--index", "kind", required=True, type=click.Choice(sorted(EXACT_INDEX_FNS)))
@click.option("--order", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def bench_curve(example: str, p: float | None, kind: str, order: int, out: str | None) -> None:
    """Per-coalition-size approximation curve of one index on an example game."""
    if example == "1":
        if p is None:
            raise ConfigError("example 1 needs --p")
        game = builtin_game("example1", p=p, d=11)
    else:
        game = builtin_game("example2", d=11)
    index = EXACT_INDEX_FNS[kind](game, order)
    rows = approx_curve(game, index)
    config = _config(command="bench curve", example=int(example), p=p, index=kind, order=order)
    _write_csv(out, config, ["size", "value", "approx"], rows)


@bench_group.command("converge")
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None)
def bench_converge(spec_path: str, out: str | None) -> None:
    """Run a convergence benchmark described by a JSON spec file.

    Spec keys: game (file or builtin:...), estimators (list), budgets (list),
    seeds (int), order (int), lambda (float, optional), base_seed (optional).
    """
    try:
        spec = json.loads(Path(spec_path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", spec_path) from exc
    try:
        if not isinstance(spec.get("game"), str):
            raise ParseError("spec 'game' must be a string", spec_path)
        game = parse_game_spec(spec["game"])
        estimators = list(spec["estimators"])
        budgets = [int(b) for b in spec["budgets"]]
        seeds = int(spec["seeds"])
        order = int(spec["order"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad converge spec: {exc}", spec_path) from exc
    lam = float(spec.get("lambda", 0.0))
    base_seed = int(spec.get("base_seed", 0))
    result = convergence_bench(game, estimators, budgets, seeds, order, lam, base_seed)
    config = _config(command="bench converge", spec=spec)
    fieldnames = sorted({key for row in result.traces for key in row})
    ordered = ["estimator", "budget"] + [f for f in fieldnames if f not in ("estimator", "budget")]
    _write_csv(out, config, ordered, result.traces)
    for kind, info in result.runtime.items():
        click.echo(f"# {kind}: evaluations to reach avg sq distance < 1e-3: {info['evals_to_1e-3']}", err=True)


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except (ConfigError, ParseError, DomainError, ValidityError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (NumericError, EvaluationError) as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(3)
    except FaithShapError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
