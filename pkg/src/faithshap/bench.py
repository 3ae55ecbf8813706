"""Benchmark scenarios: the two analytic example tables, function-approximation
curves, and estimator convergence traces.  Everything emits machine-readable
payloads (JSON/CSV rows); rendering stays in the CLI.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from .coalitions import binom
from .errors import ConfigError, DomainError
from .estimators import (
    ESTIMATOR_KINDS,
    FAITH_SHAP_SAMPLING,
    SHAPLEY_INTERACTION_PERMUTATION,
    SHAPLEY_TAYLOR_PERMUTATION,
    EstimateConfig,
    estimate,
)
from .games import ValueFunction, builtin_game
from .indices import (
    banzhaf_interaction,
    faith_banzhaf,
    faith_shap,
    shapley_interaction,
    shapley_taylor,
)
from .metrics import avg_squared_distance, precision_at_k
from .solver import InteractionIndex

EXACT_INDEX_FNS = {
    "faith-shap": faith_shap,
    "faith-banzhaf": faith_banzhaf,
    "shapley-interaction": shapley_interaction,
    "banzhaf-interaction": banzhaf_interaction,
    "shapley-taylor": shapley_taylor,
}

# exact ground truth for each estimator kind
GROUND_TRUTH_FNS = {
    FAITH_SHAP_SAMPLING: faith_shap,
    SHAPLEY_TAYLOR_PERMUTATION: shapley_taylor,
    SHAPLEY_INTERACTION_PERMUTATION: shapley_interaction,
}


@dataclass
class BenchResult:
    scenario: str
    params: dict
    tables: dict = field(default_factory=dict)
    traces: list = field(default_factory=list)
    runtime: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": self.params,
            "tables": self.tables,
            "traces": self.traces,
            "runtime": self.runtime,
        }


def run_example_table(example: int, p: float | None, max_order: int) -> BenchResult:
    """All five indices on one of the two builtin 11-player games.

    Reports the representative order-1 and order-2 scores (the games are
    player-symmetric) plus the empty-set score of the two faithful indices.
    """
    if max_order not in (1, 2):
        raise ConfigError("example tables are defined for order 1 and 2")
    if example == 1:
        if p is None:
            raise ConfigError("example 1 needs the non-cooperation probability p")
        game = builtin_game("example1", p=p, d=11)
        params = {"example": 1, "p": p, "order": max_order}
    elif example == 2:
        game = builtin_game("example2", d=11)
        params = {"example": 2, "order": max_order}
    else:
        raise ConfigError(f"unknown example {example}")
    rows: dict[str, dict] = {}
    for kind, fn in EXACT_INDEX_FNS.items():
        idx = fn(game, max_order)
        row = {"order1": float(idx.order_slice(1)[0])}
        if max_order >= 2:
            row["order2"] = float(idx.order_slice(2)[0])
        if kind in ("faith-shap", "faith-banzhaf"):
            row["empty"] = float(idx.values[0])
        rows[kind] = row
    return BenchResult("example-table", params, tables=rows)


def approx_curve(game: ValueFunction, index: InteractionIndex) -> list[dict]:
    """Per-size fit of the order-limited surrogate to a symmetric game.

    Row s compares v at size s with the surrogate's value on a representative
    coalition {1..s}: the sum of all retained scores inside it.
    """
    profile = game.size_profile
    if profile is None:
        raise DomainError("approximation curves need a player-symmetric game")
    d = game.d
    if index.d != d:
        raise DomainError(f"index is over d={index.d}, game has d={d}")
    rows = []
    for s in range(d + 1):
        approx = 0.0
        for size in range(index.max_order + 1):
            block = index.order_slice(size)
            if size == 0:
                approx += float(block[0])
                continue
            # symmetric scores: C(s, size) retained subsets live inside {1..s}
            approx += binom(s, size) * float(block[0])
        rows.append({"size": s, "value": float(profile[s]), "approx": approx})
    return rows


def convergence_bench(
    game: ValueFunction,
    estimators: list[str],
    budgets: list[int],
    seeds: int,
    max_order: int,
    lam: float = 0.0,
    base_seed: int = 0,
) -> BenchResult:
    """Estimator accuracy versus evaluation budget, aggregated over seeds.

    Each estimator runs once per seed at the largest budget with checkpoints
    at every requested budget; both metrics are computed against the
    estimator's own exact index and reported as mean/std/median per budget.
    """
    if not budgets:
        raise ConfigError("need at least one budget")
    budgets = sorted(set(int(b) for b in budgets))
    for kind in estimators:
        if kind not in ESTIMATOR_KINDS:
            raise ConfigError(f"unknown estimator {kind!r}")
    d = game.d
    k_prec = min(10, binom(d, max_order))
    traces = []
    runtime = {}
    for kind in estimators:
        exact = GROUND_TRUTH_FNS[kind](game, max_order)
        per_budget: dict[int, dict[str, list[float]]] = {
            b: {"sq": [], "prec": [], "evals": []} for b in budgets
        }
        for rep in range(seeds):
            cfg = EstimateConfig(
                kind=kind,
                order=max_order,
                budget=budgets[-1],
                seed=base_seed + rep,
                lam=lam if kind == FAITH_SHAP_SAMPLING else 0.0,
                checkpoint_every=None,
            )
            snaps = _run_with_checkpoints(game, cfg, budgets)
            for b, (evals, idx) in zip(budgets, snaps):
                per_budget[b]["sq"].append(avg_squared_distance(exact, idx))
                per_budget[b]["prec"].append(precision_at_k(exact, idx, k_prec))
                per_budget[b]["evals"].append(evals)
        to_threshold = None
        for b in budgets:
            sq = per_budget[b]["sq"]
            prec = per_budget[b]["prec"]
            row = {
                "estimator": kind,
                "budget": b,
                "evaluations_mean": float(np.mean(per_budget[b]["evals"])),
                "avg_sq_dist_mean": float(np.mean(sq)),
                "avg_sq_dist_std": float(np.std(sq)),
                "avg_sq_dist_median": float(statistics.median(sq)),
                f"precision_at_{k_prec}_mean": float(np.mean(prec)),
                f"precision_at_{k_prec}_std": float(np.std(prec)),
            }
            traces.append(row)
            if to_threshold is None and statistics.median(sq) < 1e-3:
                to_threshold = b
        runtime[kind] = {"evals_to_1e-3": to_threshold}
    return BenchResult(
        "convergence",
        {
            "d": d,
            "order": max_order,
            "budgets": budgets,
            "seeds": seeds,
            "lambda": lam,
            "base_seed": base_seed,
            "estimators": estimators,
        },
        traces=traces,
        runtime=runtime,
    )


def _run_with_checkpoints(game, cfg: EstimateConfig, budgets: list[int]):
    """One estimate per requested budget, sharing the config seed.

    Sampling estimators draw nested prefixes (the first-b draws of the largest
    run), so the trace is a genuine budget sweep of a single stream.
    """
    snaps = []
    for b in budgets:
        sub = EstimateConfig(
            kind=cfg.kind,
            order=cfg.order,
            budget=b,
            seed=cfg.seed,
            lam=cfg.lam,
            max_passes=cfg.max_passes,
        )
        report = estimate(game, sub)
        snaps.append((report.evaluations_used, report.index))
    return snaps
