/**
 * Host-side entry points for the interaction-index engine.
 *
 * `explain` scores a black-box callable by tabulating it once (2^d foreign
 * calls, memoized) and driving the core CLI's budgeted estimator over the
 * tabulated game; numeric results are identical to running the CLI by hand
 * on the same table, seed, and config.  `exactIndices` computes a closed-form
 * index for an explicit table or sparse-term game.
 */

import { ConfigError } from "./errors.js";
import {
  CallbackGame,
  type CoalitionValueFn,
  type GamePayload,
  type MobiusTerm,
  mobiusGame,
  tableGame,
} from "./games.js";
import { type IndexResult, type ScoreEntry, runCli } from "./runner.js";

export { BindingError, ConfigError, EvaluationError, NumericError } from "./errors.js";
export { CallbackGame, MAX_PLAYERS, mobiusGame, tableGame } from "./games.js";
export type { CoalitionValueFn, GamePayload, MobiusTerm } from "./games.js";
export type { IndexResult, ScoreEntry } from "./runner.js";

export type EstimatorKind = "faith-shap" | "shapley-taylor" | "shapley-interaction";
export type IndexKind =
  | "faith-shap"
  | "faith-banzhaf"
  | "shapley-interaction"
  | "banzhaf-interaction"
  | "shapley-taylor";

export interface ExplainOptions {
  order: number;
  estimator: EstimatorKind;
  /** Distinct value evaluations granted to the core estimator.  A budget of
   * 2^d or more switches the faith-shap estimator to its exact path. */
  budget: number;
  seed?: number;
  /** l1 penalty of the faith-shap regression (default 0). */
  lambda?: number;
}

function checkOrder(order: number, d: number): void {
  if (!Number.isInteger(order) || order < 1 || order > d) {
    throw new ConfigError(`order must be an integer in [1, ${d}], got ${order}`);
  }
}

/** Estimate interaction scores for a host callable under an evaluation budget. */
export function explain(fn: CoalitionValueFn, d: number, options: ExplainOptions): IndexResult {
  const game = new CallbackGame(fn, d);
  checkOrder(options.order, d);
  if (!Number.isInteger(options.budget) || options.budget < 1) {
    throw new ConfigError(`budget must be a positive integer, got ${options.budget}`);
  }
  const payload = tableGame(game.tabulate(), d);
  const args = [
    "estimate",
    "--estimator",
    options.estimator,
    "--order",
    String(options.order),
    "--budget",
    String(options.budget),
    "--seed",
    String(options.seed ?? 0),
    "--lambda",
    String(options.lambda ?? 0),
  ];
  return runCli(payload, args);
}

/** Compute an exact interaction index for a dense table or sparse terms. */
export function exactIndices(
  game: { d: number; values?: number[]; terms?: MobiusTerm[] },
  order: number,
  kind: IndexKind,
): IndexResult {
  let payload: GamePayload;
  if (game.values !== undefined) {
    payload = tableGame(game.values, game.d);
  } else if (game.terms !== undefined) {
    payload = mobiusGame(game.terms, game.d);
  } else {
    throw new ConfigError("game needs either dense 'values' or sparse 'terms'");
  }
  checkOrder(order, payload.d);
  return runCli(payload, ["exact", "--index", kind, "--order", String(order)]);
}

/** Scores keyed by comma-joined player list ('' is the empty coalition). */
export function scoreMap(result: IndexResult): Map<string, number | null> {
  const out = new Map<string, number | null>();
  for (const entry of result.scores) {
    out.set(entry.subset.join(","), entry.value);
  }
  return out;
}
