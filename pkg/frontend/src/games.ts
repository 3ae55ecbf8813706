import { ConfigError, EvaluationError } from "./errors.js";

/** A host-side value function: sorted 1-indexed player list in, payoff out. */
export type CoalitionValueFn = (players: number[]) => number;

// tabulation materializes 2^d values; the core enforces the same cap
export const MAX_PLAYERS = 25;

/**
 * Memoizing wrapper around a host callable.  Coalitions cross the boundary
 * as sorted 1-indexed player lists; repeated coalitions are answered from
 * cache, so each distinct coalition costs one foreign call.  Calls are issued
 * strictly sequentially.
 */
export class CallbackGame {
  private readonly cache = new Map<number, number>();

  constructor(readonly fn: CoalitionValueFn, readonly d: number) {
    if (!Number.isInteger(d) || d < 1 || d > MAX_PLAYERS) {
      throw new ConfigError(`player count d=${d} outside [1, ${MAX_PLAYERS}]`);
    }
  }

  evalMask(mask: number): number {
    const hit = this.cache.get(mask);
    if (hit !== undefined) return hit;
    const players: number[] = [];
    for (let i = 0; i < this.d; i++) {
      if (mask & (1 << i)) players.push(i + 1);
    }
    let value: number;
    try {
      value = this.fn(players);
    } catch (err) {
      throw new EvaluationError(`callable threw: ${String(err)}`, players);
    }
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new EvaluationError(`callable returned non-finite value ${value}`, players);
    }
    this.cache.set(mask, value);
    return value;
  }

  get evaluations(): number {
    return this.cache.size;
  }

  /** Dense value table indexed by coalition mask (2^d foreign calls). */
  tabulate(): number[] {
    const out = new Array<number>(1 << this.d);
    for (let mask = 0; mask < 1 << this.d; mask++) {
      out[mask] = this.evalMask(mask);
    }
    return out;
  }
}

export interface MobiusTerm {
  subset: number[];
  coef: number;
}

/** Serializable game payloads accepted by the core CLI. */
export type GamePayload =
  | { d: number; kind: "table"; values: number[] }
  | { d: number; kind: "mobius"; terms: MobiusTerm[] };

export function tableGame(values: number[], d?: number): GamePayload {
  const inferred = Math.log2(values.length);
  const players = d ?? Math.round(inferred);
  if (!Number.isInteger(players) || values.length !== 1 << players) {
    throw new ConfigError(`table of length ${values.length} is not 2^d`);
  }
  if (players < 1 || players > MAX_PLAYERS) {
    throw new ConfigError(`player count d=${players} outside [1, ${MAX_PLAYERS}]`);
  }
  if (values.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
    throw new ConfigError("table contains non-finite entries");
  }
  return { d: players, kind: "table", values };
}

export function mobiusGame(terms: MobiusTerm[], d: number): GamePayload {
  if (!Number.isInteger(d) || d < 1 || d > 64) {
    throw new ConfigError(`player count d=${d} outside [1, 64]`);
  }
  const seen = new Set<string>();
  for (const term of terms) {
    const key = [...term.subset].sort((a, b) => a - b).join(",");
    if (seen.has(key)) {
      throw new ConfigError(`duplicate term for subset [${key}]`);
    }
    seen.add(key);
    for (const p of term.subset) {
      if (!Number.isInteger(p) || p < 1 || p > d) {
        throw new ConfigError(`player ${p} outside [1, ${d}]`);
      }
    }
    if (!Number.isFinite(term.coef)) {
      throw new ConfigError(`non-finite coefficient on subset [${key}]`);
    }
  }
  return { d, kind: "mobius", terms };
}
