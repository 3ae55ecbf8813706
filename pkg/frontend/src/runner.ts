import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { BindingError, errorFromExitCode } from "./errors.js";
import type { GamePayload } from "./games.js";

/** Command used to reach the core CLI; override with FAITHSHAP_CLI. */
function cliCommand(): string[] {
  const override = process.env.FAITHSHAP_CLI;
  if (override && override.trim()) return override.trim().split(/\s+/);
  return ["python3", "-m", "faithshap"];
}

export interface ScoreEntry {
  subset: number[];
  value: number | null;
}

export interface IndexResult {
  d: number;
  order: number;
  kind: string;
  scores: ScoreEntry[];
  evaluationsUsed?: number;
}

/**
 * Run one core-CLI subcommand against a game payload written to a temp file,
 * returning the parsed index JSON.  Numbers cross the boundary as
 * shortest-round-trip decimal strings, so no precision is lost either way.
 */
export function runCli(game: GamePayload, args: string[]): IndexResult {
  const dir = mkdtempSync(join(tmpdir(), "faithshap-"));
  try {
    const gamePath = join(dir, "game.json");
    const outPath = join(dir, "index.json");
    writeFileSync(gamePath, JSON.stringify(game));
    const [cmd, ...prefix] = cliCommand();
    const proc = spawnSync(cmd, [...prefix, ...args, "--game", gamePath, "--out", outPath], {
      encoding: "utf8",
      maxBuffer: 1 << 26,
    });
    if (proc.error) {
      throw new BindingError(`failed to launch core CLI: ${proc.error.message}`);
    }
    if (proc.status !== 0) {
      throw errorFromExitCode(proc.status, proc.stderr ?? "");
    }
    const payload = JSON.parse(readFileSync(outPath, "utf8"));
    return {
      d: payload.d,
      order: payload.l,
      kind: payload.kind,
      scores: payload.scores,
      evaluationsUsed: payload.evaluations_used,
    };
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
