/** Error codes mirror the core CLI's exit codes (2 = config, 3 = numeric). */

export class BindingError extends Error {
  constructor(message: string, readonly exitCode: number | null = null) {
    super(message);
    this.name = new.target.name;
  }
}

/** Invalid arguments, unknown names, malformed games (CLI exit code 2). */
export class ConfigError extends BindingError {
  constructor(message: string) {
    super(message, 2);
  }
}

/** A linear solve or quadrature failed in the core (CLI exit code 3). */
export class NumericError extends BindingError {
  constructor(message: string) {
    super(message, 3);
  }
}

/** The host callable threw or returned a non-finite value. */
export class EvaluationError extends BindingError {
  constructor(message: string, readonly coalition: number[]) {
    super(message, null);
  }
}

export function errorFromExitCode(code: number | null, stderr: string): BindingError {
  const detail = stderr.trim() || `core CLI exited with code ${code}`;
  if (code === 2) return new ConfigError(detail);
  if (code === 3) return new NumericError(detail);
  return new BindingError(detail, code);
}
