"""Coalition weighting schemes for faithful interaction indices.

A scheme assigns every coalition a positive weight that depends only on its
size, with optional infinite weight at the empty and the full coalition
(those become equality constraints in the solvers).  Infinity is carried by
explicit flags, never by sentinel floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coalitions import binom
from .errors import DomainError, ParseError, ValidityError


@dataclass(frozen=True)
class WeightingScheme:
    """Per-size coalition weights with explicit infinity flags at 0 and d."""

    d: int
    mu_by_size: np.ndarray
    infinite_at_empty: bool = False
    infinite_at_full: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        mu = np.ascontiguousarray(self.mu_by_size, dtype=np.float64)
        object.__setattr__(self, "mu_by_size", mu)
        if mu.shape != (self.d + 1,):
            raise DomainError(f"need d+1 = {self.d + 1} size weights, got {mu.shape}")
        interior = mu[1 : self.d]
        if np.any(~np.isfinite(mu)) or np.any(interior <= 0.0):
            bad = [s for s in range(1, self.d) if not mu[s] > 0.0 or not np.isfinite(mu[s])]
            raise ValidityError(f"weights must be finite and positive for sizes 1..d-1; bad sizes {bad}")
        if not self.infinite_at_empty and mu[0] <= 0.0:
            raise ValidityError("weight at the empty set must be positive (or flagged infinite)")
        if not self.infinite_at_full and mu[self.d] <= 0.0:
            raise ValidityError("weight at the full set must be positive (or flagged infinite)")

    @property
    def fully_finite(self) -> bool:
        return not (self.infinite_at_empty or self.infinite_at_full)

    def weight_of_size(self, size: int) -> float:
        """Finite weight of a coalition of the given size; raises on flagged sizes."""
        if (size == 0 and self.infinite_at_empty) or (size == self.d and self.infinite_at_full):
            raise DomainError(f"weight at size {size} is infinite")
        return float(self.mu_by_size[size])

    def finite_sizes(self) -> range:
        lo = 1 if self.infinite_at_empty else 0
        hi = self.d - 1 if self.infinite_at_full else self.d
        return range(lo, hi + 1)

    def scaled(self, c: float) -> "WeightingScheme":
        if c <= 0.0:
            raise DomainError("scale factor must be positive")
        mu = self.mu_by_size.copy()
        for s in self.finite_sizes():
            mu[s] *= c
        return WeightingScheme(self.d, mu, self.infinite_at_empty, self.infinite_at_full, dict(self.provenance))

    def to_dict(self) -> dict:
        mu = self.mu_by_size.copy()
        if self.infinite_at_empty:
            mu[0] = 0.0
        if self.infinite_at_full:
            mu[self.d] = 0.0
        return {
            "d": self.d,
            "mu": mu.tolist(),
            "inf_empty": self.infinite_at_empty,
            "inf_full": self.infinite_at_full,
            "provenance": dict(self.provenance),
        }


@dataclass(frozen=True)
class CumulativeWeights:
    """mubar[t] = total finite weight of all supersets of a size-t coalition."""

    d: int
    mubar_by_size: np.ndarray


@dataclass(frozen=True)
class ABValidityReport:
    valid: bool
    sufficient_condition: bool
    reason: str
    mu_by_size: np.ndarray | None = None
    offending_sizes: tuple[int, ...] = ()


def faithshap_weights(d: int) -> WeightingScheme:
    """The kernel whose constrained fit yields the faithful Shapley index:
    mu_s = (d-1) / (C(d,s) * s * (d-s)) for 1 <= s <= d-1, infinite ends.
    """
    if d < 2:
        raise DomainError("faithshap weights need d >= 2")
    mu = np.zeros(d + 1)
    for s in range(1, d):
        mu[s] = (d - 1) / (binom(d, s) * s * (d - s))
    return WeightingScheme(
        d, mu, infinite_at_empty=True, infinite_at_full=True, provenance={"kind": "faith-shap"}
    )


def uniform_weights(d: int) -> WeightingScheme:
    """mu(S) = 1/2^d everywhere; the faithful-Banzhaf regression weights."""
    mu = np.full(d + 1, 0.5**d)
    return WeightingScheme(d, mu, provenance={"kind": "uniform"})


def _g_factors(a: float, b: float, d: int) -> np.ndarray:
    """g(a, b, i): cumulative weights of the two-parameter family."""
    g = np.empty(d + 1)
    g[0] = 1.0
    for i in range(1, d + 1):
        j = i - 1
        num = a * (a - b) + j * (b - a * a)
        den = (a - b) + j * (b - a * a)
        if den == 0.0:
            raise ValidityError(f"degenerate (a, b): zero denominator at factor {j}")
        g[i] = g[i - 1] * num / den
    return g


def _mu_from_g(g: np.ndarray, d: int) -> np.ndarray:
    mu = np.empty(d + 1)
    for s in range(d + 1):
        mu[s] = math.fsum(
            binom(d - s, i - s) * (-1.0) ** (i - s) * g[i] for i in range(s, d + 1)
        )
    return mu


def validate_ab(a: float, b: float, d: int) -> ABValidityReport:
    """Check whether (a, b) yields positive weights for this d.

    1 >= a > b >= a^2 > 0 is sufficient for every d; outside that region the
    weights are computed explicitly and scanned for positivity.
    """
    if not (a > 0.0 and b > 0.0):
        return ABValidityReport(False, False, "a and b must be positive")
    if not a > b:
        return ABValidityReport(False, False, f"need a > b, got a={a}, b={b}")
    if a <= 1.0 and b >= a * a:
        return ABValidityReport(True, True, "satisfies 1 >= a > b >= a^2 > 0")
    try:
        mu = _mu_from_g(_g_factors(a, b, d), d)
    except ValidityError as exc:
        return ABValidityReport(False, False, str(exc))
    bad = tuple(int(s) for s in range(d + 1) if not mu[s] > 0.0)
    if bad:
        return ABValidityReport(
            False, False, f"nonpositive weight at sizes {list(bad)}", mu, bad
        )
    return ABValidityReport(True, False, "positivity verified by explicit scan", mu)


def ab_weights(d: int, a: float, b: float) -> WeightingScheme:
    """Two-parameter weighting family; normalized so the total weight is 1.

    mu_s = sum_{i=s}^{d} C(d-s, i-s) (-1)^(i-s) g(a, b, i), whose cumulative
    weights are exactly g(a, b, t) (so g(a, b, 0) = 1 pins the scale).
    (a, b) = (0.5, 0.25) recovers the uniform 1/2^d scheme.
    """
    report = validate_ab(a, b, d)
    if not report.valid:
        raise ValidityError(f"invalid (a, b) = ({a}, {b}) for d={d}: {report.reason}")
    mu = report.mu_by_size
    if mu is None:
        mu = _mu_from_g(_g_factors(a, b, d), d)
    bad = [int(s) for s in range(d + 1) if not mu[s] > 0.0]
    if bad:
        raise ValidityError(f"nonpositive weight at sizes {bad} for (a, b) = ({a}, {b})")
    return WeightingScheme(d, mu, provenance={"kind": "ab", "a": float(a), "b": float(b)})


def ab_from_ratios(d: int, r1: float, r2: float) -> tuple[float, float]:
    """Recover (a, b) from the target ratios r1 = mu_d/mu_{d-1}, r2 = mu_{d-1}/mu_{d-2}.

    Requires r1 > r2 > (d-2) r1 / (d-1+r1) > 0; the result satisfies
    1 > a > b >= a^2 > 0.
    """
    lower = (d - 2) * r1 / (d - 1 + r1)
    if not (r1 > r2 > lower > 0.0):
        raise DomainError(
            f"ratios must satisfy r1 > r2 > (d-2) r1/(d-1+r1) > 0; "
            f"got r1={r1}, r2={r2}, bound={lower}"
        )
    denom_a = (r1 + 1.0) * (r2 + 1.0) - (d - 1.0) * (r1 - r2)
    a = (r1 * (r2 + 1.0) - (d - 1.0) * (r1 - r2)) / denom_a
    denom_b = (r1 + 1.0) * (r2 + 1.0) - (d - 2.0) * (r1 - r2)
    b = a * (r1 * (r2 + 1.0) - (d - 2.0) * (r1 - r2)) / denom_b
    return a, b


def cumulative_weights(scheme: WeightingScheme) -> CumulativeWeights:
    """mubar_t = sum over finite sizes i >= t of C(d-t, i-t) mu_i."""
    d = scheme.d
    finite = set(scheme.finite_sizes())
    mubar = np.empty(d + 1)
    for t in range(d + 1):
        mubar[t] = math.fsum(
            binom(d - t, i - t) * scheme.mu_by_size[i] for i in range(t, d + 1) if i in finite
        )
    return CumulativeWeights(d, mubar)


def scheme_from_dict(payload: dict, location: str = "<payload>") -> WeightingScheme:
    try:
        d = int(payload["d"])
        mu = np.array(payload["mu"], dtype=np.float64)
        inf_empty = bool(payload.get("inf_empty", False))
        inf_full = bool(payload.get("inf_full", False))
        provenance = dict(payload.get("provenance") or {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad weighting scheme: {exc}", location) from exc
    try:
        return WeightingScheme(d, mu, inf_empty, inf_full, provenance)
    except (DomainError, ValidityError) as exc:
        raise ParseError(str(exc), location) from exc


def load_weighting_scheme(path) -> WeightingScheme:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from exc
    return scheme_from_dict(payload, str(path))
