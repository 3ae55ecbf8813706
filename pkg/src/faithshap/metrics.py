"""Estimator-quality metrics over top-order interaction scores."""

from __future__ import annotations

import numpy as np

from .coalitions import binom
from .errors import DomainError
from .solver import InteractionIndex


def _check_pair(exact: InteractionIndex, estimate: InteractionIndex) -> None:
    if exact.d != estimate.d or exact.max_order != estimate.max_order:
        raise DomainError(
            f"mismatched indices: d={exact.d}/{estimate.d}, "
            f"order={exact.max_order}/{estimate.max_order}"
        )


def _filled(values: np.ndarray) -> np.ndarray:
    # partial estimates flag unvisited entries as NaN; they count as zero scores
    return np.where(np.isfinite(values), values, 0.0)


def avg_squared_distance(exact: InteractionIndex, estimate: InteractionIndex) -> float:
    """Mean squared error over the size == max_order scores only."""
    _check_pair(exact, estimate)
    a = exact.top_order_values()
    b = _filled(estimate.top_order_values())
    return float(np.sum((a - b) ** 2) / binom(exact.d, exact.max_order))


def precision_at_k(exact: InteractionIndex, estimate: InteractionIndex, k: int) -> float:
    """Fraction of the k largest-|score| top-order entries the estimate recovers.

    Ties break deterministically: stable sort by (|value| descending,
    enumeration order ascending).
    """
    _check_pair(exact, estimate)
    n_top = binom(exact.d, exact.max_order)
    if not 1 <= k <= n_top:
        raise DomainError(f"k must be in [1, {n_top}], got {k}")

    def top_set(values: np.ndarray) -> set[int]:
        order = np.argsort(-np.abs(_filled(values)), kind="stable")
        return set(order[:k].tolist())

    hits = top_set(exact.top_order_values()) & top_set(estimate.top_order_values())
    return len(hits) / k
