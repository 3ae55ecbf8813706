"""Exact closed-form interaction indices.

Every function returns an ``InteractionIndex`` over all coalitions of size
<= ``max_order`` in enumeration order.  Symmetric games (value depends only on
coalition size) take an O(d^2) fast path; general games go through the lattice
kernels.  Factorial ratios are evaluated in log-gamma space so the formulas
stay finite well past 20 players.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .coalitions import MAX_EXACT_PLAYERS, binom, iter_size_masks, log_binom, subset_masks
from .errors import DomainError, NumericError
from .games import MobiusSparseGame, ValueFunction
from .solver import InteractionIndex
from .transforms import mobius_by_size, mobius_transform

MAX_DERIVATIVE_PLAYERS = 20
MAX_TOP_ORDER_PLAYERS = 18


@dataclass(frozen=True)
class CardinalProbCoefficients:
    """Top-order discrete-derivative weights p[t] for contexts of size t."""

    d: int
    order: int
    p: np.ndarray


def cardinal_prob_coeffs(d: int, order: int, exact: bool = False) -> CardinalProbCoefficients:
    """Probability weights of the top-order faithful Shapley index.

    p_t = (2l-1)! (l+t-1)! (d-t-1)! / ((l-1)!)^2 (d+l-1)!; they are positive
    and satisfy sum_t C(d-l, t) p_t = 1.  ``exact=True`` evaluates in rational
    arithmetic (small d; cross-check oracle for the log-gamma path).
    """
    if not 1 <= order <= d:
        raise DomainError(f"need 1 <= order <= d, got order={order}, d={d}")
    ell = order
    if exact:
        base = Fraction(math.factorial(2 * ell - 1), math.factorial(ell - 1) ** 2)
        p = np.array(
            [
                float(
                    base
                    * Fraction(
                        math.factorial(ell + t - 1) * math.factorial(d - t - 1),
                        math.factorial(d + ell - 1),
                    )
                )
                for t in range(d - ell + 1)
            ]
        )
    else:
        lg = math.lgamma
        base = lg(2 * ell) - 2 * lg(ell)
        p = np.exp(
            [
                base + lg(ell + t) + lg(d - t) - lg(d + ell)
                for t in range(d - ell + 1)
            ]
        )
    total = math.fsum(binom(d - ell, t) * p[t] for t in range(d - ell + 1))
    if abs(total - 1.0) > 1e-12 or np.any(p <= 0.0):
        raise NumericError(f"cardinal-probabilistic weights failed validation (sum {total})")
    return CardinalProbCoefficients(d, ell, p)


# ---------------------------------------------------------------------------
# Discrete-derivative forms (contexts T run over the complement of S)
# ---------------------------------------------------------------------------


def _shapley_interaction_coeffs(d: int, s: int) -> np.ndarray:
    lg = math.lgamma
    return np.exp([lg(t + 1) + lg(d - s - t + 1) - lg(d - s + 2) for t in range(d - s + 1)])


def _banzhaf_interaction_coeffs(d: int, s: int) -> np.ndarray:
    return np.full(d - s + 1, 0.5 ** (d - s))


def _taylor_top_coeffs(d: int, ell: int) -> np.ndarray:
    lg = math.lgamma
    return np.exp(
        [lg(t + 1) + lg(d - t) - lg(d + 1) + math.log(ell) for t in range(d - ell + 1)]
    )


def _symmetric_derivative(profile: np.ndarray, s: int, t: int) -> float:
    return math.fsum(
        (-1.0) ** (s - j) * binom(s, j) * profile[t + j] for j in range(s + 1)
    )


def _derivative_index_symmetric(profile, d, max_order, coeffs_for_size, kind) -> InteractionIndex:
    by_size = np.zeros(max_order + 1)
    for s in range(max_order + 1):
        c = coeffs_for_size(s)
        by_size[s] = math.fsum(
            binom(d - s, t) * c[t] * _symmetric_derivative(profile, s, t)
            for t in range(d - s + 1)
        )
    values = np.concatenate([np.full(binom(d, s), by_size[s]) for s in range(max_order + 1)])
    return InteractionIndex(d, max_order, kind, values)


def _derivative_index_general(game, d, max_order, coeffs_for_size, kind) -> InteractionIndex:
    if d > MAX_DERIVATIVE_PLAYERS:
        raise DomainError(
            f"discrete-derivative sums capped at d={MAX_DERIVATIVE_PLAYERS} for general games"
        )
    table = np.ascontiguousarray(game.tabulate(), dtype=np.float64)
    chunks = []
    for s in range(max_order + 1):
        masks = np.array(list(iter_size_masks(d, s)), dtype=np.int64)
        coeff = np.ascontiguousarray(coeffs_for_size(s), dtype=np.float64)
        chunks.append(_kernels.derivative_weighted_sums(table, d, masks, coeff))
    return InteractionIndex(d, max_order, kind, np.concatenate(chunks))


def _check_order(d: int, max_order: int) -> None:
    if not 0 <= max_order <= d:
        raise DomainError(f"need 0 <= max_order <= d, got {max_order} for d={d}")


def shapley_interaction(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Shapley interaction index: each score averages the S-derivative over
    contexts T with weight |T|! (d-|S|-|T|)! / (d-|S|+1)!.
    """
    d = game.d
    _check_order(d, max_order)
    coeffs = lambda s: _shapley_interaction_coeffs(d, s)
    if game.size_profile is not None:
        return _derivative_index_symmetric(
            game.size_profile, d, max_order, coeffs, "shapley-interaction"
        )
    return _derivative_index_general(game, d, max_order, coeffs, "shapley-interaction")


def banzhaf_interaction(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Banzhaf interaction index: uniform 2^-(d-|S|) weight on every context."""
    d = game.d
    _check_order(d, max_order)
    coeffs = lambda s: _banzhaf_interaction_coeffs(d, s)
    if game.size_profile is not None:
        return _derivative_index_symmetric(
            game.size_profile, d, max_order, coeffs, "banzhaf-interaction"
        )
    return _derivative_index_general(game, d, max_order, coeffs, "banzhaf-interaction")


def shapley_taylor(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Shapley-Taylor index: derivatives at the empty set below the top order,
    a Shapley-style context average at the top order.
    """
    d = game.d
    if max_order < 1:
        raise DomainError("shapley_taylor needs max_order >= 1")
    _check_order(d, max_order)

    def coeffs(s: int) -> np.ndarray:
        if s < max_order:
            out = np.zeros(d - s + 1)
            out[0] = 1.0
            return out
        return _taylor_top_coeffs(d, max_order)

    if game.size_profile is not None:
        return _derivative_index_symmetric(
            game.size_profile, d, max_order, coeffs, "shapley-taylor"
        )
    return _derivative_index_general(game, d, max_order, coeffs, "shapley-taylor")


def faith_shap_top_order(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Top-order faithful Shapley scores as a weighted derivative average.

    Only the size == max_order entries are populated; lower orders are NaN
    (use ``faith_shap`` for the full index).
    """
    d = game.d
    if not 1 <= max_order <= d:
        raise DomainError(f"need 1 <= max_order <= d, got {max_order}")
    p = cardinal_prob_coeffs(d, max_order).p
    if game.size_profile is not None:
        top = math.fsum(
            binom(d - max_order, t)
            * p[t]
            * _symmetric_derivative(game.size_profile, max_order, t)
            for t in range(d - max_order + 1)
        )
        top_values = np.full(binom(d, max_order), top)
    else:
        if d > MAX_TOP_ORDER_PLAYERS:
            raise DomainError(f"top-order derivative sums capped at d={MAX_TOP_ORDER_PLAYERS}")
        table = np.ascontiguousarray(game.tabulate(), dtype=np.float64)
        masks = np.array(list(iter_size_masks(d, max_order)), dtype=np.int64)
        top_values = _kernels.derivative_weighted_sums(
            table, d, masks, np.ascontiguousarray(p, dtype=np.float64)
        )
    n_lower = sum(binom(d, s) for s in range(max_order))
    values = np.concatenate([np.full(n_lower, np.nan), top_values])
    return InteractionIndex(d, max_order, "faith-shap-top", values)


# ---------------------------------------------------------------------------
# Möbius-space forms (faithful indices, all orders)
# ---------------------------------------------------------------------------


def _faith_shap_tail_weight(ell: int, s: int, t: int) -> float:
    """Coefficient on a size-t Möbius term in the size-s faithful Shapley score."""
    if s == 0 or t <= ell:
        return 0.0
    lead = (-1.0) ** (ell - s) * (s / (ell + s)) * binom(ell, s)
    return lead * math.exp(log_binom(t - 1, ell) - log_binom(t + ell - 1, ell + s))


def _faith_banzhaf_tail_weight(ell: int, s: int, t: int) -> float:
    if t <= ell:
        return 0.0
    return (-1.0) ** (ell - s) * 0.5 ** (t - s) * binom(t - s - 1, ell - s)


def _mobius_space_index(
    game: ValueFunction, max_order: int, tail_weight, kind: str
) -> InteractionIndex:
    d = game.d
    _check_order(d, max_order)
    ell = max_order
    if game.size_profile is not None:
        a_size = mobius_by_size(game.size_profile)
        values = []
        for s in range(ell + 1):
            tail = math.fsum(
                tail_weight(ell, s, t) * binom(d - s, t - s) * a_size[t]
                for t in range(ell + 1, d + 1)
            )
            values.append(np.full(binom(d, s), a_size[s] + tail))
        return InteractionIndex(d, ell, kind, np.concatenate(values))
    if isinstance(game, MobiusSparseGame):
        masks = subset_masks(d, ell)
        values = np.empty(len(masks))
        for i, m in enumerate(masks):
            s = int(m).bit_count()
            acc = game.terms.get(m, 0.0)
            for term, coef in game.terms.items():
                t = int(term).bit_count()
                if t > ell and term & m == m:
                    acc += tail_weight(ell, s, t) * coef
            values[i] = acc
        return InteractionIndex(d, ell, kind, values)
    if d > MAX_EXACT_PLAYERS:
        raise DomainError(f"Möbius path capped at d={MAX_EXACT_PLAYERS}")
    a = mobius_transform(game).a
    masks_arr = np.asarray(subset_masks(d, ell), dtype=np.int64)
    values = np.empty(len(masks_arr))
    offset = 0
    for s in range(ell + 1):
        count = binom(d, s)
        block = masks_arr[offset : offset + count]
        w = np.zeros(d + 1)
        for t in range(ell + 1, d + 1):
            w[t] = tail_weight(ell, s, t)
        tails = _kernels.superset_weighted_sums(
            np.ascontiguousarray(a), d, np.ascontiguousarray(block), w
        )
        values[offset : offset + count] = a[block] + tails
        offset += count
    return InteractionIndex(d, ell, kind, values)


def faith_shap(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Faithful Shapley interaction index.

    In Möbius space each score is its own coefficient plus an alternating,
    ratio-weighted sum of the coefficients of strict supersets larger than the
    max order.  The empty-set score equals v(empty); the scores of all other
    retained subsets sum to v(full) - v(empty).
    """
    return _mobius_space_index(game, max_order, _faith_shap_tail_weight, "faith-shap")


def faith_banzhaf(game: ValueFunction, max_order: int) -> InteractionIndex:
    """Faithful Banzhaf interaction index (uniform-weight best l2 fit).

    Möbius form with geometric 2^-(|T|-|S|) tail weights; its top-order
    entries coincide with the Banzhaf interaction index.
    """
    return _mobius_space_index(game, max_order, _faith_banzhaf_tail_weight, "faith-banzhaf")
