"""Lattice calculus on games: Möbius/zeta transforms, discrete derivatives,
the multilinear extension and its diagonal derivatives, and the Beta-weighted
path integral that recovers top-order faithful-Shapley scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from . import _kernels
from .coalitions import MAX_EXACT_PLAYERS, Coalition, binom
from .errors import DomainError


@dataclass(frozen=True)
class MobiusCoefficients:
    """Coefficients a(S) of a game in the unanimity basis, indexed by mask."""

    d: int
    a: np.ndarray

    def __post_init__(self) -> None:
        if self.a.shape != (1 << self.d,):
            raise DomainError(f"coefficient array must have length 2^{self.d}")

    def coefficient(self, subset: Coalition) -> float:
        return float(self.a[subset.bits])


def _as_table(game) -> tuple[np.ndarray, int]:
    """Accept a raw 2^d array or any object with .d and .tabulate()."""
    if isinstance(game, np.ndarray):
        n = len(game)
        d = n.bit_length() - 1
        if 1 << d != n:
            raise DomainError(f"table length {n} is not a power of two")
        return np.ascontiguousarray(game, dtype=np.float64), d
    table = game.tabulate()
    return np.ascontiguousarray(table, dtype=np.float64), game.d


def mobius_transform(game) -> MobiusCoefficients:
    """a(S) = sum over T subset of S of (-1)^(|S|-|T|) v(T), for every S.

    Computed with the in-place subset transform in O(d 2^d).
    """
    table, d = _as_table(game)
    if d > MAX_EXACT_PLAYERS:
        raise DomainError(f"exact transform capped at d={MAX_EXACT_PLAYERS}")
    return MobiusCoefficients(d, _kernels.subset_mobius(table, d))


def inverse_mobius(coeffs: MobiusCoefficients) -> np.ndarray:
    """Rebuild the value table: v(S) = sum over T subset of S of a(T)."""
    if coeffs.d > MAX_EXACT_PLAYERS:
        raise DomainError(f"exact transform capped at d={MAX_EXACT_PLAYERS}")
    a = np.ascontiguousarray(coeffs.a, dtype=np.float64)
    return _kernels.subset_zeta(a, coeffs.d)


def mobius_transform_direct(table: np.ndarray, d: int) -> np.ndarray:
    """Brute-force O(4^d) signed subset sum; cross-check oracle for the fast path."""
    a = np.zeros(1 << d)
    for s in range(1 << d):
        total = 0.0
        sub = s
        sbits = int(s).bit_count()
        while True:
            sign = 1.0 if (sbits - int(sub).bit_count()) % 2 == 0 else -1.0
            total += sign * table[sub]
            if sub == 0:
                break
            sub = (sub - 1) & s
        a[s] = total
    return a


def discrete_derivative(game, subset: Coalition, at: Coalition) -> float:
    """Delta_S v(T) = sum over L subset of S of (-1)^(|S|-|L|) v(T union L).

    Measures the marginal interaction of `subset` in the presence of `at`;
    requires the two coalitions to be disjoint.
    """
    if subset.bits & at.bits:
        raise DomainError("derivative subset and context coalition must be disjoint")
    s = subset.bits
    sbits = subset.size
    total = 0.0
    sub = s
    while True:
        sign = 1.0 if (sbits - int(sub).bit_count()) % 2 == 0 else -1.0
        total += sign * game.eval_mask(at.bits | sub)
        if sub == 0:
            break
        sub = (sub - 1) & s
    return total


def multilinear_eval(coeffs: MobiusCoefficients, x) -> float:
    """Owen extension g(x) = sum_T a(T) prod_{i in T} x_i on the unit cube."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (coeffs.d,):
        raise DomainError(f"expected {coeffs.d} coordinates, got shape {x.shape}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("coordinates must lie in [0, 1]")
    total = 0.0
    for mask in range(1 << coeffs.d):
        a = coeffs.a[mask]
        if a == 0.0:
            continue
        prod = 1.0
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            prod *= x[i]
            m &= m - 1
        total += a * prod
    return total


def diagonal_derivative_poly(coeffs: MobiusCoefficients, subset: Coalition) -> np.ndarray:
    """Coefficients c_k of Delta_S g(t, ..., t) = sum_k c_k t^k.

    c_k collects a(S union U) over the U subset of the complement with |U| = k.
    """
    d = coeffs.d
    s = subset.bits
    comp = ((1 << d) - 1) ^ s
    c = np.zeros(d - subset.size + 1)
    u = comp
    while True:
        c[int(u).bit_count()] += coeffs.a[s | u]
        if u == 0:
            break
        u = (u - 1) & comp
    return c


def multilinear_s_derivative(coeffs: MobiusCoefficients, subset: Coalition, t: float) -> float:
    """Delta_S g evaluated at the diagonal point (t, ..., t)."""
    if not 0.0 <= t <= 1.0:
        raise DomainError("diagonal coordinate must lie in [0, 1]")
    c = diagonal_derivative_poly(coeffs, subset)
    return float(np.polynomial.polynomial.polyval(t, c))


def beta_path_integral(coeffs: MobiusCoefficients, subset: Coalition, order: int) -> float:
    """Integral of Delta_S g along the diagonal against the Beta(order, order) law.

    Evaluated by Gauss-Legendre quadrature on [0, 1].  The integrand is a
    polynomial of degree d - order plus the Beta density's 2(order - 1), so the
    node count is raised automatically to keep the rule exact; 64 nodes cover
    every supported d.  Requires |S| = order and equals the top-order faithful
    Shapley score of S.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    if subset.size != order:
        raise DomainError(f"path integral needs |S| = order, got |S|={subset.size}, order={order}")
    degree = (coeffs.d - order) + 2 * (order - 1)
    n_nodes = max(64, degree // 2 + 2)
    nodes, weights = roots_legendre(n_nodes)
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    c = diagonal_derivative_poly(coeffs, subset)
    vals = np.polynomial.polynomial.polyval(t, c)
    log_beta = math.lgamma(order) * 2 - math.lgamma(2 * order)
    density = np.exp((order - 1) * (np.log(t) + np.log1p(-t)) - log_beta)
    return float(np.sum(w * density * vals))


def mobius_by_size(profile: np.ndarray) -> np.ndarray:
    """Möbius coefficients of a symmetric game given its by-size value profile.

    For a game with v(S) = profile[|S|], every coalition of size s shares the
    coefficient a_s = sum_j (-1)^(s-j) C(s, j) profile[j].
    """
    d = len(profile) - 1
    a = np.zeros(d + 1)
    for s in range(d + 1):
        a[s] = math.fsum(
            (-1.0) ** (s - j) * binom(s, j) * profile[j] for j in range(s + 1)
        )
    return a
