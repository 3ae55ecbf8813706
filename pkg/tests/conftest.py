"""Shared fixtures and independent oracles used across the test suite.

The oracles here (dense-design regression, factorial-enumeration Shapley)
deliberately avoid the fast paths in the package so that agreement between
the two is meaningful.
"""

import itertools
import math

import numpy as np
import pytest

from faithshap import Coalition, TabulatedGame
from faithshap.coalitions import subset_masks


def random_table_game(rng: np.random.Generator, d: int) -> TabulatedGame:
    return TabulatedGame(rng.normal(size=1 << d), d)


def brute_force_fit(table, d, max_order, mu_by_size, constrain):
    """Reference weighted fit from the dense 2^d design matrix.

    With ``constrain`` the empty/full rows become hard equalities (their
    weights are ignored); otherwise every row is weighted by its size weight.
    """
    cols = subset_masks(d, max_order)
    n_cols = len(cols)
    rows = np.arange(1 << d)
    X = np.zeros((1 << d, n_cols))
    for j, t in enumerate(cols):
        X[:, j] = (rows & t) == t
    w = np.array([mu_by_size[int(m).bit_count()] for m in rows], dtype=np.float64)
    if not constrain:
        sw = np.sqrt(w)
        sol, *_ = np.linalg.lstsq(X * sw[:, None], table * sw, rcond=None)
        return sol
    w[0] = 0.0
    w[-1] = 0.0
    C = np.zeros((2, n_cols))
    C[0, 0] = 1.0
    C[1, :] = 1.0
    b = np.array([table[0], table[-1]])
    A = X * np.sqrt(w)[:, None]
    y = table * np.sqrt(w)
    K = np.block([[2 * A.T @ A, C.T], [C, np.zeros((2, 2))]])
    rhs = np.concatenate([2 * A.T @ y, b])
    sol = np.linalg.solve(K, rhs)
    return sol[:n_cols]


def shapley_by_permutations(table, d):
    """Shapley values by enumerating all d! orderings (d <= 7)."""
    phi = np.zeros(d)
    count = 0
    for perm in itertools.permutations(range(d)):
        mask = 0
        for player in perm:
            before = table[mask]
            mask |= 1 << player
            phi[player] += table[mask] - before
        count += 1
    return phi / count


def discrete_derivative_brute(table, s_mask, t_mask):
    """Inclusion-exclusion straight from the definition."""
    s_players = [i for i in range(64) if s_mask >> i & 1]
    total = 0.0
    for picks in itertools.product([0, 1], repeat=len(s_players)):
        l_mask = 0
        for bit, player in zip(picks, s_players):
            if bit:
                l_mask |= 1 << player
        sign = (-1) ** (len(s_players) - sum(picks))
        total += sign * table[t_mask | l_mask]
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def coalition(players, d):
    return Coalition.from_players(players, d)
