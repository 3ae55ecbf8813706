"""Hot numeric kernels: lattice transforms, per-subset reductions, lasso sweeps.

Each kernel has two implementations: a numba ``@njit`` version and a pure-NumPy
fallback.  The active path is chosen at import time; set the environment
variable ``FAITHSHAP_NO_NUMBA=1`` to force the NumPy path.  Both paths compute
identical values (see ``benchmarks/bench_kernels.py`` for a speed comparison).

All kernels index games by integer mask: ``values[S]`` is v(S) for the d-bit
mask S, arrays have length 2^d.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("FAITHSHAP_NO_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via FAITHSHAP_NO_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    USING_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def popcount_table(d: int) -> np.ndarray:
    """uint8 popcounts of all masks below 2^d."""
    pc = np.zeros(1 << d, dtype=np.uint8)
    for i in range(d):
        half = 1 << i
        pc[half : 2 * half] = pc[:half] + 1
    return pc


# ---------------------------------------------------------------------------
# Lattice transforms over the subset order.
# ---------------------------------------------------------------------------


def _subset_zeta_np(values: np.ndarray, d: int) -> np.ndarray:
    out = values.astype(np.float64).copy()
    for i in range(d):
        step = 1 << i
        blocks = out.reshape(-1, 2 * step)
        blocks[:, step:] += blocks[:, :step]
    return out.reshape(-1)


def _subset_mobius_np(values: np.ndarray, d: int) -> np.ndarray:
    out = values.astype(np.float64).copy()
    for i in range(d):
        step = 1 << i
        blocks = out.reshape(-1, 2 * step)
        blocks[:, step:] -= blocks[:, :step]
    return out.reshape(-1)


def _superset_sum_np(values: np.ndarray, d: int) -> np.ndarray:
    out = values.astype(np.float64).copy()
    for i in range(d):
        step = 1 << i
        blocks = out.reshape(-1, 2 * step)
        blocks[:, :step] += blocks[:, step:]
    return out.reshape(-1)


@njit(cache=True)
def _subset_zeta_nb(values: np.ndarray, d: int) -> np.ndarray:  # pragma: no cover
    out = values.copy()
    n = out.shape[0]
    for i in range(d):
        bit = 1 << i
        for s in range(n):
            if s & bit:
                out[s] += out[s ^ bit]
    return out


@njit(cache=True)
def _subset_mobius_nb(values: np.ndarray, d: int) -> np.ndarray:  # pragma: no cover
    out = values.copy()
    n = out.shape[0]
    for i in range(d):
        bit = 1 << i
        for s in range(n):
            if s & bit:
                out[s] -= out[s ^ bit]
    return out


@njit(cache=True)
def _superset_sum_nb(values: np.ndarray, d: int) -> np.ndarray:  # pragma: no cover
    out = values.copy()
    n = out.shape[0]
    for i in range(d):
        bit = 1 << i
        for s in range(n):
            if not s & bit:
                out[s] += out[s | bit]
    return out


# ---------------------------------------------------------------------------
# Per-subset reductions used by the closed-form indices.
# ---------------------------------------------------------------------------


def _derivative_weighted_sums_np(
    table: np.ndarray, d: int, s_masks: np.ndarray, coeff_by_t: np.ndarray
) -> np.ndarray:
    """out[k] = sum over T subset of complement(S_k) of coeff[|T|] * Delta_{S_k} v(T)."""
    idx = np.arange(1 << d, dtype=np.int64)
    pc = popcount_table(d).astype(np.int64)
    out = np.empty(len(s_masks), dtype=np.float64)
    for k, s in enumerate(s_masks):
        s = int(s)
        t_masks = idx[(idx & s) == 0]
        delta = np.zeros(len(t_masks), dtype=np.float64)
        sbits = int(s).bit_count()
        sub = s
        while True:
            sign = 1.0 if (sbits - int(sub).bit_count()) % 2 == 0 else -1.0
            delta += sign * table[t_masks | sub]
            if sub == 0:
                break
            sub = (sub - 1) & s
        out[k] = float(np.dot(coeff_by_t[pc[t_masks]], delta))
    return out


@njit(cache=True)
def _derivative_weighted_sums_nb(
    table: np.ndarray, d: int, s_masks: np.ndarray, coeff_by_t: np.ndarray
) -> np.ndarray:  # pragma: no cover
    full = (1 << d) - 1
    out = np.empty(len(s_masks), dtype=np.float64)
    for k in range(len(s_masks)):
        s = s_masks[k]
        sbits = 0
        m = s
        while m:
            m &= m - 1
            sbits += 1
        comp = full ^ s
        acc = 0.0
        t = comp
        while True:
            tbits = 0
            m = t
            while m:
                m &= m - 1
                tbits += 1
            delta = 0.0
            sub = s
            while True:
                lbits = 0
                m = sub
                while m:
                    m &= m - 1
                    lbits += 1
                if (sbits - lbits) % 2 == 0:
                    delta += table[t | sub]
                else:
                    delta -= table[t | sub]
                if sub == 0:
                    break
                sub = (sub - 1) & s
            acc += coeff_by_t[tbits] * delta
            if t == 0:
                break
            t = (t - 1) & comp
        out[k] = acc
    return out


def _superset_weighted_sums_np(
    a: np.ndarray, d: int, s_masks: np.ndarray, w_by_size: np.ndarray
) -> np.ndarray:
    """out[k] = sum over T superset of S_k of w[|T|] * a[T]."""
    idx = np.arange(1 << d, dtype=np.int64)
    pc = popcount_table(d).astype(np.int64)
    wa = w_by_size[pc] * a
    out = np.empty(len(s_masks), dtype=np.float64)
    for k, s in enumerate(s_masks):
        s = int(s)
        sel = idx[(idx & s) == s]
        out[k] = float(wa[sel].sum())
    return out


@njit(cache=True)
def _superset_weighted_sums_nb(
    a: np.ndarray, d: int, s_masks: np.ndarray, w_by_size: np.ndarray
) -> np.ndarray:  # pragma: no cover
    full = (1 << d) - 1
    out = np.empty(len(s_masks), dtype=np.float64)
    for k in range(len(s_masks)):
        s = s_masks[k]
        sbits = 0
        m = s
        while m:
            m &= m - 1
            sbits += 1
        comp = full ^ s
        acc = 0.0
        u = comp
        while True:
            ubits = 0
            m = u
            while m:
                m &= m - 1
                ubits += 1
            acc += w_by_size[sbits + ubits] * a[s | u]
            if u == 0:
                break
            u = (u - 1) & comp
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# Coordinate-descent lasso with the efficiency constraints eliminated,
# iterated in covariance (Gram) form.
#
# After substitution the free coordinates z solve
#     min (1/2) z' G z - c' z
#         + lam * ( sum_j |z_j| + pivot * |total - sum_j z_j| )
# where G = (2/n) A' W A and c = (2/n) A' W y come from the weighted design;
# the |total - sum z| term is the penalty on the eliminated top-order
# variable (pivot=1 for the constrained problem, pivot=0 for a plain lasso).
# ---------------------------------------------------------------------------


def _cd_candidate(q: float, m: float, lam: float, gamma: float) -> float:
    lo = min(0.0, gamma)
    hi = max(0.0, gamma)
    best_t = 0.0
    best_f = np.inf
    # region below both kinks, between them, above both, plus the kinks
    cands = (min(m + 2.0 * lam / q, lo), min(max(m, lo), hi), max(m - 2.0 * lam / q, hi), 0.0, gamma)
    for t in cands:
        f = 0.5 * q * (t - m) ** 2 + lam * (abs(t) + abs(gamma - t))
        if f < best_f - 1e-18 or (f < best_f + 1e-18 and abs(t) < abs(best_t)):
            best_f = f
            best_t = t
    return best_t


def _lasso_cd_np(
    G: np.ndarray,
    c: np.ndarray,
    lam: float,
    total: float,
    pivot: int,
    z0: np.ndarray,
    max_sweeps: int,
    tol: float,
) -> tuple[np.ndarray, int]:
    p = G.shape[0]
    z = z0.copy()
    u = G @ z  # maintained gradient piece G z
    ssum = float(z.sum())
    for sweep in range(1, max_sweeps + 1):
        max_step = 0.0
        for j in range(p):
            q = G[j, j]
            if q <= 0.0:
                continue
            zj = z[j]
            m = zj - (u[j] - c[j]) / q
            if lam == 0.0:
                t = m
            elif pivot:
                gamma = total - (ssum - zj)
                t = _cd_candidate(q, m, lam, gamma)
            else:
                t = np.sign(m) * max(abs(m) - lam / q, 0.0)
            step = t - zj
            if step != 0.0:
                u += G[:, j] * step
                z[j] = t
                ssum += step
                max_step = max(max_step, abs(step))
        if max_step < tol:
            return z, sweep
    return z, max_sweeps


@njit(cache=True)
def _lasso_cd_nb(
    G: np.ndarray,
    c: np.ndarray,
    lam: float,
    total: float,
    pivot: int,
    z0: np.ndarray,
    max_sweeps: int,
    tol: float,
) -> tuple[np.ndarray, int]:  # pragma: no cover
    p = G.shape[0]
    z = z0.copy()
    u = G @ z
    ssum = 0.0
    for j in range(p):
        ssum += z[j]
    for sweep in range(1, max_sweeps + 1):
        max_step = 0.0
        for j in range(p):
            q = G[j, j]
            if q <= 0.0:
                continue
            zj = z[j]
            m = zj - (u[j] - c[j]) / q
            if lam == 0.0:
                t = m
            elif pivot:
                gamma = total - (ssum - zj)
                lo = min(0.0, gamma)
                hi = max(0.0, gamma)
                best_t = 0.0
                best_f = np.inf
                for cand in range(5):
                    if cand == 0:
                        t = min(m + 2.0 * lam / q, lo)
                    elif cand == 1:
                        t = min(max(m, lo), hi)
                    elif cand == 2:
                        t = max(m - 2.0 * lam / q, hi)
                    elif cand == 3:
                        t = 0.0
                    else:
                        t = gamma
                    f = 0.5 * q * (t - m) ** 2 + lam * (abs(t) + abs(gamma - t))
                    if f < best_f - 1e-18 or (f < best_f + 1e-18 and abs(t) < abs(best_t)):
                        best_f = f
                        best_t = t
                t = best_t
            else:
                if m > 0.0:
                    t = max(m - lam / q, 0.0)
                else:
                    t = min(m + lam / q, 0.0)
            step = t - zj
            if step != 0.0:
                for i in range(p):
                    u[i] += G[i, j] * step
                z[j] = t
                ssum += step
                if abs(step) > max_step:
                    max_step = abs(step)
        if max_step < tol:
            return z, sweep
    return z, max_sweeps


if USING_NUMBA:
    subset_zeta = _subset_zeta_nb
    subset_mobius = _subset_mobius_nb
    superset_sum = _superset_sum_nb
    derivative_weighted_sums = _derivative_weighted_sums_nb
    superset_weighted_sums = _superset_weighted_sums_nb
    lasso_cd = _lasso_cd_nb
else:
    subset_zeta = _subset_zeta_np
    subset_mobius = _subset_mobius_np
    superset_sum = _superset_sum_np
    derivative_weighted_sums = _derivative_weighted_sums_np
    superset_weighted_sums = _superset_weighted_sums_np
    lasso_cd = _lasso_cd_np
