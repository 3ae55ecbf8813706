"""Weighted least-squares machinery behind the faithful interaction indices.

Three entry points:

* ``solve_unconstrained`` - fully finite weights, normal equations assembled
  from cumulative weights in O(n_subsets^2) and solved by Cholesky.
* ``solve_constrained`` - infinite weight at the empty and full coalition,
  handled as equality constraints through the bordered (KKT) system.
* ``solve_sampled`` - rows are an explicit sample of coalitions; supports an
  l1 penalty via cyclic coordinate descent with the two constraints
  eliminated by substitution.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from . import _kernels
from .coalitions import Coalition, subset_count, subset_masks
from .errors import DomainError, NumericError, ParseError
from .games import ValueFunction
from .weighting import WeightingScheme, cumulative_weights

MAX_SOLVE_PLAYERS = 18
CD_TOL = 1e-9
CD_MAX_SWEEPS = 100_000


class UnderDeterminedWarning(UserWarning):
    """A sampled system was rank deficient; a minimum-norm solution was returned."""


@dataclass(frozen=True)
class InteractionIndex:
    """Scores for every coalition of size <= max_order, in enumeration order."""

    d: int
    max_order: int
    kind: str
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = subset_count(self.d, self.max_order)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.shape != (expected,):
            raise DomainError(
                f"index over d={self.d}, order {self.max_order} needs {expected} scores, "
                f"got {vals.shape}"
            )

    @property
    def masks(self) -> list[int]:
        return subset_masks(self.d, self.max_order)

    @property
    def subsets(self) -> list[Coalition]:
        return [Coalition(m, self.d) for m in self.masks]

    def score(self, coalition) -> float:
        if isinstance(coalition, Coalition):
            mask = coalition.bits
        else:
            mask = Coalition.from_players(coalition, self.d).bits
        pos = self.masks.index(mask)
        return float(self.values[pos])

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {
            Coalition(m, self.d).players: float(v) for m, v in zip(self.masks, self.values)
        }

    def top_order_values(self) -> np.ndarray:
        """Scores of the size == max_order entries only."""
        start = subset_count(self.d, self.max_order - 1) if self.max_order > 0 else 0
        return self.values[start:]

    def order_slice(self, size: int) -> np.ndarray:
        lo = subset_count(self.d, size - 1) if size > 0 else 0
        hi = subset_count(self.d, size)
        return self.values[lo:hi]

    def to_dict(self) -> dict:
        scores = []
        for m, v in zip(self.masks, self.values):
            val = float(v)
            scores.append(
                {
                    "subset": list(Coalition(m, self.d).players),
                    "value": None if np.isnan(val) else val,
                }
            )
        return {"d": self.d, "l": self.max_order, "kind": self.kind, "scores": scores}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")


def index_from_dict(payload: dict, location: str = "<payload>") -> InteractionIndex:
    try:
        d = int(payload["d"])
        order = int(payload["l"])
        kind = str(payload.get("kind", "unknown"))
        scores = payload["scores"]
        values = np.empty(len(scores))
        masks = subset_masks(d, order)
        if len(scores) != len(masks):
            raise ParseError(
                f"expected {len(masks)} scores for d={d}, l={order}, got {len(scores)}",
                location,
            )
        for i, (entry, mask) in enumerate(zip(scores, masks)):
            got = Coalition.from_players(entry["subset"], d).bits
            if got != mask:
                raise ParseError(f"score {i} out of enumeration order", location)
            values[i] = np.nan if entry["value"] is None else float(entry["value"])
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise ParseError(f"bad interaction index: {exc}", location) from exc
    return InteractionIndex(d, order, kind, values)


def load_index(path) -> InteractionIndex:
    path = Path(path)
    return index_from_dict(json.loads(path.read_text()), str(path))


def design_vector(coalition: Coalition, max_order: int) -> np.ndarray:
    """Binary row of the order-limited design: 1 at T iff T is inside S."""
    if max_order > coalition.d:
        raise DomainError("max_order cannot exceed the player count")
    masks = subset_masks(coalition.d, max_order)
    out = np.zeros(len(masks))
    for i, t in enumerate(masks):
        if t & coalition.bits == t:
            out[i] = 1.0
    return out


def design_matrix(masks_rows, d: int, max_order: int) -> np.ndarray:
    cols = np.asarray(subset_masks(d, max_order), dtype=np.int64)
    rows = np.asarray(masks_rows, dtype=np.int64)
    return ((rows[:, None] & cols[None, :]) == cols[None, :]).astype(np.float64)


def _kind_for_scheme(scheme: WeightingScheme, constrained: bool) -> str:
    prov = scheme.provenance.get("kind")
    if constrained and prov == "faith-shap":
        return "faith-shap"
    if not constrained and prov == "uniform":
        return "faith-banzhaf"
    return "faith-interaction"


def _weighted_superset_targets(
    game: ValueFunction, scheme: WeightingScheme
) -> np.ndarray:
    """vbar(S) = sum over finite-weight L containing S of mu(L) v(L), all S."""
    d = game.d
    table = game.tabulate()
    pc = _kernels.popcount_table(d).astype(np.int64)
    mu_eff = np.zeros(d + 1)
    for s in scheme.finite_sizes():
        mu_eff[s] = scheme.mu_by_size[s]
    weighted = np.ascontiguousarray(mu_eff[pc] * table)
    return _kernels.superset_sum(weighted, d)


def _gram_from_cumulative(masks: np.ndarray, mubar: np.ndarray, d: int) -> np.ndarray:
    pc = _kernels.popcount_table(d).astype(np.int64)
    union = masks[:, None] | masks[None, :]
    return mubar[pc[union]]


def solve_unconstrained(
    game: ValueFunction, scheme: WeightingScheme, max_order: int, method: str = "cumulative"
) -> InteractionIndex:
    """Minimize the mu-weighted squared fit error over all 2^d coalitions.

    The normal equations have Gram entries mubar(|T union T'|), so assembly is
    quadratic in the number of retained subsets; ``method='direct'`` builds the
    full 2^d design instead (cross-check oracle, d <= 12).
    """
    d = game.d
    if not scheme.fully_finite:
        raise DomainError("unconstrained solve needs a fully finite weighting scheme")
    if scheme.d != d:
        raise DomainError(f"scheme is for d={scheme.d}, game has d={d}")
    if d > MAX_SOLVE_PLAYERS:
        raise DomainError(f"normal-equation assembly capped at d={MAX_SOLVE_PLAYERS}")
    if not 0 <= max_order <= d:
        raise DomainError(f"need 0 <= max_order <= {d}")
    masks = np.asarray(subset_masks(d, max_order), dtype=np.int64)
    if method == "direct":
        table = game.tabulate()
        all_masks = np.arange(1 << d, dtype=np.int64)
        pc = _kernels.popcount_table(d).astype(np.int64)
        mu_rows = scheme.mu_by_size[pc]
        X = design_matrix(all_masks, d, max_order)
        G = X.T @ (mu_rows[:, None] * X)
        rhs = X.T @ (mu_rows * table)
    elif method == "cumulative":
        mubar = cumulative_weights(scheme).mubar_by_size
        G = _gram_from_cumulative(masks, mubar, d)
        rhs = _weighted_superset_targets(game, scheme)[masks]
    else:
        raise DomainError(f"unknown assembly method {method!r}")
    try:
        cho = scipy.linalg.cho_factor(G)
        sol = scipy.linalg.cho_solve(cho, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"normal equations not positive definite: {exc}") from exc
    resid = np.linalg.norm(G @ sol - rhs)
    scale = max(np.linalg.norm(rhs), 1.0)
    if resid > 1e-8 * scale:
        raise NumericError(f"normal-equation residual {resid:.3e} exceeds tolerance")
    return InteractionIndex(d, max_order, _kind_for_scheme(scheme, False), sol)


def solve_constrained(
    game: ValueFunction, scheme: WeightingScheme, max_order: int, method: str = "cumulative"
) -> InteractionIndex:
    """Weighted fit with the empty- and full-set values pinned exactly.

    Solves the stationarity system of the Lagrangian: two multipliers for the
    constraints E_empty = v(empty) and sum of all scores = v(full), and one
    row per retained subset built from cumulative weights mubar(S union T)
    and weighted targets vbar(S).
    """
    d = game.d
    if not (scheme.infinite_at_empty and scheme.infinite_at_full):
        raise DomainError("constrained solve expects infinite weight at the empty and full sets")
    if scheme.d != d:
        raise DomainError(f"scheme is for d={scheme.d}, game has d={d}")
    if d > MAX_SOLVE_PLAYERS:
        raise DomainError(f"KKT assembly capped at d={MAX_SOLVE_PLAYERS}")
    if not 0 <= max_order <= d:
        raise DomainError(f"need 0 <= max_order <= {d}")
    masks = np.asarray(subset_masks(d, max_order), dtype=np.int64)
    n = len(masks)
    v_empty = game.eval_mask(0)
    v_full = game.eval_mask((1 << d) - 1)
    if method == "direct":
        table = game.tabulate()
        all_masks = np.arange(1 << d, dtype=np.int64)
        pc = _kernels.popcount_table(d).astype(np.int64)
        mu_rows = np.zeros(d + 1)
        for s in scheme.finite_sizes():
            mu_rows[s] = scheme.mu_by_size[s]
        mu_rows = mu_rows[pc]
        X = design_matrix(all_masks, d, max_order)
        G = X.T @ (mu_rows[:, None] * X)
        rhs_e = X.T @ (mu_rows * table)
    elif method == "cumulative":
        mubar = cumulative_weights(scheme).mubar_by_size
        G = _gram_from_cumulative(masks, mubar, d)
        rhs_e = _weighted_superset_targets(game, scheme)[masks]
    else:
        raise DomainError(f"unknown assembly method {method!r}")
    # stationarity rows then the two constraint rows
    M = np.zeros((n + 2, n + 2))
    M[:n, :n] = G
    M[0, n] = -0.5
    M[:n, n + 1] = -0.5
    M[n, 0] = 1.0
    M[n + 1, :n] = 1.0
    y = np.concatenate([rhs_e, [v_empty, v_full]])
    try:
        sol = scipy.linalg.solve(M, y)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"singular KKT system: {exc}") from exc
    values = sol[:n]
    gap_empty = abs(values[0] - v_empty)
    gap_full = abs(values.sum() - v_full)
    scale = max(abs(v_empty), abs(v_full), 1.0)
    if gap_empty > 1e-10 * scale or gap_full > 1e-8 * scale:
        raise NumericError(
            f"constraint residuals too large: empty {gap_empty:.3e}, full {gap_full:.3e}"
        )
    return InteractionIndex(d, max_order, _kind_for_scheme(scheme, True), values)


@dataclass
class RegressionProblem:
    """An explicit (sampled or enumerated) weighted regression instance.

    ``rows`` hold coalition masks with positive weights and observed values;
    when ``constrain`` is set the fit is pinned to v_empty at the empty set
    and to v_full for the grand total.  ``l1_penalty`` adds
    lam * sum |E_T| over every non-pinned score.
    """

    d: int
    max_order: int
    row_masks: np.ndarray
    row_weights: np.ndarray
    row_values: np.ndarray
    constrain: bool = True
    v_empty: float = 0.0
    v_full: float = 0.0
    l1_penalty: float = 0.0
    kind: str = "faith-shap"

    def __post_init__(self) -> None:
        self.row_masks = np.asarray(self.row_masks, dtype=np.int64)
        self.row_weights = np.ascontiguousarray(self.row_weights, dtype=np.float64)
        self.row_values = np.ascontiguousarray(self.row_values, dtype=np.float64)
        if len(self.row_masks) == 0:
            raise DomainError("regression needs at least one row")
        if not (len(self.row_masks) == len(self.row_weights) == len(self.row_values)):
            raise DomainError("row arrays must share a length")
        if np.any(self.row_weights <= 0.0):
            raise DomainError("row weights must be positive")
        if self.l1_penalty < 0.0:
            raise DomainError("l1 penalty must be nonnegative")


def _solve_equality_lsq(X: np.ndarray, y: np.ndarray, w: np.ndarray, c0: float, total: float):
    """Equality-constrained least squares via an orthonormal null-space basis.

    Among all least-squares minimizers on the constraint manifold this picks
    the one of minimum Euclidean norm; rank deficiency triggers a warning.
    """
    n, p = X.shape
    C = np.zeros((2, p))
    C[0, 0] = 1.0
    C[1, :] = 1.0
    b = np.array([c0, total])
    base = C.T @ scipy.linalg.solve(C @ C.T, b)
    Z = scipy.linalg.null_space(C)
    sw = np.sqrt(w)
    XZ = (X @ Z) * sw[:, None]
    rw = (y - X @ base) * sw
    coef, _, rank, _ = np.linalg.lstsq(XZ, rw, rcond=None)
    if rank < Z.shape[1]:
        warnings.warn(
            f"sampled system is rank deficient ({rank} of {Z.shape[1]} free directions); "
            "returning the minimum-norm least-squares solution",
            UnderDeterminedWarning,
            stacklevel=3,
        )
    return base + Z @ coef


def solve_sampled(problem: RegressionProblem) -> InteractionIndex:
    """Fit an order-limited surrogate to sampled coalition values.

    Minimizes mean weighted squared error plus ``l1_penalty * sum |E_T|``,
    subject (by default) to the two efficiency constraints.  With a zero
    penalty this is an equality-constrained least squares solve; otherwise a
    cyclic coordinate descent with the constraints eliminated by substitution
    (the empty-set score is fixed, one top-order score carries the total).
    """
    d = problem.d
    masks = np.asarray(subset_masks(d, problem.max_order), dtype=np.int64)
    X = design_matrix(problem.row_masks, d, problem.max_order)
    y = problem.row_values
    w = problem.row_weights
    lam = problem.l1_penalty

    if not problem.constrain:
        sw = np.sqrt(w)
        if lam == 0.0:
            sol, _, rank, _ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
            if rank < X.shape[1]:
                warnings.warn(
                    f"sampled system is rank deficient ({rank} of {X.shape[1]}); "
                    "returning the minimum-norm least-squares solution",
                    UnderDeterminedWarning,
                    stacklevel=2,
                )
        else:
            sol = _run_cd(X, w, y, lam, 0.0, pivot=0)
        return InteractionIndex(d, problem.max_order, problem.kind, sol)

    if len(masks) < 2:
        raise DomainError("constrained fit needs max_order >= 1 (at least two scores)")
    c0 = problem.v_empty
    total = problem.v_full
    if lam == 0.0:
        sol = _solve_equality_lsq(X, y, w, c0, total)
        return InteractionIndex(d, problem.max_order, problem.kind, sol)
    # substitution: residual target with the pinned and pivot columns folded in
    r = y - X[:, 0] * c0 - X[:, -1] * (total - c0)
    A = X[:, 1:-1] - X[:, -1][:, None]
    z = _run_cd(A, w, r, lam, total - c0, pivot=1)
    sol = np.empty(len(masks))
    sol[0] = c0
    sol[1:-1] = z
    sol[-1] = (total - c0) - z.sum()
    return InteractionIndex(d, problem.max_order, problem.kind, sol)


def _run_cd(A, w, y, lam, total, pivot):
    n = A.shape[0]
    Aw = A * w[:, None]
    G = np.ascontiguousarray(2.0 / n * (Aw.T @ A))
    c = np.ascontiguousarray(2.0 / n * (Aw.T @ y))
    z0 = np.zeros(A.shape[1])
    z, sweeps = _kernels.lasso_cd(G, c, lam, total, pivot, z0, CD_MAX_SWEEPS, CD_TOL)
    if sweeps >= CD_MAX_SWEEPS:
        warnings.warn("coordinate descent hit the sweep limit", UserWarning, stacklevel=3)
    return z
