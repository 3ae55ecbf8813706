"""Monte-Carlo estimation of interaction indices under an evaluation budget.

Budgets count *distinct* value-function evaluations: repeated coalitions are
memoized and billed once.  All randomness flows through counter-based Philox
streams: ``rng_stream(seed, i)`` keys the generator with the 128-bit pair
(seed, i), and repetition i of a benchmark uses stream i, so runs are
reproducible and repetitions are independent by construction.
"""

from __future__ import annotations


from dataclasses import dataclass, field

import numpy as np

from .coalitions import Coalition, iter_size_masks, subset_masks
from .errors import ConfigError, DomainError
from .games import ValueFunction
from .solver import InteractionIndex, RegressionProblem, solve_sampled
from .weighting import faithshap_weights

FAITH_SHAP_SAMPLING = "faith-shap"
SHAPLEY_TAYLOR_PERMUTATION = "shapley-taylor"
SHAPLEY_INTERACTION_PERMUTATION = "shapley-interaction"
_DRAW_BATCH = 256
ESTIMATOR_KINDS = (
    FAITH_SHAP_SAMPLING,
    SHAPLEY_TAYLOR_PERMUTATION,
    SHAPLEY_INTERACTION_PERMUTATION,
)


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for (seed, stream); streams never overlap."""
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class EstimateConfig:
    """Full provenance of one estimation run."""

    kind: str
    order: int
    budget: int
    seed: int = 0
    lam: float = 0.0
    max_passes: int | None = None
    checkpoint_every: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ESTIMATOR_KINDS:
            raise ConfigError(f"unknown estimator kind {self.kind!r}; pick from {ESTIMATOR_KINDS}")
        if self.order < 1:
            raise ConfigError("order must be >= 1")
        if self.kind == SHAPLEY_TAYLOR_PERMUTATION and self.order < 2:
            raise ConfigError("the permutation Shapley-Taylor estimator needs order >= 2")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.lam < 0.0:
            raise ConfigError("l1 penalty must be nonnegative")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ConfigError("checkpoint_every must be positive")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "budget": self.budget,
            "seed": self.seed,
            "lambda": self.lam,
            "max_passes": self.max_passes,
            "checkpoint_every": self.checkpoint_every,
        }


@dataclass
class EstimateReport:
    index: InteractionIndex
    evaluations_used: int
    config: EstimateConfig
    checkpoints: list[tuple[int, InteractionIndex]] = field(default_factory=list)


class _MemoGame:
    """Memoizing wrapper; `evaluations` counts distinct coalitions touched."""

    def __init__(self, game: ValueFunction) -> None:
        self.game = game
        self.cache: dict[int, float] = {}

    def eval_mask(self, mask: int) -> float:
        hit = self.cache.get(mask)
        if hit is None:
            hit = self.game.eval_mask(mask)
            self.cache[mask] = hit
        return hit

    @property
    def evaluations(self) -> int:
        return len(self.cache)


def _draw_masks(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    sizes = np.arange(1, d)
    probs = 1.0 / (sizes * (d - sizes))
    probs /= probs.sum()
    drawn = rng.choice(sizes, size=n, p=probs)
    keys = rng.random((n, d))
    order = np.argsort(keys, axis=1)
    bit_rows = (np.int64(1) << order.astype(np.int64)).astype(np.int64)
    ranks = np.arange(d, dtype=np.int64)[None, :]
    keep = ranks < drawn[:, None]
    return np.where(keep, bit_rows, 0).sum(axis=1)


def sample_coalition_masks(d: int, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Masks of n i.i.d. draws from the faithful-Shapley sampling law.

    Sizes s in 1..d-1 are drawn with probability proportional to
    1 / (s (d - s)); the members are then a uniform subset of that size
    (the first s entries of a random ordering).  The binomial factor of the
    coalition-level weights cancels against the uniform within-size choice.
    """
    if not 2 <= d <= 63:
        raise DomainError("sampling needs 2 <= d <= 63 (masks are built in int64)")
    if n < 1:
        raise DomainError("need at least one draw")
    return _draw_masks(rng_stream(seed, stream), d, n)


def sample_coalitions(d: int, n: int, seed: int, stream: int = 0) -> list[Coalition]:
    """Coalition objects for ``sample_coalition_masks``; same stream, same draws."""
    return [Coalition(int(m), d) for m in sample_coalition_masks(d, n, seed, stream)]


def estimate_faith_shap(game: ValueFunction, cfg: EstimateConfig) -> EstimateReport:
    """Regression-based faithful Shapley estimate under a budget.

    Evaluates the empty and full coalitions (the constraint targets), then
    keeps sampling coalitions until budget - 2 distinct ones have been
    evaluated (duplicate draws are free but stay in the regression as repeat
    rows), and solves the sampled regression with uniform row weights and
    cfg.lam as l1 penalty.  A budget covering the whole lattice switches to
    exact enumeration with the faithful-Shapley row weights, which
    reproduces the exact index at lam = 0.
    """
    if cfg.kind != FAITH_SHAP_SAMPLING:
        raise ConfigError(f"config kind {cfg.kind!r} does not match this estimator")
    d = game.d
    if cfg.budget < d + 2:
        raise ConfigError(f"budget must be at least d + 2 = {d + 2}")
    memo = _MemoGame(game)
    v_empty = memo.eval_mask(0)
    v_full = memo.eval_mask((1 << d) - 1)

    if cfg.budget >= 1 << d:
        scheme = faithshap_weights(d)
        masks = [m for m in range(1 << d) if 0 < int(m).bit_count() < d]
        weights = [scheme.mu_by_size[int(m).bit_count()] for m in masks]
        values = [memo.eval_mask(m) for m in masks]
        problem = RegressionProblem(
            d,
            cfg.order,
            np.array(masks),
            np.array(weights),
            np.array(values),
            constrain=True,
            v_empty=v_empty,
            v_full=v_full,
            l1_penalty=cfg.lam,
        )
        index = solve_sampled(problem)
        return EstimateReport(index, memo.evaluations, cfg)

    rng = rng_stream(cfg.seed)
    masks_list: list[int] = []
    values_list: list[float] = []
    checkpoints: list[tuple[int, InteractionIndex]] = []
    next_cp = cfg.checkpoint_every if cfg.checkpoint_every else None

    def _solve_now() -> InteractionIndex:
        # merge duplicate rows: k copies of a row equal one row of weight k
        # (weights renormalized so the mean-squared term keeps its scale)
        counts: dict[int, int] = {}
        first_value: dict[int, float] = {}
        for mask, value in zip(masks_list, values_list):
            counts[mask] = counts.get(mask, 0) + 1
            first_value.setdefault(mask, value)
        scale = len(counts) / len(masks_list)
        problem = RegressionProblem(
            d,
            cfg.order,
            np.array(list(counts.keys())),
            np.array([c * scale for c in counts.values()]),
            np.array([first_value[m] for m in counts.keys()]),
            constrain=True,
            v_empty=v_empty,
            v_full=v_full,
            l1_penalty=cfg.lam,
        )
        return solve_sampled(problem)

    # duplicate draws are free under distinct-evaluation accounting, so keep
    # drawing until the budget is actually spent (bounded by a draw cap in
    # case the lattice is nearly exhausted)
    max_draws = 50 * (cfg.budget - 2)
    done = False
    while not done and len(masks_list) < max_draws:
        for mask in _draw_masks(rng, d, _DRAW_BATCH):
            mask = int(mask)
            masks_list.append(mask)
            values_list.append(memo.eval_mask(mask))
            if next_cp is not None and memo.evaluations >= next_cp:
                checkpoints.append((memo.evaluations, _solve_now()))
                while next_cp <= memo.evaluations:
                    next_cp += cfg.checkpoint_every
            if memo.evaluations >= cfg.budget or len(masks_list) >= max_draws:
                done = True
                break
    index = _solve_now()
    if checkpoints and checkpoints[-1][0] == memo.evaluations:
        checkpoints[-1] = (memo.evaluations, index)
    elif next_cp is not None:
        checkpoints.append((memo.evaluations, index))
    return EstimateReport(index, memo.evaluations, cfg, checkpoints)


def _permutation_run(game, cfg, collect_pass, memo, lower_exact=None):
    """Shared permutation-pass driver with exact budget accounting.

    ``collect_pass(perm)`` yields (subset_mask, context_mask) accumulation
    targets for one permutation.  Before running a pass, its coalition needs
    are simulated; the pass only runs if every new evaluation fits the budget.
    """
    d = game.d
    if cfg.max_passes is None and cfg.budget >= (1 << d):
        raise ConfigError(
            "budget covers the whole lattice, so it can never stop the sampler; "
            "set max_passes explicitly"
        )
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    rng = rng_stream(cfg.seed)
    checkpoints: list[tuple[int, InteractionIndex]] = []
    next_cp = cfg.checkpoint_every if cfg.checkpoint_every else None

    def current_index() -> InteractionIndex:
        return _means_to_index(game.d, cfg, sums, counts, lower_exact)

    passes = 0
    while cfg.max_passes is None or passes < cfg.max_passes:
        perm = rng.permutation(d)
        needed: set[int] = set()
        pairs = list(collect_pass(perm))
        for s_mask, t_mask in pairs:
            sub = s_mask
            while True:
                needed.add(t_mask | sub)
                if sub == 0:
                    break
                sub = (sub - 1) & s_mask
        new = sum(1 for m in needed if m not in memo.cache)
        if memo.evaluations + new > cfg.budget:
            break
        for s_mask, t_mask in pairs:
            delta = 0.0
            sbits = int(s_mask).bit_count()
            sub = s_mask
            while True:
                sign = 1.0 if (sbits - int(sub).bit_count()) % 2 == 0 else -1.0
                delta += sign * memo.eval_mask(t_mask | sub)
                if sub == 0:
                    break
                sub = (sub - 1) & s_mask
            sums[s_mask] = sums.get(s_mask, 0.0) + delta
            counts[s_mask] = counts.get(s_mask, 0) + 1
        passes += 1
        if next_cp is not None and memo.evaluations >= next_cp:
            checkpoints.append((memo.evaluations, current_index()))
            while next_cp <= memo.evaluations:
                next_cp += cfg.checkpoint_every
    if passes == 0:
        raise ConfigError(
            f"budget {cfg.budget} cannot accommodate a single permutation pass"
        )
    if next_cp is not None and (not checkpoints or checkpoints[-1][0] != memo.evaluations):
        checkpoints.append((memo.evaluations, current_index()))
    return sums, counts, passes, checkpoints


def _means_to_index(d, cfg, sums, counts, lower_exact: dict[int, float] | None = None):
    masks = subset_masks(d, cfg.order)
    values = np.full(len(masks), np.nan)
    for i, m in enumerate(masks):
        if lower_exact is not None and m in lower_exact:
            values[i] = lower_exact[m]
        elif counts.get(m):
            values[i] = sums[m] / counts[m]
    return InteractionIndex(d, cfg.order, cfg.kind, values)


def estimate_shapley_taylor(game: ValueFunction, cfg: EstimateConfig) -> EstimateReport:
    """Permutation sampler for the top-order Shapley-Taylor scores.

    Each pass draws one ordering; every size-order subset S accumulates its
    derivative in the presence of the predecessors of its leftmost member.
    Lower orders are the exact empty-context derivatives.
    """
    if cfg.kind != SHAPLEY_TAYLOR_PERMUTATION:
        raise ConfigError(f"config kind {cfg.kind!r} does not match this estimator")
    d = game.d
    ell = cfg.order
    top_masks = list(iter_size_masks(d, ell))
    memo = _MemoGame(game)
    # the exact below-top scores are empty-context derivatives; evaluate them
    # first so their cost is charged against the budget before any pass runs
    lower_exact: dict[int, float] = {}
    for m in subset_masks(d, ell - 1):
        if memo.evaluations >= cfg.budget:
            raise ConfigError(f"budget {cfg.budget} cannot cover the exact lower orders")
        lower_exact[m] = _empty_context_derivative(memo, m)

    def collect(perm):
        pos = np.empty(d, dtype=np.int64)
        for k, player in enumerate(perm):
            pos[player] = k
        prefix = np.zeros(d + 1, dtype=np.int64)
        for k in range(d):
            prefix[k + 1] = prefix[k] | (1 << int(perm[k]))
        for s_mask in top_masks:
            kmin = d
            m = s_mask
            while m:
                i = (m & -m).bit_length() - 1
                if pos[i] < kmin:
                    kmin = pos[i]
                m &= m - 1
            yield s_mask, int(prefix[kmin])

    sums, counts, passes, checkpoints = _permutation_run(game, cfg, collect, memo, lower_exact)
    index = _means_to_index(d, cfg, sums, counts, lower_exact)
    return EstimateReport(index, memo.evaluations, cfg, checkpoints)


def estimate_shapley_interaction(game: ValueFunction, cfg: EstimateConfig) -> EstimateReport:
    """Permutation sampler for the Shapley interaction index.

    Each pass slides a size-order window along one random ordering; the window
    subset accumulates its derivative in the presence of the elements before
    the window.  Only size-order entries are estimated; never-visited entries
    stay NaN.
    """
    if cfg.kind != SHAPLEY_INTERACTION_PERMUTATION:
        raise ConfigError(f"config kind {cfg.kind!r} does not match this estimator")
    d = game.d
    ell = cfg.order
    if ell > d:
        raise ConfigError("order cannot exceed the player count")
    memo = _MemoGame(game)

    def collect(perm):
        t_mask = 0
        window = 0
        for k in range(ell):
            window |= 1 << int(perm[k])
        yield window, 0
        for k in range(1, d - ell + 1):
            t_mask |= 1 << int(perm[k - 1])
            window = 0
            for j in range(k, k + ell):
                window |= 1 << int(perm[j])
            yield window, t_mask

    sums, counts, passes, checkpoints = _permutation_run(game, cfg, collect, memo)
    index = _means_to_index(d, cfg, sums, counts)
    return EstimateReport(index, memo.evaluations, cfg, checkpoints)


def _empty_context_derivative(memo: _MemoGame, s_mask: int) -> float:
    sbits = int(s_mask).bit_count()
    total = 0.0
    sub = s_mask
    while True:
        sign = 1.0 if (sbits - int(sub).bit_count()) % 2 == 0 else -1.0
        total += sign * memo.eval_mask(sub)
        if sub == 0:
            break
        sub = (sub - 1) & s_mask
    return total


def estimate(game: ValueFunction, cfg: EstimateConfig) -> EstimateReport:
    """Dispatch to the estimator selected by cfg.kind."""
    if cfg.kind == FAITH_SHAP_SAMPLING:
        return estimate_faith_shap(game, cfg)
    if cfg.kind == SHAPLEY_TAYLOR_PERMUTATION:
        return estimate_shapley_taylor(game, cfg)
    return estimate_shapley_interaction(game, cfg)
