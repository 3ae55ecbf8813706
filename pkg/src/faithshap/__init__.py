"""Game-theoretic feature-interaction indices over set value functions.

Exact closed forms (faithful Shapley/Banzhaf, Shapley/Banzhaf interaction,
Shapley-Taylor), the weighted-regression solvers behind them, and budgeted
Monte-Carlo estimators, over games given as tables, sparse unanimity
expansions, builtin analytic examples, or callbacks.
"""

from .coalitions import (
    BinomialTable,
    Coalition,
    binom,
    enumerate_subsets,
    subset_count,
    subset_masks,
)
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    FaithShapError,
    NumericError,
    ParseError,
    ValidityError,
)
from .estimators import (
    EstimateConfig,
    EstimateReport,
    estimate,
    estimate_faith_shap,
    estimate_shapley_interaction,
    estimate_shapley_taylor,
    rng_stream,
    sample_coalitions,
)
from .games import (
    CallbackGame,
    GameReduction,
    MobiusSparseGame,
    SymmetricGame,
    TabulatedGame,
    ValueFunction,
    builtin_game,
    load_value_function,
    merge_players,
    mobius_order,
    reduce_game,
    remove_player,
    remove_player_with,
    save_value_function,
)
from .indices import (
    CardinalProbCoefficients,
    banzhaf_interaction,
    cardinal_prob_coeffs,
    faith_banzhaf,
    faith_shap,
    faith_shap_top_order,
    shapley_interaction,
    shapley_taylor,
)
from .metrics import avg_squared_distance, precision_at_k
from .solver import (
    InteractionIndex,
    RegressionProblem,
    UnderDeterminedWarning,
    design_vector,
    load_index,
    solve_constrained,
    solve_sampled,
    solve_unconstrained,
)
from .transforms import (
    MobiusCoefficients,
    beta_path_integral,
    discrete_derivative,
    inverse_mobius,
    mobius_transform,
    multilinear_eval,
    multilinear_s_derivative,
)
from .weighting import (
    CumulativeWeights,
    WeightingScheme,
    ab_from_ratios,
    ab_weights,
    cumulative_weights,
    faithshap_weights,
    uniform_weights,
    validate_ab,
)

__version__ = "0.1.0"
