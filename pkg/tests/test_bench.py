import numpy as np
import pytest

from faithshap import (
    InteractionIndex,
    avg_squared_distance,
    builtin_game,
    faith_shap,
    precision_at_k,
    shapley_taylor,
)
from faithshap.bench import approx_curve, convergence_bench, run_example_table
from faithshap.coalitions import binom, subset_count
from faithshap.errors import ConfigError, DomainError

from conftest import random_table_game


def _with_top_offset(index, offset):
    values = index.values.copy()
    start = subset_count(index.d, index.max_order - 1)
    values[start:] += offset
    return InteractionIndex(index.d, index.max_order, index.kind, values)


class TestMetrics:
    def test_exact_match_is_zero(self, rng):
        idx = faith_shap(random_table_game(rng, 6), 2)
        assert avg_squared_distance(idx, idx) == 0.0
        assert precision_at_k(idx, idx, 5) == 1.0

    def test_constant_offset(self, rng):
        idx = faith_shap(random_table_game(rng, 6), 2)
        shifted = _with_top_offset(idx, 0.1)
        assert avg_squared_distance(idx, shifted) == pytest.approx(0.01, abs=1e-12)

    def test_matches_direct_recomputation(self, rng):
        d, order = 6, 2
        a = faith_shap(random_table_game(rng, d), order)
        b = faith_shap(random_table_game(rng, d), order)
        direct = float(
            np.sum((a.top_order_values() - b.top_order_values()) ** 2) / binom(d, order)
        )
        assert avg_squared_distance(a, b) == pytest.approx(direct, rel=1e-12)

    def test_sign_flip_keeps_precision(self, rng):
        idx = faith_shap(random_table_game(rng, 6), 2)
        flipped = InteractionIndex(idx.d, idx.max_order, idx.kind, -idx.values)
        assert precision_at_k(idx, flipped, 5) == 1.0

    def test_adversarial_reversal_scores_zero(self):
        d, order = 6, 2
        n = binom(d, order)
        lead = subset_count(d, order - 1)
        base = np.zeros(lead + n)
        est = np.zeros(lead + n)
        half = n // 2
        base[lead : lead + half] = 10.0  # true top half
        base[lead + half :] = 1.0
        est[lead : lead + half] = 1.0
        est[lead + half :] = 10.0  # estimate ranks the bottom half on top
        exact = InteractionIndex(d, order, "faith-shap", base)
        approx = InteractionIndex(d, order, "faith-shap", est)
        assert precision_at_k(exact, approx, half) == 0.0

    def test_shape_and_k_validation(self, rng):
        a = faith_shap(random_table_game(rng, 5), 2)
        b = faith_shap(random_table_game(rng, 5), 1)
        with pytest.raises(DomainError):
            avg_squared_distance(a, b)
        with pytest.raises(DomainError):
            precision_at_k(a, a, binom(5, 2) + 1)


class TestExampleTables:
    def test_example1_values(self):
        result = run_example_table(1, 0.1, 2)
        t = result.tables
        assert t["faith-shap"]["order1"] == pytest.approx(0.95, abs=5e-3)
        assert t["faith-shap"]["order2"] == pytest.approx(-0.091, abs=5e-3)
        assert t["faith-shap"]["empty"] == pytest.approx(0.0, abs=5e-3)
        assert t["shapley-taylor"]["order1"] == pytest.approx(0.0, abs=5e-3)
        assert t["shapley-taylor"]["order2"] == pytest.approx(0.1, abs=5e-3)
        assert t["shapley-interaction"]["order1"] == pytest.approx(0.5, abs=5e-3)
        assert t["banzhaf-interaction"]["order2"] == pytest.approx(-0.113, abs=5e-3)
        assert t["faith-banzhaf"]["order1"] == pytest.approx(1.08, abs=5e-3)
        assert t["faith-banzhaf"]["empty"] == pytest.approx(-0.24, abs=5e-3)

    def test_example1_p02(self):
        t = run_example_table(1, 0.2, 2).tables
        assert t["faith-shap"]["order1"] == pytest.approx(0.95, abs=5e-3)
        assert t["faith-shap"]["order2"] == pytest.approx(-0.191, abs=5e-3)
        assert t["shapley-taylor"]["order2"] == pytest.approx(0.0, abs=5e-3)
        assert t["banzhaf-interaction"]["order1"] == pytest.approx(0.009, abs=5e-3)
        assert t["banzhaf-interaction"]["order2"] == pytest.approx(-0.213, abs=5e-3)

    def test_example2_values(self):
        t = run_example_table(2, None, 2).tables
        assert t["faith-shap"]["order1"] == pytest.approx(1.20, abs=5e-3)
        assert t["faith-shap"]["order2"] == pytest.approx(0.07, abs=5e-3)
        assert t["shapley-taylor"]["order1"] == pytest.approx(3.0, abs=5e-3)
        assert t["shapley-taylor"]["order2"] == pytest.approx(-0.29, abs=5e-3)
        assert t["shapley-interaction"]["order1"] == pytest.approx(1.55, abs=5e-3)
        assert t["shapley-interaction"]["order2"] == pytest.approx(-0.12, abs=5e-3)
        assert t["faith-banzhaf"]["order1"] == pytest.approx(1.19, abs=5e-3)
        assert t["faith-banzhaf"]["order2"] == pytest.approx(0.09, abs=5e-3)
        assert t["banzhaf-interaction"]["order1"] == pytest.approx(1.65, abs=5e-3)

    def test_order_one_column(self):
        t1 = run_example_table(1, 0.1, 1).tables
        assert t1["faith-shap"]["order1"] == pytest.approx(0.5, abs=5e-3)
        assert t1["banzhaf-interaction"]["order1"] == pytest.approx(0.51, abs=5e-3)
        t2 = run_example_table(2, None, 1).tables
        assert t2["faith-shap"]["order1"] == pytest.approx(1.55, abs=5e-3)
        assert t2["shapley-interaction"]["order1"] == pytest.approx(1.55, abs=5e-3)
        assert t2["faith-banzhaf"]["order1"] == pytest.approx(1.65, abs=5e-3)

    def test_bad_inputs(self):
        with pytest.raises(ConfigError):
            run_example_table(1, None, 2)
        with pytest.raises(ConfigError):
            run_example_table(3, 0.1, 2)


class TestApproxCurve:
    def test_faith_shap_endpoints_exact(self):
        game = builtin_game("example1", p=0.1, d=11)
        rows = approx_curve(game, faith_shap(game, 2))
        assert rows[0]["approx"] == pytest.approx(rows[0]["value"], abs=1e-8)
        assert rows[11]["approx"] == pytest.approx(rows[11]["value"], abs=1e-8)

    def test_taylor_exact_at_sizes_0_1_d(self):
        game = builtin_game("example1", p=0.1, d=11)
        rows = approx_curve(game, shapley_taylor(game, 2))
        for s in (0, 1, 11):
            assert rows[s]["approx"] == pytest.approx(rows[s]["value"], abs=1e-8)
        mids = [abs(r["approx"] - r["value"]) for r in rows[2:11]]
        assert max(mids) > 1e-3  # unfaithful in between

    def test_combinatorial_expansion(self):
        game = builtin_game("example2", d=11)
        idx = faith_shap(game, 2)
        rows = approx_curve(game, idx)
        e0 = idx.values[0]
        e1 = float(idx.order_slice(1)[0])
        e2 = float(idx.order_slice(2)[0])
        for s, row in enumerate(rows):
            expected = e0 + s * e1 + binom(s, 2) * e2
            assert row["approx"] == pytest.approx(expected, abs=1e-9)

    def test_rejects_asymmetric_game(self, rng):
        game = random_table_game(rng, 5)
        idx = faith_shap(game, 2)
        with pytest.raises(DomainError):
            approx_curve(game, idx)


class TestConvergenceBench:
    def test_smoke_and_budget_accounting(self, rng):
        game = builtin_game("sparse_synthetic", d=10, n_terms=6, max_term_size=3, seed=5)
        res = convergence_bench(
            game,
            ["faith-shap", "shapley-interaction"],
            budgets=[60, 120],
            seeds=3,
            max_order=2,
        )
        assert len(res.traces) == 4
        for row in res.traces:
            assert row["evaluations_mean"] <= row["budget"]
            assert row["avg_sq_dist_mean"] >= 0.0
        assert set(res.runtime) == {"faith-shap", "shapley-interaction"}

    def test_full_budget_hits_floor(self):
        game = builtin_game("sparse_synthetic", d=15, n_terms=10, max_term_size=5, seed=6)
        res = convergence_bench(game, ["faith-shap"], budgets=[1 << 15], seeds=2, max_order=2)
        assert res.traces[-1]["avg_sq_dist_mean"] < 1e-6

    def test_median_trace_non_increasing_on_random_games(self, rng):
        # sampling estimator on a dense random game: the budget sweep's median
        # error must not increase (up to a small slack for sampling noise)
        d = 12
        game = random_table_game(rng, d)
        budgets = [300, 600, 1200, 2400]
        res = convergence_bench(game, ["faith-shap"], budgets=budgets, seeds=20, max_order=2)
        medians = [row["avg_sq_dist_median"] for row in res.traces]
        for earlier, later in zip(medians, medians[1:]):
            assert later <= earlier * 1.1

    def test_unknown_estimator(self, rng):
        game = builtin_game("sparse_synthetic", d=8, n_terms=4, max_term_size=3, seed=1)
        with pytest.raises(ConfigError):
            convergence_bench(game, ["nope"], [50], 2, 2)
