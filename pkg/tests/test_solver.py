import numpy as np
import pytest

from faithshap import (
    Coalition,
    MobiusSparseGame,
    RegressionProblem,
    TabulatedGame,
    UnderDeterminedWarning,
    builtin_game,
    design_vector,
    faith_banzhaf,
    faithshap_weights,
    mobius_transform,
    solve_constrained,
    solve_sampled,
    solve_unconstrained,
    uniform_weights,
)
from faithshap.coalitions import subset_masks
from faithshap.errors import DomainError
from faithshap.solver import design_matrix, index_from_dict
from faithshap.weighting import WeightingScheme, ab_weights

from conftest import brute_force_fit, coalition, random_table_game, shapley_by_permutations


class TestDesignVector:
    def test_order_one(self):
        v = design_vector(coalition([1, 2], 3), 1)
        assert v.tolist() == [1.0, 1.0, 1.0, 0.0]

    def test_full_pair_lattice(self):
        v = design_vector(coalition([1, 2], 2), 2)
        assert v.tolist() == [1.0, 1.0, 1.0, 1.0]

    def test_empty_set_row(self):
        v = design_vector(Coalition.empty(3), 2)
        assert v[0] == 1.0 and v[1:].sum() == 0.0


class TestUnconstrained:
    def test_full_order_recovers_mobius(self, rng):
        d = 5
        game = random_table_game(rng, d)
        a = mobius_transform(game.tabulate()).a
        for scheme in (uniform_weights(d), ab_weights(d, 0.6, 0.4)):
            idx = solve_unconstrained(game, scheme, d)
            expected = np.array([a[m] for m in idx.masks])
            assert np.allclose(idx.values, expected, atol=1e-8)

    def test_uniform_matches_faith_banzhaf_closed_form(self, rng):
        d = 5
        game = random_table_game(rng, d)
        idx = solve_unconstrained(game, uniform_weights(d), 2)
        closed = faith_banzhaf(game, 2)
        assert np.allclose(idx.values, closed.values, atol=1e-8)

    def test_additive_game_exact_fit(self, rng):
        d = 5
        coefs = rng.normal(size=d)
        table = np.array(
            [sum(coefs[i] for i in range(d) if m >> i & 1) + 2.5 for m in range(1 << d)]
        )
        game = TabulatedGame(table, d)
        idx = solve_unconstrained(game, uniform_weights(d), 2)
        assert idx.values[0] == pytest.approx(2.5, abs=1e-9)
        assert np.allclose(idx.order_slice(1), coefs, atol=1e-9)
        assert np.allclose(idx.order_slice(2), 0.0, atol=1e-9)

    def test_assembly_paths_agree_with_oracle(self, rng):
        d = 6
        game = random_table_game(rng, d)
        scheme = ab_weights(d, 0.7, 0.52)
        fast = solve_unconstrained(game, scheme, 2)
        direct = solve_unconstrained(game, scheme, 2, method="direct")
        oracle = brute_force_fit(game.tabulate(), d, 2, scheme.mu_by_size, constrain=False)
        assert np.allclose(fast.values, direct.values, atol=1e-10)
        assert np.allclose(fast.values, oracle, atol=1e-8)

    def test_rejects_infinite_scheme(self, rng):
        game = random_table_game(rng, 4)
        with pytest.raises(DomainError):
            solve_unconstrained(game, faithshap_weights(4), 2)


class TestConstrained:
    def test_order_one_is_shapley(self, rng):
        d = 6
        game = random_table_game(rng, d)
        idx = solve_constrained(game, faithshap_weights(d), 1)
        phi = shapley_by_permutations(game.tabulate(), d)
        assert np.allclose(idx.order_slice(1), phi, atol=1e-8)
        assert idx.values[0] == pytest.approx(game.eval_mask(0), abs=1e-10)

    def test_example1_table_values(self):
        game = builtin_game("example1", p=0.1, d=11)
        idx = solve_constrained(game, faithshap_weights(11), 2)
        assert idx.order_slice(1)[0] == pytest.approx(0.9545, abs=5e-4)
        assert idx.order_slice(2)[0] == pytest.approx(-0.0909, abs=5e-4)

    def test_unanimity_indicator_solution(self):
        d, order = 6, 3
        game = builtin_game("unanimity", d=d, subset=[2, 3])
        idx = solve_constrained(TabulatedGame(game.tabulate(), d), faithshap_weights(d), order)
        expected = np.zeros(len(idx.values))
        expected[idx.masks.index(0b00110)] = 1.0
        assert np.allclose(idx.values, expected, atol=1e-8)

    def test_assembly_paths_agree_with_oracle(self, rng):
        d = 6
        game = random_table_game(rng, d)
        scheme = faithshap_weights(d)
        fast = solve_constrained(game, scheme, 2)
        direct = solve_constrained(game, scheme, 2, method="direct")
        oracle = brute_force_fit(game.tabulate(), d, 2, scheme.mu_by_size, constrain=True)
        assert np.allclose(fast.values, direct.values, atol=1e-10)
        assert np.allclose(fast.values, oracle, atol=1e-8)

    def test_efficiency_exact(self, rng):
        for d in (4, 6, 8):
            game = random_table_game(rng, d)
            for order in (1, 2, 3):
                idx = solve_constrained(game, faithshap_weights(d), order)
                assert idx.values[0] == pytest.approx(game.eval_mask(0), abs=1e-10)
                assert idx.values[1:].sum() == pytest.approx(
                    game.eval_mask((1 << d) - 1) - game.eval_mask(0), abs=1e-8
                )


class TestSolverProperties:
    def test_linearity(self, rng):
        d, order = 6, 2
        g1 = random_table_game(rng, d)
        g2 = random_table_game(rng, d)
        alpha, beta = 1.7, -0.6
        combo = TabulatedGame(alpha * g1.tabulate() + beta * g2.tabulate(), d)
        w = faithshap_weights(d)
        lhs = solve_constrained(combo, w, order).values
        rhs = alpha * solve_constrained(g1, w, order).values + beta * solve_constrained(g2, w, order).values
        assert np.allclose(lhs, rhs, atol=1e-8)
        uw = uniform_weights(d)
        lhs_u = solve_unconstrained(combo, uw, order).values
        rhs_u = alpha * solve_unconstrained(g1, uw, order).values + beta * solve_unconstrained(g2, uw, order).values
        assert np.allclose(lhs_u, rhs_u, atol=1e-8)

    def test_weight_scale_invariance(self, rng):
        d, order = 6, 2
        game = random_table_game(rng, d)
        w = faithshap_weights(d)
        base = solve_constrained(game, w, order).values
        scaled = solve_constrained(game, w.scaled(37.5), order).values
        assert np.allclose(base, scaled, atol=1e-9)
        uw = uniform_weights(d)
        base_u = solve_unconstrained(game, uw, order).values
        scaled_u = solve_unconstrained(game, uw.scaled(0.01), order).values
        assert np.allclose(base_u, scaled_u, atol=1e-9)

    def test_symmetry_under_player_permutation(self, rng):
        d, order = 6, 2
        table = rng.normal(size=1 << d)
        perm = rng.permutation(d)
        permuted = np.empty_like(table)
        for mask in range(1 << d):
            target = 0
            for i in range(d):
                if mask >> i & 1:
                    target |= 1 << int(perm[i])
            permuted[target] = table[mask]
        w = faithshap_weights(d)
        base = solve_constrained(TabulatedGame(table, d), w, order)
        moved = solve_constrained(TabulatedGame(permuted, d), w, order)
        for mask in base.masks:
            target = 0
            for i in range(d):
                if mask >> i & 1:
                    target |= 1 << int(perm[i])
            assert base.score(Coalition(mask, d)) == pytest.approx(
                moved.score(Coalition(target, d)), abs=1e-9
            )

    def test_dummy_player(self, rng):
        # base game on 5 players, player 6 appended as a dummy
        d = 6
        inner = rng.normal(size=1 << (d - 1))
        table = np.empty(1 << d)
        for mask in range(1 << d):
            table[mask] = inner[mask & ((1 << (d - 1)) - 1)]
        game = TabulatedGame(table, d)
        for scheme in (faithshap_weights(d), ab_weights(d, 0.5, 0.3), uniform_weights(d)):
            if scheme.fully_finite:
                idx = solve_unconstrained(game, scheme, 2)
            else:
                idx = solve_constrained(game, scheme, 2)
            for mask, value in zip(idx.masks, idx.values):
                if mask >> (d - 1) & 1:
                    assert abs(value) <= 1e-8

    def test_objective_never_improved_by_feasible_perturbation(self, rng):
        d, order = 5, 2
        game = random_table_game(rng, d)
        scheme = faithshap_weights(d)
        idx = solve_constrained(game, scheme, order)
        table = game.tabulate()
        masks = np.arange(1 << d)
        X = design_matrix(masks, d, order)
        mu = np.array([scheme.mu_by_size[int(m).bit_count()] for m in masks])
        mu[0] = 0.0
        mu[-1] = 0.0

        def objective(values):
            resid = table - X @ values
            return float(np.sum(mu * resid * resid))

        base = objective(idx.values)
        n = len(idx.values)
        for j in range(1, n):
            for k in range(1, n):
                if j == k:
                    continue
                for delta in (1e-4, -1e-4):
                    shifted = idx.values.copy()
                    shifted[j] += delta
                    shifted[k] -= delta  # keep the total fixed, empty entry untouched
                    assert objective(shifted) >= base - 1e-12


class TestSampled:
    def _full_problem(self, game, d, order, lam=0.0):
        scheme = faithshap_weights(d)
        masks = [m for m in range(1 << d) if 0 < int(m).bit_count() < d]
        return RegressionProblem(
            d,
            order,
            np.array(masks),
            np.array([scheme.mu_by_size[int(m).bit_count()] for m in masks]),
            np.array([game.eval_mask(m) for m in masks]),
            constrain=True,
            v_empty=game.eval_mask(0),
            v_full=game.eval_mask((1 << d) - 1),
            l1_penalty=lam,
        )

    def test_full_sample_consistency(self, rng):
        d, order = 6, 2
        game = random_table_game(rng, d)
        idx = solve_sampled(self._full_problem(game, d, order))
        exact = solve_constrained(game, faithshap_weights(d), order)
        assert np.abs(idx.values - exact.values).max() <= 1e-6

    def test_additive_exact_recovery(self):
        d, order = 5, 2
        coefs = np.array([1.0, 1.2, 1.4, 1.6, 1.8])
        game = MobiusSparseGame({1 << i: float(coefs[i]) for i in range(d)}, d)
        rows = [0, (1 << d) - 1] + [1 << i for i in range(d)] + [0b00111, 0b11100]
        problem = RegressionProblem(
            d,
            order,
            np.array(rows),
            np.ones(len(rows)),
            np.array([game.eval_mask(m) for m in rows]),
            constrain=True,
            v_empty=0.0,
            v_full=float(coefs.sum()),
        )
        with pytest.warns(UnderDeterminedWarning):
            idx = solve_sampled(problem)
        assert np.allclose(idx.order_slice(1), coefs, atol=1e-8)
        assert np.allclose(idx.order_slice(2), 0.0, atol=1e-8)

    def test_huge_penalty_zeroes_pairs_on_additive_data(self):
        d, order = 5, 2
        coefs = np.array([1.0, 1.2, 1.4, 1.6, 1.8])
        game = MobiusSparseGame({1 << i: float(coefs[i]) for i in range(d)}, d)
        problem = self._full_problem(game, d, order, lam=1e6)
        idx = solve_sampled(problem)
        assert np.abs(idx.order_slice(2)).max() <= 1e-6

    def test_lasso_reduces_to_constrained_lsq_at_zero(self, rng):
        d, order = 5, 2
        game = random_table_game(rng, d)
        lsq = solve_sampled(self._full_problem(game, d, order, lam=0.0))
        tiny = solve_sampled(self._full_problem(game, d, order, lam=1e-12))
        assert np.allclose(lsq.values, tiny.values, atol=1e-6)

    def test_deterministic_given_rows(self, rng):
        d, order = 6, 2
        game = random_table_game(rng, d)
        p1 = self._full_problem(game, d, order, lam=1e-3)
        p2 = self._full_problem(game, d, order, lam=1e-3)
        a = solve_sampled(p1).values
        b = solve_sampled(p2).values
        assert np.array_equal(a, b)

    def test_constraints_hold(self, rng):
        d, order = 6, 2
        game = random_table_game(rng, d)
        for lam in (0.0, 1e-3, 1.0):
            idx = solve_sampled(self._full_problem(game, d, order, lam=lam))
            assert idx.values[0] == pytest.approx(game.eval_mask(0), abs=1e-12)
            assert idx.values[1:].sum() == pytest.approx(
                game.eval_mask((1 << d) - 1) - game.eval_mask(0), abs=1e-9
            )


class TestIndexContainer:
    def test_score_lookup_and_json(self, rng, tmp_path):
        d = 4
        game = random_table_game(rng, d)
        idx = solve_constrained(game, faithshap_weights(d), 2)
        payload = idx.to_dict()
        assert payload["d"] == d and payload["l"] == 2
        assert payload["scores"][0]["subset"] == []
        again = index_from_dict(payload)
        assert np.allclose(again.values, idx.values)
        path = tmp_path / "idx.json"
        idx.save(path)
        from faithshap import load_index

        assert np.allclose(load_index(path).values, idx.values)

    def test_wrong_length_rejected(self):
        from faithshap import InteractionIndex

        with pytest.raises(DomainError):
            InteractionIndex(4, 2, "faith-shap", np.zeros(3))
