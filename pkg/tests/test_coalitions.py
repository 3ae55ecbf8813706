import numpy as np
import pytest

from faithshap import Coalition, binom, enumerate_subsets, subset_count
from faithshap.coalitions import BinomialTable, iter_size_masks, subset_masks
from faithshap.errors import DomainError


class TestCoalition:
    def test_players_round_trip(self):
        c = Coalition.from_players([1, 3], 5)
        assert c.bits == 0b101
        assert c.players == (1, 3)
        assert c.size == 2
        assert 3 in c and 2 not in c

    def test_bounds(self):
        with pytest.raises(DomainError):
            Coalition(4, 2)
        with pytest.raises(DomainError):
            Coalition(0, 0)
        with pytest.raises(DomainError):
            Coalition.from_players([6], 5)

    def test_set_algebra(self):
        a = Coalition.from_players([1, 2], 4)
        b = Coalition.from_players([2, 3], 4)
        assert a.union(b).players == (1, 2, 3)
        assert a.intersection(b).players == (2,)
        assert a.difference(b).players == (1,)
        assert a.complement().players == (3, 4)
        assert a.issubset(a.union(b))

    def test_subset_relation_matches_membership(self, rng):
        for _ in range(1000):
            d = int(rng.integers(1, 13))
            x = int(rng.integers(0, 1 << d))
            y = int(rng.integers(0, 1 << d))
            a, b = Coalition(x, d), Coalition(y, d)
            elementwise = set(a.players) <= set(b.players)
            assert a.issubset(b) == elementwise
            assert b.issuperset(a) == elementwise


class TestEnumeration:
    def test_two_player_full_lattice(self):
        got = [c.players for c in enumerate_subsets(2, 2)]
        assert got == [(), (1,), (2,), (1, 2)]

    def test_singletons_only(self):
        got = list(enumerate_subsets(3, 1))
        assert len(got) == 4
        assert [c.players for c in got] == [(), (1,), (2,), (3,)]

    def test_eleven_choose_up_to_two(self):
        assert len(list(enumerate_subsets(11, 2))) == 67

    def test_order_is_size_then_mask(self):
        masks = [c.bits for c in enumerate_subsets(5, 5)]
        keyed = sorted(masks, key=lambda m: (int(m).bit_count(), m))
        assert masks == keyed
        assert masks == subset_masks(5, 5)

    def test_full_power_set_sizes(self):
        for d in range(1, 13):
            assert sum(1 for _ in enumerate_subsets(d, d)) == 1 << d

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            list(enumerate_subsets(26, 2))
        with pytest.raises(DomainError):
            list(enumerate_subsets(4, 5))

    def test_size_masks_ascending(self):
        masks = list(iter_size_masks(6, 3))
        assert masks == sorted(masks)
        assert all(int(m).bit_count() == 3 for m in masks)
        assert len(masks) == binom(6, 3)


class TestCounts:
    def test_examples(self):
        assert subset_count(11, 2) == 67
        assert subset_count(9, 0) == 1
        assert subset_count(9, 9) == 512

    def test_binom_values(self):
        assert binom(11, 2) == 55
        assert binom(5, -1) == 0
        assert binom(5, 6) == 0
        assert binom(20, 10) == 184756

    def test_binom_symmetry_and_vandermonde(self):
        for n in range(0, 30):
            for k in range(0, n + 1):
                assert binom(n, k) == binom(n, n - k)
        # Vandermonde: C(m+n, k) = sum_j C(m, j) C(n, k-j)
        for m, n, k in [(5, 7, 4), (10, 10, 10), (3, 9, 6)]:
            assert binom(m + n, k) == sum(binom(m, j) * binom(n, k - j) for j in range(k + 1))

    def test_pascal_recurrence_exact(self):
        table = BinomialTable(40)
        for n in range(2, 41):
            assert table.binom(n, 0) == 1 and table.binom(n, n) == 1
            for k in range(1, n):
                assert table.binom(n, k) == table.binom(n - 1, k - 1) + table.binom(n - 1, k)

    def test_log_binom_matches_exact(self):
        table = BinomialTable()
        for n, k in [(20, 10), (64, 32), (50, 3)]:
            assert np.isclose(table.log_binom(n, k), np.log(float(table.binom(n, k))), rtol=1e-12)
