"""Bit-set coalitions, subset enumeration, and exact combinatorial tables.

Players are 1-indexed everywhere in the public API; internally player ``i``
lives at bit ``i - 1`` of an integer mask.  Enumeration order over subsets is
(size, mask ascending) and is part of the public contract: every index output
and every serialized score list uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

# Exact lattice operations (tabulation, transforms, closed-form indices) hold
# 2^d values in memory and are capped here.  Sampling estimators only touch
# individual masks and accept larger d.
MAX_EXACT_PLAYERS = 25
MAX_PLAYERS = 64
_MAX_BINOM_N = 64


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of the player set [d], stored as a d-bit mask."""

    bits: int
    d: int

    def __post_init__(self) -> None:
        if not 1 <= self.d <= MAX_PLAYERS:
            raise DomainError(f"player count d={self.d} outside [1, {MAX_PLAYERS}]")
        if not 0 <= self.bits < (1 << self.d):
            raise DomainError(f"mask {self.bits:#x} does not fit {self.d} players")

    @classmethod
    def from_players(cls, players: Iterable[int], d: int) -> "Coalition":
        """Build a coalition from 1-indexed player numbers."""
        bits = 0
        for p in players:
            if not 1 <= p <= d:
                raise DomainError(f"player {p} outside [1, {d}]")
            bits |= 1 << (p - 1)
        return cls(bits, d)

    @classmethod
    def empty(cls, d: int) -> "Coalition":
        return cls(0, d)

    @classmethod
    def full(cls, d: int) -> "Coalition":
        return cls((1 << d) - 1, d)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    @property
    def players(self) -> tuple[int, ...]:
        """Sorted 1-indexed member list; the JSON wire form of a coalition."""
        return tuple(i + 1 for i in range(self.d) if self.bits >> i & 1)

    def __contains__(self, player: int) -> bool:
        return 1 <= player <= self.d and bool(self.bits >> (player - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.players)

    def __len__(self) -> int:
        return self.size

    def issubset(self, other: "Coalition") -> bool:
        return self.bits & other.bits == self.bits

    def issuperset(self, other: "Coalition") -> bool:
        return other.issubset(self)

    def union(self, other: "Coalition") -> "Coalition":
        return Coalition(self.bits | other.bits, self.d)

    def intersection(self, other: "Coalition") -> "Coalition":
        return Coalition(self.bits & other.bits, self.d)

    def difference(self, other: "Coalition") -> "Coalition":
        return Coalition(self.bits & ~other.bits, self.d)

    def complement(self) -> "Coalition":
        return Coalition(((1 << self.d) - 1) ^ self.bits, self.d)

    def add(self, player: int) -> "Coalition":
        if not 1 <= player <= self.d:
            raise DomainError(f"player {player} outside [1, {self.d}]")
        return Coalition(self.bits | 1 << (player - 1), self.d)

    def remove(self, player: int) -> "Coalition":
        return Coalition(self.bits & ~(1 << (player - 1)), self.d)

    def __repr__(self) -> str:
        return f"Coalition({{{', '.join(map(str, self.players))}}}, d={self.d})"


class BinomialTable:
    """Exact binomial coefficients C(n, k) for n <= 64, plus log-factorials.

    Entries follow the generalized convention C(n, k) = 0 for k < 0 or k > n,
    which the interaction-index formulas rely on.
    """

    def __init__(self, max_n: int = _MAX_BINOM_N) -> None:
        self.max_n = max_n
        rows: list[list[int]] = [[1]]
        for n in range(1, max_n + 1):
            prev = rows[-1]
            row = [1] + [prev[k - 1] + prev[k] for k in range(1, n)] + [1]
            rows.append(row)
        self._rows = rows
        self.log_factorial = [math.lgamma(n + 1) for n in range(max_n + 1)]

    def binom(self, n: int, k: int) -> int:
        if not 0 <= n <= self.max_n:
            raise DomainError(f"binomial table covers 0 <= n <= {self.max_n}, got n={n}")
        if k < 0 or k > n:
            return 0
        return self._rows[n][k]

    def log_binom(self, n: int, k: int) -> float:
        """log C(n, k); -inf outside the support."""
        if not 0 <= n <= self.max_n:
            raise DomainError(f"binomial table covers 0 <= n <= {self.max_n}, got n={n}")
        if k < 0 or k > n:
            return float("-inf")
        lf = self.log_factorial
        return lf[n] - lf[k] - lf[n - k]


_TABLE = BinomialTable()


def binom(n: int, k: int) -> int:
    """C(n, k) from the exact shared table; 0 when k < 0 or k > n."""
    return _TABLE.binom(n, k)


def log_binom(n: int, k: int) -> float:
    return _TABLE.log_binom(n, k)


def subset_count(d: int, max_size: int) -> int:
    """Number of subsets of [d] with size <= max_size."""
    if not 0 <= max_size <= d:
        raise DomainError(f"need 0 <= max_size <= d, got max_size={max_size}, d={d}")
    return sum(binom(d, j) for j in range(max_size + 1))


def iter_size_masks(d: int, size: int) -> Iterator[int]:
    """All masks of a given popcount in ascending numeric order (Gosper)."""
    if size == 0:
        yield 0
        return
    limit = 1 << d
    v = (1 << size) - 1
    while v < limit:
        yield v
        # Gosper's hack: next larger integer with the same popcount
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def enumerate_subsets(d: int, max_size: int) -> Iterator[Coalition]:
    """Yield every coalition of size <= max_size, sorted by (size, mask)."""
    if not 1 <= d <= MAX_EXACT_PLAYERS:
        raise DomainError(f"exact enumeration requires 1 <= d <= {MAX_EXACT_PLAYERS}, got {d}")
    if not 0 <= max_size <= d:
        raise DomainError(f"need 0 <= max_size <= d, got max_size={max_size}")
    for size in range(max_size + 1):
        for mask in iter_size_masks(d, size):
            yield Coalition(mask, d)


def subset_masks(d: int, max_size: int) -> list[int]:
    """Raw masks in enumeration order; the integer twin of enumerate_subsets."""
    if not 1 <= d <= MAX_EXACT_PLAYERS:
        raise DomainError(f"exact enumeration requires 1 <= d <= {MAX_EXACT_PLAYERS}, got {d}")
    if not 0 <= max_size <= d:
        raise DomainError(f"need 0 <= max_size <= d, got max_size={max_size}")
    out: list[int] = []
    for size in range(max_size + 1):
        out.extend(iter_size_masks(d, size))
    return out


def mask_from_players(players: Sequence[int], d: int) -> int:
    return Coalition.from_players(players, d).bits


def players_from_mask(mask: int, d: int) -> tuple[int, ...]:
    return Coalition(mask, d).players
