"""Set value functions: tabulated, Möbius-sparse, builtin-analytic, and
callback-backed games, plus JSON (de)serialization and the player reductions
used by the recursive and 2-efficiency axiom checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .coalitions import MAX_EXACT_PLAYERS, MAX_PLAYERS, Coalition, binom
from .errors import ConfigError, DomainError, EvaluationError, ParseError


class ValueFunction:
    """A game v: 2^[d] -> R.  Subclasses implement eval_mask."""

    d: int

    def eval_mask(self, mask: int) -> float:
        raise NotImplementedError

    def eval(self, coalition: Coalition) -> float:
        if coalition.d != self.d:
            raise DomainError(f"coalition is over {coalition.d} players, game has {self.d}")
        return self.eval_mask(coalition.bits)

    def tabulate(self) -> np.ndarray:
        """Full 2^d value table, indexed by mask.  Capped at d=25."""
        if self.d > MAX_EXACT_PLAYERS:
            raise DomainError(
                f"tabulating 2^{self.d} values exceeds the d={MAX_EXACT_PLAYERS} cap"
            )
        return np.array([self.eval_mask(m) for m in range(1 << self.d)], dtype=np.float64)

    @property
    def size_profile(self) -> np.ndarray | None:
        """By-size values when the game is symmetric in its players, else None."""
        return None

    def to_dict(self) -> dict:
        raise DomainError(f"{type(self).__name__} does not serialize")


class TabulatedGame(ValueFunction):
    """Game stored as a dense table of 2^d values indexed by coalition mask."""

    def __init__(self, values: Sequence[float], d: int | None = None) -> None:
        values = np.ascontiguousarray(values, dtype=np.float64)
        n = len(values)
        if d is None:
            d = n.bit_length() - 1
        if n != 1 << d or not 1 <= d <= MAX_EXACT_PLAYERS:
            raise DomainError(f"table of length {n} does not match 2^d for d={d}")
        self.d = d
        self.values = values

    def eval_mask(self, mask: int) -> float:
        return float(self.values[mask])

    def tabulate(self) -> np.ndarray:
        return self.values.copy()

    def to_dict(self) -> dict:
        return {"d": self.d, "kind": "table", "values": self.values.tolist()}


class MobiusSparseGame(ValueFunction):
    """Game given by a sparse list of unanimity-basis coefficients.

    v(S) = sum of coef over terms whose subset is contained in S.
    """

    def __init__(self, terms: Mapping[int, float] | Sequence[tuple], d: int) -> None:
        if not 1 <= d <= MAX_PLAYERS:
            raise DomainError(f"player count d={d} outside [1, {MAX_PLAYERS}]")
        self.d = d
        if isinstance(terms, Mapping):
            items = list(terms.items())
        else:
            items = []
            for subset, coef in terms:
                mask = subset.bits if isinstance(subset, Coalition) else int(subset)
                items.append((mask, float(coef)))
        seen: dict[int, float] = {}
        for mask, coef in items:
            if not 0 <= mask < (1 << d):
                raise DomainError(f"term mask {mask:#x} does not fit {d} players")
            if mask in seen:
                raise DomainError(f"duplicate Möbius term for subset mask {mask:#x}")
            seen[mask] = float(coef)
        self.terms = seen

    def eval_mask(self, mask: int) -> float:
        return math.fsum(c for m, c in self.terms.items() if m & mask == m)

    def tabulate(self) -> np.ndarray:
        if self.d > MAX_EXACT_PLAYERS:
            raise DomainError(
                f"tabulating 2^{self.d} values exceeds the d={MAX_EXACT_PLAYERS} cap"
            )
        dense = np.zeros(1 << self.d)
        for m, c in self.terms.items():
            dense[m] = c
        return _kernels.subset_zeta(dense, self.d)

    def order(self) -> int:
        """Largest subset size carrying a nonzero coefficient (0 if none)."""
        sizes = [int(m).bit_count() for m, c in self.terms.items() if c != 0.0]
        return max(sizes, default=0)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "kind": "mobius",
            "terms": [
                {"subset": list(Coalition(m, self.d).players), "coef": c}
                for m, c in sorted(self.terms.items(), key=lambda kv: (int(kv[0]).bit_count(), kv[0]))
            ],
        }


class SymmetricGame(ValueFunction):
    """Game whose value depends only on coalition size; stores the size profile."""

    def __init__(self, profile: Sequence[float], name: str | None = None, params: dict | None = None) -> None:
        profile = np.ascontiguousarray(profile, dtype=np.float64)
        d = len(profile) - 1
        if not 1 <= d <= MAX_PLAYERS:
            raise DomainError(f"profile of length {len(profile)} implies invalid d={d}")
        self.d = d
        self.profile = profile
        self.name = name
        self.params = dict(params or {})

    def eval_mask(self, mask: int) -> float:
        return float(self.profile[int(mask).bit_count()])

    @property
    def size_profile(self) -> np.ndarray:
        return self.profile

    def to_dict(self) -> dict:
        if self.name is None:
            raise DomainError("anonymous symmetric game does not serialize; tabulate it")
        return {"d": self.d, "kind": "builtin", "name": self.name, "params": self.params}


class BuiltinMobiusGame(MobiusSparseGame):
    """Möbius-sparse game constructed by a named builtin; keeps its recipe."""

    def __init__(self, terms, d: int, name: str, params: dict) -> None:
        super().__init__(terms, d)
        self.name = name
        self.params = dict(params)

    def to_dict(self) -> dict:
        return {"d": self.d, "kind": "builtin", "name": self.name, "params": self.params}


class CallbackGame(ValueFunction):
    """Game evaluated by a foreign callable mapping sorted player lists to reals.

    Evaluations are memoized, so repeated coalitions are answered from cache
    and each distinct coalition costs exactly one foreign call.
    """

    def __init__(self, fn: Callable[[list[int]], float], d: int) -> None:
        if not 1 <= d <= MAX_PLAYERS:
            raise DomainError(f"player count d={d} outside [1, {MAX_PLAYERS}]")
        self.d = d
        self.fn = fn
        self.cache: dict[int, float] = {}

    def eval_mask(self, mask: int) -> float:
        hit = self.cache.get(mask)
        if hit is not None:
            return hit
        players = [i + 1 for i in range(self.d) if mask >> i & 1]
        try:
            value = float(self.fn(players))
        except Exception as exc:
            raise EvaluationError(f"callback raised {exc!r}", coalition=players) from exc
        if not math.isfinite(value):
            raise EvaluationError(f"callback returned non-finite value {value}", coalition=players)
        self.cache[mask] = value
        return value

    @property
    def evaluations(self) -> int:
        return len(self.cache)


# ---------------------------------------------------------------------------
# Builtin games
# ---------------------------------------------------------------------------


def _example1_profile(d: int, p: float) -> np.ndarray:
    return np.array(
        [0.0 if s <= 1 else s - p * binom(s, 2) for s in range(d + 1)], dtype=np.float64
    )


def _example2_profile(d: int) -> np.ndarray:
    # Size profile 2s - 2 ln(s+1) for s >= 2; a lone player is worth 3.
    prof = [0.0, 3.0] + [2.0 * s - 2.0 * math.log(s + 1) for s in range(2, d + 1)]
    return np.array(prof[: d + 1], dtype=np.float64)


def sparse_synthetic_terms(
    d: int, n_terms: int, max_term_size: int, seed: int, coefficient_range: float = 0.1
) -> dict[int, float]:
    """Seeded sparse polynomial: term i gets coefficient ~ U[-i*c, i*c] on a
    uniformly drawn nonempty subset of size <= max_term_size.  Colliding
    subsets merge by summing coefficients.
    """
    if not 1 <= max_term_size <= d:
        raise ConfigError(f"max_term_size must be in [1, {d}], got {max_term_size}")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    size_weights = np.array([binom(d, s) for s in range(1, max_term_size + 1)], dtype=np.float64)
    size_weights /= size_weights.sum()
    terms: dict[int, float] = {}
    for i in range(1, n_terms + 1):
        size = 1 + int(rng.choice(max_term_size, p=size_weights))
        members = rng.choice(d, size=size, replace=False)
        mask = 0
        for m in members:
            mask |= 1 << int(m)
        coef = float(rng.uniform(-i * coefficient_range, i * coefficient_range))
        terms[mask] = terms.get(mask, 0.0) + coef
    return terms


def builtin_game(name: str, **params) -> ValueFunction:
    """Construct a named analytic game.

    example1(d=11, p): 0 for |S| <= 1, else |S| - p * C(|S|, 2).
    example2(d=11): 0 at the empty set, 3 for one player, else
        2|S| - 2 ln(|S| + 1).
    unanimity(d, subset): indicator of S containing the given subset.
    sparse_synthetic(d=15, n_terms=10, max_term_size=5, seed=0,
        coefficient_range=0.1): seeded random sparse polynomial.
    """
    if name == "example1":
        p = params.get("p")
        d = int(params.get("d", 11))
        if p is None or not 0.0 < float(p) < 1.0:
            raise ConfigError(f"example1 needs p in (0, 1), got {p!r}")
        if not 2 <= d <= MAX_EXACT_PLAYERS:
            raise ConfigError(f"example1 needs 2 <= d <= {MAX_EXACT_PLAYERS}")
        return SymmetricGame(_example1_profile(d, float(p)), name, {"p": float(p), "d": d})
    if name == "example2":
        d = int(params.get("d", 11))
        if not 2 <= d <= MAX_EXACT_PLAYERS:
            raise ConfigError(f"example2 needs 2 <= d <= {MAX_EXACT_PLAYERS}")
        return SymmetricGame(_example2_profile(d), name, {"d": d})
    if name == "unanimity":
        subset = params.get("subset")
        d = params.get("d")
        if subset is None or d is None:
            raise ConfigError("unanimity needs d and subset")
        d = int(d)
        mask = Coalition.from_players([int(p) for p in subset], d).bits
        return BuiltinMobiusGame({mask: 1.0}, d, name, {"d": d, "subset": sorted(int(p) for p in subset)})
    if name == "sparse_synthetic":
        d = int(params.get("d", 15))
        n_terms = int(params.get("n_terms", 10))
        max_term_size = int(params.get("max_term_size", 5))
        seed = int(params.get("seed", 0))
        coefficient_range = float(params.get("coefficient_range", 0.1))
        terms = sparse_synthetic_terms(d, n_terms, max_term_size, seed, coefficient_range)
        return BuiltinMobiusGame(
            terms,
            d,
            name,
            {
                "d": d,
                "n_terms": n_terms,
                "max_term_size": max_term_size,
                "seed": seed,
                "coefficient_range": coefficient_range,
            },
        )
    raise ConfigError(f"unknown builtin game {name!r}")


def mobius_order(game: ValueFunction) -> int:
    """Largest subset size with a nonzero unanimity coefficient."""
    if isinstance(game, MobiusSparseGame):
        return game.order()
    raise DomainError("mobius_order needs a Möbius-sparse game")


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------


def game_from_dict(payload: dict, location: str = "<payload>") -> ValueFunction:
    if not isinstance(payload, dict):
        raise ParseError("expected a JSON object", location)
    kind = payload.get("kind")
    d = payload.get("d")
    if not isinstance(d, int) or d < 1:
        raise ParseError(f"missing or invalid player count d={d!r}", location)
    if kind == "table":
        values = payload.get("values")
        if not isinstance(values, list):
            raise ParseError("table game needs a 'values' list", location)
        if len(values) != 1 << d:
            raise ParseError(
                f"table has {len(values)} values, expected 2^{d} = {1 << d}", location
            )
        return TabulatedGame(values, d)
    if kind == "mobius":
        raw = payload.get("terms")
        if not isinstance(raw, list):
            raise ParseError("mobius game needs a 'terms' list", location)
        terms: list[tuple[int, float]] = []
        for i, item in enumerate(raw):
            try:
                mask = Coalition.from_players(item["subset"], d).bits
                terms.append((mask, float(item["coef"])))
            except (KeyError, TypeError, DomainError) as exc:
                raise ParseError(f"bad mobius term: {exc}", f"{location}#terms[{i}]") from exc
        try:
            return MobiusSparseGame(terms, d)
        except DomainError as exc:
            raise ParseError(str(exc), f"{location}#terms") from exc
    if kind == "builtin":
        name = payload.get("name")
        params = dict(payload.get("params") or {})
        params.setdefault("d", d)
        try:
            game = builtin_game(str(name), **params)
        except ConfigError as exc:
            raise ParseError(str(exc), location) from exc
        if game.d != d:
            raise ParseError(f"builtin params imply d={game.d}, payload says d={d}", location)
        return game
    raise ParseError(f"unknown game kind {kind!r}", location)


def load_value_function(path) -> ValueFunction:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from exc
    return game_from_dict(payload, str(path))


def save_value_function(game: ValueFunction, path) -> None:
    Path(path).write_text(json.dumps(game.to_dict()) + "\n")


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GameReduction:
    """Specification of a one-player reduction.

    kind 'remove': v'(T) = v(T) over the remaining players.
    kind 'remove_with': v'(T) = v(T + j) - v({j}).
    kind 'merge': players i and j act as one group; the group sits at the
        renumbered position of min(i, j) and players above max(i, j) shift
        down by one.
    """

    kind: str
    player: int
    other: int | None = None


def _expand_mask(mask: int, gap: int) -> int:
    """Reinsert a zero bit at 0-indexed position `gap`."""
    low = mask & ((1 << gap) - 1)
    return low | (mask >> gap) << (gap + 1)


def reduce_game(game: ValueFunction, reduction: GameReduction) -> TabulatedGame:
    d = game.d
    if d < 2:
        raise DomainError("reductions need at least two players")
    j = reduction.player
    if not 1 <= j <= d:
        raise DomainError(f"player {j} outside [1, {d}]")
    table = game.tabulate()
    if reduction.kind in ("remove", "remove_with"):
        gap = j - 1
        jbit = 1 << gap
        out = np.empty(1 << (d - 1))
        for t in range(1 << (d - 1)):
            base = _expand_mask(t, gap)
            if reduction.kind == "remove":
                out[t] = table[base]
            else:
                out[t] = table[base | jbit] - table[jbit]
        return TabulatedGame(out, d - 1)
    if reduction.kind == "merge":
        i = reduction.other
        if i is None or not 1 <= i <= d:
            raise DomainError(f"merge needs a second player in [1, {d}]")
        if i == j:
            raise DomainError("cannot merge a player with itself")
        lo, hi = sorted((i, j))
        gap = hi - 1
        group_bit = 1 << (lo - 1)
        hi_bit = 1 << gap
        out = np.empty(1 << (d - 1))
        for t in range(1 << (d - 1)):
            base = _expand_mask(t, gap)
            if base & group_bit:
                base |= hi_bit
            out[t] = table[base]
        return TabulatedGame(out, d - 1)
    raise DomainError(f"unknown reduction kind {reduction.kind!r}")


def remove_player(game: ValueFunction, j: int) -> TabulatedGame:
    return reduce_game(game, GameReduction("remove", j))


def remove_player_with(game: ValueFunction, j: int) -> TabulatedGame:
    return reduce_game(game, GameReduction("remove_with", j))


def merge_players(game: ValueFunction, i: int, j: int) -> TabulatedGame:
    return reduce_game(game, GameReduction("merge", j, i))
