"""Uncertain cooperative games, coalition enumeration and scenario sampling.

Coalitions are integer bitmasks: agent ``i`` (0-based) belongs to ``S`` iff
bit ``i`` of ``S`` is set. Every matrix in the package indexes its coalition
axis by the canonical order returned by :func:`enumerate_coalitions`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, InvalidGameError

Coalition = int

# Rejection sampling becomes impractical below this acceptance rate.
MIN_TRUNCATION_MASS = 1e-6

TRAIN_DOMAIN = 0
TEST_DOMAIN = 1


@lru_cache(maxsize=None)
def _coalitions(n: int) -> tuple[int, ...]:
    grand = (1 << n) - 1
    return tuple(sorted(range(1, grand), key=lambda m: (bin(m).count("1"), m)))


def enumerate_coalitions(n: int) -> list[Coalition]:
    """All proper nonempty coalitions of ``n`` agents, ordered by (size, mask)."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidGameError(f"a game needs at least 2 agents, got n={n!r}")
    return list(_coalitions(int(n)))


def grand_coalition(n: int) -> Coalition:
    return (1 << n) - 1


def members(mask: Coalition) -> list[int]:
    """0-based agent indices of a coalition."""
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask_from_members(agents: Iterable[int], n: int, one_based: bool = True) -> Coalition:
    mask = 0
    for a in agents:
        i = int(a) - 1 if one_based else int(a)
        if not 0 <= i < n:
            raise InvalidGameError(f"agent {a} outside 1..{n}" if one_based else f"agent {a} outside 0..{n - 1}")
        if mask >> i & 1:
            raise InvalidGameError(f"agent {a} listed twice")
        mask |= 1 << i
    if mask == 0:
        raise InvalidGameError("empty coalition")
    return mask


def format_coalition(mask: Coalition) -> str:
    """Human label with 1-based agents, e.g. ``{1,3}``."""
    return "{" + ",".join(str(i + 1) for i in members(mask)) + "}"


@lru_cache(maxsize=None)
def _incidence(n: int) -> np.ndarray:
    coalitions = _coalitions(n)
    a = np.zeros((len(coalitions), n))
    for r, mask in enumerate(coalitions):
        a[r, members(mask)] = 1.0
    a.setflags(write=False)
    return a


def incidence_matrix(n: int) -> np.ndarray:
    """Row ``r`` selects the agents of the ``r``-th canonical coalition."""
    enumerate_coalitions(n)
    return _incidence(int(n))


@dataclass(frozen=True)
class UncertaintyModel:
    """Additive perturbation law for one coalition value.

    ``kind`` is ``"none"``, ``"uniform"`` (on ``[lo, hi]``) or ``"truncnorm"``
    (normal with ``mean``/``stddev`` conditioned on ``[lo, hi]``).
    """

    kind: str = "none"
    lo: float = 0.0
    hi: float = 0.0
    mean: float = 0.0
    stddev: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "truncnorm"):
            raise ConfigError(f"unknown noise kind {self.kind!r}")
        for name in ("lo", "hi", "mean", "stddev"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"noise parameter {name} must be finite")
        if self.kind == "none":
            return
        if self.lo > self.hi:
            raise ConfigError(f"noise interval has lo={self.lo} > hi={self.hi}")
        if self.kind == "truncnorm":
            if self.stddev <= 0:
                raise ConfigError(f"truncnorm stddev must be > 0, got {self.stddev}")
            if self.mass() < MIN_TRUNCATION_MASS:
                raise ConfigError(
                    f"truncation interval [{self.lo}, {self.hi}] carries probability "
                    f"{self.mass():.3g} under N({self.mean}, {self.stddev}^2)"
                )

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "UncertaintyModel":
        return cls("uniform", lo=float(lo), hi=float(hi))

    @classmethod
    def truncnorm(cls, mean: float, stddev: float, lo: float, hi: float) -> "UncertaintyModel":
        return cls("truncnorm", lo=float(lo), hi=float(hi), mean=float(mean), stddev=float(stddev))

    def support(self) -> tuple[float, float]:
        if self.kind == "none":
            return (0.0, 0.0)
        return (self.lo, self.hi)

    def mass(self) -> float:
        a = (self.lo - self.mean) / self.stddev
        b = (self.hi - self.mean) / self.stddev
        return float(ndtr(b) - ndtr(a))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "none":
            return np.zeros(size)
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi, size)
        out = np.empty(size)
        filled = 0
        mass = self.mass()
        while filled < size:
            need = size - filled
            draw = rng.normal(self.mean, self.stddev, int(need / mass * 1.1) + 16)
            keep = draw[(draw >= self.lo) & (draw <= self.hi)][:need]
            out[filled:filled + keep.size] = keep
            filled += keep.size
        return out

    def to_dict(self) -> dict:
        if self.kind == "none":
            return {"kind": "none"}
        d = {"kind": self.kind, "lo": self.lo, "hi": self.hi}
        if self.kind == "truncnorm":
            d.update(mean=self.mean, stddev=self.stddev)
        return d


NO_NOISE = UncertaintyModel()


@dataclass(frozen=True)
class GameDefinition:
    """Uncertain TU game ``u(S, d) = nominal[S] + d_S`` with deterministic ``u(N)``.

    ``nominal`` and ``noise`` are aligned with :func:`enumerate_coalitions`.
    """

    n: int
    nominal: tuple[float, ...]
    grand_value: float
    noise: tuple[UncertaintyModel, ...] = field(default=())

    def __post_init__(self):
        coalitions = enumerate_coalitions(self.n)
        object.__setattr__(self, "nominal", tuple(float(v) for v in self.nominal))
        if len(self.nominal) != len(coalitions):
            raise InvalidGameError(
                f"need nominal values for all {len(coalitions)} proper coalitions, got {len(self.nominal)}"
            )
        if not all(math.isfinite(v) for v in self.nominal) or not math.isfinite(self.grand_value):
            raise InvalidGameError("coalition values must be finite")
        noise = tuple(self.noise) or (NO_NOISE,) * len(coalitions)
        if len(noise) != len(coalitions):
            raise InvalidGameError(f"need one noise model per coalition, got {len(noise)}")
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "grand_value", float(self.grand_value))

    @classmethod
    def from_mapping(
        cls,
        n: int,
        grand_value: float,
        nominal: Mapping[Coalition, float],
        noise: Optional[Mapping[Coalition, UncertaintyModel]] = None,
        default_noise: UncertaintyModel = NO_NOISE,
    ) -> "GameDefinition":
        coalitions = enumerate_coalitions(n)
        missing = [format_coalition(m) for m in coalitions if m not in nominal]
        if missing:
            raise InvalidGameError(f"missing nominal value for coalitions {', '.join(missing)}")
        extra = set(nominal) - set(coalitions)
        if extra:
            raise InvalidGameError(f"not a proper nonempty coalition: {sorted(extra)}")
        noise = noise or {}
        return cls(
            n=n,
            nominal=tuple(nominal[m] for m in coalitions),
            grand_value=grand_value,
            noise=tuple(noise.get(m, default_noise) for m in coalitions),
        )

    @property
    def coalitions(self) -> list[Coalition]:
        return enumerate_coalitions(self.n)

    @property
    def nominal_vector(self) -> np.ndarray:
        return np.asarray(self.nominal)

    def nominal_of(self, mask: Coalition) -> float:
        return self.nominal[self.coalitions.index(mask)]

    def with_noise(self, model: UncertaintyModel) -> "GameDefinition":
        return GameDefinition(self.n, self.nominal, self.grand_value, (model,) * len(self.nominal))

    def draw_perturbations(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` i.i.d. joint draws, shape ``(size, n_coalitions)``."""
        out = np.empty((size, len(self.nominal)))
        for j, model in enumerate(self.noise):
            out[:, j] = model.sample(rng, size)
        return out


def derived_rng(seed: int, domain: int, shard: int = 0) -> np.random.Generator:
    """Independent generator per (seed, domain, shard).

    Training draws use ``TRAIN_DOMAIN`` and test draws ``TEST_DOMAIN``, so the
    two streams never overlap for the same user seed.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(domain, shard)))


@dataclass(frozen=True, eq=False)
class ScenarioGame:
    """Realized coalition values ``values[r, k] = u(S_r, d^(k))``."""

    n: int
    values: np.ndarray
    grand_value: float
    sample_seed: Optional[int] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float, ndmin=2)
        if values.shape[0] != len(enumerate_coalitions(self.n)):
            raise InvalidGameError(
                f"values must have {len(enumerate_coalitions(self.n))} rows, got {values.shape[0]}"
            )
        if values.shape[1] < 1:
            raise InvalidGameError("a scenario game needs at least one sample")
        if not np.all(np.isfinite(values)):
            raise InvalidGameError("realized values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grand_value", float(self.grand_value))

    @property
    def K(self) -> int:
        return self.values.shape[1]

    @property
    def coalitions(self) -> list[Coalition]:
        return enumerate_coalitions(self.n)

    def select(self, indices: Sequence[int]) -> "ScenarioGame":
        """Scenario game restricted to the given sample columns."""
        return ScenarioGame(self.n, self.values[:, list(indices)], self.grand_value, self.sample_seed)

    def append(self, column: np.ndarray) -> "ScenarioGame":
        column = np.asarray(column, dtype=float).reshape(-1, 1)
        return ScenarioGame(self.n, np.hstack([self.values, column]), self.grand_value, self.sample_seed)


def sample_scenarios(game: GameDefinition, K: int, seed: int) -> ScenarioGame:
    """Draw ``K`` i.i.d. scenarios; a pure function of ``(game, K, seed)``."""
    if K < 1:
        raise ConfigError(f"sample count must be >= 1, got K={K}")
    deltas = game.draw_perturbations(derived_rng(seed, TRAIN_DOMAIN), K)
    return ScenarioGame(game.n, game.nominal_vector[:, None] + deltas.T, game.grand_value, seed)


class WorstCase(NamedTuple):
    values: np.ndarray
    """Per-coalition maximum over samples."""
    attaining: np.ndarray
    """Smallest sample index reaching the maximum."""


def worst_case_values(sg: ScenarioGame) -> WorstCase:
    idx = np.argmax(sg.values, axis=1)
    return WorstCase(sg.values[np.arange(sg.values.shape[0]), idx], idx)
