"""Monte Carlo estimates of allocation and core instability on fresh draws."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import PreconditionError
from .game import TEST_DOMAIN, GameDefinition, derived_rng, incidence_matrix

DEFAULT_TRIALS = 100_000
DEFAULT_ALPHA = 1e-3
_CHUNK = 50_000


@dataclass(frozen=True)
class ViolationEstimate:
    estimate: float
    trials: int
    violations: int
    halfwidth: float
    alpha: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def hoeffding_halfwidth(M: int, alpha: float) -> float:
    return math.sqrt(math.log(2 / alpha) / (2 * M))


def _shares(game: GameDefinition, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (game.n,):
        raise PreconditionError(f"allocation must have {game.n} entries, got shape {x.shape}")
    return incidence_matrix(game.n) @ x


def point_violates(game: GameDefinition, x, delta) -> bool:
    """Some coalition strictly prefers to defect from ``x`` under perturbation ``delta``."""
    return bool(np.any(_shares(game, x) < game.nominal_vector + np.asarray(delta)))


def core_violates(minima, game: GameDefinition, delta) -> bool:
    """Some core member is strictly beaten by a coalition under ``delta``.

    ``minima[S]`` is the smallest ``x(S)`` over the core, so a violating member
    exists iff ``u(S, delta) > minima[S]`` for some ``S``.
    """
    return bool(np.any(game.nominal_vector + np.asarray(delta) > np.asarray(minima)))


def _count(game: GameDefinition, threshold: np.ndarray, M: int, seed: int, shard: int) -> int:
    rng = derived_rng(seed, TEST_DOMAIN, shard)
    nominal = game.nominal_vector
    hits = 0
    for start in range(0, M, _CHUNK):
        deltas = game.draw_perturbations(rng, min(_CHUNK, M - start))
        hits += int(np.count_nonzero(np.any(nominal + deltas > threshold, axis=1)))
    return hits


def _estimate(game, threshold, M, seed, alpha, shards, workers) -> ViolationEstimate:
    if M < 1:
        raise PreconditionError(f"need at least one trial, got M={M}")
    if shards < 1:
        raise PreconditionError(f"shards must be >= 1, got {shards}")
    sizes = [M // shards + (i < M % shards) for i in range(shards)]
    jobs = [(game, threshold, m, seed, i) for i, m in enumerate(sizes) if m]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda a: _count(*a), jobs))
    else:
        counts = [_count(*a) for a in jobs]
    hits = sum(counts)
    return ViolationEstimate(hits / M, M, hits, hoeffding_halfwidth(M, alpha), alpha, seed)


def estimate_point_instability(
    game: GameDefinition,
    x,
    M: int = DEFAULT_TRIALS,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    shards: int = 1,
    workers: int = 1,
) -> ViolationEstimate:
    """Fraction of ``M`` fresh draws under which allocation ``x`` is unstable.

    Draws depend only on ``(seed, shards)``, never on ``workers``.
    """
    return _estimate(game, _shares(game, x), M, seed, alpha, shards, workers)


def estimate_core_instability(
    minima,
    game: GameDefinition,
    M: int = DEFAULT_TRIALS,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    shards: int = 1,
    workers: int = 1,
) -> ViolationEstimate:
    return _estimate(game, np.asarray(minima, dtype=float), M, seed, alpha, shards, workers)
