"""Bundled experiment configurations built on the four-agent benchmark game."""

from __future__ import annotations

import copy

# (members, nominal value); agents are 1-based as in the config files
BENCHMARK = [
    ([1], 1.0),
    ([2], 1.5),
    ([3], 1.0),
    ([4], 2.0),
    ([1, 2], 6.5),
    ([2, 3], 6.5),
    ([3, 4], 7.0),
    ([1, 3], 6.0),
    ([1, 4], 7.0),
    ([2, 4], 7.5),
    ([1, 2, 3], 11.5),
    ([1, 2, 4], 12.5),
    ([1, 3, 4], 12.0),
    ([2, 3, 4], 12.5),
]
BENCHMARK_GRAND = 17.3

BENCHMARK_K_GRID = [200, 300, 400, 500, 1000, 1500, 2000]


def benchmark_game(noise: dict) -> dict:
    return {
        "n": 4,
        "grand_value": BENCHMARK_GRAND,
        "coalitions": [
            {"members": list(m), "nominal": v, "noise": dict(noise)} for m, v in BENCHMARK
        ],
    }


_PRESETS = {
    "paper-table1-uniform": {
        "game": benchmark_game({"kind": "uniform", "lo": -0.5, "hi": 0.5}),
        "K_grid": BENCHMARK_K_GRID,
        "beta": 1e-4,
        "test_samples": 100_000,
        "seeds": list(range(10)),
        "mode": "core-certify",
        "nonneg": True,
    },
    "paper-table1-truncnorm": {
        "game": benchmark_game({"kind": "truncnorm", "mean": 0.0, "stddev": 0.3, "lo": -1.5, "hi": 1.5}),
        "K_grid": BENCHMARK_K_GRID,
        "beta": 1e-5,
        "test_samples": 100_000,
        "seeds": list(range(10)),
        "mode": "relax-certify",
        "nonneg": True,
    },
    "paper-table1-nominal": {
        "game": benchmark_game({"kind": "none"}),
        "K_grid": [1],
        "beta": 1e-4,
        "test_samples": 100_000,
        "seeds": [0],
        "mode": "core-certify",
        "nonneg": True,
    },
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> dict:
    """Raw config dictionary for a bundled preset (a fresh copy)."""
    return copy.deepcopy(_PRESETS[name])
