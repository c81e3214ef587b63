"""JSON experiment configuration: parsing, validation and defaults."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Union

from .errors import ConfigError, InvalidGameError
from .game import GameDefinition, UncertaintyModel, enumerate_coalitions, format_coalition, mask_from_members
from .presets import PRESET_NAMES, preset

MODES = ("core-certify", "relax-certify")

DEFAULTS = {
    "beta": 1e-4,
    "test_samples": 100_000,
    "seeds": [0],
    "mode": "core-certify",
    "nonneg": True,
    "alpha": 1e-3,
}


@dataclass(frozen=True)
class ExperimentConfig:
    game: GameDefinition
    K_grid: tuple[int, ...]
    beta: float = DEFAULTS["beta"]
    test_samples: int = DEFAULTS["test_samples"]
    seeds: tuple[int, ...] = (0,)
    mode: str = DEFAULTS["mode"]
    nonneg: bool = True
    alpha: float = DEFAULTS["alpha"]
    output: Optional[str] = None

    def with_overrides(self, **changes) -> "ExperimentConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        for key in ("K_grid", "seeds"):
            if key in changes:
                changes[key] = tuple(changes[key])
        cfg = replace(self, **changes)
        _validate_scalars(cfg)
        return cfg


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{field}: expected a finite number, got {value!r}")
    return float(value)


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{field}: expected an integer, got {value!r}")
    return value


def parse_noise(raw: Optional[dict], field: str) -> UncertaintyModel:
    if raw is None:
        return UncertaintyModel()
    if not isinstance(raw, dict):
        raise ConfigError(f"{field}: expected an object")
    kind = raw.get("kind", "none")
    known = {"kind", "lo", "hi", "mean", "stddev"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{field}: unknown keys {sorted(unknown)}")
    try:
        if kind == "none":
            return UncertaintyModel()
        if kind == "uniform":
            return UncertaintyModel.uniform(_number(raw.get("lo"), f"{field}.lo"), _number(raw.get("hi"), f"{field}.hi"))
        if kind == "truncnorm":
            return UncertaintyModel.truncnorm(
                _number(raw.get("mean", 0.0), f"{field}.mean"),
                _number(raw.get("stddev"), f"{field}.stddev"),
                _number(raw.get("lo"), f"{field}.lo"),
                _number(raw.get("hi"), f"{field}.hi"),
            )
    except ConfigError as exc:
        if str(exc).startswith(field):
            raise
        raise ConfigError(f"{field}: {exc}") from None
    raise ConfigError(f"{field}.kind: expected one of none|uniform|truncnorm, got {kind!r}")


def parse_game(raw: Any, base_dir: Optional[Path] = None) -> GameDefinition:
    """Game from its JSON object, or from a path to a JSON file holding it."""
    if isinstance(raw, str):
        path = Path(raw) if base_dir is None else base_dir / raw
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"game: cannot read {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("game: expected an object or a file path")
    n = _integer(raw.get("n"), "game.n")
    if n < 2:
        raise ConfigError(f"game.n: need at least 2 agents, got {n}")
    if n > 16:
        raise ConfigError(f"game.n: {n} agents means {2 ** n - 2} coalitions; at most 16 supported")
    grand = _number(raw.get("grand_value"), "game.grand_value")
    entries = raw.get("coalitions")
    if not isinstance(entries, list):
        raise ConfigError("game.coalitions: expected a list")
    nominal, noise = {}, {}
    for i, entry in enumerate(entries):
        field = f"game.coalitions[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{field}: expected an object")
        agents = entry.get("members")
        if not isinstance(agents, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in agents):
            raise ConfigError(f"{field}.members: expected a list of agent numbers")
        try:
            mask = mask_from_members(agents, n)
        except InvalidGameError as exc:
            raise ConfigError(f"{field}.members: {exc}") from None
        if mask == (1 << n) - 1:
            raise ConfigError(f"{field}.members: the grand coalition is set by game.grand_value")
        if mask in nominal:
            raise ConfigError(f"{field}.members: duplicate coalition {format_coalition(mask)}")
        nominal[mask] = _number(entry.get("nominal"), f"{field}.nominal")
        noise[mask] = parse_noise(entry.get("noise"), f"{field}.noise")
    missing = [format_coalition(m) for m in enumerate_coalitions(n) if m not in nominal]
    if missing:
        raise ConfigError(f"game.coalitions: missing {', '.join(missing)}")
    return GameDefinition.from_mapping(n, grand, nominal, noise)


def _validate_scalars(cfg: ExperimentConfig) -> None:
    if not cfg.K_grid:
        raise ConfigError("K_grid: must not be empty")
    for K in cfg.K_grid:
        if isinstance(K, bool) or not isinstance(K, int) or K < 1:
            raise ConfigError(f"K_grid: sample counts must be integers >= 1, got {K!r}")
    if not 0 < cfg.beta < 1:
        raise ConfigError(f"beta: must lie in (0, 1), got {cfg.beta}")
    if not 0 < cfg.alpha < 1:
        raise ConfigError(f"alpha: must lie in (0, 1), got {cfg.alpha}")
    if isinstance(cfg.test_samples, bool) or not isinstance(cfg.test_samples, int) or cfg.test_samples < 1:
        raise ConfigError(f"test_samples: must be an integer >= 1, got {cfg.test_samples!r}")
    if not cfg.seeds:
        raise ConfigError("seeds: must not be empty")
    for s in cfg.seeds:
        if isinstance(s, bool) or not isinstance(s, int) or s < 0:
            raise ConfigError(f"seeds: expected non-negative integers, got {s!r}")
    if cfg.mode not in MODES:
        raise ConfigError(f"mode: expected one of {'|'.join(MODES)}, got {cfg.mode!r}")


def config_from_dict(data: dict, base_dir: Optional[Path] = None) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    known = {"game", "K_grid", "beta", "test_samples", "seeds", "mode", "nonneg", "alpha", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    if "game" not in data:
        raise ConfigError("game: required")
    if "K_grid" not in data:
        raise ConfigError("K_grid: required")
    if not isinstance(data["K_grid"], list):
        raise ConfigError("K_grid: expected a list of integers")
    seeds = data.get("seeds", DEFAULTS["seeds"])
    if not isinstance(seeds, list):
        raise ConfigError("seeds: expected a list of integers")
    nonneg = data.get("nonneg", True)
    if not isinstance(nonneg, bool):
        raise ConfigError(f"nonneg: expected true or false, got {nonneg!r}")
    cfg = ExperimentConfig(
        game=parse_game(data["game"], base_dir),
        K_grid=tuple(data["K_grid"]),
        beta=_number(data.get("beta", DEFAULTS["beta"]), "beta"),
        test_samples=data.get("test_samples", DEFAULTS["test_samples"]),
        seeds=tuple(seeds),
        mode=data.get("mode", DEFAULTS["mode"]),
        nonneg=nonneg,
        alpha=_number(data.get("alpha", DEFAULTS["alpha"]), "alpha"),
        output=data.get("output"),
    )
    _validate_scalars(cfg)
    return cfg


def load_config(source: Union[str, Path]) -> ExperimentConfig:
    """Config from a JSON file, or from a bundled preset name."""
    if isinstance(source, str) and source in PRESET_NAMES:
        return config_from_dict(preset(source))
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON ({exc})") from None
    return config_from_dict(data, path.parent)
