"""Command-line interface.

Exit codes: 0 success, 1 precondition failure (e.g. empty core where a
nonempty one is required), 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import core_certificate
from .config import ExperimentConfig, load_config
from .core import build_core, coalition_minima, compression_set, is_empty, membership
from .errors import ConfigError, InvalidGameError, NumericalError, PreconditionError
from .experiments import run_experiment
from .game import format_coalition, sample_scenarios
from .presets import PRESET_NAMES, preset
from .relaxation import certify_relaxed, solve_relaxed
from .report import emit_report
from .validation import estimate_core_instability, estimate_point_instability

EXIT_PRECONDITION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _allocation(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.replace(" ", "").split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _config(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if not (args.config or args.preset):
        raise ConfigError("a game is required: pass --config FILE or --preset NAME")
    cfg = load_config(args.config or args.preset)
    return cfg.with_overrides(
        beta=getattr(args, "beta", None),
        nonneg=False if getattr(args, "free", False) else None,
    )


def _single(args, cfg: ExperimentConfig):
    K = args.K if args.K is not None else cfg.K_grid[0]
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    if K < 1:
        raise ConfigError(f"--K must be >= 1, got {K}")
    if seed < 0:
        raise ConfigError(f"--seed must be >= 0, got {seed}")
    return sample_scenarios(cfg.game, K, seed), K, seed


def _emit(payload: dict, out) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _vec(x) -> list:
    return None if x is None else [float(v) for v in x]


def cmd_core_check(args) -> int:
    start = time.perf_counter()
    cfg = _config(args)
    sg, K, seed = _single(args, cfg)
    core = build_core(sg, args.zeta, cfg.nonneg)
    empty, witness = is_empty(core)
    payload = {"K": K, "seed": seed, "zeta": args.zeta, "nonempty": not empty, "witness": _vec(witness)}
    if args.allocation is not None:
        if args.allocation.shape != (core.n,):
            raise ConfigError(f"--allocation: expected {core.n} values, got {args.allocation.size}")
        payload["allocation"] = _vec(args.allocation)
        payload["member"] = membership(core, args.allocation)
    payload["wall_time_ms"] = (time.perf_counter() - start) * 1e3
    _emit(payload, args.out)
    return 0


def cmd_compress(args) -> int:
    cfg = _config(args)
    sg, K, seed = _single(args, cfg)
    result = compression_set(sg, cfg.nonneg)
    _emit(
        {
            "K": K,
            "seed": seed,
            "indices": list(result.indices),
            "s": result.cardinality,
            "probes": [
                {"coalition": format_coalition(r.coalition), "feasible": r.feasible, "attaining": r.attaining}
                for r in result.records
            ],
        },
        args.out,
    )
    return 0


def cmd_certify(args) -> int:
    cfg = _config(args)
    sg, K, seed = _single(args, cfg)
    result = compression_set(sg, cfg.nonneg)
    report = core_certificate(K, result.cardinality, cfg.beta, n_agents=cfg.game.n)
    _emit({"seed": seed, "indices": list(result.indices), **report.to_dict()}, args.out)
    return 0


def cmd_relax(args) -> int:
    cfg = _config(args)
    sg, K, seed = _single(args, cfg)
    res = solve_relaxed(sg)
    report = certify_relaxed(res, cfg.beta)
    _emit(
        {
            "seed": seed,
            "x_star": _vec(res.x_star),
            "zeta_star": res.zeta_star,
            "s_star": res.s_star,
            "core_nonempty": res.core_nonempty,
            "robust_core_empty": res.robust_core_empty,
            "total_slack": res.objective,
            **report.to_dict(),
        },
        args.out,
    )
    return 0


def cmd_validate(args) -> int:
    cfg = _config(args)
    M = args.trials if args.trials is not None else cfg.test_samples
    alpha = args.alpha if args.alpha is not None else cfg.alpha
    sg, K, seed = _single(args, cfg)
    kw = dict(M=M, seed=seed, alpha=alpha, shards=args.shards, workers=args.workers)
    if args.allocation is not None:
        if args.allocation.shape != (cfg.game.n,):
            raise ConfigError(f"--allocation: expected {cfg.game.n} values, got {args.allocation.size}")
        target, x = "allocation", args.allocation
    elif args.relaxed:
        target, x = "least-core allocation", solve_relaxed(sg).x_star
    else:
        target, x = "scenario core", None
    if x is None:
        est = estimate_core_instability(coalition_minima(build_core(sg, 0.0, cfg.nonneg)), cfg.game, **kw)
    else:
        est = estimate_point_instability(cfg.game, x, **kw)
    _emit({"target": target, "K": K, "allocation": _vec(x), **est.to_dict()}, args.out)
    return 0


def cmd_experiment(args) -> int:
    if args.dump_config:
        if not args.preset:
            raise ConfigError("--dump-config needs --preset")
        _emit(preset(args.preset), args.out)
        return 0
    cfg = _config(args)
    cfg = cfg.with_overrides(
        K_grid=args.K_grid,
        seeds=[args.seed] if args.seed is not None else args.seeds,
        test_samples=args.trials,
        mode=args.mode,
    )
    rows = run_experiment(cfg, jobs=args.jobs)
    fmt = args.format or ("json" if str(args.out or "").endswith(".json") else "csv")
    emit_report(rows, fmt, args.out or cfg.output)
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopscenario",
        description="Scenario-based stability certificates for uncertain cooperative games.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, single=True):
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--preset", choices=PRESET_NAMES, help="bundled config")
        p.add_argument("--seed", type=int, help="sampling seed (default: first seed of the config)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--beta", type=float, help="confidence parameter override")
        p.add_argument("--free", action="store_true", help="drop the x >= 0 constraint")
        if single:
            p.add_argument("--K", type=int, help="sample count (default: first entry of K_grid)")

    p = sub.add_parser("core-check", help="decide emptiness of the scenario (zeta-)core, test membership")
    common(p)
    p.add_argument("--allocation", type=_allocation, help="comma-separated allocation to test")
    p.add_argument("--zeta", type=float, default=0.0, help="relaxation penalty (default 0)")
    p.set_defaults(func=cmd_core_check)

    p = sub.add_parser("compress", help="compression set of the scenario core")
    common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("certify", help="a posteriori (and a priori) certificate for the scenario core")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("relax", help="least-core allocation with risk interval and explicit bound")
    common(p)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("validate", help="Monte Carlo instability estimate on fresh draws")
    common(p)
    p.add_argument("--allocation", type=_allocation, help="estimate for this allocation")
    p.add_argument("--relaxed", action="store_true", help="estimate for the least-core allocation")
    p.add_argument("--trials", type=int, help="test draws (default: config test_samples)")
    p.add_argument("--alpha", type=float, help="Hoeffding interval level")
    p.add_argument("--shards", type=int, default=1, help="independent seed shards")
    p.add_argument("--workers", type=int, default=1, help="threads evaluating shards")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("experiment", help="run a full (K, seed) grid and write a report")
    common(p, single=False)
    p.add_argument("--K-grid", type=_int_list, help="comma-separated sample counts")
    p.add_argument("--seeds", type=_int_list, help="comma-separated seeds")
    p.add_argument("--trials", type=int, help="test draws per row")
    p.add_argument("--mode", choices=("core-certify", "relax-certify"))
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--dump-config", action="store_true", help="print the preset config and exit")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidGameError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
