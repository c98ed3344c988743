"""Command-line entry points: evolve, tournament, replay, serve.

Every error path exits nonzero and prints a single machine-parseable
line to stderr of the form ``error[<code>] <message>``. The parallelism
degree can be forced through the PREDPREY_PARALLELISM environment
variable, which overrides the --parallelism flag.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_run_config
from .episode import TrajectoryFormatError, parse_trajectory
from .runs import (InventoryError, LockError, ResumeError,
                   available_generations, hof_genome_path, run_evolution)
from .world import ArenaConfig, ConfigurationError

EXIT_ERROR = 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: str, message: str):
    raise CliError(code, message)


def _parallelism(args) -> int:
    env = os.environ.get("PREDPREY_PARALLELISM")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            _fail("config", f"PREDPREY_PARALLELISM={env!r} is not an integer")
    return max(1, args.parallelism)


def _load_config(path, seed_override=None, output_override=None) -> RunConfig:
    try:
        cfg = load_run_config(path)
    except ConfigError as exc:
        _fail("config", str(exc))
    changes = {}
    if seed_override is not None:
        changes["master_seed"] = seed_override
    if output_override is not None:
        changes["output_dir"] = str(output_override)
    return dataclasses.replace(cfg, **changes) if changes else cfg


# ---------------------------------------------------------------------------
# evolve

def cmd_evolve(args) -> int:
    cfg = _load_config(args.config, args.seed, args.output_dir)
    run_dir = Path(cfg.output_dir)

    def progress(records):
        g = records[0].generation
        best = ", ".join(f"{r.role}={r.best_fitness:.4f}" for r in records)
        print(f"round {g + 1}/{cfg.neat.generations}: {best}")

    try:
        run_evolution(cfg, run_dir, resume=args.resume,
                      parallelism=_parallelism(args),
                      stop_after_round=args.stop_after_round,
                      progress=progress)
    except ResumeError as exc:
        _fail("resume", str(exc))
    except LockError as exc:
        _fail("lock", str(exc))
    except InventoryError as exc:
        _fail("inventory", str(exc))
    print(f"run directory: {run_dir}")
    return 0


# ---------------------------------------------------------------------------
# tournament

def cmd_tournament(args) -> int:
    from .tournament import master_tournament, write_tournament_outputs

    run_dir = Path(args.run_dir)
    if not available_generations(run_dir):
        _fail("inventory", f"no complete generations in {run_dir}")
    try:
        matrix = master_tournament(run_dir, args.episodes_per_cell,
                                   args.seed, parallelism=_parallelism(args))
    except InventoryError as exc:
        _fail("inventory", str(exc))
    except ConfigError as exc:
        _fail("config", str(exc))
    out_dir = Path(args.out_dir) if args.out_dir else run_dir / "tournament"
    paths = write_tournament_outputs(matrix, out_dir)
    print((paths["summary"]).read_text(encoding="utf-8"), end="")
    print(f"tournament outputs in {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# replay

def _validate_trajectory(rows, arena: ArenaConfig):
    """Containment and catch-consistency re-checks; raises CliError."""
    tol = 1e-6
    lo = arena.robot_body_radius - tol
    hi = arena.side_length - arena.robot_body_radius + tol
    first_catch = None
    for tick, values in rows:
        poses = [(values[k * 3], values[k * 3 + 1]) for k in range(4)]
        for k, (x, y) in enumerate(poses):
            if not (lo <= x <= hi and lo <= y <= hi):
                name = "prey" if k == 0 else f"pred{k - 1}"
                _fail("replay",
                      f"containment violation at tick {tick}: {name} at "
                      f"({x:.6f}, {y:.6f})")
        px, py = poses[0]
        dmin = min(math.hypot(x - px, y - py) for x, y in poses[1:])
        if first_catch is None and tick > 0 and dmin <= arena.catch_radius + 1e-5:
            first_catch = (tick, dmin)
    last_tick = rows[-1][0]
    if first_catch is not None and first_catch[0] != last_tick:
        _fail("replay",
              f"catch inconsistency: catch distance reached at tick "
              f"{first_catch[0]} but trajectory continues to {last_tick}")
    if first_catch is None and last_tick != arena.n_ticks:
        _fail("replay",
              f"catch inconsistency: no catch but trajectory has "
              f"{last_tick} ticks instead of {arena.n_ticks}")
    return first_catch


def cmd_replay(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        arena = cfg.arena
    else:
        arena = ArenaConfig()
    path = Path(args.trajectory)
    if not path.exists():
        _fail("replay", f"no such trajectory file: {path}")
    try:
        rows = parse_trajectory(path.read_text(encoding="utf-8"))
    except TrajectoryFormatError as exc:
        _fail("replay", str(exc))
    catch = _validate_trajectory(rows, arena)
    if catch is not None:
        print(f"valid: caught at t={catch[0] * arena.dt:.1f}s "
              f"(min distance {catch[1]:.6f} m), {len(rows)} ticks")
    else:
        print(f"valid: timeout after t={arena.episode_time:.1f}s, "
              f"{len(rows)} ticks")
    return 0


# ---------------------------------------------------------------------------
# serve

def cmd_serve(args) -> int:
    run_dir = Path(args.run_dir)
    for role in ("prey", "pred0", "pred1", "pred2"):
        path = hof_genome_path(run_dir, args.generation, role)
        if not path.exists():
            _fail("inventory",
                  f"missing best genome for generation {args.generation} "
                  f"role {role}")
    from .live import create_app
    import uvicorn

    try:
        app = create_app(run_dir, args.generation, runs_root=args.runs_root,
                         static_dir=args.static_dir, pace=args.pace)
    except ConfigError as exc:
        _fail("config", str(exc))
    config = uvicorn.Config(app, host=args.host, port=args.port,
                            log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run()
    except OSError as exc:
        _fail("port", f"cannot bind {args.host}:{args.port}: {exc}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predprey",
        description="Predator-prey coevolution arena")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run a coevolution")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's master seed")
    p.add_argument("--output-dir", default=None)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--stop-after-round", type=int, default=None,
                   help="checkpoint and stop after this many rounds")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("tournament", help="master tournament over a run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--episodes-per-cell", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("replay", help="validate an exported trajectory")
    p.add_argument("trajectory")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="live human-vs-agent play service")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--generation", type=int, required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--runs-root", default=None)
    p.add_argument("--static-dir", default=None)
    p.add_argument("--pace", type=float, default=1.0,
                   help="real-time speed multiplier (1.0 = 10 Hz)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.code}] {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ConfigError, ConfigurationError) as exc:
        print(f"error[config] {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("error[interrupted] stopped by user", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
