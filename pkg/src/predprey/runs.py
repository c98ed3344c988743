"""Run directory layout, checkpointing, and the resumable evolution driver.

Layout::

    run_dir/
      config.ini        canonical config snapshot
      manifest.json     config hash, artifact version, progress
      hof/gen_0000/{prey,pred0,pred1,pred2}.json   best genomes per round
      generations.log   deterministic per-role records (JSON lines)
      timing.log        wall times per round (not deterministic, kept apart
                        so the record files above are byte-reproducible)
      checkpoint.json   populations + registry counters after the last round
      .lock             held while a command owns the directory

Checkpoints are written once per round, the smallest unit after which the
Hall of Fame is consistent, so an interrupted run resumes to byte-identical
artifacts.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path

from . import neat
from .config import RunConfig, canonical_text, config_hash
from .coevo import (CoevoState, HallOfFame, ROLE_CYCLE, evolve_round,
                    new_coevo_state)

ARTIFACT_VERSION = "0.1.0"

CONFIG_SNAPSHOT = "config.ini"
MANIFEST = "manifest.json"
GENERATION_LOG = "generations.log"
TIMING_LOG = "timing.log"
CHECKPOINT = "checkpoint.json"
LOCK = ".lock"


class InventoryError(ValueError):
    """A required genome or run file is missing."""


class ResumeError(ValueError):
    pass


class LockError(RuntimeError):
    pass


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Locking

class RunLock:
    def __init__(self, run_dir: Path):
        self.path = Path(run_dir) / LOCK

    def acquire(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            pid = None
            try:
                pid = int(self.path.read_text().strip())
            except (OSError, ValueError):
                pass
            if pid is not None and _pid_alive(pid):
                raise LockError(
                    f"run directory is locked by pid {pid}") from None
            # stale lock: previous owner is gone
            self.path.unlink(missing_ok=True)
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        return self

    def release(self):
        self.path.unlink(missing_ok=True)

    def __enter__(self):
        return self.acquire()

    def __exit__(self, *exc):
        self.release()


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


# ---------------------------------------------------------------------------
# Manifest

def write_manifest(run_dir: Path, cfg: RunConfig, rounds_completed: int,
                   completed: bool):
    manifest = {
        "artifact_version": ARTIFACT_VERSION,
        "config_hash": config_hash(cfg),
        "generations_target": cfg.neat.generations,
        "rounds_completed": rounds_completed,
        "completed": completed,
    }
    _atomic_write(Path(run_dir) / MANIFEST,
                  json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def load_manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / MANIFEST
    if not path.exists():
        raise InventoryError(f"no manifest in {run_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Hall-of-Fame files

def hof_genome_path(run_dir: Path, generation: int, role: str) -> Path:
    return Path(run_dir) / "hof" / f"gen_{generation:04d}" / f"{role}.json"


def write_hof_round(run_dir: Path, hof: HallOfFame, generation: int):
    gen_dir = Path(run_dir) / "hof" / f"gen_{generation:04d}"
    gen_dir.mkdir(parents=True, exist_ok=True)
    for role in ROLE_CYCLE:
        _atomic_write(gen_dir / f"{role}.json",
                      neat.genome_to_text(hof.get(role, generation)))


def load_hof_genome(run_dir: Path, generation: int, role: str) -> neat.Genome:
    path = hof_genome_path(run_dir, generation, role)
    if not path.exists():
        raise InventoryError(
            f"missing best genome for generation {generation} role {role}")
    return neat.genome_from_text(path.read_text(encoding="utf-8"))


def load_hall_of_fame(run_dir: Path, rounds: int) -> HallOfFame:
    hof = HallOfFame()
    for g in range(rounds):
        for role in ROLE_CYCLE:
            hof.append(role, load_hof_genome(run_dir, g, role))
    return hof


def available_generations(run_dir: Path) -> list:
    """Sorted generation indices that have a complete best-genome set."""
    hof_root = Path(run_dir) / "hof"
    if not hof_root.is_dir():
        return []
    gens = []
    for entry in sorted(hof_root.iterdir()):
        if not entry.name.startswith("gen_"):
            continue
        if all((entry / f"{role}.json").exists() for role in ROLE_CYCLE):
            gens.append(int(entry.name[4:]))
    return gens


# ---------------------------------------------------------------------------
# Checkpoint

def _population_to_json(pop: neat.Population) -> dict:
    return {
        "members": [neat.genome_to_json_dict(g) for g in pop.members],
        "registry": pop.registry.to_json_dict(),
        "species": [
            {"representative": neat.genome_to_json_dict(sp.representative),
             "best_fitness": sp.best_fitness,
             "staleness": sp.staleness}
            for sp in pop.species
        ],
    }


def _population_from_json(d: dict) -> neat.Population:
    members = [neat.genome_from_json_dict(g) for g in d["members"]]
    registry = neat.InnovationRegistry.from_json_dict(d["registry"])
    species = [
        neat.Species(neat.genome_from_json_dict(sp["representative"]),
                     [], sp["best_fitness"], sp["staleness"])
        for sp in d["species"]
    ]
    return neat.Population(members, registry, species)


def save_checkpoint(run_dir: Path, state: CoevoState):
    payload = {
        "generation": state.generation,
        "populations": {role: _population_to_json(pop)
                        for role, pop in state.populations.items()},
    }
    _atomic_write(Path(run_dir) / CHECKPOINT,
                  json.dumps(payload, sort_keys=True,
                             separators=(",", ":")) + "\n")


def load_checkpoint(run_dir: Path) -> CoevoState:
    path = Path(run_dir) / CHECKPOINT
    if not path.exists():
        raise ResumeError(f"no checkpoint in {run_dir}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    rounds = payload["generation"]
    populations = {role: _population_from_json(d)
                   for role, d in payload["populations"].items()}
    hof = load_hall_of_fame(run_dir, rounds)
    return CoevoState(populations, hof, rounds)


# ---------------------------------------------------------------------------
# Logs

def append_records(run_dir: Path, records, wall_time: float):
    with open(Path(run_dir) / GENERATION_LOG, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(
                {"generation": rec.generation, "role": rec.role,
                 "best_fitness": rec.best_fitness,
                 "mean_fitness": rec.mean_fitness}, sort_keys=True) + "\n")
    with open(Path(run_dir) / TIMING_LOG, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(
            {"generation": records[0].generation,
             "wall_time": wall_time}, sort_keys=True) + "\n")


def _truncate_to_round(run_dir: Path, rounds: int):
    """Drop any artifacts from rounds >= ``rounds`` (partial round debris)."""
    log = Path(run_dir) / GENERATION_LOG
    if log.exists():
        kept = [line for line in log.read_text(encoding="utf-8").splitlines()
                if line.strip() and json.loads(line)["generation"] < rounds]
        _atomic_write(log, "".join(k + "\n" for k in kept))
    tlog = Path(run_dir) / TIMING_LOG
    if tlog.exists():
        kept = [line for line in tlog.read_text(encoding="utf-8").splitlines()
                if line.strip() and json.loads(line)["generation"] < rounds]
        _atomic_write(tlog, "".join(k + "\n" for k in kept))
    hof_root = Path(run_dir) / "hof"
    if hof_root.is_dir():
        for entry in sorted(hof_root.iterdir()):
            if entry.name.startswith("gen_") and int(entry.name[4:]) >= rounds:
                for f in entry.iterdir():
                    f.unlink()
                entry.rmdir()


# ---------------------------------------------------------------------------
# Evolution driver

def start_run(cfg: RunConfig, run_dir: Path) -> CoevoState:
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    if (run_dir / MANIFEST).exists():
        raise ResumeError(
            f"{run_dir} already contains a run (use resume)")
    _atomic_write(run_dir / CONFIG_SNAPSHOT, canonical_text(cfg))
    write_manifest(run_dir, cfg, rounds_completed=0, completed=False)
    return new_coevo_state(cfg)


def resume_run(cfg: RunConfig, run_dir: Path) -> CoevoState:
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    if manifest["config_hash"] != config_hash(cfg):
        raise ResumeError("config does not match the run's manifest")
    if (run_dir / CHECKPOINT).exists():
        state = load_checkpoint(run_dir)
    else:
        # interrupted before the first round finished: start over
        state = new_coevo_state(cfg)
    _truncate_to_round(run_dir, state.generation)
    return state


def run_evolution(cfg: RunConfig, run_dir: Path, resume: bool = False,
                  parallelism: int = 1, stop_after_round: int | None = None,
                  progress=None) -> Path:
    """Drive rounds to the configured generation count, checkpointing each
    round. Interruption plus resume reproduces an uninterrupted run."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    with RunLock(run_dir):
        state = resume_run(cfg, run_dir) if resume else start_run(cfg, run_dir)
        target = cfg.neat.generations
        while state.generation < target:
            started = time.perf_counter()
            records = evolve_round(state, cfg, parallelism=parallelism)
            finished_round = state.generation - 1
            write_hof_round(run_dir, state.hof, finished_round)
            append_records(run_dir, records, time.perf_counter() - started)
            save_checkpoint(run_dir, state)
            write_manifest(run_dir, cfg, rounds_completed=state.generation,
                           completed=state.generation >= target)
            if progress is not None:
                progress(records)
            if stop_after_round is not None and state.generation >= stop_after_round:
                break
    return run_dir
