"""Master tournaments: every generation's best predator trio against every
generation's best prey, caught-time matrices, accumulated score curves,
and trajectory exports."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import load_run_config
from .coevo import PREDATOR_ROLES, ROLE_PREY
from .episode import format_trajectory, run_episode
from .runs import CONFIG_SNAPSHOT, available_generations, load_hof_genome
from .seeding import derive_seed


@dataclass
class TournamentMatrix:
    cells: list                 # cells[i][j]: mean caught time, pred gen i vs prey gen j
    pred_generations: list
    prey_generations: list
    episodes_per_cell: int
    seed: int
    episode_time: float


@dataclass
class ScoreSeries:
    prey_scores: list           # indexed like prey_generations
    predator_scores: list       # indexed like pred_generations


def _cell_worker(args) -> float:
    predators, prey, arena, camera, seeds, episode_time = args
    total = 0.0
    for s in seeds:
        total += run_episode(predators, prey, arena, s, camera).t
    return total / len(seeds)


def master_tournament(run_dir, episodes_per_cell: int, seed: int,
                      parallelism: int = 1) -> TournamentMatrix:
    """Mean caught time for every (predator generation, prey generation)
    pair, deterministic for a given seed."""
    run_dir = Path(run_dir)
    cfg = load_run_config(run_dir / CONFIG_SNAPSHOT)
    gens = available_generations(run_dir)

    trios = {g: [load_hof_genome(run_dir, g, r) for r in PREDATOR_ROLES]
             for g in gens}
    preys = {g: load_hof_genome(run_dir, g, ROLE_PREY) for g in gens}

    tasks = []
    for i in gens:
        for j in gens:
            seeds = [derive_seed(seed, "cell", i, j, e)
                     for e in range(episodes_per_cell)]
            tasks.append((trios[i], preys[j], cfg.arena, cfg.camera, seeds,
                          cfg.arena.episode_time))
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            flat = list(pool.map(_cell_worker, tasks))
    else:
        flat = [_cell_worker(t) for t in tasks]

    n = len(gens)
    cells = [flat[i * n:(i + 1) * n] for i in range(n)]
    return TournamentMatrix(cells, list(gens), list(gens), episodes_per_cell,
                            seed, cfg.arena.episode_time)


def accumulated_scores(matrix: TournamentMatrix,
                       episode_time: float) -> ScoreSeries:
    """Prey score: total caught time across all predator generations.
    Predator score: total of (episode time - caught time) across preys."""
    prey_scores = [sum(row[j] for row in matrix.cells)
                   for j in range(len(matrix.prey_generations))]
    predator_scores = [sum(episode_time - v for v in row)
                       for row in matrix.cells]
    return ScoreSeries(prey_scores, predator_scores)


# ---------------------------------------------------------------------------
# Plot-ready text outputs

def format_matrix(matrix: TournamentMatrix) -> str:
    header = "pred_gen/prey_gen," + ",".join(
        str(g) for g in matrix.prey_generations)
    lines = [header]
    for g, row in zip(matrix.pred_generations, matrix.cells):
        lines.append(str(g) + "," + ",".join(f"{v:.3f}" for v in row))
    return "\n".join(lines) + "\n"


def format_scores(generations, scores) -> str:
    lines = ["generation,score"]
    for g, s in zip(generations, scores):
        lines.append(f"{g},{s!r}")
    return "\n".join(lines) + "\n"


def format_summary(matrix: TournamentMatrix, series: ScoreSeries) -> str:
    best_pred = max(range(len(series.predator_scores)),
                    key=lambda i: (series.predator_scores[i], -i))
    best_prey = max(range(len(series.prey_scores)),
                    key=lambda j: (series.prey_scores[j], -j))
    return (
        f"generations: {len(matrix.pred_generations)}\n"
        f"episodes_per_cell: {matrix.episodes_per_cell}\n"
        f"seed: {matrix.seed}\n"
        f"best_predator_generation: {matrix.pred_generations[best_pred]} "
        f"(accumulated score {series.predator_scores[best_pred]:.3f})\n"
        f"best_prey_generation: {matrix.prey_generations[best_prey]} "
        f"(accumulated score {series.prey_scores[best_prey]:.3f})\n"
    )


def write_tournament_outputs(matrix: TournamentMatrix, out_dir) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = accumulated_scores(matrix, matrix.episode_time)
    paths = {
        "matrix": out_dir / "matrix.csv",
        "prey_scores": out_dir / "prey_scores.csv",
        "predator_scores": out_dir / "predator_scores.csv",
        "summary": out_dir / "summary.txt",
    }
    paths["matrix"].write_text(format_matrix(matrix), encoding="utf-8")
    paths["prey_scores"].write_text(
        format_scores(matrix.prey_generations, series.prey_scores),
        encoding="utf-8")
    paths["predator_scores"].write_text(
        format_scores(matrix.pred_generations, series.predator_scores),
        encoding="utf-8")
    paths["summary"].write_text(format_summary(matrix, series),
                                encoding="utf-8")
    return paths


def export_trajectories(run_dir, predator_gen: int, prey_gen: int,
                        episodes: int, seed: int, out_dir) -> Path:
    """One trajectory file per episode plus an index of outcomes."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = load_run_config(run_dir / CONFIG_SNAPSHOT)
    predators = [load_hof_genome(run_dir, predator_gen, r)
                 for r in PREDATOR_ROLES]
    prey = load_hof_genome(run_dir, prey_gen, ROLE_PREY)

    index = []
    for e in range(episodes):
        episode_seed = derive_seed(seed, "traj", predator_gen, prey_gen, e)
        outcome = run_episode(predators, prey, cfg.arena, episode_seed,
                              cfg.camera)
        name = f"episode_{e:03d}.csv"
        (out_dir / name).write_text(format_trajectory(outcome.trajectory),
                                    encoding="utf-8")
        index.append({
            "episode": e,
            "file": name,
            "seed": episode_seed,
            "caught": outcome.caught,
            "t": outcome.t,
            "catcher": outcome.catcher,
            "final_distances": list(outcome.final_distances),
            "predator_generation": predator_gen,
            "prey_generation": prey_gen,
        })
    index_path = out_dir / "index.json"
    index_path.write_text(
        json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return index_path
