#!/usr/bin/env python3
"""End-to-end desk-scale experiment: smoke evolution, master tournament,
and a trajectory export, all from one seed.

Usage: python scripts/run_smoke.py [--out runs/smoke] [--seed 1]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from predprey.config import load_run_config
from predprey.runs import run_evolution
from predprey.tournament import (export_trajectories, master_tournament,
                                 write_tournament_outputs)

import dataclasses


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="runs/smoke")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--parallelism", type=int, default=1)
    args = parser.parse_args()

    cfg = load_run_config(Path(__file__).parent.parent / "configs/smoke.ini")
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    run_dir = Path(args.out)

    def progress(records):
        line = " ".join(f"{r.role}={r.best_fitness:.3f}" for r in records)
        print(f"round {records[0].generation}: {line}")

    run_evolution(cfg, run_dir, parallelism=args.parallelism,
                  progress=progress)
    print(f"evolution complete: {run_dir}")

    matrix = master_tournament(run_dir, episodes_per_cell=1, seed=0,
                               parallelism=args.parallelism)
    paths = write_tournament_outputs(matrix, run_dir / "tournament")
    print(paths["summary"].read_text(), end="")

    final_gen = matrix.pred_generations[-1]
    export_trajectories(run_dir, final_gen, final_gen, episodes=3, seed=0,
                        out_dir=run_dir / "trajectories")
    print(f"trajectories in {run_dir / 'trajectories'}")


if __name__ == "__main__":
    main()
