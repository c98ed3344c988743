#!/usr/bin/env python3
"""XOR benchmark for the NEAT engine: solve rate and generations-to-solve
over a seed range.

Usage: python scripts/xor_check.py [--seeds 10] [--pop 150]
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from predprey import neat

XOR_CASES = [((0.0, 0.0), 0.0), ((0.0, 1.0), 1.0),
             ((1.0, 0.0), 1.0), ((1.0, 1.0), 0.0)]


def fitness(genome):
    net = neat.Network(genome)
    err = sum((net.activate(i)[0] - t) ** 2 for i, t in XOR_CASES)
    return max(0.0001, 4.0 - err) ** 2


def solved(genome):
    net = neat.Network(genome)
    return all(abs(net.activate(i)[0] - t) < 0.5 for i, t in XOR_CASES)


def run(seed, cfg, max_generations):
    rng = random.Random(seed)
    pop = neat.initial_population(2, 1, cfg, rng)
    for gen in range(max_generations):
        fits = [fitness(g) for g in pop.members]
        best = max(range(len(fits)), key=lambda i: fits[i])
        if solved(pop.members[best]):
            return gen
        pop = neat.next_generation(pop, fits, cfg, rng)
    return None


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--pop", type=int, default=150)
    parser.add_argument("--generations", type=int, default=100)
    args = parser.parse_args()

    cfg = neat.NeatConfig(
        population_size=args.pop, p_add_node=0.03, p_add_connection=0.1,
        p_delete_node=0.02, p_delete_connection=0.02,
        compatibility_threshold=4.0, stagnation_generations=10)

    t0 = time.perf_counter()
    results = []
    for seed in range(1, args.seeds + 1):
        gen = run(seed, cfg, args.generations)
        results.append(gen)
        print(f"seed {seed}: " + (f"solved at generation {gen}"
                                  if gen is not None else "not solved"))
    ok = sum(r is not None for r in results)
    print(f"solve rate: {ok}/{args.seeds} "
          f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
