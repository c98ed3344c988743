"""Alternating coevolution of four populations (3 heterogeneous predators,
1 prey) with best-of-previous-generation teammates and Hall-of-Fame
opponent sampling over a window of recent generations.

Within one round each role in turn evaluates its whole population, appends
its best genome to the Hall of Fame, and turns over a generation; the
global generation index advances once all four roles are done.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import neat
from .episode import run_episode
from .seeding import derive_rng
from .sensors import PREDATOR_ARITY, PREY_ARITY
from .config import RunConfig

ROLE_PREY = "prey"
PREDATOR_ROLES = ("pred0", "pred1", "pred2")
ROLE_CYCLE = (ROLE_PREY,) + PREDATOR_ROLES


class AggregationError(ValueError):
    """No outcomes to aggregate a fitness from."""


def predator_role_index(role: str) -> int:
    return PREDATOR_ROLES.index(role)


def role_arity(role: str) -> tuple[int, int]:
    return PREY_ARITY if role == ROLE_PREY else PREDATOR_ARITY


@dataclass
class FitnessAggregate:
    outcomes: list
    fitness: float


def prey_fitness(outcomes, episode_time: float) -> float:
    """Mean normalized survival time; 1.0 when never caught."""
    if not outcomes:
        raise AggregationError("prey fitness needs >= 1 outcome")
    return sum(o.t / episode_time for o in outcomes) / len(outcomes)


def predator_fitness(outcomes, evolving_predator_index: int,
                     catch_radius: float) -> float:
    """Mean inverse final distance of the evolving predator itself.

    Distances are clamped below at catch_radius: a catch already ends the
    episode, and an unbounded 1/d would drown out every other evaluation.
    """
    if not outcomes:
        raise AggregationError("predator fitness needs >= 1 outcome")
    total = sum(
        1.0 / max(o.final_distances[evolving_predator_index], catch_radius)
        for o in outcomes)
    return total / len(outcomes)


# ---------------------------------------------------------------------------
# Hall of Fame

class HallOfFame:
    """Per-role archive of each generation's best genome.

    Entries are copied in and copied out, so an archived genome can never
    be mutated by later code.
    """

    def __init__(self):
        self._entries = {role: [] for role in ROLE_CYCLE}

    def append(self, role: str, genome: neat.Genome):
        self._entries[role].append(genome.copy())

    def get(self, role: str, generation: int) -> neat.Genome:
        return self._entries[role][generation].copy()

    def size(self, role: str) -> int:
        return len(self._entries[role])

    def generations_completed(self) -> int:
        return min(len(v) for v in self._entries.values())

    def predator_trio(self, generation: int) -> tuple:
        return tuple(self.get(r, generation) for r in PREDATOR_ROLES)


@dataclass
class OpponentPool:
    """Best opponents from the eligible window of completed generations.

    For an evolving prey each entry is a coherent predator trio (a team
    that evolved together); for an evolving predator each entry is a
    single prey genome. Empty at generation 0.
    """
    role: str
    entries: list

    def sample(self, rng) -> tuple:
        if not self.entries:
            return _random_opponents(self.role, rng)
        if self.role == ROLE_PREY:
            return self.entries[rng.randrange(len(self.entries))]
        return (self.entries[rng.randrange(len(self.entries))],)


def _random_opponents(role: str, rng) -> tuple:
    if role == ROLE_PREY:
        return tuple(neat.initial_genome(*PREDATOR_ARITY, rng)
                     for _ in range(3))
    return (neat.initial_genome(*PREY_ARITY, rng),)


def opponent_pool(hof: HallOfFame, role: str, current_generation: int,
                  window: int) -> OpponentPool:
    lo = max(0, current_generation - window)
    gens = range(lo, current_generation)
    if role == ROLE_PREY:
        entries = [hof.predator_trio(g) for g in gens]
    else:
        entries = [hof.get(ROLE_PREY, g) for g in gens]
    return OpponentPool(role, entries)


def sample_opponents(hof: HallOfFame, role: str, current_generation: int,
                     rng, window: int = 10) -> tuple:
    """Opponent genome(s) for one evaluation: a uniformly random generation
    from the last ``window`` completed ones; seeded-random initial genomes
    when no generation has completed yet."""
    return opponent_pool(hof, role, current_generation, window).sample(rng)


# ---------------------------------------------------------------------------
# Evaluation

@dataclass
class EvalContext:
    """Everything one worker needs to score one individual."""
    settings: RunConfig
    role: str
    generation: int
    teammates: dict | None
    pool: OpponentPool


def _lineup(ctx: EvalContext, individual: neat.Genome, opponents: tuple):
    """(predator genomes, prey genome) for one episode."""
    if ctx.role == ROLE_PREY:
        return list(opponents), individual
    predators = []
    for r in PREDATOR_ROLES:
        predators.append(individual if r == ctx.role else ctx.teammates[r])
    return predators, opponents[0]


def evaluate_in_context(ctx: EvalContext, individual: neat.Genome,
                        individual_index: int) -> FitnessAggregate:
    settings = ctx.settings
    outcomes = []
    for ep in range(settings.evaluations_per_individual):
        rng = derive_rng(settings.master_seed, "eval", ctx.generation,
                         ctx.role, individual_index, ep)
        opponents = ctx.pool.sample(rng)
        predators, prey_genome = _lineup(ctx, individual, opponents)
        episode_seed = rng.getrandbits(63)
        outcomes.append(run_episode(predators, prey_genome, settings.arena,
                                    episode_seed, settings.camera))
    if ctx.role == ROLE_PREY:
        fitness = prey_fitness(outcomes, settings.arena.episode_time)
    else:
        fitness = predator_fitness(outcomes, predator_role_index(ctx.role),
                                   settings.arena.catch_radius)
    return FitnessAggregate(outcomes, fitness)


def evaluate_individual(individual: neat.Genome, role: str,
                        teammates: dict | None, hof: HallOfFame,
                        settings: RunConfig, generation: int,
                        individual_index: int) -> FitnessAggregate:
    """Score one individual over K episodes, each against an independently
    sampled Hall-of-Fame opponent."""
    ctx = EvalContext(settings, role, generation, teammates,
                      opponent_pool(hof, role, generation,
                                    settings.hof_window))
    return evaluate_in_context(ctx, individual, individual_index)


def _worker_fitness(args) -> float:
    ctx, genome, index = args
    return evaluate_in_context(ctx, genome, index).fitness


# ---------------------------------------------------------------------------
# Round driver

@dataclass
class GenerationRecord:
    generation: int
    role: str
    best_fitness: float
    mean_fitness: float


@dataclass
class CoevoState:
    populations: dict
    hof: HallOfFame
    generation: int


def new_coevo_state(settings: RunConfig) -> CoevoState:
    populations = {}
    for role in ROLE_CYCLE:
        rng = derive_rng(settings.master_seed, "init", role)
        populations[role] = neat.initial_population(
            *role_arity(role), settings.neat, rng)
    return CoevoState(populations, HallOfFame(), 0)


def _teammates_for(role: str, state: CoevoState, settings: RunConfig):
    if role == ROLE_PREY:
        return None
    others = [r for r in PREDATOR_ROLES if r != role]
    if state.generation == 0:
        # No previous generation exists: seeded-random stand-ins.
        return {r: neat.initial_genome(
                    *PREDATOR_ARITY,
                    derive_rng(settings.master_seed, "teammates", 0, role, r))
                for r in others}
    return {r: state.hof.get(r, state.generation - 1) for r in others}


def evolve_round(state: CoevoState, settings: RunConfig,
                 parallelism: int = 1) -> list:
    """One full round: each role evaluates, archives its best, reproduces.
    Returns one GenerationRecord per role."""
    g = state.generation
    records = []
    for role in ROLE_CYCLE:
        pop = state.populations[role]
        ctx = EvalContext(settings, role, g, _teammates_for(role, state, settings),
                          opponent_pool(state.hof, role, g, settings.hof_window))
        tasks = [(ctx, genome, idx) for idx, genome in enumerate(pop.members)]
        if parallelism > 1:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                fitnesses = list(pool.map(_worker_fitness, tasks))
        else:
            fitnesses = [_worker_fitness(t) for t in tasks]

        best_idx = min(range(len(fitnesses)),
                       key=lambda i: (-fitnesses[i], i))
        state.hof.append(role, pop.members[best_idx])
        records.append(GenerationRecord(
            generation=g, role=role,
            best_fitness=fitnesses[best_idx],
            mean_fitness=sum(fitnesses) / len(fitnesses)))

        rng = derive_rng(settings.master_seed, "repro", g, role)
        state.populations[role] = neat.next_generation(
            pop, fitnesses, settings.neat, rng)
    state.generation = g + 1
    return records
