"""Deterministic 2D predator-prey coevolution arena.

Three camera/IR-sensing predators and one all-knowing prey, all driven by
NEAT-evolved tanh networks, coevolve under an alternating framework with
Hall-of-Fame opponent sampling. Evolved controllers are evaluated by
master tournaments and live human-vs-agent play.
"""

from .world import (ArenaConfig, Pose, RobotState, WheelCommand, WorldState,
                    check_catch, initial_placement, resolve_collisions,
                    step_kinematics, step_world)
from .sensors import (CameraModel, camera_observe, ir_observe,
                      omniscient_observe)
from .episode import EpisodeOutcome, run_episode
from .neat import (Genome, NeatConfig, Network, Population, activate,
                   compatibility_distance, crossover, initial_population,
                   mutate, next_generation)
from .coevo import (CoevoState, HallOfFame, evaluate_individual, evolve_round,
                    new_coevo_state, predator_fitness, prey_fitness,
                    sample_opponents)
from .config import RunConfig, load_run_config
from .tournament import accumulated_scores, export_trajectories, master_tournament

__version__ = "0.1.0"
