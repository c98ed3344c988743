"""Full-episode execution: the sense -> activate -> drive loop, episode
outcomes, and the trajectory text format."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import neat
from .sensors import (CameraModel, PREDATOR_ARITY, PREY_ARITY,
                      omniscient_observe, predator_inputs)
from .world import (ArenaConfig, ConfigurationError, WheelCommand,
                    initial_placement, predator_prey_distances, step_world)

TRAJECTORY_COLUMNS = ["tick"]
for _name in ("prey", "pred0", "pred1", "pred2"):
    TRAJECTORY_COLUMNS += [f"{_name}_x", f"{_name}_y", f"{_name}_theta"]
TRAJECTORY_HEADER = ",".join(TRAJECTORY_COLUMNS)


@dataclass(frozen=True)
class EpisodeOutcome:
    caught: bool
    t: float
    final_distances: tuple       # 3 predator-to-prey center distances
    trajectory: tuple            # per tick: (prey, pred0, pred1, pred2) poses
    catcher: int | None = None


def _check_arity(genome, expected, label):
    actual = (genome.input_arity, genome.output_arity)
    if actual != expected:
        raise ConfigurationError(
            f"{label} genome has arity {actual[0]}->{actual[1]}, "
            f"expected {expected[0]}->{expected[1]}")


def outputs_to_command(outputs, omega_max: float) -> WheelCommand:
    """Map network outputs in [-1, 1] to wheel speeds."""
    return WheelCommand(outputs[0] * omega_max, outputs[1] * omega_max)


def run_episode(predator_genomes, prey_genome, config: ArenaConfig, seed,
                camera: CameraModel | None = None) -> EpisodeOutcome:
    """Run one episode of at most ``episode_time`` seconds.

    Stops at the first catch or at timeout. Bit-identical results for
    identical (genomes, config, seed).
    """
    if len(predator_genomes) != 3:
        raise ConfigurationError("exactly 3 predator genomes are required")
    for i, g in enumerate(predator_genomes):
        _check_arity(g, PREDATOR_ARITY, f"predator {i}")
    _check_arity(prey_genome, PREY_ARITY, "prey")
    if camera is None:
        camera = CameraModel(target_radius=config.robot_body_radius)

    predator_nets = [neat.Network(g) for g in predator_genomes]
    prey_net = neat.Network(prey_genome)

    state = initial_placement(config, seed)
    trajectory = [state.all_poses()]
    for _ in range(config.n_ticks):
        prey_cmd = outputs_to_command(
            prey_net.activate(omniscient_observe(state, config)),
            config.omega_max)
        predator_cmds = [
            outputs_to_command(
                net.activate(predator_inputs(state, i, camera, config)),
                config.omega_max)
            for i, net in enumerate(predator_nets)
        ]
        state = step_world(state, prey_cmd, predator_cmds, config)
        trajectory.append(state.all_poses())
        if state.caught:
            break

    t = state.catch_time if state.caught else config.episode_time
    return EpisodeOutcome(
        caught=state.caught,
        t=t,
        final_distances=predator_prey_distances(state),
        trajectory=tuple(trajectory),
        catcher=state.catcher,
    )


# ---------------------------------------------------------------------------
# Trajectory export: one line per tick, 6-decimal fixed point.

def format_trajectory(trajectory) -> str:
    lines = [TRAJECTORY_HEADER]
    for tick, poses in enumerate(trajectory):
        cells = [str(tick)]
        for pose in poses:
            cells += [f"{pose.x:.6f}", f"{pose.y:.6f}", f"{pose.theta:.6f}"]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_trajectory(trajectory, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_trajectory(trajectory))


class TrajectoryFormatError(ValueError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def parse_trajectory(text: str):
    """Rows of (tick, [12 floats]); raises TrajectoryFormatError with the
    offending line number."""
    lines = text.splitlines()
    if not lines:
        raise TrajectoryFormatError(0, "empty trajectory file")
    if lines[0].strip() != TRAJECTORY_HEADER:
        raise TrajectoryFormatError(1, "bad or missing header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(TRAJECTORY_COLUMNS):
            raise TrajectoryFormatError(
                lineno, f"expected {len(TRAJECTORY_COLUMNS)} fields, "
                        f"got {len(cells)}")
        try:
            tick = int(cells[0])
            values = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise TrajectoryFormatError(lineno, str(exc)) from None
        if not all(math.isfinite(v) for v in values):
            raise TrajectoryFormatError(lineno, "non-finite value")
        if tick != len(rows):
            raise TrajectoryFormatError(lineno, f"tick {tick} out of sequence")
        rows.append((tick, values))
    if not rows:
        raise TrajectoryFormatError(len(lines), "no data rows")
    return rows
