"""Fixed-timestep 2D arena: differential-drive kinematics, collisions, catch.

All robots are body discs of equal radius inside a square arena. One
control tick advances every robot simultaneously from the same pre-step
state, then resolves wall and body contacts positionally.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi

# Below this turn rate the arc update degenerates; use straight-line motion,
# which is exact for omega == 0.
STRAIGHT_OMEGA_EPS = 1e-9

# Positional tolerance for the non-overlap invariant.
OVERLAP_TOL = 1e-9

# Wall-squeeze geometries separate by only about half the remaining
# overlap per sweep, so 64 sweeps are needed to land well under
# OVERLAP_TOL from any reachable overlap; the loop exits early once stable.
MAX_PUSHOUT_SWEEPS = 64


class ConfigurationError(ValueError):
    """Invalid arena configuration or mismatched controller wiring."""


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t <= 0.0:
        t += TWO_PI
    return t - math.pi


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class WheelCommand:
    omega_left: float = 0.0
    omega_right: float = 0.0


@dataclass(frozen=True)
class ArenaConfig:
    side_length: float = 4.0
    robot_body_radius: float = 0.10
    wheel_radius: float = 0.035
    axle_length: float = 0.18
    omega_max: float = 15.0
    dt: float = 0.1
    episode_time: float = 30.0
    catch_radius: float = 0.30
    ir_range: float = 0.20

    def __post_init__(self):
        for name in ("side_length", "robot_body_radius", "wheel_radius",
                     "axle_length", "omega_max", "dt", "episode_time",
                     "catch_radius", "ir_range"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"{name} must be > 0")
        ticks = self.episode_time / self.dt
        if abs(ticks - round(ticks)) > 1e-9:
            raise ConfigurationError("episode_time must be an integer multiple of dt")
        if self.side_length <= 2.0 * self.robot_body_radius:
            raise ConfigurationError("arena too small for a robot body")

    @property
    def n_ticks(self) -> int:
        return round(self.episode_time / self.dt)

    @property
    def max_linear_speed(self) -> float:
        return self.wheel_radius * self.omega_max


@dataclass(frozen=True)
class RobotState:
    pose: Pose
    cmd: WheelCommand = WheelCommand()


@dataclass(frozen=True)
class WorldState:
    tick: int
    prey: RobotState
    predators: tuple   # exactly 3 RobotState
    caught: bool = False
    catch_time: float | None = None
    catcher: int | None = None

    def all_poses(self):
        """Poses in fixed order: prey, then predators 0..2."""
        return (self.prey.pose,) + tuple(p.pose for p in self.predators)


def step_kinematics(pose: Pose, cmd: WheelCommand, config: ArenaConfig) -> Pose:
    """Exact differential-drive update over one dt (no wall handling)."""
    v = config.wheel_radius * (cmd.omega_left + cmd.omega_right) / 2.0
    omega = config.wheel_radius * (cmd.omega_right - cmd.omega_left) / config.axle_length
    if abs(omega) < STRAIGHT_OMEGA_EPS:
        return Pose(
            pose.x + v * config.dt * math.cos(pose.theta),
            pose.y + v * config.dt * math.sin(pose.theta),
            normalize_angle(pose.theta),
        )
    radius = v / omega
    theta2 = pose.theta + omega * config.dt
    return Pose(
        pose.x + radius * (math.sin(theta2) - math.sin(pose.theta)),
        pose.y - radius * (math.cos(theta2) - math.cos(pose.theta)),
        normalize_angle(theta2),
    )


def _clamp_to_walls(x: float, y: float, config: ArenaConfig) -> tuple[float, float]:
    lo = config.robot_body_radius
    hi = config.side_length - config.robot_body_radius
    return min(max(x, lo), hi), min(max(y, lo), hi)


def resolve_collisions(state: WorldState, config: ArenaConfig) -> WorldState:
    """Clamp bodies inside the arena and push overlapping discs apart.

    Overlaps are resolved by symmetric push-out along the center line,
    sweeping all pairs repeatedly until stable (at most
    MAX_PUSHOUT_SWEEPS sweeps, then accept). Headings are untouched.
    """
    centers = [[p.x, p.y] for p in state.all_poses()]
    min_dist = 2.0 * config.robot_body_radius

    for c in centers:
        c[0], c[1] = _clamp_to_walls(c[0], c[1], config)
    for _ in range(MAX_PUSHOUT_SWEEPS):
        moved = False
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                dx = centers[j][0] - centers[i][0]
                dy = centers[j][1] - centers[i][1]
                dist = math.hypot(dx, dy)
                if dist >= min_dist - 1e-12:
                    continue
                if dist < 1e-12:
                    ux, uy = 1.0, 0.0   # coincident centers: arbitrary fixed axis
                else:
                    ux, uy = dx / dist, dy / dist
                push = (min_dist - dist) / 2.0
                centers[i][0] -= push * ux
                centers[i][1] -= push * uy
                centers[j][0] += push * ux
                centers[j][1] += push * uy
                moved = True
        for c in centers:
            c[0], c[1] = _clamp_to_walls(c[0], c[1], config)
        if not moved:
            break

    thetas = [p.theta for p in state.all_poses()]
    robots = [
        RobotState(Pose(centers[k][0], centers[k][1], thetas[k]), rs.cmd)
        for k, rs in enumerate((state.prey,) + tuple(state.predators))
    ]
    return replace(state, prey=robots[0], predators=tuple(robots[1:]))


def predator_prey_distances(state: WorldState) -> tuple[float, float, float]:
    px, py = state.prey.pose.x, state.prey.pose.y
    return tuple(
        math.hypot(p.pose.x - px, p.pose.y - py) for p in state.predators
    )


def check_catch(state: WorldState, config: ArenaConfig) -> tuple[bool, int | None]:
    """Catch iff some predator center is within catch_radius of the prey.

    Ties go to the lowest predator index.
    """
    for i, d in enumerate(predator_prey_distances(state)):
        if d <= config.catch_radius:
            return True, i
    return False, None


def initial_placement(config: ArenaConfig, seed) -> WorldState:
    """Prey at the arena center with a seeded-random heading; predators on a
    line parallel to the y=0 wall, facing the prey side."""
    rng = random.Random(seed)
    heading = normalize_angle(rng.uniform(-math.pi, math.pi))
    half = config.side_length / 2.0
    prey = RobotState(Pose(half, half, heading))
    predators = tuple(
        RobotState(Pose(config.side_length * frac, 0.3, math.pi / 2.0))
        for frac in (0.25, 0.5, 0.75)
    )
    return WorldState(tick=0, prey=prey, predators=predators)


def step_world(state: WorldState, prey_cmd: WheelCommand,
               predator_cmds, config: ArenaConfig) -> WorldState:
    """Advance one tick: simultaneous kinematics for all four robots from the
    same pre-step state, collision resolution, catch check."""
    prey = RobotState(step_kinematics(state.prey.pose, prey_cmd, config), prey_cmd)
    predators = tuple(
        RobotState(step_kinematics(rs.pose, cmd, config), cmd)
        for rs, cmd in zip(state.predators, predator_cmds)
    )
    nxt = WorldState(tick=state.tick + 1, prey=prey, predators=predators,
                     caught=state.caught, catch_time=state.catch_time,
                     catcher=state.catcher)
    nxt = resolve_collisions(nxt, config)
    if not nxt.caught:
        caught, catcher = check_catch(nxt, config)
        if caught:
            nxt = replace(nxt, caught=True, catch_time=nxt.tick * config.dt,
                          catcher=catcher)
    return nxt
