"""Controller input vectors.

Predators sense through a simulated forward camera (horizontal image
position and apparent size of the prey marker, with occlusion by other
predator bodies) plus a single short-range forward IR sensor. The prey
is all-knowing: it receives bearings and distances to every predator and
its own arena coordinates, all normalized for a tanh network.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .world import ArenaConfig, Pose, WorldState, normalize_angle

PREY_NOT_VISIBLE_AREA = -1.0

# Arities of the two controller roles: (inputs, outputs).
PREDATOR_ARITY = (3, 2)
PREY_ARITY = (8, 2)


@dataclass(frozen=True)
class CameraModel:
    fov: float = math.pi / 3.0
    target_radius: float = 0.10

    def __post_init__(self):
        if not (0.0 < self.fov < math.pi):
            raise ValueError("fov must be in (0, pi)")
        if self.target_radius <= 0.0:
            raise ValueError("target_radius must be > 0")


def _segment_point_distance(ax, ay, bx, by, px, py) -> float:
    """Distance from point p to segment a-b."""
    abx, aby = bx - ax, by - ay
    norm2 = abx * abx + aby * aby
    if norm2 <= 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * abx + (py - ay) * aby) / norm2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * abx), py - (ay + t * aby))


def visible_through(observer: Pose, target: Pose, occluders,
                    body_radius: float, fov: float) -> tuple[bool, float]:
    """Visibility of target from observer given occluding body discs.

    Returns (visible, bearing). The target is visible iff its bearing is
    within half the field of view and no occluder disc touches the sight
    line between the two centers.
    """
    bearing = normalize_angle(
        math.atan2(target.y - observer.y, target.x - observer.x) - observer.theta
    )
    if abs(bearing) > fov / 2.0:
        return False, bearing
    for ox, oy in occluders:
        if _segment_point_distance(observer.x, observer.y,
                                   target.x, target.y, ox, oy) <= body_radius:
            return False, bearing
    return True, bearing


def camera_observe(state: WorldState, predator_index: int,
                   camera: CameraModel,
                   body_radius: float = 0.10) -> tuple[float, float]:
    """(x_image, A) for one predator; (0, -1) when the prey is not in view.

    x_image is the horizontal image position of the prey, zero at the
    image center and negative to the left (image x grows rightward, so a
    counterclockwise bearing maps to negative x). A is the apparent
    size: the prey marker's angular width as a fraction of the field of
    view, capped at 1.
    """
    observer = state.predators[predator_index].pose
    prey = state.prey.pose
    occluders = [
        (p.pose.x, p.pose.y)
        for i, p in enumerate(state.predators) if i != predator_index
    ]
    visible, bearing = visible_through(observer, prey, occluders,
                                       body_radius, camera.fov)
    if not visible:
        return 0.0, PREY_NOT_VISIBLE_AREA
    d = math.hypot(prey.x - observer.x, prey.y - observer.y)
    width = 2.0 * math.atan(camera.target_radius / max(d, camera.target_radius))
    x_image = -bearing / (camera.fov / 2.0)
    return x_image, min(1.0, width / camera.fov)


def _ray_wall_distance(ox, oy, dx, dy, side: float) -> float:
    """Distance along a ray from an interior point to the arena boundary."""
    best = math.inf
    for plane, coord, delta in ((0.0, ox, dx), (side, ox, dx),
                                (0.0, oy, dy), (side, oy, dy)):
        if abs(delta) < 1e-15:
            continue
        s = (plane - coord) / delta
        if s >= 0.0:
            best = min(best, s)
    return best


def _ray_disc_distance(ox, oy, dx, dy, cx, cy, radius: float) -> float:
    """Distance along a unit ray to the first intersection with a disc,
    inf if the ray misses."""
    fx, fy = ox - cx, oy - cy
    b = fx * dx + fy * dy
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return math.inf
    root = math.sqrt(disc)
    s1 = -b - root
    if s1 >= 0.0:
        return s1
    s2 = -b + root
    if s2 >= 0.0:
        return 0.0   # ray starts inside the disc
    return math.inf


def ir_observe(state: WorldState, predator_index: int,
               config: ArenaConfig) -> float:
    """+1 if the forward IR ray hits a wall or robot within range, else -1.

    The ray starts at the robot's body edge along its heading; the range
    boundary is inclusive.
    """
    me = state.predators[predator_index].pose
    dx, dy = math.cos(me.theta), math.sin(me.theta)
    ox = me.x + config.robot_body_radius * dx
    oy = me.y + config.robot_body_radius * dy

    nearest = _ray_wall_distance(ox, oy, dx, dy, config.side_length)
    others = [state.prey.pose] + [
        p.pose for i, p in enumerate(state.predators) if i != predator_index
    ]
    for pose in others:
        nearest = min(nearest, _ray_disc_distance(
            ox, oy, dx, dy, pose.x, pose.y, config.robot_body_radius))
    return 1.0 if nearest <= config.ir_range else -1.0


def omniscient_observe(state: WorldState, config: ArenaConfig) -> tuple:
    """Prey inputs: (dtheta_1..3 / pi, d_1..3 / side, x_norm, y_norm).

    dtheta_i is the bearing from the prey heading to predator i,
    d_i the center distance; (x, y) are the prey coordinates mapped
    to [-1, 1] across the arena. Predators appear in fixed index order.
    """
    prey = state.prey.pose
    dthetas = []
    dists = []
    for p in state.predators:
        bearing = normalize_angle(
            math.atan2(p.pose.y - prey.y, p.pose.x - prey.x) - prey.theta)
        dthetas.append(bearing / math.pi)
        dists.append(math.hypot(p.pose.x - prey.x, p.pose.y - prey.y)
                     / config.side_length)
    x_norm = 2.0 * prey.x / config.side_length - 1.0
    y_norm = 2.0 * prey.y / config.side_length - 1.0
    return tuple(dthetas) + tuple(dists) + (x_norm, y_norm)


def predator_inputs(state: WorldState, predator_index: int,
                    camera: CameraModel, config: ArenaConfig) -> tuple:
    x_image, area = camera_observe(state, predator_index, camera,
                                   config.robot_body_radius)
    c = ir_observe(state, predator_index, config)
    return (x_image, area, c)
