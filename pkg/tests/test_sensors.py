import math
import random

import pytest

from predprey.sensors import (CameraModel, camera_observe, ir_observe,
                              omniscient_observe, visible_through)
from predprey.world import ArenaConfig, Pose, RobotState, WorldState

CFG = ArenaConfig()
CAM = CameraModel()  # fov pi/3, target radius 0.1


def state_of(prey_pose, pred_poses, tick=0):
    return WorldState(tick=tick, prey=RobotState(prey_pose),
                      predators=tuple(RobotState(p) for p in pred_poses))


def random_state(rng, center_box=(0.5, 3.5)):
    lo, hi = center_box
    poses = [Pose(rng.uniform(lo, hi), rng.uniform(lo, hi),
                  rng.uniform(-math.pi, math.pi)) for _ in range(4)]
    return state_of(poses[0], poses[1:])


class TestCamera:
    def test_dead_ahead_centered(self):
        state = state_of(Pose(3.0, 2.0, 0.0),
                         [Pose(2.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        x_image, area = camera_observe(state, 0, CAM)
        assert x_image == 0.0
        assert 0.0 < area <= 1.0

    def test_behind_not_visible(self):
        # observer faces east, prey is due west
        state = state_of(Pose(1.0, 2.0, 0.0),
                         [Pose(2.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        assert camera_observe(state, 0, CAM) == (0.0, -1.0)

    def test_apparent_size_formula(self):
        # fov pi/3, target radius 0.1, distance 0.4
        state = state_of(Pose(2.4, 2.0, math.pi),
                         [Pose(2.0, 2.0, 0.0), Pose(0.5, 0.3, 0.0),
                          Pose(3.5, 0.3, 0.0)])
        x_image, area = camera_observe(state, 0, CAM)
        width = 2.0 * math.atan(0.1 / 0.4)
        assert width == pytest.approx(0.489957, abs=1e-6)
        assert area == pytest.approx(width / (math.pi / 3.0), abs=1e-12)
        assert x_image == pytest.approx(0.0, abs=1e-12)

    def test_saturates_at_one_when_close(self):
        state = state_of(Pose(2.15, 2.0, math.pi),
                         [Pose(2.0, 2.0, 0.0), Pose(0.5, 0.3, 0.0),
                          Pose(3.5, 0.3, 0.0)])
        _, area = camera_observe(state, 0, CAM)
        assert area == 1.0

    def test_edge_of_fov(self):
        # bearing slightly inside/outside fov/2 = pi/6
        for eps, expect_visible in ((-1e-6, True), (1e-6, False)):
            bearing = math.pi / 6 + eps
            prey = Pose(2.0 + math.cos(bearing), 2.0 + math.sin(bearing), 0.0)
            state = state_of(prey, [Pose(2.0, 2.0, 0.0), Pose(0.5, 0.3, 0.0),
                                    Pose(3.5, 0.3, 0.0)])
            _, area = camera_observe(state, 0, CAM)
            assert (area >= 0.0) == expect_visible

    def test_occlusion_blocks(self):
        # pred1 sits exactly between pred0 and the prey
        state = state_of(Pose(3.0, 2.0, 0.0),
                         [Pose(1.0, 2.0, 0.0), Pose(2.0, 2.0 + 0.05, 0.0),
                          Pose(1.0, 0.3, 0.0)])
        assert camera_observe(state, 0, CAM) == (0.0, -1.0)
        # moved aside: visible again
        state2 = state_of(Pose(3.0, 2.0, 0.0),
                          [Pose(1.0, 2.0, 0.0), Pose(2.0, 3.0, 0.0),
                           Pose(1.0, 0.3, 0.0)])
        _, area = camera_observe(state2, 0, CAM)
        assert area > 0.0

    def test_left_is_negative(self):
        # prey to the left (ccw) of an east-facing observer
        state = state_of(Pose(2.5, 2.2, 0.0),
                         [Pose(2.0, 2.0, 0.0), Pose(0.5, 0.3, 0.0),
                          Pose(3.5, 0.3, 0.0)])
        x_image, _ = camera_observe(state, 0, CAM)
        assert x_image < 0.0


class TestIr:
    def test_wall_close(self):
        # body edge 0.05 m from the east wall
        me = Pose(4.0 - CFG.robot_body_radius - 0.05, 2.0, 0.0)
        state = state_of(Pose(1.0, 2.0, 0.0),
                         [me, Pose(1.0, 0.3, 0.0), Pose(3.0, 0.3, 0.0)])
        assert ir_observe(state, 0, CFG) == 1.0

    def test_open_space(self):
        state = state_of(Pose(1.0, 3.5, 0.0),
                         [Pose(2.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        assert ir_observe(state, 0, CFG) == -1.0

    def test_robot_in_range(self):
        # prey body edge 0.1 m in front of the observer's body edge
        state = state_of(Pose(2.4, 2.0, 0.0),
                         [Pose(2.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        assert ir_observe(state, 0, CFG) == 1.0

    def test_tangent_disc_at_exact_range_inclusive(self):
        # binary-exact geometry: tangent hit exactly at the range boundary
        cfg = ArenaConfig(robot_body_radius=0.125, ir_range=0.25)
        state = state_of(Pose(1.375, 1.125, 0.0),
                         [Pose(1.0, 1.0, 0.0), Pose(3.0, 3.0, 0.0),
                          Pose(3.0, 1.0, 0.0)])
        assert ir_observe(state, 0, cfg) == 1.0
        # nudge the disc away: miss
        state2 = state_of(Pose(1.375, 1.1251, 0.0),
                          [Pose(1.0, 1.0, 0.0), Pose(3.0, 3.0, 0.0),
                           Pose(3.0, 1.0, 0.0)])
        assert ir_observe(state2, 0, cfg) == -1.0


class TestOmniscient:
    def test_predator_straight_ahead(self):
        state = state_of(Pose(2.0, 2.0, 0.0),
                         [Pose(3.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        obs = omniscient_observe(state, CFG)
        assert obs[0] == 0.0

    def test_predator_at_right_angle(self):
        state = state_of(Pose(2.0, 2.0, 0.0),
                         [Pose(1.0, 0.3, 0.0), Pose(2.0, 3.0, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        obs = omniscient_observe(state, CFG)
        assert obs[1] == pytest.approx(0.5, abs=1e-12)

    def test_center_normalizes_to_origin(self):
        state = state_of(Pose(2.0, 2.0, 0.7),
                         [Pose(1.0, 0.3, 0.0), Pose(2.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        obs = omniscient_observe(state, CFG)
        assert obs[6] == 0.0 and obs[7] == 0.0

    def test_distance_normalization(self):
        state = state_of(Pose(2.0, 2.0, 0.0),
                         [Pose(3.0, 2.0, 0.0), Pose(1.0, 0.3, 0.0),
                          Pose(3.0, 0.3, 0.0)])
        obs = omniscient_observe(state, CFG)
        assert obs[3] == pytest.approx(0.25, abs=1e-12)


class TestProperties:
    def test_observation_ranges(self):
        rng = random.Random(11)
        for _ in range(2000):
            state = random_state(rng)
            for i in range(3):
                x_image, area = camera_observe(state, i, CAM)
                assert -1.0 <= x_image <= 1.0
                assert area == -1.0 or 0.0 <= area <= 1.0
                assert ir_observe(state, i, CFG) in (1.0, -1.0)
            obs = omniscient_observe(state, CFG)
            for v in obs[:3]:
                assert -1.0 <= v <= 1.0
            for v in obs[3:6]:
                assert 0.0 <= v <= math.sqrt(2.0)
            assert -1.0 <= obs[6] <= 1.0 and -1.0 <= obs[7] <= 1.0

    def test_rotational_equivariance(self):
        # keep robots in a central disc so walls stay out of IR range at
        # every rotation angle
        rng = random.Random(5)
        cx = cy = CFG.side_length / 2.0
        for _ in range(300):
            poses = []
            for _ in range(4):
                r = rng.uniform(0.0, 1.5)
                a = rng.uniform(-math.pi, math.pi)
                poses.append(Pose(cx + r * math.cos(a), cy + r * math.sin(a),
                                  rng.uniform(-math.pi, math.pi)))
            state = state_of(poses[0], poses[1:])
            angle = rng.uniform(-math.pi, math.pi)

            def rot(p):
                dx, dy = p.x - cx, p.y - cy
                c, s = math.cos(angle), math.sin(angle)
                return Pose(cx + c * dx - s * dy, cy + s * dx + c * dy,
                            p.theta + angle)

            rotated = state_of(rot(poses[0]), [rot(p) for p in poses[1:]])
            for i in range(3):
                xi_a, ar_a = camera_observe(state, i, CAM)
                xi_b, ar_b = camera_observe(rotated, i, CAM)
                assert xi_a == pytest.approx(xi_b, abs=1e-9)
                assert ar_a == pytest.approx(ar_b, abs=1e-9)
                assert ir_observe(state, i, CFG) == ir_observe(rotated, i, CFG)
            obs_a = omniscient_observe(state, CFG)
            obs_b = omniscient_observe(rotated, CFG)
            for k in range(6):
                assert obs_a[k] == pytest.approx(obs_b[k], abs=1e-9)

    def test_mirror_symmetry(self):
        rng = random.Random(9)
        for _ in range(300):
            observer = Pose(rng.uniform(1.2, 2.8), rng.uniform(1.2, 2.8),
                            rng.uniform(-math.pi, math.pi))
            others = [Pose(observer.x + rng.uniform(-1, 1),
                           observer.y + rng.uniform(-1, 1),
                           rng.uniform(-math.pi, math.pi)) for _ in range(3)]
            state = state_of(others[0], [observer, others[1], others[2]])

            # reflect across the observer's heading line
            c, s = math.cos(observer.theta), math.sin(observer.theta)

            def mirror(p):
                dx, dy = p.x - observer.x, p.y - observer.y
                along = dx * c + dy * s
                perp = -dx * s + dy * c
                mx = observer.x + along * c - (-perp) * s
                my = observer.y + along * s + (-perp) * c
                return Pose(mx, my, 2 * observer.theta - p.theta)

            mirrored = state_of(mirror(others[0]),
                                [observer, mirror(others[1]),
                                 mirror(others[2])])
            xi_a, ar_a = camera_observe(state, 0, CAM)
            xi_b, ar_b = camera_observe(mirrored, 0, CAM)
            assert xi_a == pytest.approx(-xi_b, abs=1e-9)
            assert ar_a == pytest.approx(ar_b, abs=1e-9)

    def test_occlusion_monotonicity(self):
        rng = random.Random(13)
        for _ in range(1000):
            observer = Pose(rng.uniform(0.5, 3.5), rng.uniform(0.5, 3.5),
                            rng.uniform(-math.pi, math.pi))
            prey = Pose(rng.uniform(0.5, 3.5), rng.uniform(0.5, 3.5), 0.0)
            occluders = [(rng.uniform(0.5, 3.5), rng.uniform(0.5, 3.5))
                         for _ in range(2)]
            full, _ = visible_through(observer, prey, occluders,
                                      CFG.robot_body_radius, CAM.fov)
            if not full:
                continue
            for k in range(2):
                subset = occluders[:k] + occluders[k + 1:]
                vis, _ = visible_through(observer, prey, subset,
                                         CFG.robot_body_radius, CAM.fov)
                assert vis
            vis_none, _ = visible_through(observer, prey, [],
                                          CFG.robot_body_radius, CAM.fov)
            assert vis_none
