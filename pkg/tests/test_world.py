import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from predprey.world import (ArenaConfig, ConfigurationError, Pose, RobotState,
                            WheelCommand, WorldState, check_catch,
                            initial_placement, normalize_angle,
                            resolve_collisions, step_kinematics)

CFG = ArenaConfig()


def euler_step(pose, cmd, cfg, h=1e-5):
    """Independent fine-step oracle for one control tick."""
    v = cfg.wheel_radius * (cmd.omega_left + cmd.omega_right) / 2.0
    om = cfg.wheel_radius * (cmd.omega_right - cmd.omega_left) / cfg.axle_length
    x, y, th = pose.x, pose.y, pose.theta
    steps = round(cfg.dt / h)
    for _ in range(steps):
        x += v * math.cos(th) * h
        y += v * math.sin(th) * h
        th += om * h
    return x, y, th


def make_state(prey_xy=(2.0, 2.0), pred_xys=((1.0, 0.3), (2.0, 0.3), (3.0, 0.3)),
               prey_theta=0.0, pred_thetas=(math.pi / 2,) * 3, tick=0):
    return WorldState(
        tick=tick,
        prey=RobotState(Pose(prey_xy[0], prey_xy[1], prey_theta)),
        predators=tuple(RobotState(Pose(x, y, th))
                        for (x, y), th in zip(pred_xys, pred_thetas)),
    )


class TestNormalizeAngle:
    @given(st.floats(-50.0, 50.0))
    def test_range(self, theta):
        t = normalize_angle(theta)
        assert -math.pi < t <= math.pi

    @given(st.floats(-50.0, 50.0))
    def test_periodic(self, theta):
        assert normalize_angle(theta) == pytest.approx(
            normalize_angle(theta + 2 * math.pi), abs=1e-9)

    def test_boundary(self):
        assert normalize_angle(math.pi) == math.pi
        assert normalize_angle(-math.pi) == math.pi


class TestStepKinematics:
    def test_straight_hand_arithmetic(self):
        # v = 0.035 * 10 = 0.35 m/s, over dt 0.1 -> 0.035 m
        pose = step_kinematics(Pose(0, 0, 0), WheelCommand(10, 10), CFG)
        assert pose.x == pytest.approx(0.035, abs=1e-12)
        assert pose.y == pytest.approx(0.0, abs=1e-12)
        assert pose.theta == 0.0

    def test_spin_in_place(self):
        pose = step_kinematics(Pose(1, 1, 0.3), WheelCommand(5, -5), CFG)
        assert pose.x == 1.0 and pose.y == 1.0
        assert pose.theta != 0.3

    def test_arc_against_euler(self):
        pose = step_kinematics(Pose(0, 0, 0), WheelCommand(0, 10), CFG)
        ex, ey, eth = euler_step(Pose(0, 0, 0), WheelCommand(0, 10), CFG)
        assert pose.x == pytest.approx(ex, abs=1e-4)
        assert pose.y == pytest.approx(ey, abs=1e-4)
        assert pose.theta == pytest.approx(normalize_angle(eth), abs=1e-4)

    @given(st.floats(-math.pi, math.pi), st.floats(-15, 15), st.floats(-15, 15))
    @settings(max_examples=25, deadline=None)
    def test_matches_euler_property(self, theta, wl, wr):
        pose = Pose(2.0, 2.0, theta)
        cmd = WheelCommand(wl, wr)
        stepped = step_kinematics(pose, cmd, CFG)
        ex, ey, eth = euler_step(pose, cmd, CFG)
        assert stepped.x == pytest.approx(ex, abs=1e-4)
        assert stepped.y == pytest.approx(ey, abs=1e-4)
        assert abs(normalize_angle(stepped.theta - eth)) < 1e-4

    @given(st.floats(-math.pi, math.pi), st.floats(-15, 15))
    @settings(max_examples=25)
    def test_equal_wheels_exact(self, theta, w):
        pose = Pose(1.0, 1.0, theta)
        stepped = step_kinematics(pose, WheelCommand(w, w), CFG)
        v = CFG.wheel_radius * w
        assert stepped.x == 1.0 + v * CFG.dt * math.cos(theta)
        assert stepped.y == 1.0 + v * CFG.dt * math.sin(theta)


class TestResolveCollisions:
    def test_wall_clamp(self):
        state = make_state(pred_xys=((3.95, 0.3), (2.0, 0.3), (1.0, 0.3)))
        resolved = resolve_collisions(state, CFG)
        assert resolved.predators[0].pose.x == pytest.approx(3.9)

    def test_symmetric_pushout(self):
        state = make_state(prey_xy=(2.0, 2.0), pred_xys=(
            (2.15, 2.0), (1.0, 0.3), (3.0, 0.3)))
        resolved = resolve_collisions(state, CFG)
        prey, pred = resolved.prey.pose, resolved.predators[0].pose
        assert prey.x == pytest.approx(2.0 - 0.025)
        assert pred.x == pytest.approx(2.15 + 0.025)
        assert math.hypot(pred.x - prey.x, pred.y - prey.y) == pytest.approx(0.2)

    def test_random_overlaps_resolve(self):
        rng = random.Random(7)
        for _ in range(200):
            cx, cy = rng.uniform(1, 3), rng.uniform(1, 3)
            xys = [(cx + rng.uniform(-0.15, 0.15), cy + rng.uniform(-0.15, 0.15))
                   for _ in range(4)]
            state = make_state(prey_xy=xys[0], pred_xys=tuple(xys[1:]))
            resolved = resolve_collisions(state, CFG)
            poses = resolved.all_poses()
            for i in range(4):
                for j in range(i + 1, 4):
                    d = math.hypot(poses[i].x - poses[j].x,
                                   poses[i].y - poses[j].y)
                    assert d >= 2 * CFG.robot_body_radius - 1e-9
            for p in poses:
                assert CFG.robot_body_radius - 1e-9 <= p.x <= 4 - CFG.robot_body_radius + 1e-9
                assert CFG.robot_body_radius - 1e-9 <= p.y <= 4 - CFG.robot_body_radius + 1e-9

    def test_headings_unchanged(self):
        state = make_state(pred_xys=((2.05, 2.0), (1.0, 0.3), (3.0, 0.3)),
                           pred_thetas=(0.7, 0.8, 0.9))
        resolved = resolve_collisions(state, CFG)
        assert [p.pose.theta for p in resolved.predators] == [0.7, 0.8, 0.9]


class TestCheckCatch:
    def test_within_radius(self):
        state = make_state(prey_xy=(2.0, 2.0),
                           pred_xys=((2.29, 2.0), (1.0, 0.3), (3.0, 0.3)))
        caught, idx = check_catch(state, CFG)
        assert caught and idx == 0

    def test_all_far(self):
        caught, idx = check_catch(make_state(), CFG)
        assert not caught and idx is None

    def test_tie_breaks_to_lowest_index(self):
        state = make_state(prey_xy=(2.0, 2.0), pred_xys=(
            (2.3, 2.0), (1.0, 0.3), (1.7, 2.0)))
        caught, idx = check_catch(state, CFG)
        assert caught and idx == 0


class TestInitialPlacement:
    def test_prey_centered(self):
        for seed in (0, 1, 99):
            state = initial_placement(CFG, seed)
            assert (state.prey.pose.x, state.prey.pose.y) == (2.0, 2.0)

    def test_predators_parallel_to_wall(self):
        state = initial_placement(CFG, 3)
        ys = [p.pose.y for p in state.predators]
        assert ys == [0.3, 0.3, 0.3]
        assert [p.pose.x for p in state.predators] == [1.0, 2.0, 3.0]
        assert all(p.pose.theta == math.pi / 2 for p in state.predators)

    def test_seed_changes_heading_only(self):
        a = initial_placement(CFG, 1)
        b = initial_placement(CFG, 2)
        assert a.prey.pose.theta != b.prey.pose.theta
        assert (a.prey.pose.x, a.prey.pose.y) == (b.prey.pose.x, b.prey.pose.y)
        assert [p.pose for p in a.predators] == [p.pose for p in b.predators]
        assert a.tick == 0 and not a.caught


class TestArenaConfig:
    def test_rejects_bad_dt_multiple(self):
        with pytest.raises(ConfigurationError):
            ArenaConfig(dt=0.7)

    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigurationError):
            ArenaConfig(side_length=-1)

    def test_tick_count(self):
        assert CFG.n_ticks == 300
