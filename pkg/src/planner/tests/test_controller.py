from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from perception.types import ObservationSet, ObstacleObservation
from planner.ddp import SolverConfig, solve
from planner.dynamics import RoadGeometry, VehicleParams, VehicleState, step_array, within_bounds
from planner.ocp import CostWeights
from planner.potential import PotentialConfig
from planner.safety import SafetyConfig, SafetyReport
from planner.mpc import MpcConfig, MpcController, SpeedPolicy, shift_controls
from planner.mpc.controller import FORCED_FIXED, FORCED_NO_PLAN, emergency_controls, obstacle_ellipses
from planner.mpc.triggers import LANE_CHANGE, NEW_OBSTACLE

STEPS = 30


def make_controller(reference_source=None, **config):
    return MpcController(
        params=VehicleParams(),
        road=RoadGeometry(),
        weights=CostWeights(),
        solver=SolverConfig(max_iterations=50),
        safety=SafetyConfig(),
        potential=PotentialConfig(),
        speed=SpeedPolicy(),
        config=MpcConfig(**config),
        reference_source=reference_source,
    )


def report(collision=False, ttc=False, ids=('a',)):
    shape = (STEPS, len(ids))
    collisions = np.zeros(shape, dtype=bool)
    ttc_flags = np.zeros(shape, dtype=bool)
    if collision:
        collisions[5, 0] = True
    if ttc:
        ttc_flags[0, 0] = True
    return SafetyReport(
        obstacle_ids=tuple(ids),
        collision=collisions,
        ttc_violation=ttc_flags,
        lateral_violation=np.zeros(shape, dtype=bool),
        boundary=np.zeros(STEPS, dtype=bool),
    )


def vehicle(obstacle_id, x, lane, v_x=15.0):
    return ObstacleObservation(obstacle_id, x, (lane + 0.5) * 3.2, 4.5, 1.8, v_x, 0.0, lane_index=lane)


class HelperTests(SimpleTestCase):

    def test_shift_controls(self):
        controls = np.array([[1.0, 0.0], [2.0, 0.1], [3.0, 0.2]])
        assert_allclose(shift_controls(controls, 1, 3), [[2.0, 0.1], [3.0, 0.2], [3.0, 0.2]])
        assert_allclose(shift_controls(controls, 0, 3), controls)
        assert_allclose(shift_controls(controls, 5, 3), [[3.0, 0.2]] * 3)

    def test_emergency_controls(self):
        controls = emergency_controls(VehicleParams(), 4)
        assert_allclose(controls, [[-6.0, 0.0]] * 4)

    def test_obstacle_ellipses_follow_constant_velocity(self):
        observation = vehicle('a', 30.0, 2, v_x=10.0)
        ellipses = obstacle_ellipses(observation, 5, 0.1, 3.2, PotentialConfig(), ego_v_x=15.0)
        self.assertEqual(len(ellipses), 5)
        assert_allclose([e.center_x for e in ellipses], [30.0, 31.0, 32.0, 33.0, 34.0])
        self.assertTrue(all(e.sigma_y == 3.2 and e.obstacle_id == 'a' for e in ellipses))
        self.assertEqual(ellipses[0].sigma_x, 15.0 + 4.5)

    def test_safety_horizon_must_fit_planning_horizon(self):
        with self.assertRaises(ValueError):
            make_controller(horizon_steps=20)


class ControlCycleTests(SimpleTestCase):

    def drive(self, controller, ego, frames, dt=0.1):
        """Замкнутый цикл с идеальной отработкой управления"""
        outcomes = []
        state = ego.as_array()
        for index, observations in enumerate(frames):
            now = round(index * dt, 10)
            outcome = controller.control_cycle(now, VehicleState.from_array(state), observations)
            self.assertTrue(within_bounds(state, outcome.control, controller.params, controller.road))
            outcomes.append(outcome)
            state = step_array(state, outcome.control, dt)
        return outcomes

    def test_empty_road_at_speed(self):
        controller = make_controller()
        outcomes = self.drive(controller, VehicleState(0.0, 4.8, 15.0, 0.0),
                              [ObservationSet(0.1 * i) for i in range(5)])
        self.assertTrue(outcomes[0].telemetry.replanned)
        self.assertIn(FORCED_NO_PLAN, outcomes[0].telemetry.triggers)
        for outcome in outcomes[1:]:
            self.assertFalse(outcome.telemetry.replanned)
            self.assertLess(np.abs(outcome.control).max(), 1e-3)
            self.assertEqual(outcome.report.verdict, 'safe')

    def test_cached_plan_is_applied_between_replans(self):
        controller = make_controller()
        outcomes = self.drive(controller, VehicleState(0.0, 4.8, 10.0, 0.5),
                              [ObservationSet(0.1 * i) for i in range(9)])
        plan = outcomes[0].result.controls
        self.assertGreater(np.abs(plan[:9, 1]).max(), 1e-3)
        self.assertEqual(sum(o.telemetry.replanned for o in outcomes), 1)
        applied = np.array([o.control for o in outcomes])
        assert_allclose(applied, plan[:9], atol=1e-9)

    def test_cut_in_triggers_replan_in_same_cycle(self):
        controller = make_controller()
        def neighbors(t):
            return vehicle('slow', 80.0 + 15.0 * t, 0), vehicle('side', -30.0 + 15.0 * t, 2)

        frames = [ObservationSet(0.1 * i, neighbors(0.1 * i)) for i in range(15)]
        frames.append(ObservationSet(1.5, neighbors(1.5) + (vehicle('cutter', 25.0, 2),)))
        frames.append(ObservationSet(1.6, neighbors(1.6) + (vehicle('cutter', 26.5, 1),)))
        outcomes = self.drive(controller, VehicleState(0.0, 4.8, 15.0, 0.0), frames)
        cut_in = outcomes[15].telemetry
        self.assertIn(NEW_OBSTACLE, cut_in.triggers)
        self.assertTrue(cut_in.replanned)
        self.assertIn('cutter', cut_in.obstacles)
        lane_change = outcomes[16].telemetry
        self.assertIn(LANE_CHANGE, lane_change.triggers)

    def test_escalation_doubles_flagged_weights(self):
        controller = make_controller()
        observations = ObservationSet(0.0, (vehicle('a', 60.0, 3),))
        solved = []

        def recording_solve(problem, *args, **kwargs):
            solved.append(problem)
            return solve(problem, *args, **kwargs)

        with mock.patch('planner.mpc.controller.verify', side_effect=[report(ttc=True), report()]), \
                mock.patch('planner.mpc.controller.solve', side_effect=recording_solve):
            outcome = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), observations)

        telemetry = outcome.telemetry
        self.assertEqual(telemetry.solves, 2)
        self.assertEqual(telemetry.escalations, 1)
        self.assertFalse(telemetry.emergency)
        self.assertEqual(outcome.report.verdict, 'safe')
        self.assertEqual(solved[0].obstacles[0][0].weight, 50.0)
        self.assertEqual(solved[1].obstacles[0][0].weight, 100.0)
        assert_allclose(controller.plan, outcome.result.controls)

    def test_exhausted_escalation_brakes(self):
        controller = make_controller()
        observations = ObservationSet(0.0, (vehicle('a', 60.0, 3),))
        with mock.patch('planner.mpc.controller.verify', return_value=report(collision=True)):
            outcome = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), observations)
            telemetry = outcome.telemetry
            self.assertTrue(telemetry.emergency)
            self.assertEqual(telemetry.solves, 4)
            self.assertEqual(telemetry.escalations, 3)
            assert_allclose(outcome.control, [-6.0, 0.0])
            self.assertIsNone(controller.plan)

            following = controller.control_cycle(0.1, VehicleState(1.47, 4.8, 14.4, 0.0), observations)
            self.assertIn(FORCED_NO_PLAN, following.telemetry.triggers)

    def test_gate_off_accepts_first_plan(self):
        controller = make_controller(safety_gate=False)
        observations = ObservationSet(0.0, (vehicle('a', 60.0, 3),))
        with mock.patch('planner.mpc.controller.verify', return_value=report(collision=True)):
            outcome = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), observations)
        self.assertEqual(outcome.telemetry.solves, 1)
        self.assertFalse(outcome.telemetry.emergency)
        self.assertEqual(outcome.report.verdict, 'unsafe')

    def test_fixed_interval_replans_every_cycle(self):
        controller = make_controller(fixed_interval=True)
        outcomes = self.drive(controller, VehicleState(0.0, 4.8, 15.0, 0.0),
                              [ObservationSet(0.1 * i) for i in range(3)])
        self.assertTrue(all(o.telemetry.replanned for o in outcomes))
        self.assertTrue(all(FORCED_FIXED in o.telemetry.triggers for o in outcomes))

    def test_speed_command_limits_desired_speed(self):
        controller = make_controller()
        outcome = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 5.0, 0.0), ObservationSet(0.0))
        self.assertLessEqual(outcome.telemetry.v_des, 6.0)

    def test_reset_clears_plan(self):
        controller = make_controller()
        controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), ObservationSet(0.0))
        controller.reset()
        self.assertIsNone(controller.plan)
        outcome = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), ObservationSet(0.0))
        self.assertTrue(outcome.telemetry.replanned)

    def test_telemetry_record(self):
        controller = make_controller()
        record = controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0),
                                          ObservationSet(0.0)).telemetry.to_record()
        self.assertEqual(record['safety']['verdict'], 'safe')
        self.assertEqual(record['solves'], 1)
        self.assertEqual(len(record['control']), 2)


class ReferenceInitializationTests(SimpleTestCase):

    def reference(self, v=15.0):
        times = np.linspace(0.0, 3.2, 9)
        return np.column_stack([times, v * times, np.full(9, 4.8)])

    def test_source_waypoints_take_precedence(self):
        source = mock.Mock(return_value=self.reference())
        controller = make_controller(reference_source=source, initialization='reference')
        controller.fallback_reference = mock.Mock(wraps=controller.fallback_reference)
        ego = VehicleState(0.0, 4.8, 15.0, 0.0)
        outcome = controller.control_cycle(0.0, ego, ObservationSet(0.0))
        source.assert_called_once()
        self.assertIs(source.call_args.args[0], ego)
        controller.fallback_reference.assert_not_called()
        self.assertFalse(outcome.telemetry.reference_rejected)

    def test_generator_used_when_source_is_empty(self):
        source = mock.Mock(return_value=None)
        controller = make_controller(reference_source=source, initialization='reference')
        controller.fallback_reference = mock.Mock(wraps=controller.fallback_reference)
        controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), ObservationSet(0.0))
        source.assert_called_once()
        controller.fallback_reference.assert_called_once()

    def test_zero_initialization_ignores_source(self):
        source = mock.Mock(return_value=self.reference())
        controller = make_controller(reference_source=source)
        self.assertIsNone(controller.fallback_reference)
        controller.control_cycle(0.0, VehicleState(0.0, 4.8, 15.0, 0.0), ObservationSet(0.0))
        source.assert_not_called()
