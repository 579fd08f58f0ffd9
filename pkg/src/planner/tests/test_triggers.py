import math

from django.test import SimpleTestCase

from perception.types import ObservationSet, ObstacleObservation
from planner.exceptions import InvalidArgumentError
from planner.mpc import LeaderInfo, SpeedPolicy, SpeedRamp, TriggerState, desired_speed, prioritize, shape_speed_command, should_replan
from planner.mpc.triggers import DEVIATION, HORIZON, LANE_CHANGE, NEW_OBSTACLE, priority_score


def frame(timestamp, *vehicles):
    return ObservationSet(timestamp, tuple(vehicles))


def vehicle(obstacle_id, x, lane=1, v_x=10.0):
    return ObstacleObservation(obstacle_id, x, (lane + 0.5) * 3.2, 4.5, 1.8, v_x, 0.0, lane_index=lane)


class ShouldReplanTests(SimpleTestCase):

    def test_horizon_boundary(self):
        trigger = TriggerState(horizon=3.0)
        trigger.record_replan(0.0, frame(0.0))
        trigger.advance(frame(0.0))
        decision = should_replan(3.0, trigger, frame(3.0))
        self.assertTrue(decision.replan)
        self.assertEqual(decision.fired, (HORIZON,))
        self.assertFalse(should_replan(2.9, trigger, frame(2.9)).replan)

    def test_first_call_fires_horizon(self):
        self.assertIn(HORIZON, should_replan(0.0, TriggerState(), frame(0.0)).fired)

    def test_new_obstacle(self):
        trigger = TriggerState()
        previous = frame(1.4, *(vehicle(f'v{i}', 20.0 * i, lane=i % 4) for i in range(4)))
        trigger.record_replan(0.0, previous)
        trigger.advance(previous)
        current = frame(1.5, *previous, vehicle('new', 30.0, lane=2))
        decision = should_replan(1.5, trigger, current)
        self.assertTrue(decision.replan)
        self.assertIn(NEW_OBSTACLE, decision.fired)

    def test_disappearing_obstacle_does_not_fire(self):
        trigger = TriggerState()
        previous = frame(1.4, vehicle('a', 20.0), vehicle('b', 40.0))
        trigger.record_replan(1.0, previous)
        trigger.advance(previous)
        decision = should_replan(2.0, trigger, frame(2.0, vehicle('a', 30.0)))
        self.assertFalse(decision.replan)

    def test_deviation_suppressed_within_min_interval(self):
        trigger = TriggerState()
        initial = frame(0.0, vehicle('a', 0.0, v_x=10.0))
        trigger.record_replan(0.0, initial)
        trigger.advance(initial)
        decision = should_replan(0.5, trigger, frame(0.5, vehicle('a', 7.5, v_x=10.0)))
        self.assertIn(DEVIATION, decision.fired)
        self.assertTrue(decision.suppressed)
        self.assertFalse(decision.replan)
        self.assertAlmostEqual(trigger.prediction_deviation(0.5, frame(0.5, vehicle('a', 7.5))), 2.5)

    def test_deviation_after_min_interval(self):
        trigger = TriggerState()
        initial = frame(0.0, vehicle('a', 0.0, v_x=10.0))
        trigger.record_replan(0.0, initial)
        trigger.advance(initial)
        decision = should_replan(1.5, trigger, frame(1.5, vehicle('a', 17.5, v_x=10.0)))
        self.assertEqual(decision.fired, (DEVIATION,))
        self.assertTrue(decision.replan)

    def test_lane_change(self):
        trigger = TriggerState()
        initial = frame(0.9, vehicle('a', 10.0, lane=2, v_x=0.0))
        trigger.record_replan(0.0, initial)
        trigger.advance(initial)
        decision = should_replan(1.0, trigger, frame(1.0, vehicle('a', 10.0, lane=1, v_x=0.0)))
        self.assertIn(LANE_CHANGE, decision.fired)
        self.assertTrue(decision.replan)

    def test_never_fires_within_min_interval(self):
        trigger = TriggerState()
        trigger.record_replan(5.0, frame(5.0))
        trigger.advance(frame(5.0))
        crowded = frame(5.5, *(vehicle(f'v{i}', 10.0 * i, lane=i % 4) for i in range(6)))
        self.assertFalse(should_replan(5.5, trigger, crowded).replan)

    def test_time_must_not_go_back(self):
        trigger = TriggerState()
        trigger.record_replan(2.0, frame(2.0))
        with self.assertRaises(InvalidArgumentError):
            should_replan(1.0, trigger, frame(1.0))

    def test_invalid_interval(self):
        with self.assertRaises(InvalidArgumentError):
            TriggerState(dt_min=0.0)


class PrioritizeTests(SimpleTestCase):

    def test_scores(self):
        self.assertEqual(priority_score(100.0, 130.0), 30.0)
        self.assertEqual(priority_score(100.0, 90.0), -1010.0)

    def test_order_and_cap(self):
        vehicles = [vehicle('behind', 90.0), vehicle('far', 180.0), vehicle('near', 110.0),
                    vehicle('mid', 140.0), vehicle('way_behind', 20.0)]
        ordered = prioritize(100.0, vehicles, cap=10)
        self.assertEqual([o.id for o in ordered], ['near', 'mid', 'far', 'behind', 'way_behind'])
        self.assertEqual([o.id for o in prioritize(100.0, vehicles, cap=2)], ['near', 'mid'])

    def test_all_behind(self):
        ordered = prioritize(100.0, [vehicle('a', 50.0), vehicle('b', 99.0)], cap=6)
        self.assertEqual([o.id for o in ordered], ['b', 'a'])

    def test_ties_broken_by_id(self):
        ordered = prioritize(0.0, [vehicle('b', 30.0, lane=0), vehicle('a', 30.0, lane=2)], cap=6)
        self.assertEqual([o.id for o in ordered], ['a', 'b'])

    def test_invalid_cap(self):
        with self.assertRaises(InvalidArgumentError):
            prioritize(0.0, [], cap=0)


class SpeedTests(SimpleTestCase):

    def setUp(self):
        self.policy = SpeedPolicy(v_nominal=20.0)

    def test_shape_speed_command(self):
        self.assertEqual(shape_speed_command(10.0, 15.0), 11.0)
        self.assertAlmostEqual(shape_speed_command(10.0, 10.4), 10.4)
        self.assertEqual(shape_speed_command(10.0, 10.0), 10.0)
        self.assertEqual(shape_speed_command(10.0, 2.0), 9.0)

    def test_leader_near(self):
        self.assertAlmostEqual(desired_speed(self.policy, LeaderInfo(20.0, 10.0), 12.0, 0.0), 9.5)

    def test_leader_blend(self):
        self.assertAlmostEqual(desired_speed(self.policy, LeaderInfo(35.0, 10.0), 12.0, 0.0), 0.5 * 9.5 + 0.5 * 12.0)

    def test_leader_far_boundary(self):
        self.assertAlmostEqual(desired_speed(self.policy, LeaderInfo(50.0, 10.0), 12.0, 0.0), 12.0)
        self.assertAlmostEqual(desired_speed(self.policy, LeaderInfo(50.0, 10.0), 25.0, 0.0), 20.0)

    def test_progressive_ramp(self):
        self.assertEqual(desired_speed(self.policy, None, 12.0, 3.9), 12.0)
        self.assertEqual(desired_speed(self.policy, None, 12.0, 4.0), 12.5)
        self.assertEqual(desired_speed(self.policy, None, 12.0, 8.1), 13.0)
        self.assertEqual(desired_speed(self.policy, LeaderInfo(80.0, 5.0), 19.8, 40.0), 20.0)

    def test_invalid_policy(self):
        with self.assertRaises(InvalidArgumentError):
            SpeedPolicy(follow_near=60.0)
        with self.assertRaises(InvalidArgumentError):
            desired_speed(self.policy, LeaderInfo(0.0, 10.0), 10.0, 0.0)

    def test_ramp_resets_when_leader_binds(self):
        ramp = SpeedRamp(self.policy)
        self.assertEqual(ramp.target(0.0, 10.0, None), (10.0, False))
        self.assertEqual(ramp.target(4.0, 10.6, None), (10.5, False))
        target, binding = ramp.target(5.0, 10.8, LeaderInfo(15.0, 10.0))
        self.assertTrue(binding)
        self.assertAlmostEqual(target, 9.5)
        self.assertIsNone(ramp.start_time)
        self.assertEqual(ramp.target(6.0, 9.6, None), (9.6, False))
        target, binding = ramp.target(10.0, 9.9, None)
        self.assertAlmostEqual(target, 10.1)
        self.assertFalse(binding)

    def test_speed_change_bounded(self):
        for v_current in (0.0, 5.0, 19.5):
            for v_target in (0.0, 4.7, 30.0):
                change = shape_speed_command(v_current, v_target) - v_current
                self.assertLessEqual(abs(change), 1.0 + 1e-12)
        self.assertTrue(math.isfinite(desired_speed(self.policy, None, 0.0, 1e6)))
