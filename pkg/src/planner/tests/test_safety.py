import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from perception.types import ObstacleObservation
from planner.dynamics import RoadGeometry, VehicleParams, rollout
from planner.exceptions import InvalidArgumentError
from planner.safety import (
    BoundingBox,
    SafetyConfig,
    boxes_intersect,
    lateral_clearance,
    predict_obstacle,
    ttc,
    verify,
)

ROAD = RoadGeometry()
PARAMS = VehicleParams()


def cruise(y=4.8, v=15.0, steps=30):
    return rollout(np.array([0.0, y, v, 0.0]), np.zeros((steps, 2)), 0.1)


def vehicle(obstacle_id, x, y, v_x=0.0, v_y=0.0, length=4.5, width=1.8):
    return ObstacleObservation(obstacle_id, x, y, length, width, v_x, v_y)


class PrimitiveTests(SimpleTestCase):

    def test_predict_obstacle(self):
        assert_allclose(predict_obstacle((0.0, 0.0), (10.0, 0.0), 5, 0.1), [5.0, 0.0])
        assert_allclose(predict_obstacle((3.0, 4.0), (0.0, 0.0), 17, 0.1), [3.0, 4.0])
        first = predict_obstacle((1.0, 2.0), (7.0, -1.0), 4, 0.1) - [1.0, 2.0]
        second = predict_obstacle((1.0, 2.0), (7.0, -1.0), 8, 0.1) - [1.0, 2.0]
        assert_allclose(second, 2 * first)

    def test_boxes(self):
        box = BoundingBox(0.0, 0.0, 2.0, 1.0)
        self.assertTrue(boxes_intersect(box, box))
        self.assertFalse(boxes_intersect(box, BoundingBox(10.0, 0.0, 2.0, 1.0)))
        self.assertTrue(boxes_intersect(box, BoundingBox(4.0, 0.0, 2.0, 1.0)))
        self.assertTrue(boxes_intersect(box, BoundingBox(0.0, 2.0, 2.0, 1.0)))
        with self.assertRaises(InvalidArgumentError):
            BoundingBox(0.0, 0.0, 0.0, 1.0)

    def test_ttc(self):
        self.assertAlmostEqual(ttc(0.0, 15.0, 2.25, 24.75, 10.0, 2.5), 4.0)
        self.assertEqual(ttc(0.0, 10.0, 2.25, 24.75, 15.0, 2.5), math.inf)
        value = ttc(0.0, 15.0, 2.0, 12.0, 10.0, 2.0)
        self.assertAlmostEqual(value, 1.6)
        self.assertLess(value, SafetyConfig().ttc_min)

    def test_lateral_clearance(self):
        self.assertAlmostEqual(lateral_clearance(1.6, 4.8, 1.8, 1.8), 1.4)
        self.assertLess(lateral_clearance(4.8, 4.8, 1.8, 1.8), 0.0)
        self.assertEqual(lateral_clearance(0.0, 2.5, 2.0, 2.0), 0.5)

    def test_config_steps(self):
        self.assertEqual(SafetyConfig().steps, 30)
        with self.assertRaises(InvalidArgumentError):
            SafetyConfig(horizon=0.0)


class VerifyTests(SimpleTestCase):

    def test_empty_road(self):
        report = verify(cruise(), [], ROAD)
        self.assertFalse(report.unsafe)
        self.assertFalse(report.high_risk)
        self.assertEqual(report.verdict, 'safe')
        self.assertIsNone(report.first_violation)

    def test_stationary_obstacle_ahead(self):
        report = verify(cruise(), [vehicle('stopped', 20.0, 4.8)], ROAD)
        self.assertTrue(report.unsafe)
        self.assertEqual(report.first_violation.step, 11)
        self.assertEqual(report.first_violation.obstacle_id, 'stopped')
        self.assertEqual(report.first_violation.kind, 'collision')
        self.assertFalse(report.collision[9, 0])
        self.assertTrue(report.collision[10, 0])
        self.assertEqual(report.flagged_obstacles(), ('stopped',))

    def test_leaving_road(self):
        report = verify(cruise(y=0.5), [], ROAD)
        self.assertTrue(report.boundary.all())
        self.assertTrue(report.unsafe)
        self.assertEqual(report.to_record()['boundary_steps'][0], 1)
        self.assertEqual(report.first_violation.kind, 'boundary')

    def test_lateral_violation_is_high_risk_only(self):
        report = verify(cruise(), [vehicle('side', 3.0, 7.0, v_x=15.0)], ROAD)
        self.assertFalse(report.unsafe)
        self.assertTrue(report.high_risk)
        self.assertTrue(report.lateral_violation.all())
        self.assertFalse(report.ttc_violation.any())
        self.assertEqual(report.verdict, 'high_risk')

    def test_ttc_violation_is_high_risk_only(self):
        controls = np.zeros((30, 2))
        controls[:25, 0] = -6.0
        trajectory = rollout(np.array([0.0, 4.8, 15.0, 0.0]), controls, 0.1)
        report = verify(trajectory, [vehicle('ahead', 25.0, 4.8)], ROAD)
        self.assertFalse(report.unsafe)
        self.assertTrue(report.high_risk)
        self.assertTrue(report.ttc_violation[0, 0])
        self.assertEqual(report.first_violation.kind, 'ttc')
        self.assertLess(report.min_ttc, 2.0)

    def test_short_trajectory(self):
        with self.assertRaises(InvalidArgumentError):
            verify(cruise(steps=29), [], ROAD)

    def test_record(self):
        record = verify(cruise(), [vehicle('stopped', 20.0, 4.8)], ROAD).to_record()
        self.assertEqual(record['verdict'], 'unsafe')
        self.assertEqual(record['flagged'], ['stopped'])
        self.assertEqual(record['first_violation']['step'], 11)


class VerifyPropertyTests(SimpleTestCase):

    def random_scene(self, rng):
        x0 = np.array([0.0, rng.uniform(1.0, 11.8), rng.uniform(0.0, 25.0), rng.uniform(-1.0, 1.0)])
        controls = np.column_stack([rng.uniform(-3, 3, 30), rng.uniform(-0.5, 0.5, 30)])
        trajectory = rollout(x0, controls, 0.1)
        obstacles = [
            vehicle(f'o{j}', rng.uniform(-20, 80), rng.uniform(0.0, 12.8), rng.uniform(0, 25), rng.uniform(-1, 1),
                    rng.uniform(3.0, 12.0), rng.uniform(1.6, 2.6))
            for j in range(int(rng.integers(0, 4)))
        ]
        return trajectory, obstacles

    def test_collision_flags_match_minkowski_oracle(self):
        rng = np.random.default_rng(31)
        config = SafetyConfig()
        for _ in range(1000):
            trajectory, obstacles = self.random_scene(rng)
            report = verify(trajectory, obstacles, ROAD, config, PARAMS)
            for j, obstacle in enumerate(obstacles):
                for m in range(1, config.steps + 1):
                    px = obstacle.x + m * config.T * obstacle.v_x
                    py = obstacle.y + m * config.T * obstacle.v_y
                    expected = (abs(trajectory[m, 0] - px) <= (PARAMS.length + obstacle.length) / 2
                                and abs(trajectory[m, 1] - py) <= (PARAMS.width + obstacle.width) / 2)
                    self.assertEqual(bool(report.collision[m - 1, j]), expected)

    def test_enlarging_obstacles_keeps_unsafe(self):
        rng = np.random.default_rng(32)
        checked = 0
        for _ in range(300):
            trajectory, obstacles = self.random_scene(rng)
            if not verify(trajectory, obstacles, ROAD).unsafe:
                continue
            checked += 1
            larger = [replace(o, length=o.length * 1.5, width=o.width + 0.5) for o in obstacles]
            self.assertTrue(verify(trajectory, larger, ROAD).unsafe)
        self.assertGreater(checked, 0)

    def test_deterministic(self):
        rng = np.random.default_rng(33)
        trajectory, obstacles = self.random_scene(rng)
        first = verify(trajectory, obstacles, ROAD)
        second = verify(trajectory, obstacles, ROAD)
        assert_array_equal(first.collision, second.collision)
        assert_array_equal(first.ttc_violation, second.ttc_violation)
        self.assertEqual(first.to_record(), second.to_record())
