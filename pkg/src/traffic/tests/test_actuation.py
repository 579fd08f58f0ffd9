from django.test import SimpleTestCase

from planner.dynamics import ControlInput, RoadGeometry, VehicleParams, bounds_array
from traffic.actuation import actuate_ego
from traffic.exceptions import ActuationError
from traffic.world import Vehicle, WorldState

ROAD = RoadGeometry()
PARAMS = VehicleParams()


def ego_world(v_x=20.0, lane=1):
    world = WorldState(time=0.0, road=ROAD, ego_id='ego')
    world.add(Vehicle('ego', 'ego', 0.0, ROAD.lane_center(lane), v_x, 0.0, 4.5, 1.8, v_x, is_ego=True))
    return world


class ActuationTests(SimpleTestCase):

    def test_coasting(self):
        world = ego_world()
        actuate_ego(world, ControlInput(0.0, 0.0), PARAMS)
        self.assertAlmostEqual(world.ego.x, 2.0)
        self.assertEqual(world.ego.v_x, 20.0)
        self.assertAlmostEqual(world.ego.y, 4.8)

    def test_full_braking_never_reverses(self):
        for speed in (3.0, 0.3):
            with self.subTest(speed=speed):
                world = ego_world(v_x=speed)
                for _ in range(10):
                    lower, _ = bounds_array(world.ego.state.as_array(), PARAMS, ROAD)
                    actuate_ego(world, ControlInput(float(lower[0]), 0.0), PARAMS)
                    self.assertGreaterEqual(world.ego.v_x, -1e-12)
                self.assertAlmostEqual(world.ego.v_x, 0.0)

    def test_bang_bang_lane_change(self):
        world = ego_world()
        accel = 3.2 / 1.44
        for u_y in [accel] * 12 + [-accel] * 12:
            actuate_ego(world, ControlInput(0.0, u_y), PARAMS)
        self.assertAlmostEqual(world.ego.y, 8.0)
        self.assertAlmostEqual(world.ego.v_y, 0.0)
        self.assertEqual(world.lane_of(world.ego), 2)

    def test_out_of_bounds_rejected(self):
        world = ego_world(v_x=0.3)
        with self.assertRaises(ActuationError):
            actuate_ego(world, ControlInput(-6.0, 0.0), PARAMS)
        with self.assertRaises(ActuationError):
            actuate_ego(ego_world(), ControlInput(3.5, 0.0), PARAMS)
        with self.assertRaises(ActuationError):
            actuate_ego(ego_world(), ControlInput(0.0, 3.5), PARAMS)
        self.assertEqual(world.ego.x, 0.0)

    def test_speed_change_limit(self):
        actuate_ego(ego_world(), ControlInput(3.0, 0.0), PARAMS)
        with self.assertRaises(ActuationError):
            actuate_ego(ego_world(), ControlInput(3.0, 0.0), PARAMS, command_delta=0.2)

    def test_lateral_road_edge(self):
        world = ego_world(lane=0)
        world.ego.y = ROAD.right_limit(PARAMS.width)
        lower, upper = bounds_array(world.ego.state.as_array(), PARAMS, ROAD)
        self.assertAlmostEqual(lower[1], 0.0)
        with self.assertRaises(ActuationError):
            actuate_ego(world, ControlInput(0.0, -0.5), PARAMS)
        self.assertGreater(upper[1], 0.0)

    def test_missing_ego(self):
        world = WorldState(time=0.0, road=ROAD)
        with self.assertRaises(ActuationError):
            actuate_ego(world, ControlInput(0.0, 0.0), PARAMS)
