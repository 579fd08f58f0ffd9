from django.test import SimpleTestCase

from common.utils import FileUtils
from perception.providers import GroundTruthProvider
from planner.dynamics import VehicleParams
from planner.mpc import MpcController
from traffic.episode import STATUS_COLLISION, run_episode, select_ego
from traffic.scenario import parse_scenario
from traffic.world import Vehicle, WorldState

SCENARIO = parse_scenario(
    'name: tiny\n'
    'duration: 30\n'
    'warmup: 0\n'
    'road: {segment_length: 150.0}\n'
    'ego: {lane: 1, speed: 15.0, x: 0.0}\n'
    'vehicles:\n'
    '  - {id: lead, type: medium_car, lane: 1, x: 60.0, speed: 12.0, desired_speed: 12.0}\n'
)


def run(seed=5):
    controller = MpcController.from_settings(road=SCENARIO.road, max_iterations=20)
    provider = GroundTruthProvider(road=SCENARIO.road)
    return run_episode(SCENARIO, controller, provider, seed, method='ground_truth')


class RunEpisodeTests(SimpleTestCase):

    def test_same_seed_same_trace(self):
        first, second = run(), run()
        self.assertEqual([FileUtils.dumps_record(record) for record in first.records],
                         [FileUtils.dumps_record(record) for record in second.records])

    def test_trace_structure(self):
        result = run()
        header = result.records[0]
        self.assertEqual(header['kind'], 'run')
        self.assertEqual(header['scenario'], 'tiny')
        self.assertEqual(header['seed'], 5)
        self.assertEqual(len(result.episodes), 1)
        episode = result.episodes[0]
        self.assertEqual(episode.ego_id, 'ego')
        self.assertNotEqual(episode.status, STATUS_COLLISION)
        self.assertEqual(result.records[-1]['kind'], 'episode')
        cycles = [record for record in result.records if record['kind'] == 'cycle']
        self.assertEqual(len(cycles), len(episode.cycles))
        self.assertTrue(all(record['ego']['v_x'] >= -1e-9 for record in cycles))
        self.assertIsNotNone(cycles[0]['telemetry'])
        self.assertFalse(result.collided)


class SelectEgoTests(SimpleTestCase):

    def test_nearest_fitting_vehicle_becomes_ego(self):
        world = WorldState(time=0.0, road=SCENARIO.road)
        road = SCENARIO.road
        world.add(Vehicle('truck', 'large_truck', 5.0, road.lane_center(0), 15.0, 0.0, 12.0, 2.5, 15.0))
        world.add(Vehicle('car', 'small_car', 20.0, road.lane_center(1), 15.0, 0.0, 4.0, 1.7, 15.0))
        world.add(Vehicle('far', 'small_car', 80.0, road.lane_center(2), 15.0, 0.0, 4.0, 1.7, 15.0))
        params = VehicleParams()
        ego = select_ego(world, params)
        self.assertEqual(ego.id, 'car')
        self.assertTrue(ego.is_ego)
        self.assertEqual((ego.length, ego.width), (params.length, params.width))
        self.assertEqual(world.ego_id, 'car')

    def test_no_candidate(self):
        world = WorldState(time=0.0, road=SCENARIO.road)
        world.add(Vehicle('truck', 'large_truck', 5.0, 1.6, 15.0, 0.0, 12.0, 2.5, 15.0))
        self.assertIsNone(select_ego(world, VehicleParams()))
