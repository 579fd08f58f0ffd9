from django.test import SimpleTestCase

from traffic.exceptions import ScenarioConfigError
from traffic.scenario import DEFAULT_VEHICLE_TYPES, TrafficParams, load_scenario, parse_scenario

BUNDLED = ('medium', 'high', 'slow_leader', 'cut_in', 'adversarial_cut_in')


class BundledScenarioTests(SimpleTestCase):

    def test_bundled_scenarios_load(self):
        for name in BUNDLED:
            with self.subTest(name=name):
                scenario = load_scenario(name)
                self.assertEqual(scenario.name, name)
                self.assertGreater(scenario.duration, scenario.warmup)

    def test_medium_demand(self):
        scenario = load_scenario('medium')
        self.assertEqual(scenario.total_flow, 3600.0)
        self.assertEqual(set(scenario.demand), set(DEFAULT_VEHICLE_TYPES))

    def test_cut_in_script(self):
        scenario = load_scenario('cut_in')
        self.assertEqual(scenario.ego.x, 0.0)
        self.assertEqual(scenario.ego.speed, 20.0)
        self.assertEqual(len(scenario.vehicles), 1)
        maneuver = scenario.maneuvers[0]
        self.assertEqual((maneuver.vehicle, maneuver.time, maneuver.target_lane), ('cutter', 5.0, 1))

    def test_missing_file(self):
        with self.assertRaises(ScenarioConfigError):
            load_scenario('/nonexistent/scenario.yaml')


class ParseScenarioTests(SimpleTestCase):

    def test_defaults(self):
        scenario = parse_scenario('name: tiny\nduration: 20\nwarmup: 5\n')
        self.assertEqual(scenario.step, 0.1)
        self.assertEqual(scenario.road.lane_count, 4)
        self.assertEqual(scenario.traffic, TrafficParams())
        self.assertEqual(scenario.total_flow, 0.0)
        self.assertIsNone(scenario.ego.x)

    def test_unknown_traffic_key_reports_line(self):
        text = (
            'name: bad\n'
            'duration: 100\n'
            'warmup: 0\n'
            'traffic:\n'
            '  tau_follow: 1.2\n'
            '  bogus: 3\n'
        )
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario(text, 'bad.yaml')
        self.assertEqual(context.exception.line, 6)
        self.assertIn('bogus', str(context.exception))
        self.assertTrue(str(context.exception).startswith('bad.yaml:6'))

    def test_unknown_section_reports_line(self):
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario('name: bad\nduration: 10\nwarmup: 0\nweather: rain\n')
        self.assertEqual(context.exception.line, 4)

    def test_lane_out_of_road(self):
        text = (
            'duration: 10\n'
            'warmup: 0\n'
            'vehicles:\n'
            '  - id: a\n'
            '    type: medium_car\n'
            '    lane: 7\n'
            '    x: 10.0\n'
            '    speed: 10.0\n'
        )
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario(text)
        self.assertEqual(context.exception.line, 6)

    def test_negative_demand(self):
        text = 'duration: 10\nwarmup: 0\ndemand:\n  medium_car: 100\n  small_car: -5\n'
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario(text)
        self.assertEqual(context.exception.line, 5)

    def test_demand_for_unknown_type(self):
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario('duration: 10\nwarmup: 0\ndemand:\n  bicycle: 100\n')
        self.assertEqual(context.exception.line, 4)

    def test_yaml_syntax_error(self):
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario('name: bad\nduration: [10\nwarmup: 0\n')
        self.assertIsNotNone(context.exception.line)

    def test_duration_not_after_warmup(self):
        with self.assertRaises(ScenarioConfigError):
            parse_scenario('duration: 50\nwarmup: 50\n')

    def test_invalid_traffic_value(self):
        with self.assertRaises(ScenarioConfigError) as context:
            parse_scenario('duration: 10\nwarmup: 0\ntraffic:\n  tau_follow: -1\n')
        self.assertEqual(context.exception.line, 4)

    def test_custom_vehicle_type(self):
        text = (
            'duration: 10\n'
            'warmup: 0\n'
            'vehicle_types:\n'
            '  bus: {length: 12.0, width: 2.5, speed_min: 14.0, speed_max: 18.0}\n'
            'demand: {bus: 120}\n'
        )
        scenario = parse_scenario(text)
        self.assertEqual(scenario.vehicle_types['bus'].length, 12.0)
        self.assertEqual(scenario.demand, {'bus': 120.0})
