import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from perception.exceptions import InvalidObservationError, UnknownVehicleError
from perception.providers import (
    PROVIDERS,
    BackgroundProvider,
    GroundTruthProvider,
    NoisyProvider,
    build_provider,
    observe_ground_truth,
    observe_noisy,
)
from perception.types import N_MAX, ObservationSet, ObstacleObservation, PerceptionConfig
from planner.dynamics import RoadGeometry
from traffic.world import Vehicle, WorldState

ROAD = RoadGeometry()


def make_world(count=0, time=0.0, spacing=7.0):
    world = WorldState(time=time, road=ROAD, ego_id='ego')
    world.add(Vehicle('ego', 'car', 500.0, 4.8, 15.0, 0.0, 4.5, 1.8, 15.0, is_ego=True))
    for i in range(count):
        offset = spacing * (i // 2 + 1) * (1 if i % 2 == 0 else -1)
        lane = i % ROAD.lane_count
        world.add(Vehicle(f'v{i:02d}', 'car', 500.0 + offset, ROAD.lane_center(lane), 12.0 + i, 0.1 * i,
                          4.0 + 0.1 * i, 1.8, 15.0))
    return world


class GroundTruthTests(SimpleTestCase):

    def test_empty_road(self):
        observations = observe_ground_truth(make_world(), 'ego')
        self.assertEqual(len(observations), 0)
        self.assertEqual(observations.source, 'ground_truth')

    def test_cap_keeps_nearest(self):
        world = make_world(20)
        observations = observe_ground_truth(world, 'ego')
        self.assertEqual(len(observations), N_MAX)
        ego = world.vehicles['ego']
        kept = sorted(abs(o.x - ego.x) for o in observations)
        dropped = [abs(v.x - ego.x) for vid, v in world.vehicles.items()
                   if vid != 'ego' and vid not in observations.by_id()]
        self.assertLessEqual(max(kept), min(dropped))

    def test_exact_state(self):
        world = make_world(6)
        for observation in observe_ground_truth(world, 'ego'):
            vehicle = world.vehicles[observation.id]
            self.assertEqual((observation.x, observation.y, observation.v_x, observation.v_y),
                             (vehicle.x, vehicle.y, vehicle.v_x, vehicle.v_y))
            self.assertEqual((observation.length, observation.width), (vehicle.length, vehicle.width))
            self.assertEqual(observation.lane_index, ROAD.lane_of(vehicle.y))

    def test_sensing_range(self):
        world = make_world(2)
        world.add(Vehicle('far', 'car', 900.0, 1.6, 10.0, 0.0, 4.5, 1.8, 10.0))
        ids = {o.id for o in observe_ground_truth(world, 'ego', config=PerceptionConfig(sensing_range=150.0))}
        self.assertNotIn('far', ids)
        self.assertEqual(len(ids), 2)

    def test_unknown_ego(self):
        with self.assertRaises(UnknownVehicleError):
            observe_ground_truth(make_world(2), 'missing')

    def test_set_respects_cap(self):
        observations = [ObstacleObservation(f'o{i}', float(i), 1.6, 4.5, 1.8) for i in range(3)]
        with self.assertRaises(InvalidObservationError):
            ObservationSet(0.0, observations, n_max=2)


class NoisyTests(SimpleTestCase):

    def test_zero_noise_matches_ground_truth(self):
        world = make_world(8)
        truth = observe_ground_truth(world, 'ego')
        noisy = observe_noisy(world, 'ego', seed=3, sigma_pos=0.0, sigma_dim=0.0)
        for exact, observed in zip(truth, noisy):
            self.assertEqual(exact.id, observed.id)
            self.assertEqual((exact.x, exact.y, exact.length, exact.width),
                             (observed.x, observed.y, observed.length, observed.width))
            self.assertTrue(observed.cold_start)

    def test_deterministic_for_seed(self):
        world = make_world(8)
        first = observe_noisy(world, 'ego', seed=11, sigma_pos=0.5, sigma_dim=0.2)
        second = observe_noisy(world, 'ego', seed=11, sigma_pos=0.5, sigma_dim=0.2)
        self.assertEqual(first.to_record(), second.to_record())
        other = observe_noisy(world, 'ego', seed=12, sigma_pos=0.5, sigma_dim=0.2)
        self.assertNotEqual(first.to_record(), other.to_record())

    def test_position_noise_statistics(self):
        world = make_world(1)
        vehicle = world.vehicles['v00']
        provider = NoisyProvider(seed=2024, sigma_pos=0.5, sigma_dim=0.0)
        errors = []
        for _ in range(10000):
            observation = provider.observe(world, 'ego').observations[0]
            errors.append(observation.x - vehicle.x)
        self.assertAlmostEqual(float(np.std(errors)), 0.5, delta=0.025)
        self.assertAlmostEqual(float(np.mean(errors)), 0.0, delta=0.025)

    def test_velocity_from_consecutive_frames(self):
        world = make_world(1)
        provider = NoisyProvider(seed=0)
        self.assertTrue(provider.observe(world, 'ego').observations[0].cold_start)
        world.time = 0.25
        world.vehicles['v00'].x += 0.25 * 12.0
        observation = provider.observe(world, 'ego').observations[0]
        self.assertFalse(observation.cold_start)
        self.assertAlmostEqual(observation.v_x, 12.0, places=9)

    def test_negative_sigma(self):
        with self.assertRaises(InvalidObservationError):
            NoisyProvider(sigma_pos=-1.0)


class RegistryTests(SimpleTestCase):

    def test_build_provider(self):
        self.assertEqual(set(PROVIDERS), {'ground-truth', 'noisy', 'external'})
        self.assertIsInstance(build_provider('ground-truth'), GroundTruthProvider)
        provider = build_provider('noisy', seed=4, sigma_pos=0.3)
        self.assertIsInstance(provider, NoisyProvider)
        self.assertEqual(provider.sigma_pos, 0.3)
        with self.assertRaises(ValueError):
            build_provider('camera')

    def test_providers_are_interchangeable(self):
        world = make_world(5)
        for name in ('ground-truth', 'noisy'):
            observations = build_provider(name).observe(world, 'ego')
            self.assertIsInstance(observations, ObservationSet)
            self.assertEqual(len(observations), 5)


class BackgroundProviderTests(SimpleTestCase):

    def test_hands_over_latest_frame(self):
        provider = BackgroundProvider(GroundTruthProvider())
        try:
            world = make_world(3, time=1.0)
            first = provider.observe(world, 'ego')
            self.assertEqual(first.timestamp, 1.0)
            provider.wait(timeout=5)
            ready = provider.latest(1.0)
            self.assertEqual(len(ready), 3)
            self.assertFalse(ready.fallback_used)

            stale = provider.latest(1.1)
            self.assertTrue(stale.fallback_used)
            self.assertEqual(stale.timestamp, 1.1)
            assert_allclose([o.x for o in stale], [o.x for o in ready])
        finally:
            provider.close()

    def test_empty_fallback_before_first_frame(self):
        provider = BackgroundProvider(GroundTruthProvider())
        try:
            frame = provider.latest(0.0)
            self.assertTrue(frame.fallback_used)
            self.assertEqual(len(frame), 0)
        finally:
            provider.close()
