"""
Наблюдения с гауссовским шумом положения и габаритов.
Скорости оцениваются по зашумленным положениям двух кадров.
"""

import logging
from typing import Optional

import numpy as np

from planner.dynamics import RoadGeometry
from ..exceptions import InvalidObservationError
from ..tracking import TrackMemory
from ..types import ObservationSet, ObstacleObservation, PerceptionConfig
from .base import BaseProvider, WorldView

logger = logging.getLogger(__name__)

# Нижняя граница зашумленного габарита, м
MIN_DIMENSION = 0.1


class NoisyProvider(BaseProvider):
    """Истинное состояние плюс шум N(0, σ²), детерминированный при фиксированном сиде"""

    source = 'noisy'

    def __init__(self, seed: int = 0, sigma_pos: float = 0.0, sigma_dim: float = 0.0,
                 config: Optional[PerceptionConfig] = None, road: Optional[RoadGeometry] = None):
        super().__init__(config=config, road=road)
        if sigma_pos < 0 or sigma_dim < 0:
            raise InvalidObservationError(f"Шум должен быть неотрицательным: {sigma_pos}, {sigma_dim}")
        self.seed = seed
        self.sigma_pos = sigma_pos
        self.sigma_dim = sigma_dim
        self.rng = np.random.default_rng(seed)
        self.tracks = TrackMemory()

    def reset(self) -> None:
        self.rng = np.random.default_rng(self.seed)
        self.tracks.reset()

    def observe(self, world: WorldView, ego_id: str) -> ObservationSet:
        road = self.road_of(world)
        observations = []
        for vehicle in self.visible_vehicles(world, ego_id):
            position = np.array([vehicle.x, vehicle.y]) + self.rng.normal(0.0, self.sigma_pos, 2)
            length, width = np.array([vehicle.length, vehicle.width]) + self.rng.normal(0.0, self.sigma_dim, 2)
            estimate = self.tracks.update(str(vehicle.id), world.time, position)
            observations.append(ObstacleObservation(
                id=str(vehicle.id),
                x=float(position[0]),
                y=float(position[1]),
                length=max(float(length), MIN_DIMENSION),
                width=max(float(width), MIN_DIMENSION),
                v_x=float(estimate.velocity[0]),
                v_y=float(estimate.velocity[1]),
                lane_index=road.lane_of(float(position[1])),
                cold_start=estimate.cold_start,
            ))
        self.tracks.forget_missing(observation.id for observation in observations)
        return ObservationSet(
            timestamp=world.time,
            observations=tuple(observations),
            source=self.source,
            n_max=self.config.n_max,
        )


def observe_noisy(world: WorldView, ego_id: str, seed: int, sigma_pos: float, sigma_dim: float,
                  config: Optional[PerceptionConfig] = None) -> ObservationSet:
    """Однократное зашумленное наблюдение (все треки в холодном старте)"""
    return NoisyProvider(seed=seed, sigma_pos=sigma_pos, sigma_dim=sigma_dim, config=config).observe(world, ego_id)
