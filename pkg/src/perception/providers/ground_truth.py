"""
Наблюдения из состояния симулятора без искажений
"""

from typing import Optional

from planner.dynamics import RoadGeometry
from ..types import ObservationSet, ObstacleObservation, PerceptionConfig
from .base import BaseProvider, WorldView


class GroundTruthProvider(BaseProvider):
    """Точные положения, габариты и скорости соседних автомобилей"""

    source = 'ground_truth'

    def observe(self, world: WorldView, ego_id: str) -> ObservationSet:
        road = self.road_of(world)
        observations = tuple(
            ObstacleObservation(
                id=str(vehicle.id),
                x=vehicle.x,
                y=vehicle.y,
                length=vehicle.length,
                width=vehicle.width,
                v_x=vehicle.v_x,
                v_y=vehicle.v_y,
                lane_index=road.lane_of(vehicle.y),
            )
            for vehicle in self.visible_vehicles(world, ego_id)
        )
        return ObservationSet(
            timestamp=world.time,
            observations=observations,
            source=self.source,
            n_max=self.config.n_max,
        )


def observe_ground_truth(world: WorldView, ego_id: str,
                         config: Optional[PerceptionConfig] = None,
                         road: Optional[RoadGeometry] = None) -> ObservationSet:
    return GroundTruthProvider(config=config, road=road).observe(world, ego_id)
