"""
Базовый класс поставщиков наблюдений
"""

import logging
from typing import List, Optional, Protocol

from planner.dynamics import RoadGeometry
from ..exceptions import UnknownVehicleError
from ..types import ObservationSet, PerceptionConfig

logger = logging.getLogger(__name__)


class VehicleView(Protocol):
    id: str
    x: float
    y: float
    v_x: float
    v_y: float
    length: float
    width: float


class WorldView(Protocol):
    time: float
    road: RoadGeometry
    vehicles: dict


class BaseProvider:
    """Базовый класс для всех поставщиков наблюдений"""

    source = 'base'

    def __init__(self, config: Optional[PerceptionConfig] = None, road: Optional[RoadGeometry] = None):
        self.config = config or PerceptionConfig()
        self.road = road

    def observe(self, world: WorldView, ego_id: str) -> ObservationSet:
        """Должен быть переопределен в дочерних классах"""
        raise NotImplementedError

    def reset(self) -> None:
        """Сброс внутреннего состояния (треков, предыдущего кадра)"""
        pass

    def road_of(self, world: WorldView) -> RoadGeometry:
        return self.road or world.road

    def visible_vehicles(self, world: WorldView, ego_id: str) -> List[VehicleView]:
        """
        Соседние автомобили в радиусе восприятия, упорядоченные
        по продольному расстоянию до эго (при равенстве по id),
        не более n_max.
        """
        try:
            ego = world.vehicles[ego_id]
        except KeyError:
            raise UnknownVehicleError(f"Эго-автомобиль {ego_id} отсутствует в мире") from None

        in_range = [
            vehicle for vehicle_id, vehicle in world.vehicles.items()
            if vehicle_id != ego_id and abs(vehicle.x - ego.x) <= self.config.sensing_range
        ]
        in_range.sort(key=lambda vehicle: (abs(vehicle.x - ego.x), str(vehicle.id)))
        if len(in_range) > self.config.n_max:
            logger.debug(f"В радиусе {len(in_range)} автомобилей, оставлено {self.config.n_max}")
        return in_range[:self.config.n_max]
