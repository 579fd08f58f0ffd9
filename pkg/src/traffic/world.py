"""
Состояние мира симуляции
"""

import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from planner.dynamics import RoadGeometry, VehicleState
from planner.safety import BoundingBox, boxes_intersect
from .exceptions import UnknownVehicleError

logger = logging.getLogger(__name__)


@dataclass
class LaneChange:
    """Активная сценарная смена полосы"""

    start_time: float
    duration: float
    y_from: float
    y_to: float


@dataclass
class Vehicle:
    id: str
    type_name: str
    x: float
    y: float
    v_x: float
    v_y: float
    length: float
    width: float
    desired_speed: float
    lane_change: Optional[LaneChange] = None
    is_ego: bool = False

    @property
    def box(self) -> BoundingBox:
        return BoundingBox.from_dimensions(self.x, self.y, self.length, self.width)

    @property
    def state(self) -> VehicleState:
        return VehicleState(self.x, self.y, self.v_x, self.v_y)

    def set_state(self, state: VehicleState) -> None:
        self.x, self.y, self.v_x, self.v_y = state.x, state.y, state.v_x, state.v_y


@dataclass
class WorldState:
    time: float
    road: RoadGeometry
    vehicles: Dict[str, Vehicle] = field(default_factory=dict)
    ego_id: Optional[str] = None
    spawned: int = 0

    def snapshot(self) -> 'WorldState':
        """Независимая копия для передачи в другой поток"""
        return copy.deepcopy(self)

    def vehicle(self, vehicle_id: str) -> Vehicle:
        try:
            return self.vehicles[vehicle_id]
        except KeyError:
            raise UnknownVehicleError(f"Автомобиль {vehicle_id} отсутствует в мире") from None

    @property
    def ego(self) -> Optional[Vehicle]:
        return self.vehicles.get(self.ego_id) if self.ego_id is not None else None

    def next_id(self, prefix: str = 'veh') -> str:
        self.spawned += 1
        return f'{prefix}{self.spawned:05d}'

    def add(self, vehicle: Vehicle) -> None:
        self.vehicles[vehicle.id] = vehicle

    def remove(self, vehicle_id: str) -> None:
        self.vehicles.pop(vehicle_id, None)
        if vehicle_id == self.ego_id:
            self.ego_id = None

    def others(self) -> Iterator[Vehicle]:
        return (vehicle for vehicle in self.vehicles.values() if not vehicle.is_ego)

    def lane_of(self, vehicle: Vehicle) -> int:
        return self.road.lane_of(vehicle.y)

    def leader_of(self, vehicle: Vehicle, same_lane: bool = False) -> Tuple[Optional[Vehicle], float]:
        """
        Ближайший автомобиль впереди и зазор между бамперами.

        По умолчанию лидером считается автомобиль, перекрывающийся
        по боковой оси; при same_lane=True - автомобиль в той же полосе.
        """
        box = vehicle.box
        lane = self.lane_of(vehicle)
        leader = None
        best_gap = float('inf')
        for other in self.vehicles.values():
            if other.id == vehicle.id or other.x < vehicle.x:
                continue
            if other.x == vehicle.x and other.id < vehicle.id:
                continue
            if same_lane:
                if self.lane_of(other) != lane:
                    continue
            elif not box.overlaps_laterally(other.box):
                continue
            gap = (other.x - other.length / 2.0) - (vehicle.x + vehicle.length / 2.0)
            if gap < best_gap:
                leader, best_gap = other, gap
        return leader, best_gap

    def collisions_with(self, vehicle_id: str) -> List[str]:
        """Идентификаторы автомобилей, габариты которых пересекают данный"""
        box = self.vehicle(vehicle_id).box
        return sorted(other.id for other in self.vehicles.values()
                      if other.id != vehicle_id and boxes_intersect(box, other.box))
