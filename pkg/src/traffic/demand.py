"""
Появление окружающего потока: пуассоновские прибытия по типам
и постановка в полосу с наибольшим свободным промежутком у въезда.
"""

import logging
from collections import deque
from typing import Deque, Dict, List, Optional

import numpy as np

from .scenario import ScenarioConfig
from .world import Vehicle, WorldState

logger = logging.getLogger(__name__)


class DemandGenerator:
    """Очередь прибывших, но еще не поставленных на дорогу автомобилей"""

    def __init__(self, demand: Dict[str, float], step: float):
        self.rates = {type_name: flow / 3600.0 * step for type_name, flow in demand.items() if flow > 0}
        self.queue: Deque[str] = deque()
        self.arrivals = 0

    def draw(self, rng: np.random.Generator) -> List[str]:
        """Прибытия за один шаг (по типам в порядке каталога спроса)"""
        arrived = []
        for type_name, rate in self.rates.items():
            count = int(rng.poisson(rate))
            arrived.extend([type_name] * count)
        self.arrivals += len(arrived)
        self.queue.extend(arrived)
        return arrived


def entry_gap(world: WorldState, lane: int) -> float:
    """Расстояние от въезда (x = 0) до заднего бампера ближайшего автомобиля в полосе"""
    gap = float('inf')
    for vehicle in world.vehicles.values():
        if world.lane_of(vehicle) == lane or (
                vehicle.lane_change is not None and world.road.lane_of(vehicle.lane_change.y_to) == lane):
            gap = min(gap, vehicle.x - vehicle.length / 2.0)
    return gap


def entry_speed(world: WorldState, lane: int, desired: float) -> float:
    ahead = [vehicle for vehicle in world.vehicles.values() if world.lane_of(vehicle) == lane]
    if not ahead:
        return desired
    nearest = min(ahead, key=lambda vehicle: (vehicle.x, vehicle.id))
    return min(desired, nearest.v_x)


def spawn_traffic(config: ScenarioConfig, now: float, world: WorldState, rng: np.random.Generator,
                  demand: Optional[DemandGenerator] = None) -> WorldState:
    """
    Прибытия текущего шага и постановка очереди на дорогу.
    Если ни в одной полосе нет промежутка spawn_gap, постановка
    откладывается до следующего шага.
    """
    demand = demand or DemandGenerator(config.demand, config.step)
    demand.draw(rng)
    lanes = range(config.road.lane_count)
    while demand.queue:
        vehicle_type = config.vehicle_types[demand.queue[0]]
        gaps = {lane: entry_gap(world, lane) - vehicle_type.length / 2.0 for lane in lanes}
        lane = max(lanes, key=lambda index: (gaps[index], -index))
        if gaps[lane] < config.traffic.spawn_gap:
            break
        type_name = demand.queue.popleft()
        desired = float(rng.uniform(vehicle_type.speed_min, vehicle_type.speed_max))
        vehicle = Vehicle(
            id=world.next_id(),
            type_name=type_name,
            x=0.0,
            y=config.road.lane_center(lane),
            v_x=entry_speed(world, lane, desired),
            v_y=0.0,
            length=vehicle_type.length,
            width=vehicle_type.width,
            desired_speed=desired,
        )
        world.add(vehicle)
        logger.debug(f"t={now:.1f}: {vehicle.id} ({type_name}) в полосе {lane}")
    return world
