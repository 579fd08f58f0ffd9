"""
Поведение окружающих автомобилей: линейное правило следования
с временным интервалом и сценарные смены полосы.

Ускорение:
    a_free   = k_free·(v_des - v)
    a_follow = k_gap·(s - s0 - v·τ) + k_speed·(v_leader - v)
    a        = sat(min(a_free, a_follow); -max_decel, max_accel)
"""

import logging
import math
from typing import Iterable, List, Optional

from .scenario import Maneuver, TrafficParams
from .world import LaneChange, Vehicle, WorldState

logger = logging.getLogger(__name__)


def following_acceleration(vehicle: Vehicle, leader: Optional[Vehicle], gap: float,
                           params: TrafficParams) -> float:
    accel = params.k_free * (vehicle.desired_speed - vehicle.v_x)
    if leader is not None:
        target_gap = params.standstill_gap + vehicle.v_x * params.tau_follow
        follow = params.k_gap * (gap - target_gap) + params.k_speed * (leader.v_x - vehicle.v_x)
        accel = min(accel, follow)
    return min(max(accel, -params.max_decel), params.max_accel)


def lateral_position(change: LaneChange, now: float):
    """Положение и боковая скорость на косинусном профиле смены полосы"""
    phase = min(max((now - change.start_time) / change.duration, 0.0), 1.0)
    offset = change.y_to - change.y_from
    y = change.y_from + offset * 0.5 * (1.0 - math.cos(math.pi * phase))
    if phase >= 1.0:
        return y, 0.0
    v_y = offset * 0.5 * math.pi / change.duration * math.sin(math.pi * phase)
    return y, v_y


def start_maneuvers(world: WorldState, maneuvers: Iterable[Maneuver], now: float, T: float) -> List[Maneuver]:
    """Запускает сценарные смены полосы, время которых наступило на этом шаге"""
    started = []
    for maneuver in maneuvers:
        if not (maneuver.time - 1e-9 <= now < maneuver.time + T - 1e-9):
            continue
        vehicle = world.vehicles.get(maneuver.vehicle)
        if vehicle is None or vehicle.is_ego:
            logger.warning(f"Маневр для отсутствующего автомобиля {maneuver.vehicle} пропущен")
            continue
        vehicle.lane_change = LaneChange(
            start_time=now,
            duration=maneuver.duration,
            y_from=vehicle.y,
            y_to=world.road.lane_center(maneuver.target_lane),
        )
        started.append(maneuver)
        logger.info(f"t={now:.1f}: {vehicle.id} начинает смену полосы на {maneuver.target_lane}")
    return started


def advance_traffic(world: WorldState, T: float, params: TrafficParams) -> WorldState:
    """
    Продвигает окружающие автомобили на шаг T (эго не трогает).

    Автомобили обрабатываются от головы к хвосту, лидер берется
    с уже обновленным положением; положение ограничивается так,
    чтобы зазор до лидера не стал меньше min_gap.
    """
    if T <= 0:
        raise ValueError(f"Шаг T должен быть положительным, получено {T}")
    now = world.time + T
    ordered = sorted(world.vehicles.values(), key=lambda vehicle: (-vehicle.x, vehicle.id))
    for vehicle in ordered:
        if vehicle.is_ego:
            continue
        if vehicle.lane_change is not None:
            vehicle.y, vehicle.v_y = lateral_position(vehicle.lane_change, now)
            if now >= vehicle.lane_change.start_time + vehicle.lane_change.duration - 1e-9:
                vehicle.y = vehicle.lane_change.y_to
                vehicle.v_y = 0.0
                vehicle.lane_change = None

        leader, gap = world.leader_of(vehicle)
        accel = following_acceleration(vehicle, leader, gap, params)
        v_new = max(vehicle.v_x + accel * T, 0.0)
        x_new = vehicle.x + 0.5 * (vehicle.v_x + v_new) * T

        if leader is not None:
            limit = leader.x - (leader.length + vehicle.length) / 2.0 - params.min_gap
            if x_new > limit:
                x_new = limit
                v_new = min(v_new, leader.v_x)
        vehicle.x, vehicle.v_x = x_new, v_new
    world.time = now
    return world
