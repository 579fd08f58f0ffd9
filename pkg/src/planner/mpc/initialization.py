"""
Начальное приближение управления для решателя: нулевое или
по опорной траектории (кубический сплайн через путевые точки).
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from perception.types import ObservationSet, ObstacleObservation
from ..ddp.solver import clipped_rollout
from ..dynamics import CONTROL_DIM, RoadGeometry, VehicleParams, VehicleState
from ..exceptions import InvalidArgumentError
from ..ocp import CostWeights, OcpProblem
from ..safety import SafetyConfig, verify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitializationResult:
    controls: np.ndarray
    reference_used: bool
    rejected: bool


def zero_controls(K: int) -> np.ndarray:
    return np.zeros((K, CONTROL_DIM))


def initialize_controls(reference: Optional[np.ndarray], current: VehicleState, K: int,
                        params: VehicleParams, road: RoadGeometry,
                        obstacles: Sequence[ObstacleObservation] = (),
                        safety: Optional[SafetyConfig] = None) -> InitializationResult:
    """
    Управления по опорной траектории.

    reference - массив строк (t, x, y), t от 0 с возрастанием. Точки
    сглаживаются кубическим сплайном, скорости берутся из его производной
    в моменты kT, управление u_k = (v_{k+1} - v_k) / T с v_0 из текущего
    состояния, затем проецируется на границы. Опорная траектория, которая
    приводит к столкновению или выезду с дороги, отклоняется в пользу
    нулевой инициализации. Проверка идет на min(K, M) шагах.
    """
    if reference is None or len(reference) < 2:
        return InitializationResult(zero_controls(K), False, False)

    reference = np.asarray(reference, dtype=float)
    if reference.ndim != 2 or reference.shape[1] != 3:
        raise InvalidArgumentError(f"Опорная траектория должна иметь строки (t, x, y), получено {reference.shape}")
    T = params.T
    spline = CubicSpline(reference[:, 0], reference[:, 1:], axis=0, bc_type='natural')
    velocities = spline(np.arange(K + 1) * T, 1)
    velocities[0] = (current.v_x, current.v_y)
    controls = np.diff(velocities, axis=0) / T

    problem = OcpProblem.create(K, current, CostWeights(), params=params, road=road)
    states, controls = clipped_rollout(problem, controls)

    safety = safety or SafetyConfig(T=T)
    if K < safety.steps:
        safety = replace(safety, horizon=K * T)
    report = verify(states, list(obstacles), road, safety, params)
    if report.unsafe:
        logger.info(f"Опорная траектория отклонена: {report.first_violation}")
        return InitializationResult(zero_controls(K), False, True)
    return InitializationResult(controls, True, False)


class ReferenceGenerator:
    """
    Эвристическая опорная траектория: выбирается полоса (текущая или
    соседняя) с наибольшим свободным промежутком впереди, продольное
    движение - равноускоренное к целевой скорости, смена полосы -
    косинусный профиль за время горизонта.
    """

    def __init__(self, params: VehicleParams, road: RoadGeometry, horizon: float = 3.0,
                 lookahead: float = 150.0, switch_margin: float = 20.0):
        self.params = params
        self.road = road
        self.horizon = horizon
        self.lookahead = lookahead
        self.switch_margin = switch_margin

    def lane_gap(self, ego: VehicleState, lane: int, observations: ObservationSet) -> float:
        """Свободный промежуток впереди в полосе; -inf, если рядом с эго занято"""
        gap = self.lookahead
        for observation in observations:
            if observation.lane_index != lane:
                continue
            offset = observation.x - ego.x
            reach = (observation.length + self.params.length) / 2.0
            if abs(offset) < reach + self.params.length:
                return -np.inf
            if offset > 0:
                gap = min(gap, offset - reach)
        return gap

    def target_lane(self, ego: VehicleState, observations: ObservationSet) -> int:
        current = self.road.lane_of(ego.y)
        best_lane = current
        best_gap = self.lane_gap(ego, current, observations)
        for lane in (current - 1, current + 1):
            if not 0 <= lane < self.road.lane_count:
                continue
            gap = self.lane_gap(ego, lane, observations)
            if gap > best_gap + self.switch_margin:
                best_lane, best_gap = lane, gap
        return best_lane

    def waypoints(self, ego: VehicleState, observations: ObservationSet, v_target: float) -> np.ndarray:
        lane = self.target_lane(ego, observations)
        y_target = self.road.lane_center(lane)
        duration = self.horizon + 2 * self.params.T
        times = np.linspace(0.0, duration, 7)

        accel = np.clip((v_target - ego.v_x) / self.horizon, self.params.u_x_min, self.params.u_x_max)
        xs = ego.x + ego.v_x * times + 0.5 * accel * times ** 2
        phase = np.clip(times / self.horizon, 0.0, 1.0)
        ys = ego.y + (y_target - ego.y) * 0.5 * (1.0 - np.cos(np.pi * phase))
        return np.column_stack([times, xs, ys])
