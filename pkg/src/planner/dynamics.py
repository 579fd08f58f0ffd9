"""
Модель движения эго-автомобиля: двойной интегратор по двум осям
и зависящие от состояния ограничения на ускорения.

Состояние x = [x, y, v_x, v_y], управление u = [u_x, u_y];
управление постоянно на шаге длительностью T.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Tuple

import numpy as np

from common.utils import ConfigUtils, NumericUtils
from .exceptions import DegenerateBoundsError, InvalidArgumentError

logger = logging.getLogger(__name__)

STATE_DIM = 4
CONTROL_DIM = 2


@dataclass(frozen=True)
class VehicleState:
    """Кинематическое состояние: позиции в м, скорости в м/с"""

    x: float
    y: float
    v_x: float
    v_y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.v_x, self.v_y], dtype=float)

    @classmethod
    def from_array(cls, values) -> 'VehicleState':
        x, y, v_x, v_y = (float(value) for value in values)
        return cls(x, y, v_x, v_y)


@dataclass(frozen=True)
class ControlInput:
    """Продольное и боковое ускорение, м/с²"""

    u_x: float
    u_y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u_x, self.u_y], dtype=float)

    @classmethod
    def from_array(cls, values) -> 'ControlInput':
        u_x, u_y = (float(value) for value in values)
        return cls(u_x, u_y)


@dataclass(frozen=True)
class RoadGeometry:
    """
    Прямой участок дороги. Полоса 0 прилегает к правой границе (y = 0),
    левая граница дороги находится на y = r_w.
    """

    lane_width: float = 3.2
    lane_count: int = 4
    segment_length: float = 2000.0

    def __post_init__(self):
        if self.lane_width <= 0 or self.lane_count < 1 or self.segment_length <= 0:
            raise InvalidArgumentError(
                f"Некорректная геометрия дороги: lane_width={self.lane_width}, "
                f"lane_count={self.lane_count}, segment_length={self.segment_length}"
            )

    @property
    def r_w(self) -> float:
        """Полная ширина дороги"""
        return self.lane_width * self.lane_count

    def left_limit(self, vehicle_width: float) -> float:
        """ỹ_l: крайнее левое допустимое положение центра автомобиля"""
        return self.r_w - vehicle_width / 2.0

    def right_limit(self, vehicle_width: float) -> float:
        """ỹ_r: крайнее правое допустимое положение центра автомобиля"""
        return vehicle_width / 2.0

    def lane_of(self, y: float) -> int:
        """Индекс полосы, в которой лежит точка y (с насыщением по краям)"""
        index = int(math.floor(y / self.lane_width))
        return min(max(index, 0), self.lane_count - 1)

    def lane_center(self, lane: int) -> float:
        return (lane + 0.5) * self.lane_width

    @classmethod
    def from_settings(cls, **overrides) -> 'RoadGeometry':
        return ConfigUtils.build(cls, 'ROAD', **overrides)


@dataclass(frozen=True)
class VehicleParams:
    """Габариты и предельные ускорения эго-автомобиля"""

    length: float = 4.5
    width: float = 1.8
    u_x_max: float = 3.0
    u_x_min: float = -6.0
    u_y_cap: float = 3.0
    T: float = 0.1

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0 or self.T <= 0:
            raise InvalidArgumentError("Габариты и шаг T должны быть положительными")
        if not self.u_x_min < 0 < self.u_x_max:
            raise InvalidArgumentError(
                f"Требуется u_x_min < 0 < u_x_max, получено {self.u_x_min}, {self.u_x_max}"
            )
        if self.u_y_cap <= 0:
            raise InvalidArgumentError("u_y_cap должен быть положительным")

    @classmethod
    def from_settings(cls, **overrides) -> 'VehicleParams':
        return ConfigUtils.build(cls, 'VEHICLE', **overrides)


class LateralBounds(NamedTuple):
    lower: float
    upper: float


@lru_cache(maxsize=32)
def transition_matrices(T: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Матрицы A (4×4) и B (4×2) линейной рекурсии x' = A x + B u.
    Возвращаемые массивы только для чтения.
    """
    if not T > 0:
        raise InvalidArgumentError(f"Шаг T должен быть положительным, получено {T}")
    A = np.array([
        [1.0, 0.0, T, 0.0],
        [0.0, 1.0, 0.0, T],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    B = np.array([
        [0.5 * T * T, 0.0],
        [0.0, 0.5 * T * T],
        [T, 0.0],
        [0.0, T],
    ])
    A.setflags(write=False)
    B.setflags(write=False)
    return A, B


def step_array(x: np.ndarray, u: np.ndarray, T: float) -> np.ndarray:
    """Один шаг рекурсии над массивами"""
    A, B = transition_matrices(float(T))
    return A @ x + B @ u


def step(state: VehicleState, u: ControlInput, T: float) -> VehicleState:
    """
    Один шаг модели двойного интегратора.

    Raises:
        InvalidArgumentError: нечисловой вход или T <= 0
    """
    if not NumericUtils.all_finite(state.x, state.y, state.v_x, state.v_y, u.u_x, u.u_y, T):
        raise InvalidArgumentError(f"Нечисловой вход шага модели: {state}, {u}, T={T}")
    if T <= 0:
        raise InvalidArgumentError(f"Шаг T должен быть положительным, получено {T}")
    return VehicleState.from_array(step_array(state.as_array(), u.as_array(), T))


def rollout(x0: np.ndarray, controls: np.ndarray, T: float) -> np.ndarray:
    """Траектория (K+1)×4 из начального состояния и последовательности K×2"""
    A, B = transition_matrices(float(T))
    controls = np.asarray(controls, dtype=float).reshape(-1, CONTROL_DIM)
    states = np.empty((len(controls) + 1, STATE_DIM))
    states[0] = x0
    for k, u in enumerate(controls):
        states[k + 1] = A @ states[k] + B @ u
    return states


def lateral_bounds_unclipped(x: np.ndarray, params: VehicleParams, road: RoadGeometry) -> LateralBounds:
    """Боковые границы без ограничения комфортом (удерживают центр в [ỹ_r, ỹ_l])"""
    T = params.T
    y, v_y = x[1], x[3]
    upper = 2.0 * (road.left_limit(params.width) - y - v_y * T) / (T * T)
    lower = 2.0 * (road.right_limit(params.width) - y - v_y * T) / (T * T)
    return LateralBounds(lower, upper)


def bounds_array(x: np.ndarray, params: VehicleParams, road: RoadGeometry,
                 strict: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Нижняя и верхняя границы управления в состоянии x.

    При strict=True вырожденные боковые границы приводят к
    DegenerateBoundsError; иначе интервал стягивается в точку,
    удерживающую автомобиль на дороге (граница дороги важнее комфорта).
    """
    T = params.T
    cap = params.u_y_cap
    lower_ux = max(-x[2] / T, params.u_x_min)
    upper_ux = params.u_x_max
    if lower_ux > upper_ux:
        lower_ux = upper_ux

    raw = lateral_bounds_unclipped(x, params, road)
    lower_uy = max(raw.lower, -cap)
    upper_uy = min(raw.upper, cap)
    if lower_uy > upper_uy:
        if strict:
            raise DegenerateBoundsError(raw.lower, raw.upper)
        pinned = raw.upper if raw.upper < -cap else raw.lower
        lower_uy = upper_uy = pinned
    return np.array([lower_ux, lower_uy]), np.array([upper_ux, upper_uy])


def control_bounds(state: VehicleState, params: VehicleParams,
                   road: RoadGeometry) -> Tuple[ControlInput, ControlInput]:
    """
    Границы управления для состояния.

    Raises:
        DegenerateBoundsError: боковой интервал пуст после ограничения комфортом
    """
    lower, upper = bounds_array(state.as_array(), params, road, strict=True)
    return ControlInput.from_array(lower), ControlInput.from_array(upper)


def bounds_sensitivity(x: np.ndarray, params: VehicleParams,
                       road: RoadGeometry) -> Tuple[np.ndarray, np.ndarray]:
    """
    Якобианы границ по состоянию (2×4 для нижней и верхней).
    Нулевые строки там, где граница постоянна (ограничена константой).
    """
    T = params.T
    cap = params.u_y_cap
    d_lower = np.zeros((CONTROL_DIM, STATE_DIM))
    d_upper = np.zeros((CONTROL_DIM, STATE_DIM))
    if -x[2] / T > params.u_x_min:
        d_lower[0, 2] = -1.0 / T
    raw = lateral_bounds_unclipped(x, params, road)
    lateral_row = np.array([0.0, -2.0 / (T * T), 0.0, -2.0 / T])
    if raw.upper < cap:
        d_upper[1] = lateral_row
    if raw.lower > -cap:
        d_lower[1] = lateral_row
    return d_lower, d_upper


def clip_to_bounds(x: np.ndarray, u: np.ndarray, params: VehicleParams,
                   road: RoadGeometry) -> np.ndarray:
    """Проекция управления на допустимый прямоугольник в состоянии x"""
    lower, upper = bounds_array(x, params, road)
    return np.minimum(np.maximum(u, lower), upper)


def within_bounds(x: np.ndarray, u: np.ndarray, params: VehicleParams,
                  road: RoadGeometry, tol: float = 1e-9) -> bool:
    lower, upper = bounds_array(x, params, road)
    return bool(np.all(u >= lower - tol) and np.all(u <= upper + tol))
