"""
Эллиптические потенциальные поля препятствий.

    phi = exp(-r),  r = sqrt((x - x_o)² / σ_x² + (y - y_o)² / σ_y²)

Продольная полуось σ_x масштабируется политикой временного интервала;
производные по (x, y) считаются при замороженной σ_x.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from common.utils import ConfigUtils
from .dynamics import VehicleState
from .exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# Радиус вокруг центра, в котором корень не дифференцируем
SINGULAR_RADIUS = 1e-6


@dataclass(frozen=True)
class PotentialConfig:
    """τ политики временного интервала и вес λ по умолчанию"""

    tau: float = 1.0
    weight: float = 50.0

    def __post_init__(self):
        if self.tau <= 0 or self.weight <= 0:
            raise InvalidArgumentError(f"tau и weight должны быть положительными: {self.tau}, {self.weight}")

    @classmethod
    def from_settings(cls, **overrides) -> 'PotentialConfig':
        return ConfigUtils.build(cls, 'POTENTIAL', **overrides)


@dataclass(frozen=True)
class TimeGap:
    """Данные для пересчета σ_x по политике временного интервала"""

    obstacle_v_x: float
    length: float
    tau: float = 1.0


@dataclass(frozen=True)
class ObstacleEllipse:
    """
    Потенциал одного препятствия на одном шаге горизонта.

    Если задан time_gap, σ_x в функции стоимости пересчитывается
    по состоянию эго (см. build_sigma_x), а sigma_x хранит значение
    на номинальной траектории.
    """

    center_x: float
    center_y: float
    sigma_x: float
    sigma_y: float
    weight: float = 50.0
    obstacle_id: Optional[str] = None
    time_gap: Optional[TimeGap] = None

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0 and self.weight > 0):
            raise InvalidArgumentError(
                f"Полуоси и вес эллипса должны быть положительными: "
                f"σ_x={self.sigma_x}, σ_y={self.sigma_y}, λ={self.weight}"
            )

    def resolved_sigma_x(self, x: float, v_x: float) -> float:
        if self.time_gap is None:
            return self.sigma_x
        gap = self.time_gap
        return build_sigma_x_raw(x, v_x, self.center_x, gap.obstacle_v_x, gap.tau, gap.length)

    def frozen_at(self, x: float, v_x: float) -> 'ObstacleEllipse':
        """Копия с σ_x, вычисленной в номинальной точке"""
        return replace(self, sigma_x=self.resolved_sigma_x(x, v_x))

    def scaled(self, factor: float) -> 'ObstacleEllipse':
        return replace(self, weight=self.weight * factor)


class PotentialDerivatives(NamedTuple):
    gradient: np.ndarray
    hessian: np.ndarray
    singular: bool


def build_sigma_x_raw(ego_x: float, ego_v_x: float, obstacle_x: float,
                      obstacle_v_x: float, tau: float, obstacle_length: float) -> float:
    if ego_x <= obstacle_x:
        return ego_v_x * tau + obstacle_length
    return obstacle_v_x * tau + obstacle_length


def build_sigma_x(ego: VehicleState, obstacle_x: float, obstacle_v_x: float,
                  tau: float, obstacle_length: float) -> float:
    """
    Продольная полуось по политике временного интервала: пока эго позади
    препятствия, используется скорость эго, иначе скорость препятствия.
    """
    if not (tau > 0 and obstacle_length > 0):
        raise InvalidArgumentError(f"Требуется tau > 0 и длина > 0: tau={tau}, L={obstacle_length}")
    return build_sigma_x_raw(ego.x, ego.v_x, obstacle_x, obstacle_v_x, tau, obstacle_length)


def _normalized_radius(a: float, b: float, sigma_x: float, sigma_y: float) -> float:
    return math.sqrt((a * a) / (sigma_x * sigma_x) + (b * b) / (sigma_y * sigma_y))


def phi(ellipse: ObstacleEllipse, x: float, y: float) -> float:
    """Значение потенциала в точке, лежит в (0, 1]"""
    a = x - ellipse.center_x
    b = y - ellipse.center_y
    return math.exp(-_normalized_radius(a, b, ellipse.sigma_x, ellipse.sigma_y))


def phi_with_sigma(ellipse: ObstacleEllipse, x: float, y: float, sigma_x: float) -> float:
    a = x - ellipse.center_x
    b = y - ellipse.center_y
    return math.exp(-_normalized_radius(a, b, sigma_x, ellipse.sigma_y))


def phi_derivatives(ellipse: ObstacleEllipse, x: float, y: float) -> PotentialDerivatives:
    """
    Градиент и гессиан phi по (x, y).

    В пределах SINGULAR_RADIUS от центра возвращает нулевой градиент
    и отрицательно определенный суррогат гессиана с флагом singular.
    """
    sx2 = ellipse.sigma_x ** 2
    sy2 = ellipse.sigma_y ** 2
    a = x - ellipse.center_x
    b = y - ellipse.center_y

    if math.hypot(a, b) < SINGULAR_RADIUS:
        logger.debug(f"Вычисление потенциала в центре эллипса {ellipse.obstacle_id}")
        return PotentialDerivatives(
            np.zeros(2),
            np.diag([-1.0 / sx2, -1.0 / sy2]),
            True,
        )

    r = _normalized_radius(a, b, ellipse.sigma_x, ellipse.sigma_y)
    value = math.exp(-r)
    grad_r = np.array([a / (sx2 * r), b / (sy2 * r)])
    r3 = r ** 3
    hess_r = np.array([
        [1.0 / (sx2 * r) - a * a / (sx2 * sx2 * r3), -a * b / (sx2 * sy2 * r3)],
        [-a * b / (sx2 * sy2 * r3), 1.0 / (sy2 * r) - b * b / (sy2 * sy2 * r3)],
    ])
    gradient = -value * grad_r
    hessian = value * (np.outer(grad_r, grad_r) - hess_r)
    return PotentialDerivatives(gradient, 0.5 * (hessian + hessian.T), False)
