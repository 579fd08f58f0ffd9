"""
Проверка безопасности оптимизированной траектории.

На горизонте проверки M = ⌊T_v / T⌋ шагов препятствия предсказываются
моделью постоянной скорости. Жесткие нарушения (пересечение габаритов,
выход за дорогу) делают траекторию небезопасной (unsafe), мягкие
(малое TTC, малый боковой зазор) переводят её в категорию высокого риска.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Protocol, Sequence, Tuple

import numpy as np

from common.utils import ConfigUtils
from .dynamics import RoadGeometry, VehicleParams
from .exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

ROAD_TOLERANCE = 1e-9

COLLISION = 'collision'
BOUNDARY = 'boundary'
TTC = 'ttc'
LATERAL = 'lateral'


class ObstacleLike(Protocol):
    id: str
    x: float
    y: float
    length: float
    width: float
    v_x: float
    v_y: float


@dataclass(frozen=True)
class SafetyConfig:
    """Горизонт проверки T_v и пороги TTC_min, d_lat_min"""

    horizon: float = 3.0
    ttc_min: float = 2.0
    d_lat_min: float = 0.5
    T: float = 0.1

    def __post_init__(self):
        if min(self.horizon, self.ttc_min, self.d_lat_min, self.T) <= 0:
            raise InvalidArgumentError("Параметры проверки безопасности должны быть положительными")

    @property
    def steps(self) -> int:
        """M = ⌊T_v / T⌋"""
        return int(math.floor(self.horizon / self.T + 1e-9))

    @classmethod
    def from_settings(cls, **overrides) -> 'SafetyConfig':
        return ConfigUtils.build(cls, 'SAFETY', **overrides)


@dataclass(frozen=True)
class BoundingBox:
    """Замкнутый прямоугольник, выровненный по осям дороги"""

    center_x: float
    center_y: float
    half_length: float
    half_width: float

    def __post_init__(self):
        if self.half_length <= 0 or self.half_width <= 0:
            raise InvalidArgumentError("Полуразмеры прямоугольника должны быть положительными")

    @classmethod
    def from_dimensions(cls, x: float, y: float, length: float, width: float) -> 'BoundingBox':
        return cls(float(x), float(y), length / 2.0, width / 2.0)

    @property
    def x_min(self) -> float:
        return self.center_x - self.half_length

    @property
    def x_max(self) -> float:
        return self.center_x + self.half_length

    @property
    def y_min(self) -> float:
        return self.center_y - self.half_width

    @property
    def y_max(self) -> float:
        return self.center_y + self.half_width

    def overlaps_longitudinally(self, other: 'BoundingBox') -> bool:
        return self.x_min <= other.x_max and other.x_min <= self.x_max

    def overlaps_laterally(self, other: 'BoundingBox') -> bool:
        return self.y_min <= other.y_max and other.y_min <= self.y_max


@dataclass(frozen=True)
class SafetyViolation:
    step: int
    obstacle_id: Optional[str]
    kind: str


@dataclass(frozen=True, eq=False)
class SafetyReport:
    """
    Флаги по шагам m = 1..M (строка m-1) и препятствиям (столбец j).
    """

    obstacle_ids: Tuple[str, ...]
    collision: np.ndarray
    ttc_violation: np.ndarray
    lateral_violation: np.ndarray
    boundary: np.ndarray
    first_violation: Optional[SafetyViolation] = None
    min_ttc: float = field(default=math.inf)

    @property
    def steps(self) -> int:
        return int(self.boundary.shape[0])

    @property
    def unsafe(self) -> bool:
        return bool(self.collision.any() or self.boundary.any())

    @property
    def high_risk(self) -> bool:
        return bool(self.ttc_violation.any() or self.lateral_violation.any())

    @property
    def passed(self) -> bool:
        return not (self.unsafe or self.high_risk)

    @property
    def verdict(self) -> str:
        if self.unsafe:
            return 'unsafe'
        if self.high_risk:
            return 'high_risk'
        return 'safe'

    def flagged_obstacles(self) -> Tuple[str, ...]:
        """Идентификаторы препятствий с любым нарушением"""
        if not self.obstacle_ids:
            return ()
        flags = (self.collision | self.ttc_violation | self.lateral_violation).any(axis=0)
        return tuple(obstacle_id for obstacle_id, flag in zip(self.obstacle_ids, flags) if flag)

    def to_record(self) -> Dict[str, Any]:
        first = self.first_violation
        return {
            'verdict': self.verdict,
            'unsafe': self.unsafe,
            'high_risk': self.high_risk,
            'flagged': list(self.flagged_obstacles()),
            'boundary_steps': [int(m) + 1 for m in np.flatnonzero(self.boundary)],
            'first_violation': None if first is None else {
                'step': first.step,
                'obstacle_id': first.obstacle_id,
                'kind': first.kind,
            },
            'min_ttc': self.min_ttc if math.isfinite(self.min_ttc) else None,
        }


def predict_obstacle(position, velocity, m: int, T: float) -> np.ndarray:
    """Положение препятствия через m шагов при постоянной скорости"""
    return np.asarray(position, dtype=float) + m * T * np.asarray(velocity, dtype=float)


def boxes_intersect(a: BoundingBox, b: BoundingBox) -> bool:
    return a.overlaps_longitudinally(b) and a.overlaps_laterally(b)


def ttc(ego_x: float, ego_v_x: float, ego_half_len: float,
        obs_x: float, obs_v_x: float, obs_half_len: float) -> float:
    """
    Время до столкновения с препятствием впереди: зазор между бамперами,
    деленный на скорость сближения; бесконечность, если сближения нет.
    """
    d_lon = (obs_x - obs_half_len) - (ego_x + ego_half_len)
    closing = ego_v_x - obs_v_x
    if closing <= 0:
        return math.inf
    return max(d_lon, 0.0) / closing


def lateral_clearance(ego_y: float, obs_y: float, W_ego: float, W_j: float) -> float:
    return abs(ego_y - obs_y) - (W_ego + W_j) / 2.0


def verify(trajectory: np.ndarray, obstacles: Sequence[ObstacleLike], road: RoadGeometry,
           config: Optional[SafetyConfig] = None, params: Optional[VehicleParams] = None) -> SafetyReport:
    """
    Проверка траектории эго на горизонте M шагов.

    Боковой зазор проверяется только для препятствий, перекрывающихся
    с эго по продольной оси; TTC только для препятствий впереди,
    перекрывающихся по боковой оси.

    Raises:
        InvalidArgumentError: траектория короче M + 1 состояний
    """
    config = config or SafetyConfig()
    params = params or VehicleParams()
    trajectory = np.asarray(trajectory, dtype=float)
    M = config.steps
    if trajectory.ndim != 2 or trajectory.shape[0] < M + 1:
        raise InvalidArgumentError(
            f"Траектория должна содержать не менее {M + 1} состояний, получено {trajectory.shape}"
        )

    N = len(obstacles)
    collision = np.zeros((M, N), dtype=bool)
    ttc_violation = np.zeros((M, N), dtype=bool)
    lateral_violation = np.zeros((M, N), dtype=bool)
    boundary = np.zeros(M, dtype=bool)
    first_hard = None
    first_margin = None
    min_ttc = math.inf

    ego_half_len = params.length / 2.0
    for m in range(1, M + 1):
        x, y, v_x, _ = trajectory[m]
        ego_box = BoundingBox.from_dimensions(x, y, params.length, params.width)

        if ego_box.y_min < -ROAD_TOLERANCE or ego_box.y_max > road.r_w + ROAD_TOLERANCE:
            boundary[m - 1] = True
            if first_hard is None:
                first_hard = SafetyViolation(m, None, BOUNDARY)

        for j, obstacle in enumerate(obstacles):
            px, py = predict_obstacle((obstacle.x, obstacle.y), (obstacle.v_x, obstacle.v_y), m, config.T)
            box = BoundingBox.from_dimensions(px, py, obstacle.length, obstacle.width)

            if boxes_intersect(ego_box, box):
                collision[m - 1, j] = True
                if first_hard is None:
                    first_hard = SafetyViolation(m, obstacle.id, COLLISION)

            if ego_box.overlaps_longitudinally(box):
                if lateral_clearance(y, py, params.width, obstacle.width) < config.d_lat_min:
                    lateral_violation[m - 1, j] = True
                    if first_margin is None:
                        first_margin = SafetyViolation(m, obstacle.id, LATERAL)

            if px > x and ego_box.overlaps_laterally(box):
                value = ttc(x, v_x, ego_half_len, px, obstacle.v_x, box.half_length)
                min_ttc = min(min_ttc, value)
                if value < config.ttc_min:
                    ttc_violation[m - 1, j] = True
                    if first_margin is None:
                        first_margin = SafetyViolation(m, obstacle.id, TTC)

    return SafetyReport(
        obstacle_ids=tuple(str(obstacle.id) for obstacle in obstacles),
        collision=collision,
        ttc_violation=ttc_violation,
        lateral_violation=lateral_violation,
        boundary=boundary,
        first_violation=first_hard or first_margin,
        min_ttc=min_ttc,
    )
