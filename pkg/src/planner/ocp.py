"""
Задача оптимального управления на конечном горизонте.

Стоимость шага:
    L = p1·u_x² + p2·u_y² + p3·(v_x - v_des)² + p4·v_y² + Σ λ_i·phi_i
Терминальной стоимости нет.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from common.utils import ConfigUtils
from . import dynamics
from .dynamics import CONTROL_DIM, STATE_DIM, ControlInput, RoadGeometry, VehicleParams, VehicleState
from .exceptions import InvalidArgumentError
from .potential import ObstacleEllipse, phi_derivatives, phi_with_sigma

logger = logging.getLogger(__name__)

StateLike = Union[VehicleState, np.ndarray, Sequence[float]]
ControlLike = Union[ControlInput, np.ndarray, Sequence[float]]


@dataclass(frozen=True)
class CostWeights:
    """Веса стоимости шага и желаемая скорость"""

    p1: float = 0.5
    p2: float = 0.5
    p3: float = 1.0
    p4: float = 2.0
    v_des: float = 15.0

    def __post_init__(self):
        weights = (self.p1, self.p2, self.p3, self.p4)
        if min(weights) < 0 or max(weights) <= 0:
            raise InvalidArgumentError(f"Веса должны быть неотрицательны и не все нулевые: {weights}")

    def with_v_des(self, v_des: float) -> 'CostWeights':
        return replace(self, v_des=float(v_des))

    @classmethod
    def from_settings(cls, **overrides) -> 'CostWeights':
        return ConfigUtils.build(cls, 'COST', **overrides)


@dataclass(frozen=True)
class OcpProblem:
    """Неизменяемая постановка задачи на горизонте K шагов"""

    horizon: int
    initial_state: VehicleState
    weights: CostWeights
    obstacles: Tuple[Tuple[ObstacleEllipse, ...], ...]
    params: VehicleParams = field(default_factory=VehicleParams)
    road: RoadGeometry = field(default_factory=RoadGeometry)

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidArgumentError(f"Горизонт должен быть не меньше 1, получено {self.horizon}")
        if len(self.obstacles) != self.horizon:
            raise InvalidArgumentError(
                f"Число наборов препятствий ({len(self.obstacles)}) не равно горизонту ({self.horizon})"
            )

    @classmethod
    def create(cls, horizon: int, initial_state: VehicleState, weights: CostWeights,
               obstacles: Optional[Iterable[Iterable[ObstacleEllipse]]] = None,
               params: Optional[VehicleParams] = None,
               road: Optional[RoadGeometry] = None) -> 'OcpProblem':
        """Удобный конструктор: obstacles=None означает дорогу без препятствий"""
        if obstacles is None:
            per_step = tuple(() for _ in range(horizon))
        else:
            per_step = tuple(tuple(step) for step in obstacles)
        return cls(
            horizon=horizon,
            initial_state=initial_state,
            weights=weights,
            obstacles=per_step,
            params=params or VehicleParams(),
            road=road or RoadGeometry(),
        )

    @property
    def x0(self) -> np.ndarray:
        return self.initial_state.as_array()

    @property
    def T(self) -> float:
        return self.params.T

    def scale_weights(self, obstacle_ids: Iterable[str], factor: float) -> 'OcpProblem':
        """Копия задачи с умноженными весами λ у указанных препятствий"""
        flagged = set(obstacle_ids)
        scaled = tuple(
            tuple(e.scaled(factor) if e.obstacle_id in flagged else e for e in step)
            for step in self.obstacles
        )
        return replace(self, obstacles=scaled)


class StageDerivatives(NamedTuple):
    L_x: np.ndarray
    L_u: np.ndarray
    L_xx: np.ndarray
    L_uu: np.ndarray
    L_ux: np.ndarray
    singular: bool


def _state_array(state: StateLike) -> np.ndarray:
    if isinstance(state, VehicleState):
        return state.as_array()
    return np.asarray(state, dtype=float)


def _control_array(u: ControlLike) -> np.ndarray:
    if isinstance(u, ControlInput):
        return u.as_array()
    return np.asarray(u, dtype=float)


def _check_step(problem: OcpProblem, k: int) -> None:
    if not 0 <= k < problem.horizon:
        raise InvalidArgumentError(f"Шаг {k} вне горизонта [0, {problem.horizon})")


def stage_cost(problem: OcpProblem, k: int, state: StateLike, u: ControlLike) -> float:
    """
    Стоимость шага k в точке (state, u).

    σ_x эллипсов с временным интервалом пересчитывается по самой точке
    state, а stage_cost_derivatives фиксирует ее в номинальной точке.
    Значения совпадают в номинальной точке; при пробном шаге прямого
    прохода с другим v_x (или со сменой стороны относительно препятствия)
    стоимость отличается от модели, по которой построен шаг.
    """
    _check_step(problem, k)
    x = _state_array(state)
    u = _control_array(u)
    w = problem.weights
    cost = (
        w.p1 * u[0] ** 2
        + w.p2 * u[1] ** 2
        + w.p3 * (x[2] - w.v_des) ** 2
        + w.p4 * x[3] ** 2
    )
    for ellipse in problem.obstacles[k]:
        sigma_x = ellipse.resolved_sigma_x(x[0], x[2])
        cost += ellipse.weight * phi_with_sigma(ellipse, x[0], x[1], sigma_x)
    return float(cost)


def stage_cost_derivatives(problem: OcpProblem, k: int, state: StateLike,
                           u: ControlLike) -> StageDerivatives:
    """
    Аналитические производные стоимости шага.
    σ_x эллипсов с временным интервалом фиксируется в точке state,
    поэтому производные по v_x не содержат вклада потенциала
    (см. stage_cost).
    """
    _check_step(problem, k)
    x = _state_array(state)
    u = _control_array(u)
    w = problem.weights

    L_x = np.array([0.0, 0.0, 2.0 * w.p3 * (x[2] - w.v_des), 2.0 * w.p4 * x[3]])
    L_u = np.array([2.0 * w.p1 * u[0], 2.0 * w.p2 * u[1]])
    L_xx = np.diag([0.0, 0.0, 2.0 * w.p3, 2.0 * w.p4])
    L_uu = np.diag([2.0 * w.p1, 2.0 * w.p2])
    L_ux = np.zeros((CONTROL_DIM, STATE_DIM))

    singular = False
    for ellipse in problem.obstacles[k]:
        frozen = ellipse.frozen_at(x[0], x[2])
        derivatives = phi_derivatives(frozen, x[0], x[1])
        L_x[:2] += frozen.weight * derivatives.gradient
        L_xx[:2, :2] += frozen.weight * derivatives.hessian
        singular = singular or derivatives.singular

    return StageDerivatives(L_x, L_u, L_xx, L_uu, L_ux, singular)


def total_cost(problem: OcpProblem, states: np.ndarray, controls: np.ndarray) -> float:
    """Сумма стоимостей шагов k = 0..K-1"""
    states = np.asarray(states, dtype=float)
    controls = np.asarray(controls, dtype=float)
    K = problem.horizon
    if controls.shape != (K, CONTROL_DIM) or states.shape != (K + 1, STATE_DIM):
        raise InvalidArgumentError(
            f"Несогласованные размеры: states {states.shape}, controls {controls.shape}, K={K}"
        )
    return float(sum(stage_cost(problem, k, states[k], controls[k]) for k in range(K)))


def rollout(problem: OcpProblem, controls: np.ndarray) -> np.ndarray:
    return dynamics.rollout(problem.x0, controls, problem.T)
