"""
Типы данных решателя DDP
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from common.utils import ConfigUtils
from ..exceptions import InvalidArgumentError


class SolverStatus(str, Enum):
    CONVERGED = 'converged'
    MAX_ITERATIONS = 'max_iterations'
    ILL_CONDITIONED = 'ill_conditioned'


@dataclass(frozen=True)
class SolverConfig:
    """
    Параметры решателя.

    Регуляризация μ растет в gamma раз при неудаче обратного прохода
    и уменьшается в gamma раз (не ниже mu_min) после принятого шага.
    Последний шаг роста обрезается до mu_max: лестница проходит значения
    mu_min * gamma^n < mu_max, и решатель останавливается с μ = mu_max,
    не решая задачу при этом значении.
    """

    mu_min: float = 1e-6
    mu_max: float = 1e6
    gamma: float = 5.0
    step_sizes: Tuple[float, ...] = (1.0, 0.5, 0.1, 0.05, 0.01)
    epsilon_1: float = 1e-3
    max_iterations: int = 100

    def __post_init__(self):
        if not 0 < self.mu_min < self.mu_max:
            raise InvalidArgumentError(f"Требуется 0 < mu_min < mu_max: {self.mu_min}, {self.mu_max}")
        if self.gamma <= 1:
            raise InvalidArgumentError(f"gamma должен быть больше 1, получено {self.gamma}")
        steps = tuple(float(alpha) for alpha in self.step_sizes)
        if not steps or steps[0] > 1 or steps[-1] <= 0 or any(a <= b for a, b in zip(steps, steps[1:])):
            raise InvalidArgumentError(f"Шаги должны строго убывать в (0, 1]: {steps}")
        if self.epsilon_1 <= 0 or self.max_iterations < 1:
            raise InvalidArgumentError("epsilon_1 и max_iterations должны быть положительными")
        object.__setattr__(self, 'step_sizes', steps)

    @classmethod
    def from_settings(cls, **overrides) -> 'SolverConfig':
        return ConfigUtils.build(cls, 'SOLVER', **overrides)


@dataclass(frozen=True)
class QCoefficients:
    """Квадратичная модель функции Q на одном шаге"""

    Q_x: np.ndarray
    Q_u: np.ndarray
    Q_xx: np.ndarray
    Q_ux: np.ndarray
    Q_uu: np.ndarray


@dataclass(frozen=True)
class FeedbackLaw:
    """
    Аффинный закон δu = k_ff + K_fb·δx.

    active_set: -1 (нижняя граница), +1 (верхняя), 0 (свободная компонента).
    Строки K_fb активных компонент нулевые; для них X хранит
    чувствительность границы к состоянию.
    """

    k_ff: np.ndarray
    K_fb: np.ndarray
    active_set: np.ndarray
    X: np.ndarray

    @property
    def clamped(self) -> np.ndarray:
        return self.active_set != 0


@dataclass(frozen=True)
class BackwardPassResult:
    laws: Tuple[FeedbackLaw, ...]
    coefficients: Tuple[QCoefficients, ...]
    V_x: np.ndarray
    V_xx: np.ndarray
    expected_linear: float
    expected_quadratic: float

    @property
    def feedforward_norm(self) -> float:
        return float(np.sqrt(sum(float(law.k_ff @ law.k_ff) for law in self.laws)))

    @property
    def active_count(self) -> int:
        return int(sum(int(np.count_nonzero(law.active_set)) for law in self.laws))

    def expected_improvement(self, alpha: float) -> float:
        return alpha * self.expected_linear + alpha * alpha * self.expected_quadratic


@dataclass(frozen=True)
class ForwardPassResult:
    states: np.ndarray
    controls: np.ndarray
    cost: float


@dataclass(frozen=True)
class IterationRecord:
    """Запись телеметрии одной итерации решателя"""

    iteration: int
    cost: float
    mu: float
    alpha: Optional[float]
    accepted: bool
    active_count: int
    expected_improvement: float

    def to_record(self) -> Dict[str, Any]:
        return {
            'iteration': self.iteration,
            'cost': self.cost,
            'mu': self.mu,
            'alpha': self.alpha,
            'accepted': self.accepted,
            'active_count': self.active_count,
            'expected_improvement': self.expected_improvement,
        }


@dataclass(frozen=True)
class SolverResult:
    controls: np.ndarray
    states: np.ndarray
    cost: float
    iterations: int
    status: SolverStatus
    final_mu: float
    cost_log: Tuple[float, ...] = ()
    mu_history: Tuple[float, ...] = ()
    trace: Tuple[IterationRecord, ...] = field(default=(), repr=False)

    @property
    def converged(self) -> bool:
        return self.status is SolverStatus.CONVERGED

    def to_record(self) -> Dict[str, Any]:
        return {
            'status': self.status.value,
            'iterations': self.iterations,
            'cost': self.cost,
            'final_mu': self.final_mu,
            'trace': [item.to_record() for item in self.trace],
        }
