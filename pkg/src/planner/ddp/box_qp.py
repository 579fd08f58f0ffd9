"""
Малая QP с box-ограничениями для обратного прохода:

    min ½ δuᵀ H δu + gᵀ δu,   lower ≤ δu ≤ upper

Прямой метод активного множества: ньютоновский шаг на свободном
подпространстве, тест отношения при упоре в границу, проверка знака
множителей Лагранжа для освобождения компонент.
"""

import logging
from typing import NamedTuple

import numpy as np

from ..exceptions import BackwardPassError, InvalidArgumentError

logger = logging.getLogger(__name__)

MAX_ACTIVE_SET_CHANGES = 20

_FIXED_TOLERANCE = 1e-12
_STEP_TOLERANCE = 1e-14
_MULTIPLIER_TOLERANCE = 1e-12


class BoxQPResult(NamedTuple):
    delta_u: np.ndarray
    free_inverse: np.ndarray
    active_set: np.ndarray
    multipliers: np.ndarray
    changes: int


def _free_factor(H: np.ndarray, free: np.ndarray) -> np.ndarray:
    """Разложение Холецкого свободного блока"""
    block = H[np.ix_(free, free)]
    try:
        return np.linalg.cholesky(block)
    except np.linalg.LinAlgError as exc:
        raise BackwardPassError("Гессиан не положительно определен на свободном подпространстве") from exc


def _solve_factor(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return np.linalg.solve(L.T, np.linalg.solve(L, rhs))


def _side_multipliers(active: np.ndarray, grad: np.ndarray) -> np.ndarray:
    multipliers = np.zeros_like(grad)
    multipliers[active < 0] = grad[active < 0]
    multipliers[active > 0] = -grad[active > 0]
    return multipliers


def solve_box_qp(Q_uu: np.ndarray, Q_u: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                 max_changes: int = MAX_ACTIVE_SET_CHANGES) -> BoxQPResult:
    """
    Решение QP с box-ограничениями.

    Returns:
        BoxQPResult: решение, обратная матрица свободного блока
        (нули в строках и столбцах активных компонент), флаги активности
        и множители Лагранжа.

    Raises:
        BackwardPassError: свободный блок не положительно определен
            или превышен лимит смен активного множества
        InvalidArgumentError: lower > upper
    """
    H = np.asarray(Q_uu, dtype=float)
    g = np.asarray(Q_u, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = g.shape[0]

    if np.any(lower > upper + _FIXED_TOLERANCE):
        raise InvalidArgumentError(f"Нижняя граница выше верхней: {lower} > {upper}")

    fixed = (upper - lower) <= _FIXED_TOLERANCE
    x = np.clip(np.zeros(n), lower, upper)

    active = np.zeros(n, dtype=int)
    active[x <= lower] = -1
    active[(x >= upper) & (active == 0)] = 1
    grad = g + H @ x
    for i in np.flatnonzero(fixed):
        x[i] = lower[i]
        active[i] = -1 if grad[i] >= 0 else 1

    changes = 0
    while True:
        free = active == 0
        grad = g + H @ x

        step = np.zeros(n)
        if np.any(free):
            factor = _free_factor(H, free)
            step[free] = -_solve_factor(factor, grad[free])

        if np.linalg.norm(step) <= _STEP_TOLERANCE * (1.0 + np.linalg.norm(x)):
            multipliers = _side_multipliers(active, grad)
            multipliers[fixed] = 0.0
            candidates = np.flatnonzero((active != 0) & ~fixed & (multipliers < -_MULTIPLIER_TOLERANCE))
            if candidates.size == 0:
                break
            release = candidates[np.argmin(multipliers[candidates])]
            active[release] = 0
        else:
            alpha = 1.0
            blocking = None
            blocking_side = 0
            for i in np.flatnonzero(free):
                if step[i] < 0:
                    ratio = (lower[i] - x[i]) / step[i]
                    side = -1
                elif step[i] > 0:
                    ratio = (upper[i] - x[i]) / step[i]
                    side = 1
                else:
                    continue
                if ratio < alpha:
                    alpha, blocking, blocking_side = ratio, i, side
            x = x + max(alpha, 0.0) * step
            if blocking is None:
                continue
            x[blocking] = lower[blocking] if blocking_side < 0 else upper[blocking]
            active[blocking] = blocking_side

        changes += 1
        if changes > max_changes:
            raise BackwardPassError(f"Превышен лимит смен активного множества ({max_changes})")

    free = active == 0
    free_inverse = np.zeros((n, n))
    if np.any(free):
        factor = _free_factor(H, free)
        free_inverse[np.ix_(free, free)] = _solve_factor(factor, np.eye(int(free.sum())))

    grad = g + H @ x
    multipliers = _side_multipliers(active, grad)
    return BoxQPResult(x, free_inverse, active, np.maximum(multipliers, 0.0), changes)
