"""
Оценка скоростей препятствий по двум последовательным кадрам
"""

import logging
from typing import Dict, NamedTuple, Tuple

import numpy as np

from .exceptions import InvalidObservationError

logger = logging.getLogger(__name__)


class VelocityEstimate(NamedTuple):
    velocity: np.ndarray
    cold_start: bool


def estimate_velocity(p_now, p_prev, T: float) -> VelocityEstimate:
    """
    v = (p_k - p_{k-1}) / T.
    Для первого наблюдения трека (p_prev is None) скорость нулевая,
    оценка помечается как холодный старт.
    """
    if not T > 0:
        raise InvalidObservationError(f"Интервал T должен быть положительным, получено {T}")
    p_now = np.asarray(p_now, dtype=float)
    if p_prev is None:
        return VelocityEstimate(np.zeros_like(p_now), True)
    return VelocityEstimate((p_now - np.asarray(p_prev, dtype=float)) / T, False)


class TrackMemory:
    """Последние положения треков по идентификаторам"""

    def __init__(self):
        self._positions: Dict[str, Tuple[float, np.ndarray]] = {}

    def reset(self) -> None:
        self._positions.clear()

    def update(self, obstacle_id: str, timestamp: float, position) -> VelocityEstimate:
        """Оценивает скорость и запоминает новое положение трека"""
        position = np.asarray(position, dtype=float)
        previous = self._positions.get(obstacle_id)
        self._positions[obstacle_id] = (timestamp, position)
        if previous is None or timestamp <= previous[0]:
            return estimate_velocity(position, None, 1.0)
        return estimate_velocity(position, previous[1], timestamp - previous[0])

    def forget_missing(self, present_ids) -> None:
        present = set(present_ids)
        for obstacle_id in [key for key in self._positions if key not in present]:
            del self._positions[obstacle_id]
