"""
Событийные триггеры перепланирования и приоритизация препятствий
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from perception.types import ObservationSet, ObstacleObservation
from ..exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

TIME_TOLERANCE = 1e-9

HORIZON = 'horizon'
NEW_OBSTACLE = 'new_obstacle'
DEVIATION = 'deviation'
LANE_CHANGE = 'lane_change'

# Штраф для препятствий позади эго
BEHIND_OFFSET = 1000.0


class TriggerDecision(NamedTuple):
    replan: bool
    fired: Tuple[str, ...]
    suppressed: bool


@dataclass
class TriggerState:
    """
    Состояние триггеров: время последнего перепланирования, предыдущий
    кадр и состояния препятствий на момент последнего перепланирования.
    """

    horizon: float = 3.0
    dt_min: float = 1.0
    deviation_threshold: float = 2.0
    t_last: float = -math.inf
    previous: Optional[ObservationSet] = None
    anchors: Dict[str, Tuple[float, float, float, float]] = field(default_factory=dict)
    previous_lanes: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.dt_min <= 0 or self.horizon <= 0:
            raise InvalidArgumentError("dt_min и горизонт должны быть положительными")

    def record_replan(self, now: float, observations: ObservationSet) -> None:
        self.t_last = now
        self.anchors = {o.id: (o.x, o.y, o.v_x, o.v_y) for o in observations}

    def advance(self, observations: ObservationSet) -> None:
        """Запоминает кадр текущего цикла для сравнения на следующем"""
        self.previous = observations
        self.previous_lanes = {o.id: o.lane_index for o in observations}

    def prediction_deviation(self, now: float, observations: ObservationSet) -> float:
        """Максимальное отклонение наблюдений от прогноза, сделанного при последнем перепланировании"""
        if not math.isfinite(self.t_last):
            return 0.0
        elapsed = now - self.t_last
        deviation = 0.0
        for observation in observations:
            anchor = self.anchors.get(observation.id)
            if anchor is None:
                continue
            x, y, v_x, v_y = anchor
            predicted = np.array([x + elapsed * v_x, y + elapsed * v_y])
            deviation = max(deviation, float(np.linalg.norm(np.array([observation.x, observation.y]) - predicted)))
        return deviation


def should_replan(now: float, trigger: TriggerState, current: ObservationSet) -> TriggerDecision:
    """
    Дизъюнкция четырех критериев: истечение горизонта, новое препятствие,
    отклонение от прогноза, смена полосы. Подавляется целиком,
    если с последнего перепланирования прошло меньше dt_min.
    """
    if now < trigger.t_last:
        raise InvalidArgumentError(f"Время идет назад: {now} < {trigger.t_last}")
    since = now - trigger.t_last
    fired: List[str] = []

    if since >= trigger.horizon - TIME_TOLERANCE:
        fired.append(HORIZON)
    previous_count = len(trigger.previous) if trigger.previous is not None else 0
    if len(current) > previous_count:
        fired.append(NEW_OBSTACLE)
    if trigger.prediction_deviation(now, current) > trigger.deviation_threshold:
        fired.append(DEVIATION)
    if any(abs(o.lane_index - trigger.previous_lanes[o.id]) >= 1
           for o in current if o.id in trigger.previous_lanes):
        fired.append(LANE_CHANGE)

    suppressed = bool(fired) and since < trigger.dt_min - TIME_TOLERANCE
    if suppressed:
        logger.debug(f"t={now:.2f}: триггеры {fired} подавлены (прошло {since:.2f} с)")
    return TriggerDecision(bool(fired) and not suppressed, tuple(fired), suppressed)


def priority_score(ego_x: float, obstacle_x: float) -> float:
    offset = obstacle_x - ego_x
    return offset if offset >= 0 else offset - BEHIND_OFFSET


def prioritize(ego_x: float, observations, cap: int) -> List[ObstacleObservation]:
    """
    Ближайшие впереди первыми, находящиеся позади (оценка со сдвигом
    -1000) в конце, тоже от ближних к дальним; не более cap.
    """
    if cap < 1:
        raise InvalidArgumentError(f"cap должен быть не меньше 1, получено {cap}")

    def key(observation):
        score = priority_score(ego_x, observation.x)
        behind = score < 0
        return behind, abs(score + BEHIND_OFFSET) if behind else score, observation.id

    ordered = sorted(observations, key=key)
    return ordered[:cap]
