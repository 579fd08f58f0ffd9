"""
Метрики эпизода эго по записям трассы
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)

# Ниже этой скорости временной интервал не определен
MIN_HEADWAY_SPEED = 0.1


@dataclass
class MetricsSummary:
    episode: int
    complete: bool
    collision: bool
    travel_time: Optional[float]
    mean_speed: Optional[float]
    time_headways: List[float] = field(default_factory=list)
    distance_headways: List[float] = field(default_factory=list)
    dangerous_incidents: int = 0
    cycles: int = 0
    solver_invocations: int = 0
    solve_iterations: int = 0
    emergencies: int = 0

    @property
    def mean_time_headway(self) -> Optional[float]:
        if not self.time_headways:
            return None
        return sum(self.time_headways) / len(self.time_headways)

    @property
    def mean_iterations(self) -> Optional[float]:
        if not self.solver_invocations:
            return None
        return self.solve_iterations / self.solver_invocations

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record['mean_time_headway'] = self.mean_time_headway
        record['mean_iterations'] = self.mean_iterations
        return record


def crossing_time(cycles: Sequence[Dict[str, Any]], target_x: float) -> Optional[float]:
    """Момент пересечения x = target_x (линейная интерполяция между циклами)"""
    previous = None
    for record in cycles:
        x = record['ego']['x']
        if x >= target_x:
            if previous is None:
                return record['time']
            x0, t0 = previous['ego']['x'], previous['time']
            if x == x0:
                return record['time']
            return t0 + (target_x - x0) / (x - x0) * (record['time'] - t0)
        previous = record
    return None


def collect_metrics(cycles: Sequence[Dict[str, Any]], segment_length: float,
                    warmup: float = 0.0, episode: int = 0) -> MetricsSummary:
    """
    Сводка эпизода: время проезда участка, средняя скорость, интервалы
    до лидера, столкновение и число циклов высокого риска.
    Циклы до окончания прогрева не учитываются.
    """
    cycles = [record for record in cycles if record['time'] >= warmup - 1e-9]
    if not cycles:
        return MetricsSummary(episode=episode, complete=False, collision=False, travel_time=None, mean_speed=None)

    start = cycles[0]
    collision = any(record.get('collision') for record in cycles)
    finish = None if collision else crossing_time(cycles, start['ego']['x'] + segment_length)

    if finish is not None:
        travel_time = finish - start['time']
        mean_speed = segment_length / travel_time if travel_time > 0 else None
    else:
        travel_time = None
        elapsed = cycles[-1]['time'] - start['time']
        mean_speed = (cycles[-1]['ego']['x'] - start['ego']['x']) / elapsed if elapsed > 0 else None

    summary = MetricsSummary(
        episode=episode,
        complete=finish is not None,
        collision=collision,
        travel_time=travel_time,
        mean_speed=mean_speed,
        cycles=len(cycles),
    )
    for record in cycles:
        leader = record.get('leader')
        speed = record['ego']['v_x']
        if leader is not None and speed > MIN_HEADWAY_SPEED:
            summary.time_headways.append(leader['gap'] / speed)
            summary.distance_headways.append(leader['gap'])
        telemetry = record.get('telemetry')
        if telemetry is None:
            continue
        safety = telemetry.get('safety') or {}
        if safety.get('high_risk'):
            summary.dangerous_incidents += 1
        summary.solver_invocations += telemetry.get('solves', 0)
        summary.solve_iterations += telemetry.get('solve_iterations', 0)
        if telemetry.get('emergency'):
            summary.emergencies += 1

    if not summary.complete:
        logger.info(f"Эпизод {episode} не завершен (столкновение: {collision})")
    return summary
