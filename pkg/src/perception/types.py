"""
Структурированные наблюдения препятствий, передаваемые планировщику
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from common.utils import ConfigUtils
from .exceptions import InvalidObservationError

# Предельное число кандидатов в одном кадре
N_MAX = 15


@dataclass(frozen=True)
class PerceptionConfig:
    n_max: int = N_MAX
    sensing_range: float = 150.0
    vlm_url: str = ''
    vlm_key: str = ''
    vlm_timeout: float = 2.0
    max_attempts: int = 2

    def __post_init__(self):
        if self.n_max < 1 or self.sensing_range <= 0:
            raise InvalidObservationError("n_max и sensing_range должны быть положительными")
        if self.vlm_timeout <= 0 or self.max_attempts < 1:
            raise InvalidObservationError("Таймаут и число попыток должны быть положительными")

    @classmethod
    def from_settings(cls, **overrides) -> 'PerceptionConfig':
        return ConfigUtils.build(cls, 'PERCEPTION', **overrides)


@dataclass(frozen=True)
class ObstacleObservation:
    """Препятствие: центр, габариты, оценка скорости и полоса"""

    id: str
    x: float
    y: float
    length: float
    width: float
    v_x: float = 0.0
    v_y: float = 0.0
    lane_index: int = 0
    confidence: float = 1.0
    cold_start: bool = False

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise InvalidObservationError(
                f"Габариты препятствия {self.id} должны быть положительными: {self.length}×{self.width}"
            )
        if self.lane_index < 0:
            raise InvalidObservationError(f"Отрицательный индекс полосы у {self.id}")

    def to_record(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'x': self.x,
            'y': self.y,
            'length': self.length,
            'width': self.width,
            'v_x': self.v_x,
            'v_y': self.v_y,
            'lane_index': self.lane_index,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> 'ObstacleObservation':
        return cls(
            id=str(record['id']),
            x=float(record['x']),
            y=float(record['y']),
            length=float(record['length']),
            width=float(record['width']),
            v_x=float(record.get('v_x', 0.0)),
            v_y=float(record.get('v_y', 0.0)),
            lane_index=int(record.get('lane_index', 0)),
        )


@dataclass(frozen=True)
class ObservationSet:
    """Кадр наблюдений O_k (не более n_max препятствий)"""

    timestamp: float
    observations: Tuple[ObstacleObservation, ...] = ()
    fallback_used: bool = False
    source: str = 'ground_truth'
    n_max: int = N_MAX
    # опорные точки (t, x, y) от внешней модели, t - абсолютное время
    waypoints: Optional[Tuple[Tuple[float, float, float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'observations', tuple(self.observations))
        if self.waypoints is not None:
            object.__setattr__(self, 'waypoints', tuple(tuple(map(float, row)) for row in self.waypoints))
        if len(self.observations) > self.n_max:
            raise InvalidObservationError(
                f"Наблюдений больше допустимого: {len(self.observations)} > {self.n_max}"
            )

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def by_id(self) -> Dict[str, ObstacleObservation]:
        return {observation.id: observation for observation in self.observations}

    def as_fallback(self, timestamp: float) -> 'ObservationSet':
        """Тот же набор, помеченный как повторно использованный"""
        return ObservationSet(
            timestamp=timestamp,
            observations=self.observations,
            fallback_used=True,
            source=self.source,
            n_max=self.n_max,
            waypoints=self.waypoints,
        )

    def to_record(self) -> Dict[str, Any]:
        return {
            'timestamp': self.timestamp,
            'source': self.source,
            'fallback_used': self.fallback_used,
            'observations': [observation.to_record() for observation in self.observations],
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> 'ObservationSet':
        return cls(
            timestamp=float(record['timestamp']),
            observations=tuple(ObstacleObservation.from_record(item) for item in record.get('observations', [])),
            fallback_used=bool(record.get('fallback_used', False)),
            source=str(record.get('source', 'ground_truth')),
        )
