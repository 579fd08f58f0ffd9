"""
Адаптер внешней модели восприятия.

Ответ модели - JSON со списком записей (или объект с ключом "vehicles"):
    {"id": ..., "x_m": ..., "y_m": ..., "length_m": ..., "width_m": ..., "confidence": ...}
Объект может содержать опорные точки для начального приближения:
    "waypoints": [{"t_s": ..., "x_m": ..., "y_m": ...}, ...]
с t_s от момента кадра.
При нарушении формата запрос повторяется (не более max_attempts раз),
после чего возвращается предыдущий кадр с флагом fallback_used.
"""

import json
import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
import requests

from planner.dynamics import RoadGeometry, VehicleState
from ..exceptions import ExternalFormatError, ExternalUnavailableError
from ..tracking import TrackMemory
from ..types import ObservationSet, ObstacleObservation, PerceptionConfig
from .base import BaseProvider, WorldView

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ('id', 'x_m', 'y_m', 'length_m', 'width_m', 'confidence')
WAYPOINT_KEYS = ('t_s', 'x_m', 'y_m')


def _number(record: dict, key: str) -> float:
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ExternalFormatError(f"Поле {key} должно быть конечным числом, получено {value!r}")
    return float(value)


def parse_waypoints(raw_points, timestamp: float) -> Tuple[Tuple[float, float, float], ...]:
    """
    Опорные точки ответа в абсолютном времени (t = timestamp + t_s).

    Raises:
        ExternalFormatError: меньше двух точек, нарушена схема или t_s не возрастает
    """
    if not isinstance(raw_points, list) or len(raw_points) < 2:
        raise ExternalFormatError("waypoints должен быть списком из двух и более точек")
    points = []
    for point in raw_points:
        if not isinstance(point, dict) or any(key not in point for key in WAYPOINT_KEYS):
            raise ExternalFormatError(f"Опорная точка должна содержать t_s, x_m, y_m: {point!r}")
        points.append(tuple(_number(point, key) for key in WAYPOINT_KEYS))
    times = [point[0] for point in points]
    if times[0] < 0 or any(later <= earlier for earlier, later in zip(times, times[1:])):
        raise ExternalFormatError("t_s опорных точек должно быть неотрицательным и строго возрастать")
    return tuple((timestamp + t, x, y) for t, x, y in points)


def waypoint_reference(observations: ObservationSet) -> Optional[np.ndarray]:
    """
    Опорные точки кадра в виде строк (t, x, y) с t от момента
    observations.timestamp. None, если точек нет или все они в прошлом.
    """
    if observations.waypoints is None:
        return None
    reference = np.array(observations.waypoints, dtype=float)
    reference[:, 0] -= observations.timestamp
    if reference[-1, 0] <= 0:
        return None
    return reference


def parse_external(raw: str, timestamp: float, road: RoadGeometry,
                   tracks: Optional[TrackMemory] = None, n_max: int = 15) -> ObservationSet:
    """
    Разбор текстового ответа внешней модели.

    Raises:
        ExternalFormatError: ответ не JSON или запись не соответствует схеме
    """
    try:
        payload = json.loads(raw)
    except (TypeError, ValueError) as exc:
        raise ExternalFormatError(f"Ответ не является JSON: {exc}") from exc

    waypoints = None
    if isinstance(payload, dict):
        if payload.get('waypoints') is not None:
            waypoints = parse_waypoints(payload['waypoints'], timestamp)
        payload = payload.get('vehicles')
    if not isinstance(payload, list):
        raise ExternalFormatError("Ожидался список записей или объект с ключом 'vehicles'")

    records = []
    for record in payload:
        if not isinstance(record, dict):
            raise ExternalFormatError(f"Запись должна быть объектом: {record!r}")
        missing = [key for key in REQUIRED_KEYS if key not in record]
        if missing:
            raise ExternalFormatError(f"В записи отсутствуют ключи: {', '.join(missing)}")
        length = _number(record, 'length_m')
        width = _number(record, 'width_m')
        confidence = _number(record, 'confidence')
        if length <= 0 or width <= 0:
            raise ExternalFormatError(f"Неположительные габариты в записи {record['id']}")
        if not 0 <= confidence <= 1:
            raise ExternalFormatError(f"confidence вне [0, 1] в записи {record['id']}")
        records.append((str(record['id']), _number(record, 'x_m'), _number(record, 'y_m'),
                        length, width, confidence))

    # самые уверенные кандидаты кадра
    records.sort(key=lambda item: (-item[5], item[0]))
    records = records[:n_max]

    observations = []
    for obstacle_id, x, y, length, width, confidence in records:
        if tracks is not None:
            estimate = tracks.update(obstacle_id, timestamp, (x, y))
            v_x, v_y = (float(value) for value in estimate.velocity)
            cold_start = estimate.cold_start
        else:
            v_x = v_y = 0.0
            cold_start = True
        observations.append(ObstacleObservation(
            id=obstacle_id, x=x, y=y, length=length, width=width,
            v_x=v_x, v_y=v_y, lane_index=road.lane_of(y),
            confidence=confidence, cold_start=cold_start,
        ))
    observations.sort(key=lambda observation: (observation.x, observation.id))
    return ObservationSet(timestamp=timestamp, observations=tuple(observations), source='external', n_max=n_max,
                          waypoints=waypoints)


def adapt_external(fetch: Callable[[int], str], previous: ObservationSet, timestamp: float,
                   road: RoadGeometry, tracks: Optional[TrackMemory] = None,
                   max_attempts: int = 2, n_max: int = 15) -> ObservationSet:
    """
    Запрашивает и разбирает ответ с повтором при ошибке формата.

    Args:
        fetch: Функция получения сырого ответа; аргумент - номер попытки с 1
        previous: Кадр, возвращаемый при исчерпании попыток
    """
    for attempt in range(1, max_attempts + 1):
        try:
            return parse_external(fetch(attempt), timestamp, road, tracks=tracks, n_max=n_max)
        except ExternalFormatError as exc:
            logger.warning(f"Попытка {attempt}/{max_attempts}: ответ модели отклонен ({exc})")
        except ExternalUnavailableError as exc:
            logger.warning(f"Внешняя модель недоступна: {exc}")
            break
    return previous.as_fallback(timestamp)


class ExternalProvider(BaseProvider):
    """Наблюдения от внешней модели по HTTP (блокирующий вызов с таймаутом)"""

    source = 'external'

    def __init__(self, config: Optional[PerceptionConfig] = None, road: Optional[RoadGeometry] = None,
                 session: Optional[requests.Session] = None):
        super().__init__(config=config or PerceptionConfig.from_settings(), road=road)
        self.session = session or requests.Session()
        self.tracks = TrackMemory()
        self.previous = ObservationSet(timestamp=0.0, source=self.source, n_max=self.config.n_max)

    def reset(self) -> None:
        self.tracks.reset()
        self.previous = ObservationSet(timestamp=0.0, source=self.source, n_max=self.config.n_max)

    def _headers(self) -> dict:
        headers = {'Content-Type': 'application/json'}
        if self.config.vlm_key:
            headers['Authorization'] = f'Bearer {self.config.vlm_key}'
        return headers

    def request(self, payload: dict, attempt: int) -> str:
        if not self.config.vlm_url:
            raise ExternalUnavailableError("Не задан VISIOPATH_VLM_URL")
        try:
            response = self.session.post(
                self.config.vlm_url,
                json={**payload, 'attempt': attempt},
                headers=self._headers(),
                timeout=self.config.vlm_timeout,
            )
            response.raise_for_status()
        except requests.RequestException as exc:
            raise ExternalUnavailableError(str(exc)) from exc
        return response.text

    def observe(self, world: WorldView, ego_id: str) -> ObservationSet:
        ego = world.vehicles.get(ego_id)
        payload = {
            'timestamp': world.time,
            'ego': None if ego is None else {'x_m': ego.x, 'y_m': ego.y, 'v_x': ego.v_x},
            'max_candidates': self.config.n_max,
        }
        result = adapt_external(
            lambda attempt: self.request(payload, attempt),
            previous=self.previous,
            timestamp=world.time,
            road=self.road_of(world),
            tracks=self.tracks,
            max_attempts=self.config.max_attempts,
            n_max=self.config.n_max,
        )
        if not result.fallback_used:
            self.previous = result
        return result

    def reference_waypoints(self, ego: VehicleState, observations: ObservationSet,
                            v_des: float) -> Optional[np.ndarray]:
        """Опорная траектория для MPC из последнего ответа модели"""
        return waypoint_reference(observations)
