"""
Конфигурация сценариев симуляции (YAML).

Схема файла:
    name: medium
    duration: 300.0            # с, полная длительность прогона
    warmup: 50.0               # с, только окружающий поток
    step: 0.1                  # с, период управления
    max_episodes: 1            # число эпизодов эго (null - без ограничения)
    road: {lane_width: 3.2, lane_count: 4, segment_length: 2000.0}
    ego: {lane: 1, speed: 15.0, x: 0.0}     # x задан - эго ставится явно
    vehicle_types: {<тип>: {length, width, speed_min, speed_max}}
    demand: {<тип>: <авт/ч>}
    traffic: {tau_follow: 1.2, standstill_gap: 2.0, spawn_gap: 15.0}
    vehicles: [{id, type, lane, x, speed, desired_speed}]
    maneuvers: [{vehicle, time, target_lane, duration}]
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from common.utils import ConfigUtils
from planner.dynamics import RoadGeometry
from planner.exceptions import InvalidArgumentError
from .exceptions import ScenarioConfigError

logger = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).resolve().parent / 'scenarios'


@dataclass(frozen=True)
class VehicleType:
    length: float
    width: float
    speed_min: float
    speed_max: float

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError("габариты должны быть положительными")
        if not 0 <= self.speed_min <= self.speed_max:
            raise ValueError("требуется 0 <= speed_min <= speed_max")


# Каталог типов по умолчанию: пять классов транспортного потока
DEFAULT_VEHICLE_TYPES: Dict[str, VehicleType] = {
    'medium_car': VehicleType(4.5, 1.8, 18.0, 26.0),
    'small_car': VehicleType(4.0, 1.7, 18.0, 27.0),
    'large_car': VehicleType(5.0, 1.9, 17.0, 25.0),
    'small_truck': VehicleType(6.5, 2.2, 15.0, 22.0),
    'large_truck': VehicleType(12.0, 2.5, 13.0, 20.0),
}


@dataclass(frozen=True)
class TrafficParams:
    """Параметры правила следования и появления автомобилей"""

    tau_follow: float = 1.2
    standstill_gap: float = 2.0
    spawn_gap: float = 15.0
    min_gap: float = 0.5
    max_accel: float = 2.0
    max_decel: float = 6.0
    k_free: float = 0.5
    k_gap: float = 0.2
    k_speed: float = 0.6

    def __post_init__(self):
        if min(self.tau_follow, self.spawn_gap, self.max_accel, self.max_decel) <= 0:
            raise ValueError("параметры потока должны быть положительными")
        if self.standstill_gap < 0 or self.min_gap < 0:
            raise ValueError("зазоры не могут быть отрицательными")


@dataclass(frozen=True)
class EgoSpec:
    lane: int = 1
    speed: float = 15.0
    x: Optional[float] = None


@dataclass(frozen=True)
class InitialVehicle:
    id: str
    type: str
    lane: int
    x: float
    speed: float
    desired_speed: Optional[float] = None


@dataclass(frozen=True)
class Maneuver:
    """Сценарная смена полосы: косинусный профиль за duration секунд"""

    vehicle: str
    time: float
    target_lane: int
    duration: float = 2.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    road: RoadGeometry
    duration: float
    warmup: float
    step: float = 0.1
    max_episodes: Optional[int] = 1
    ego: EgoSpec = field(default_factory=EgoSpec)
    vehicle_types: Dict[str, VehicleType] = field(default_factory=lambda: dict(DEFAULT_VEHICLE_TYPES))
    demand: Dict[str, float] = field(default_factory=dict)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    vehicles: Tuple[InitialVehicle, ...] = ()
    maneuvers: Tuple[Maneuver, ...] = ()
    path: Optional[str] = None

    def __post_init__(self):
        if not self.duration > self.warmup >= 0:
            raise InvalidArgumentError(f"Требуется duration > warmup >= 0: {self.duration}, {self.warmup}")
        if self.step <= 0:
            raise InvalidArgumentError("Шаг симуляции должен быть положительным")
        for type_name, flow in self.demand.items():
            if flow < 0:
                raise InvalidArgumentError(f"Отрицательный поток для {type_name}")
            if type_name not in self.vehicle_types:
                raise InvalidArgumentError(f"Поток задан для неизвестного типа {type_name}")

    @property
    def segment_length(self) -> float:
        return self.road.segment_length

    @property
    def total_flow(self) -> float:
        return float(sum(self.demand.values()))


def _mapping_node(node, key: str):
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            if key_node.value == key:
                return value_node
    return None


def _line_of(root, path: Tuple[Union[str, int], ...]) -> Optional[int]:
    """Номер строки (с 1) узла по пути ключей; ближайший найденный предок"""
    node = root
    line = node.start_mark.line + 1 if node is not None else None
    for key in path:
        if isinstance(key, int) and isinstance(node, yaml.SequenceNode) and key < len(node.value):
            node = node.value[key]
        else:
            child = _mapping_node(node, str(key))
            if child is None:
                break
            node = child
        line = node.start_mark.line + 1
    return line


def _build(cls, values: Any, root, path: Tuple, source: str):
    """Собирает dataclass из словаря с диагностикой по строке"""
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ScenarioConfigError(f"Раздел {'.'.join(map(str, path))} должен быть словарем",
                                  source, _line_of(root, path))
    known = {item.name for item in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        key = unknown[0]
        raise ScenarioConfigError(f"Неизвестный параметр {key}", source, _line_of(root, path + (key,)))
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ScenarioConfigError(str(exc), source, _line_of(root, path)) from exc


def parse_scenario(text: str, source: str = '<сценарий>') -> ScenarioConfig:
    """
    Разбор текста сценария.

    Raises:
        ScenarioConfigError: синтаксическая ошибка YAML или недопустимые значения
    """
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        raise ScenarioConfigError(f"Ошибка YAML: {getattr(exc, 'problem', exc)}", source,
                                  mark.line + 1 if mark is not None else None) from exc
    if not isinstance(data, dict):
        raise ScenarioConfigError("Сценарий должен быть словарем", source, 1)

    top_level = {item.name for item in fields(ScenarioConfig)} - {'path'}
    for key in data:
        if key not in top_level:
            raise ScenarioConfigError(f"Неизвестный раздел {key}", source, _line_of(root, (key,)))

    road_defaults = ConfigUtils.section('ROAD')
    road = _build(RoadGeometry, {**road_defaults, **(data.get('road') or {})}, root, ('road',), source)

    vehicle_types = dict(DEFAULT_VEHICLE_TYPES)
    for type_name, values in (data.get('vehicle_types') or {}).items():
        vehicle_types[type_name] = _build(VehicleType, values, root, ('vehicle_types', type_name), source)

    traffic_defaults = {key: value for key, value in ConfigUtils.section('TRAFFIC').items()
                        if key in {item.name for item in fields(TrafficParams)}}
    traffic = _build(TrafficParams, {**traffic_defaults, **(data.get('traffic') or {})}, root, ('traffic',), source)

    vehicles = tuple(
        _build(InitialVehicle, values, root, ('vehicles', index), source)
        for index, values in enumerate(data.get('vehicles') or [])
    )
    maneuvers = tuple(
        _build(Maneuver, values, root, ('maneuvers', index), source)
        for index, values in enumerate(data.get('maneuvers') or [])
    )

    for index, vehicle in enumerate(vehicles):
        if vehicle.type not in vehicle_types:
            raise ScenarioConfigError(f"Неизвестный тип {vehicle.type}", source,
                                      _line_of(root, ('vehicles', index, 'type')))
        if not 0 <= vehicle.lane < road.lane_count:
            raise ScenarioConfigError(f"Полоса {vehicle.lane} вне дороги", source,
                                      _line_of(root, ('vehicles', index, 'lane')))
    for index, maneuver in enumerate(maneuvers):
        if not 0 <= maneuver.target_lane < road.lane_count:
            raise ScenarioConfigError(f"Полоса {maneuver.target_lane} вне дороги", source,
                                      _line_of(root, ('maneuvers', index, 'target_lane')))

    demand = data.get('demand') or {}
    for type_name, flow in demand.items():
        if type_name not in vehicle_types or not isinstance(flow, (int, float)) or flow < 0:
            raise ScenarioConfigError(f"Недопустимый поток для типа {type_name}: {flow!r}", source,
                                      _line_of(root, ('demand', type_name)))
    try:
        demand = {str(key): float(value) for key, value in demand.items()}
        return ScenarioConfig(
            name=str(data.get('name', Path(source).stem)),
            road=road,
            duration=float(data.get('duration', 300.0)),
            warmup=float(data.get('warmup', ConfigUtils.section('TRAFFIC').get('warmup', 50.0))),
            step=float(data.get('step', 0.1)),
            max_episodes=data.get('max_episodes', 1),
            ego=_build(EgoSpec, data.get('ego'), root, ('ego',), source),
            vehicle_types=vehicle_types,
            demand=demand,
            traffic=traffic,
            vehicles=vehicles,
            maneuvers=maneuvers,
            path=source,
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioConfigError(str(exc), source, 1) from exc


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """
    Загружает сценарий из файла; имя без пути и расширения ищется
    среди встроенных сценариев.
    """
    path = Path(path)
    if not path.exists() and not path.suffix:
        bundled = SCENARIO_DIR / f'{path.name}.yaml'
        if bundled.exists():
            path = bundled
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ScenarioConfigError(f"Не удалось прочитать файл: {exc}", path) from exc
    scenario = parse_scenario(text, str(path))
    logger.info(f"Загружен сценарий {scenario.name} из {path}")
    return scenario
