"""
Замкнутый цикл симуляции: окружающий поток, восприятие, MPC и эго.

Прогон состоит из последовательных эпизодов эго. Эпизод начинается
после прогрева и заканчивается, когда эго проехало участок
segment_length, столкнулось или истекло время прогона. После
завершения эпизода эго убирается с дороги и выбирается новое -
ближайший к въезду легковой автомобиль потока.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from perception.providers import BaseProvider
from planner.dynamics import ControlInput, VehicleParams
from planner.mpc import LeaderInfo, MpcController
from .actuation import actuate_ego
from .behavior import advance_traffic, start_maneuvers
from .demand import DemandGenerator, spawn_traffic
from .metrics import MetricsSummary, collect_metrics
from .scenario import ScenarioConfig
from .world import Vehicle, WorldState

logger = logging.getLogger(__name__)

STATUS_COMPLETE = 'complete'
STATUS_COLLISION = 'collision'
STATUS_INCOMPLETE = 'incomplete'

EGO_ID = 'ego'

# Автомобили дальше конца участка на это расстояние убираются
EXIT_MARGIN = 500.0

RecordSink = Callable[[Dict[str, Any]], None]


@dataclass
class Episode:
    index: int
    ego_id: str
    start_time: float
    start_x: float
    status: Optional[str] = None
    end_time: Optional[float] = None
    cycles: List[Dict[str, Any]] = field(default_factory=list)
    metrics: Optional[MetricsSummary] = None

    def to_record(self) -> Dict[str, Any]:
        return {
            'kind': 'episode',
            'episode': self.index,
            'ego_id': self.ego_id,
            'status': self.status,
            'start_time': self.start_time,
            'end_time': self.end_time,
            'start_x': self.start_x,
            'metrics': self.metrics.to_record() if self.metrics else None,
        }


@dataclass
class RunResult:
    records: List[Dict[str, Any]]
    episodes: List[Episode]

    @property
    def metrics(self) -> List[MetricsSummary]:
        return [episode.metrics for episode in self.episodes if episode.metrics is not None]

    @property
    def collided(self) -> bool:
        return any(episode.status == STATUS_COLLISION for episode in self.episodes)


def vehicle_record(vehicle: Vehicle) -> Dict[str, float]:
    return {'x': vehicle.x, 'y': vehicle.y, 'v_x': vehicle.v_x, 'v_y': vehicle.v_y}


def place_initial_vehicles(config: ScenarioConfig, world: WorldState) -> None:
    """Автомобили, заданные в сценарии явно"""
    for entry in config.vehicles:
        vehicle_type = config.vehicle_types[entry.type]
        world.add(Vehicle(
            id=entry.id,
            type_name=entry.type,
            x=entry.x,
            y=config.road.lane_center(entry.lane),
            v_x=entry.speed,
            v_y=0.0,
            length=vehicle_type.length,
            width=vehicle_type.width,
            desired_speed=entry.desired_speed if entry.desired_speed is not None else entry.speed,
        ))


def select_ego(world: WorldState, params: VehicleParams) -> Optional[Vehicle]:
    """
    Новый эго-автомобиль: ближайший к въезду автомобиль потока,
    габариты которого не больше габаритов эго. Ему присваиваются
    габариты эго, сценарная смена полосы отменяется.
    """
    candidates = [
        vehicle for vehicle in world.others()
        if vehicle.x >= 0 and vehicle.length <= params.length + 1e-9 and vehicle.width <= params.width + 1e-9
    ]
    if not candidates:
        return None
    vehicle = min(candidates, key=lambda item: (item.x, item.id))
    vehicle.is_ego = True
    vehicle.length, vehicle.width = params.length, params.width
    vehicle.lane_change = None
    world.ego_id = vehicle.id
    return vehicle


def scripted_ego(config: ScenarioConfig, world: WorldState, params: VehicleParams) -> Vehicle:
    vehicle = Vehicle(
        id=EGO_ID,
        type_name=EGO_ID,
        x=config.ego.x,
        y=config.road.lane_center(config.ego.lane),
        v_x=config.ego.speed,
        v_y=0.0,
        length=params.length,
        width=params.width,
        desired_speed=config.ego.speed,
        is_ego=True,
    )
    world.add(vehicle)
    world.ego_id = vehicle.id
    return vehicle


class EpisodeRunner:
    """
    Один прогон сценария с фиксированным сидом.

    Весь прогон детерминирован: генератор случайных чисел создается
    из сида, поставщик наблюдений и контроллер сбрасываются в начале
    каждого эпизода.
    """

    def __init__(self, scenario: ScenarioConfig, controller: MpcController, provider: BaseProvider,
                 seed: int, method: str = '', safety: bool = True,
                 sink: Optional[RecordSink] = None, keep_details: bool = True):
        self.scenario = scenario
        self.controller = controller
        self.provider = provider
        self.params = controller.params
        self.seed = int(seed)
        self.method = method
        self.safety = safety
        self.sink = sink
        self.keep_details = keep_details
        self.records: List[Dict[str, Any]] = []
        self.episodes: List[Episode] = []

    def _emit(self, record: Dict[str, Any]) -> None:
        self.records.append(record)
        if self.sink is not None:
            self.sink(record)

    def header(self) -> Dict[str, Any]:
        return {
            'kind': 'run',
            'scenario': self.scenario.name,
            'method': self.method,
            'seed': self.seed,
            'safety': self.safety,
            'step': self.scenario.step,
            'warmup': self.scenario.warmup,
            'segment_length': self.scenario.segment_length,
            'road': {
                'lane_width': self.scenario.road.lane_width,
                'lane_count': self.scenario.road.lane_count,
            },
        }

    @property
    def episodes_exhausted(self) -> bool:
        limit = self.scenario.max_episodes
        return limit is not None and len(self.episodes) >= limit

    def _start_episode(self, world: WorldState, now: float) -> Optional[Episode]:
        first_scripted = self.scenario.ego.x is not None and not self.episodes
        vehicle = scripted_ego(self.scenario, world, self.params) if first_scripted else select_ego(world, self.params)
        if vehicle is None:
            return None
        self.controller.reset()
        self.provider.reset()
        episode = Episode(index=len(self.episodes), ego_id=vehicle.id, start_time=now, start_x=vehicle.x)
        self.episodes.append(episode)
        logger.info(f"t={now:.1f}: эпизод {episode.index}, эго {vehicle.id} на x={vehicle.x:.1f}")
        return episode

    def _finish_episode(self, world: WorldState, episode: Episode, status: str, now: float) -> None:
        episode.status = status
        episode.end_time = now
        episode.metrics = collect_metrics(episode.cycles, self.scenario.segment_length,
                                          self.scenario.warmup, episode.index)
        world.remove(episode.ego_id)
        self._emit(episode.to_record())
        if not self.keep_details:
            episode.cycles = []
        log = logger.warning if status == STATUS_COLLISION else logger.info
        log(f"t={now:.1f}: эпизод {episode.index} завершен ({status})")

    def _cycle(self, world: WorldState, episode: Episode, now: float) -> Optional[str]:
        """Один цикл управления эго; возвращает статус, если эпизод закончился"""
        ego = world.ego
        collided = world.collisions_with(ego.id)
        leader, gap = world.leader_of(ego, same_lane=True)
        record = {
            'kind': 'cycle',
            'episode': episode.index,
            'time': now,
            'ego': vehicle_record(ego),
            'leader': {'id': leader.id, 'gap': gap, 'speed': leader.v_x} if leader is not None else None,
            'collision': bool(collided),
            'collided_with': collided,
            'observations': None,
            'plan': None,
            'telemetry': None,
        }

        status = None
        if collided:
            status = STATUS_COLLISION
        elif ego.x - episode.start_x >= self.scenario.segment_length:
            status = STATUS_COMPLETE
        else:
            observations = self.provider.observe(world, ego.id)
            leader_info = LeaderInfo(gap, leader.v_x) if leader is not None else None
            outcome = self.controller.control_cycle(now, ego.state, observations, leader_info)
            record['observations'] = observations.to_record()
            record['plan'] = outcome.plan_states
            record['telemetry'] = outcome.telemetry.to_record()
            actuate_ego(world, ControlInput(float(outcome.control[0]), float(outcome.control[1])),
                        self.params, self.controller.speed.command_delta)

        episode.cycles.append(record)
        self._emit(record)
        return status

    def run(self) -> RunResult:
        scenario = self.scenario
        rng = np.random.default_rng(self.seed)
        world = WorldState(time=0.0, road=scenario.road)
        demand = DemandGenerator(scenario.demand, scenario.step)
        place_initial_vehicles(scenario, world)
        self._emit(self.header())

        exit_x = scenario.segment_length + EXIT_MARGIN
        steps = int(round(scenario.duration / scenario.step))
        episode = None
        for n in range(steps):
            now = n * scenario.step
            world.time = now
            spawn_traffic(scenario, now, world, rng, demand)
            start_maneuvers(world, scenario.maneuvers, now, scenario.step)

            if episode is None and now >= scenario.warmup - 1e-9:
                if self.episodes_exhausted:
                    break
                episode = self._start_episode(world, now)

            if episode is not None:
                status = self._cycle(world, episode, now)
                if status is not None:
                    self._finish_episode(world, episode, status, now)
                    episode = None

            advance_traffic(world, scenario.step, scenario.traffic)
            for vehicle in [item for item in world.others() if item.x > exit_x]:
                world.remove(vehicle.id)

        if episode is not None:
            self._finish_episode(world, episode, STATUS_INCOMPLETE, world.time)
        return RunResult(records=self.records, episodes=self.episodes)


def run_episode(scenario: ScenarioConfig, controller: MpcController, provider: BaseProvider,
                seed: int, **kwargs) -> RunResult:
    return EpisodeRunner(scenario, controller, provider, seed, **kwargs).run()
