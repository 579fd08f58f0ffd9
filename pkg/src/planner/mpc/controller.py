"""
Событийный MPC: цикл управления с перепланированием по триггерам,
теплым стартом, проверкой безопасности и эскалацией весов.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.utils import ConfigUtils
from perception.types import ObservationSet, ObstacleObservation
from ..ddp import SolverConfig, SolverResult, solve
from ..ddp.solver import clipped_rollout
from ..dynamics import CONTROL_DIM, RoadGeometry, VehicleParams, VehicleState, clip_to_bounds
from ..exceptions import InvalidArgumentError
from ..ocp import CostWeights, OcpProblem, total_cost
from ..potential import ObstacleEllipse, PotentialConfig, TimeGap
from ..safety import SafetyConfig, SafetyReport, predict_obstacle, verify
from .initialization import ReferenceGenerator, initialize_controls, zero_controls
from .speed import LeaderInfo, SpeedPolicy, SpeedRamp, shape_speed_command
from .triggers import TriggerState, prioritize, should_replan

logger = logging.getLogger(__name__)

INIT_ZERO = 'zero'
INIT_REFERENCE = 'reference'

FORCED_NO_PLAN = 'no_plan'
FORCED_VERIFICATION = 'verification'
FORCED_FIXED = 'fixed_interval'

ESCALATION_FACTOR = 2.0

ReferenceSource = Callable[[VehicleState, ObservationSet, float], Optional[np.ndarray]]


@dataclass(frozen=True)
class MpcConfig:
    horizon_steps: int = 30
    dt_min: float = 1.0
    deviation_threshold: float = 2.0
    obstacle_cap: int = 6
    escalation_attempts: int = 3
    max_iterations: int = 50
    initialization: str = INIT_ZERO
    fixed_interval: bool = False
    safety_gate: bool = True

    def __post_init__(self):
        if self.horizon_steps < 1 or self.obstacle_cap < 1 or self.escalation_attempts < 0:
            raise InvalidArgumentError("Некорректные параметры MPC")
        if self.initialization not in (INIT_ZERO, INIT_REFERENCE):
            raise InvalidArgumentError(f"Неизвестный режим инициализации: {self.initialization}")

    @classmethod
    def from_settings(cls, **overrides) -> 'MpcConfig':
        return ConfigUtils.build(cls, 'MPC', **overrides)


@dataclass
class CycleTelemetry:
    """Запись телеметрии одного цикла управления"""

    time: float
    triggers: Tuple[str, ...] = ()
    suppressed: bool = False
    replanned: bool = False
    solves: int = 0
    solve_iterations: int = 0
    solver_status: Optional[str] = None
    escalations: int = 0
    emergency: bool = False
    reference_rejected: bool = False
    v_des: float = 0.0
    leader_binding: bool = False
    obstacles: Tuple[str, ...] = ()
    control: Tuple[float, float] = (0.0, 0.0)
    report: Optional[Dict[str, Any]] = None

    def to_record(self) -> Dict[str, Any]:
        return {
            'time': self.time,
            'triggers': list(self.triggers),
            'suppressed': self.suppressed,
            'replanned': self.replanned,
            'solves': self.solves,
            'solve_iterations': self.solve_iterations,
            'solver_status': self.solver_status,
            'escalations': self.escalations,
            'emergency': self.emergency,
            'reference_rejected': self.reference_rejected,
            'v_des': self.v_des,
            'leader_binding': self.leader_binding,
            'obstacles': list(self.obstacles),
            'control': list(self.control),
            'safety': self.report,
        }


@dataclass
class CycleOutcome:
    control: np.ndarray
    report: SafetyReport
    telemetry: CycleTelemetry
    result: Optional[SolverResult] = None
    plan_states: Optional[np.ndarray] = None


def shift_controls(controls: np.ndarray, steps: int, K: int) -> np.ndarray:
    """Сдвиг последовательности на steps шагов с дополнением последним элементом"""
    remaining = controls[steps:]
    if len(remaining) == 0:
        remaining = controls[-1:]
    padding = np.repeat(remaining[-1:], K - len(remaining), axis=0) if len(remaining) < K else remaining[:0]
    return np.vstack([remaining[:K], padding])


def emergency_controls(params: VehicleParams, K: int) -> np.ndarray:
    """Максимальное торможение без бокового ускорения (после проекции на границы)"""
    controls = np.zeros((K, CONTROL_DIM))
    controls[:, 0] = params.u_x_min
    return controls


def obstacle_ellipses(observation: ObstacleObservation, K: int, T: float, sigma_y: float,
                      potential: PotentialConfig, ego_v_x: float) -> List[ObstacleEllipse]:
    """Эллипсы препятствия по шагам горизонта при постоянной скорости"""
    ellipses = []
    for k in range(K):
        center = predict_obstacle((observation.x, observation.y), (observation.v_x, observation.v_y), k, T)
        ellipses.append(ObstacleEllipse(
            center_x=float(center[0]),
            center_y=float(center[1]),
            sigma_x=max(ego_v_x, 0.0) * potential.tau + observation.length,
            sigma_y=sigma_y,
            weight=potential.weight,
            obstacle_id=observation.id,
            time_gap=TimeGap(observation.v_x, observation.length, potential.tau),
        ))
    return ellipses


class MpcController:
    """
    Координатор цикла управления.

    Между перепланированиями применяется кэшированный план; перед
    применением он сдвигается, прокручивается из измеренного состояния
    и проверяется. Провал проверки при включенном слое безопасности
    вызывает перепланирование в том же цикле.

    В режиме инициализации по опорной траектории точки берутся из
    reference_source, а если он не задан или вернул None, из
    ReferenceGenerator.
    """

    def __init__(self, params: VehicleParams, road: RoadGeometry, weights: CostWeights,
                 solver: SolverConfig, safety: SafetyConfig, potential: PotentialConfig,
                 speed: SpeedPolicy, config: MpcConfig,
                 reference_source: Optional[ReferenceSource] = None):
        self.params = params
        self.road = road
        self.weights = weights
        self.solver = solver
        self.safety = safety
        self.potential = potential
        self.speed = speed
        self.config = config
        horizon = config.horizon_steps * params.T
        if safety.horizon > horizon + 1e-9:
            raise InvalidArgumentError(
                f"Горизонт проверки {safety.horizon} с больше горизонта планирования {horizon} с"
            )
        self.reference_source = reference_source
        self.fallback_reference: Optional[ReferenceSource] = None
        if config.initialization == INIT_REFERENCE:
            self.fallback_reference = ReferenceGenerator(params, road, horizon=horizon).waypoints
        self.trigger = TriggerState(horizon=horizon, dt_min=config.dt_min,
                                    deviation_threshold=config.deviation_threshold)
        self.ramp = SpeedRamp(speed)
        self.plan: Optional[np.ndarray] = None
        self.plan_offset = 0

    @classmethod
    def from_settings(cls, reference_source: Optional[ReferenceSource] = None,
                      road: Optional[RoadGeometry] = None, **overrides) -> 'MpcController':
        params = VehicleParams.from_settings()
        solver = SolverConfig.from_settings()
        config = MpcConfig.from_settings(**overrides)
        solver = replace(solver, max_iterations=config.max_iterations)
        return cls(
            params=params,
            road=road or RoadGeometry.from_settings(),
            weights=CostWeights.from_settings(),
            solver=solver,
            safety=SafetyConfig.from_settings(T=params.T),
            potential=PotentialConfig.from_settings(),
            speed=SpeedPolicy.from_settings(),
            config=config,
            reference_source=reference_source,
        )

    @property
    def horizon(self) -> int:
        return self.config.horizon_steps

    def reset(self) -> None:
        """Сброс перед новым эпизодом эго"""
        self.trigger = TriggerState(horizon=self.trigger.horizon, dt_min=self.config.dt_min,
                                    deviation_threshold=self.config.deviation_threshold)
        self.ramp.reset()
        self.plan = None
        self.plan_offset = 0

    def build_problem(self, ego: VehicleState, observations: Sequence[ObstacleObservation],
                      v_des: float) -> OcpProblem:
        K = self.horizon
        per_step = [[] for _ in range(K)]
        for observation in observations:
            for k, ellipse in enumerate(obstacle_ellipses(observation, K, self.params.T, self.road.lane_width,
                                                          self.potential, ego.v_x)):
                per_step[k].append(ellipse)
        return OcpProblem.create(K, ego, self.weights.with_v_des(v_des), per_step,
                                 params=self.params, road=self.road)

    def warm_start(self) -> Optional[np.ndarray]:
        if self.plan is None:
            return None
        return shift_controls(self.plan, self.plan_offset, self.horizon)

    def _initial_guess(self, problem: OcpProblem, ego: VehicleState, observations: ObservationSet,
                       telemetry: CycleTelemetry) -> np.ndarray:
        warm = self.warm_start()
        if self.config.initialization != INIT_REFERENCE:
            return warm if warm is not None else zero_controls(self.horizon)

        reference = None
        if self.reference_source is not None:
            reference = self.reference_source(ego, observations, problem.weights.v_des)
        if reference is None and self.fallback_reference is not None:
            reference = self.fallback_reference(ego, observations, problem.weights.v_des)
        init = initialize_controls(reference, ego, self.horizon, self.params, self.road,
                                   list(observations), self.safety)
        telemetry.reference_rejected = init.rejected
        if warm is None:
            return init.controls
        warm_states, warm_controls = clipped_rollout(problem, warm)
        init_states, init_controls = clipped_rollout(problem, init.controls)
        if total_cost(problem, init_states, init_controls) < total_cost(problem, warm_states, warm_controls):
            return init_controls
        return warm_controls

    def _verify(self, states: np.ndarray, observations: ObservationSet) -> SafetyReport:
        return verify(states, list(observations), self.road, self.safety, self.params)

    def _replan(self, now: float, ego: VehicleState, observations: ObservationSet, v_des: float,
                telemetry: CycleTelemetry) -> Tuple[np.ndarray, np.ndarray, SafetyReport, Optional[SolverResult]]:
        prioritized = prioritize(ego.x, observations, self.config.obstacle_cap)
        telemetry.obstacles = tuple(o.id for o in prioritized)
        problem = self.build_problem(ego, prioritized, v_des)
        initial = self._initial_guess(problem, ego, observations, telemetry)

        result = None
        report = None
        for attempt in range(self.config.escalation_attempts + 1):
            result = solve(problem, initial, self.solver)
            telemetry.solves += 1
            telemetry.solve_iterations += result.iterations
            telemetry.solver_status = result.status.value
            report = self._verify(result.states, observations)
            if report.passed or not self.config.safety_gate:
                if attempt:
                    logger.info(f"t={now:.2f}: план принят после эскалации ({attempt})")
                self.plan = result.controls
                self.plan_offset = 0
                self.trigger.record_replan(now, observations)
                return result.controls, result.states, report, result
            if attempt == self.config.escalation_attempts:
                break
            flagged = [obstacle_id for obstacle_id in report.flagged_obstacles() if obstacle_id in telemetry.obstacles]
            if not flagged:
                flagged = list(telemetry.obstacles)
            logger.info(f"t={now:.2f}: план отклонен ({report.verdict}), удвоение λ для {flagged}")
            telemetry.escalations += 1
            problem = problem.scale_weights(flagged, ESCALATION_FACTOR)
            initial = result.controls

        logger.warning(f"t={now:.2f}: эскалация исчерпана, экстренное торможение")
        telemetry.emergency = True
        problem_states, controls = clipped_rollout(problem, emergency_controls(self.params, self.horizon))
        self.plan = None
        self.plan_offset = 0
        return controls, problem_states, self._verify(problem_states, observations), result

    def control_cycle(self, now: float, ego: VehicleState, observations: ObservationSet,
                      leader: Optional[LeaderInfo] = None) -> CycleOutcome:
        """
        Один цикл управления.

        Returns:
            CycleOutcome с примененным управлением, отчетом проверки
            и телеметрией
        """
        telemetry = CycleTelemetry(time=now)
        v_target, telemetry.leader_binding = self.ramp.target(now, ego.v_x, leader)
        v_des = shape_speed_command(ego.v_x, v_target, self.speed.command_delta)
        telemetry.v_des = v_des

        decision = should_replan(now, self.trigger, observations)
        telemetry.suppressed = decision.suppressed
        triggers = list(decision.fired)
        replan = decision.replan
        if self.config.fixed_interval:
            replan = True
            triggers.append(FORCED_FIXED)
        if self.plan is None:
            replan = True
            triggers.append(FORCED_NO_PLAN)

        result = None
        if not replan:
            problem = OcpProblem.create(self.horizon, ego, self.weights.with_v_des(v_des),
                                        params=self.params, road=self.road)
            states, controls = clipped_rollout(problem, self.warm_start())
            report = self._verify(states, observations)
            if not report.passed and self.config.safety_gate:
                replan = True
                triggers.append(FORCED_VERIFICATION)
            else:
                self.plan = controls
                self.plan_offset = 0

        if replan:
            telemetry.replanned = True
            controls, states, report, result = self._replan(now, ego, observations, v_des, telemetry)

        self.plan_offset += 1
        self.trigger.advance(observations)

        control = self._cap_speed_change(ego, controls[0])
        telemetry.triggers = tuple(triggers)
        telemetry.control = (float(control[0]), float(control[1]))
        telemetry.report = report.to_record()
        return CycleOutcome(control=control, report=report, telemetry=telemetry, result=result,
                            plan_states=states)

    def _cap_speed_change(self, ego: VehicleState, control: np.ndarray) -> np.ndarray:
        """|Δv_x| за шаг не больше command_delta, затем проекция на границы"""
        cap = self.speed.command_delta / self.params.T
        capped = np.array([np.clip(control[0], -cap, cap), control[1]])
        return clip_to_bounds(ego.as_array(), capped, self.params, self.road)
