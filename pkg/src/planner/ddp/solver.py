"""
Обратный и прямой проходы DDP и основной цикл решателя
с адаптивной регуляризацией и линейным поиском по шагу.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from common.utils import NumericUtils
from ..dynamics import CONTROL_DIM, STATE_DIM, bounds_array, bounds_sensitivity, clip_to_bounds, transition_matrices
from ..exceptions import BackwardPassError, ForwardPassError, InvalidArgumentError
from ..ocp import OcpProblem, stage_cost_derivatives, total_cost
from .box_qp import solve_box_qp
from .types import (
    BackwardPassResult,
    FeedbackLaw,
    ForwardPassResult,
    IterationRecord,
    QCoefficients,
    SolverConfig,
    SolverResult,
    SolverStatus,
)

logger = logging.getLogger(__name__)

TelemetryCallback = Callable[[IterationRecord], None]


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def clipped_rollout(problem: OcpProblem, controls: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Прокрутка модели с проекцией каждого управления на границы в текущем состоянии"""
    A, B = transition_matrices(problem.T)
    K = problem.horizon
    states = np.empty((K + 1, STATE_DIM))
    applied = np.empty((K, CONTROL_DIM))
    states[0] = problem.x0
    for k in range(K):
        applied[k] = clip_to_bounds(states[k], controls[k], problem.params, problem.road)
        states[k + 1] = A @ states[k] + B @ applied[k]
    return states, applied


def backward_pass(problem: OcpProblem, states: np.ndarray, controls: np.ndarray,
                  mu: float) -> BackwardPassResult:
    """
    Обратный проход вокруг номинальной траектории.

    Динамика линейна, поэтому f_x = A, f_u = B, а вторые производные
    динамики равны нулю. Регуляризация добавляется только в QP;
    рекурсия функции ценности использует исходный Q_uu.

    Raises:
        BackwardPassError: QP шага не решена (см. solve_box_qp)
    """
    A, B = transition_matrices(problem.T)
    K = problem.horizon
    V_x = np.zeros(STATE_DIM)
    V_xx = np.zeros((STATE_DIM, STATE_DIM))
    laws = [None] * K
    coefficients = [None] * K
    V_x_log = np.zeros((K + 1, STATE_DIM))
    V_xx_log = np.zeros((K + 1, STATE_DIM, STATE_DIM))
    expected_linear = 0.0
    expected_quadratic = 0.0
    regularizer = mu * np.eye(CONTROL_DIM)

    for k in range(K - 1, -1, -1):
        x_bar = states[k]
        u_bar = controls[k]
        cost = stage_cost_derivatives(problem, k, x_bar, u_bar)

        Q_x = cost.L_x + A.T @ V_x
        Q_u = cost.L_u + B.T @ V_x
        Q_xx = _symmetrize(cost.L_xx + A.T @ V_xx @ A)
        Q_ux = cost.L_ux + B.T @ V_xx @ A
        Q_uu = _symmetrize(cost.L_uu + B.T @ V_xx @ B)

        lower, upper = bounds_array(x_bar, problem.params, problem.road)
        qp = solve_box_qp(Q_uu + regularizer, Q_u, lower - u_bar, upper - u_bar)

        k_ff = qp.delta_u
        K_fb = -qp.free_inverse @ Q_ux
        X = np.zeros((CONTROL_DIM, STATE_DIM))
        if np.any(qp.active_set != 0):
            d_lower, d_upper = bounds_sensitivity(x_bar, problem.params, problem.road)
            X[qp.active_set < 0] = d_lower[qp.active_set < 0]
            X[qp.active_set > 0] = d_upper[qp.active_set > 0]

        V_x = Q_x + K_fb.T @ Q_uu @ k_ff + K_fb.T @ Q_u + Q_ux.T @ k_ff
        V_xx = _symmetrize(Q_xx + K_fb.T @ Q_uu @ K_fb + K_fb.T @ Q_ux + Q_ux.T @ K_fb)
        V_x_log[k] = V_x
        V_xx_log[k] = V_xx

        expected_linear += float(k_ff @ Q_u)
        expected_quadratic += 0.5 * float(k_ff @ Q_uu @ k_ff)

        laws[k] = FeedbackLaw(k_ff=k_ff, K_fb=K_fb, active_set=qp.active_set, X=X)
        coefficients[k] = QCoefficients(Q_x=Q_x, Q_u=Q_u, Q_xx=Q_xx, Q_ux=Q_ux, Q_uu=Q_uu)

    return BackwardPassResult(
        laws=tuple(laws),
        coefficients=tuple(coefficients),
        V_x=V_x_log,
        V_xx=V_xx_log,
        expected_linear=expected_linear,
        expected_quadratic=expected_quadratic,
    )


def forward_pass(problem: OcpProblem, states: np.ndarray, controls: np.ndarray,
                 laws: Sequence[FeedbackLaw], alpha: float) -> ForwardPassResult:
    """
    Прямой проход: u_k = ū_k + α(k_ff + K_fb·δx_k) для свободных компонент,
    u_k = ū_k + α(k_ff + X·δx_k) для активных, затем проекция на границы
    в прокрученном состоянии.

    Raises:
        ForwardPassError: нечисловая траектория
    """
    if not 0 <= alpha <= 1:
        raise InvalidArgumentError(f"Шаг α вне [0, 1]: {alpha}")
    A, B = transition_matrices(problem.T)
    K = problem.horizon
    new_states = np.empty((K + 1, STATE_DIM))
    new_controls = np.empty((K, CONTROL_DIM))
    new_states[0] = problem.x0

    for k in range(K):
        law = laws[k]
        dx = new_states[k] - states[k]
        feedback = law.K_fb @ dx
        clamped = law.clamped
        feedback[clamped] = (law.X @ dx)[clamped]
        u = controls[k] + alpha * (law.k_ff + feedback)
        u = clip_to_bounds(new_states[k], u, problem.params, problem.road)
        new_controls[k] = u
        new_states[k + 1] = A @ new_states[k] + B @ u

    if not NumericUtils.all_finite(new_states, new_controls):
        raise ForwardPassError(f"Нечисловая траектория при α={alpha}")
    return ForwardPassResult(new_states, new_controls, total_cost(problem, new_states, new_controls))


def solve(problem: OcpProblem, initial_controls, config: Optional[SolverConfig] = None,
          telemetry: Optional[TelemetryCallback] = None) -> SolverResult:
    """
    Решение задачи методом DDP с ограничениями.

    Всегда возвращает лучшую найденную траекторию; статус сообщает,
    сошелся ли решатель, исчерпал итерации или упёрся в mu_max.
    μ остается в [mu_min, mu_max]; все испробованные значения отличаются
    в gamma раз, и только итоговое final_mu может быть обрезано до mu_max.
    """
    config = config or SolverConfig()
    K = problem.horizon
    controls = np.asarray(initial_controls, dtype=float)
    if controls.shape != (K, CONTROL_DIM):
        raise InvalidArgumentError(f"Ожидалась последовательность {K}×{CONTROL_DIM}, получено {controls.shape}")
    if not NumericUtils.all_finite(controls):
        raise InvalidArgumentError("Начальные управления содержат нечисловые значения")

    states, controls = clipped_rollout(problem, controls)
    cost = total_cost(problem, states, controls)
    mu = config.mu_min
    cost_log = [cost]
    mu_history = []
    trace = []
    status = SolverStatus.MAX_ITERATIONS
    iterations = 0

    for iteration in range(1, config.max_iterations + 1):
        iterations = iteration

        backward = None
        while mu < config.mu_max:
            mu_history.append(mu)
            try:
                backward = backward_pass(problem, states, controls, mu)
                break
            except BackwardPassError as exc:
                logger.debug(f"Итерация {iteration}: обратный проход не удался при μ={mu:.3g} ({exc})")
                mu = min(mu * config.gamma, config.mu_max)
        if backward is None:
            status = SolverStatus.ILL_CONDITIONED
            break

        accepted = None
        accepted_alpha = None
        for alpha in config.step_sizes:
            try:
                candidate = forward_pass(problem, states, controls, backward.laws, alpha)
            except ForwardPassError as exc:
                logger.debug(f"Итерация {iteration}: {exc}")
                continue
            if candidate.cost < cost:
                accepted, accepted_alpha = candidate, alpha
                break

        record = IterationRecord(
            iteration=iteration,
            cost=accepted.cost if accepted else cost,
            mu=mu,
            alpha=accepted_alpha,
            accepted=accepted is not None,
            active_count=backward.active_count,
            expected_improvement=backward.expected_improvement(accepted_alpha or 0.0),
        )
        trace.append(record)
        if telemetry is not None:
            telemetry(record)
        logger.debug(
            f"Итерация {iteration}: стоимость {record.cost:.6g}, μ={mu:.3g}, α={accepted_alpha}"
        )

        if accepted is not None:
            change = float(np.linalg.norm(accepted.controls - controls))
            states, controls, cost = accepted.states, accepted.controls, accepted.cost
            cost_log.append(cost)
            mu = max(mu / config.gamma, config.mu_min)
            if change < config.epsilon_1:
                status = SolverStatus.CONVERGED
                break
        else:
            if backward.feedforward_norm < config.epsilon_1:
                status = SolverStatus.CONVERGED
                break
            mu = min(mu * config.gamma, config.mu_max)
            if mu >= config.mu_max:
                status = SolverStatus.ILL_CONDITIONED
                break

    if status is not SolverStatus.CONVERGED:
        logger.debug(f"Решатель завершился со статусом {status.value} после {iterations} итераций")

    return SolverResult(
        controls=controls,
        states=states,
        cost=cost,
        iterations=iterations,
        status=status,
        final_mu=mu,
        cost_log=tuple(cost_log),
        mu_history=tuple(mu_history),
        trace=tuple(trace),
    )
