"""
Применение управления к эго-автомобилю
"""

import logging

import numpy as np

from planner.dynamics import ControlInput, VehicleParams, bounds_array, step
from .exceptions import ActuationError
from .world import WorldState

logger = logging.getLogger(__name__)

BOUNDS_TOLERANCE = 1e-9


def actuate_ego(world: WorldState, u: ControlInput, params: VehicleParams,
                command_delta: float = 1.0) -> WorldState:
    """
    Продвигает эго по модели двойного интегратора.

    Raises:
        ActuationError: управление вне границ в текущем состоянии
            или изменение скорости за шаг больше command_delta
    """
    ego = world.ego
    if ego is None:
        raise ActuationError("В мире нет эго-автомобиля")
    state = ego.state
    lower, upper = bounds_array(state.as_array(), params, world.road)
    control = u.as_array()
    if np.any(control < lower - BOUNDS_TOLERANCE) or np.any(control > upper + BOUNDS_TOLERANCE):
        raise ActuationError(f"Управление {control} вне границ [{lower}, {upper}] в состоянии {state}")
    if abs(u.u_x * params.T) > command_delta + BOUNDS_TOLERANCE:
        raise ActuationError(f"Изменение скорости {u.u_x * params.T:.3f} м/с превышает {command_delta} м/с")
    ego.set_state(step(state, u, params.T))
    return world
