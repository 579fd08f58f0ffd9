"""
Профиль желаемой скорости: прогрессивный разгон, следование за лидером,
сглаживание команды скорости.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from common.utils import ConfigUtils, NumericUtils
from ..exceptions import InvalidArgumentError


@dataclass(frozen=True)
class SpeedPolicy:
    v_nominal: float = 20.0
    ramp_step: float = 0.5
    ramp_interval: float = 4.0
    follow_near: float = 20.0
    follow_far: float = 50.0
    leader_factor: float = 0.95
    command_delta: float = 1.0

    def __post_init__(self):
        values = (self.v_nominal, self.ramp_step, self.ramp_interval, self.follow_near,
                  self.follow_far, self.leader_factor, self.command_delta)
        if min(values) <= 0:
            raise InvalidArgumentError(f"Параметры профиля скорости должны быть положительными: {values}")
        if self.follow_near >= self.follow_far:
            raise InvalidArgumentError("follow_near должен быть меньше follow_far")

    @classmethod
    def from_settings(cls, **overrides) -> 'SpeedPolicy':
        return ConfigUtils.build(cls, 'SPEED', **overrides)


class LeaderInfo(NamedTuple):
    distance: float
    speed: float


def shape_speed_command(v_current: float, v_target: float, delta: float = 1.0) -> float:
    """v + sat(v_target - v; -delta, delta)"""
    return v_current + NumericUtils.saturate(v_target - v_current, -delta, delta)


def progressive_speed(policy: SpeedPolicy, base: float, elapsed: float) -> float:
    steps = math.floor(max(elapsed, 0.0) / policy.ramp_interval + 1e-9)
    return min(policy.v_nominal, base + policy.ramp_step * steps)


def desired_speed(policy: SpeedPolicy, leader: Optional[LeaderInfo], v_current: float,
                  elapsed: float, ramp_base: Optional[float] = None) -> float:
    """
    Желаемая скорость. Без лидера или при d > follow_far - прогрессивный
    разгон от ramp_base (по умолчанию текущая скорость); вблизи лидера -
    0.95 его скорости; в промежутке - смешивание с весом
    w = 1 - (d - near) / (far - near).
    """
    if leader is None or leader.distance > policy.follow_far:
        base = v_current if ramp_base is None else ramp_base
        return progressive_speed(policy, base, elapsed)
    if leader.distance <= 0:
        raise InvalidArgumentError(f"Дистанция до лидера должна быть положительной: {leader.distance}")
    follow = policy.leader_factor * leader.speed
    if leader.distance <= policy.follow_near:
        return min(policy.v_nominal, follow)
    w = 1.0 - (leader.distance - policy.follow_near) / (policy.follow_far - policy.follow_near)
    return min(policy.v_nominal, w * follow + (1.0 - w) * v_current)


class SpeedRamp:
    """Состояние прогрессивного разгона; сбрасывается, когда действует лидер"""

    def __init__(self, policy: SpeedPolicy):
        self.policy = policy
        self.start_time: Optional[float] = None
        self.base: Optional[float] = None

    def reset(self) -> None:
        self.start_time = None
        self.base = None

    def target(self, now: float, v_current: float, leader: Optional[LeaderInfo]) -> Tuple[float, bool]:
        """
        Returns:
            (желаемая скорость, действует ли ограничение лидера)
        """
        if leader is not None and leader.distance <= self.policy.follow_far:
            self.reset()
            leader = LeaderInfo(max(leader.distance, 1e-6), leader.speed)
            return desired_speed(self.policy, leader, v_current, 0.0), True
        if self.start_time is None:
            self.start_time = now
            self.base = v_current
        return desired_speed(self.policy, None, v_current, now - self.start_time, ramp_base=self.base), False
