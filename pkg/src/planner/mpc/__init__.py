"""
Событийный MPC поверх решателя DDP
"""

from .controller import CycleOutcome, CycleTelemetry, MpcConfig, MpcController, shift_controls
from .initialization import InitializationResult, ReferenceGenerator, initialize_controls
from .speed import LeaderInfo, SpeedPolicy, SpeedRamp, desired_speed, shape_speed_command
from .triggers import TriggerDecision, TriggerState, prioritize, should_replan

__all__ = [
    'CycleOutcome',
    'CycleTelemetry',
    'InitializationResult',
    'LeaderInfo',
    'MpcConfig',
    'MpcController',
    'ReferenceGenerator',
    'SpeedPolicy',
    'SpeedRamp',
    'TriggerDecision',
    'TriggerState',
    'desired_speed',
    'initialize_controls',
    'prioritize',
    'shape_speed_command',
    'shift_controls',
    'should_replan',
]
