"""
Дифференциальное динамическое программирование с ограничениями
на управление (box-ограничения, зависящие от состояния).
"""

from .box_qp import BoxQPResult, solve_box_qp
from .solver import backward_pass, forward_pass, solve
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

__all__ = [
    'BackwardPassResult',
    'BoxQPResult',
    'FeedbackLaw',
    'ForwardPassResult',
    'IterationRecord',
    'QCoefficients',
    'SolverConfig',
    'SolverResult',
    'SolverStatus',
    'backward_pass',
    'forward_pass',
    'solve',
    'solve_box_qp',
]
