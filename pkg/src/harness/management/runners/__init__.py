"""
Пакет с методами планирования, сравниваемыми на стенде
"""

from .base import BaseRunner, SeedOutcome
from .fixed_interval import FixedIntervalRunner
from .ref_init import RefInitRunner
from .zero_init import ZeroInitRunner

RUNNERS = {
    'mpc-zero-init': ZeroInitRunner,
    'mpc-ref-init': RefInitRunner,
    'mpc-fixed-interval': FixedIntervalRunner,
}


def execute_seed(manifest, seed: int) -> SeedOutcome:
    """Точка входа рабочего процесса: один сид одного метода"""
    return RUNNERS[manifest.method](manifest).run_seed(seed)


__all__ = [
    'RUNNERS',
    'BaseRunner',
    'FixedIntervalRunner',
    'RefInitRunner',
    'SeedOutcome',
    'ZeroInitRunner',
    'execute_seed',
]
