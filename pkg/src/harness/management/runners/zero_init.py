"""
Событийный MPC с нулевой (или теплой) инициализацией решателя
"""

from planner.mpc.controller import INIT_ZERO
from .base import BaseRunner


class ZeroInitRunner(BaseRunner):
    """Перепланирование по триггерам, начальное приближение - сдвинутый план или нули"""

    method = 'mpc-zero-init'

    def controller_options(self):
        return {'initialization': INIT_ZERO, 'fixed_interval': False}
