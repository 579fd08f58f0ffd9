"""
Базовый метод: перепланирование в каждом цикле
"""

from planner.mpc.controller import INIT_ZERO
from .base import BaseRunner


class FixedIntervalRunner(BaseRunner):
    method = 'mpc-fixed-interval'

    def controller_options(self):
        return {'initialization': INIT_ZERO, 'fixed_interval': True}
