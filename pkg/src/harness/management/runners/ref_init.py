"""
Событийный MPC с инициализацией по опорной траектории
"""

from perception.providers import BackgroundProvider, BaseProvider, ExternalProvider
from planner.mpc.controller import INIT_REFERENCE
from .base import BaseRunner


class RefInitRunner(BaseRunner):
    """
    Начальное приближение строится по опорным точкам, сглаженным
    кубическим сплайном. С внешней моделью восприятия точки берутся
    из ее ответов, иначе (и когда в ответе их нет) - из генератора
    с поиском свободного промежутка в соседних полосах.
    """

    method = 'mpc-ref-init'

    def controller_options(self):
        return {'initialization': INIT_REFERENCE, 'fixed_interval': False}

    def reference_source(self, provider: BaseProvider):
        inner = provider.inner if isinstance(provider, BackgroundProvider) else provider
        if isinstance(inner, ExternalProvider):
            return inner.reference_waypoints
        return None
