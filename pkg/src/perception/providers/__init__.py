"""
Поставщики наблюдений для планировщика.
Все поставщики взаимозаменяемы и реализуют BaseProvider.observe().
"""

from .background import BackgroundProvider
from .base import BaseProvider
from .external import ExternalProvider, adapt_external, parse_external
from .ground_truth import GroundTruthProvider, observe_ground_truth
from .noisy import NoisyProvider, observe_noisy

PROVIDERS = {
    'ground-truth': GroundTruthProvider,
    'noisy': NoisyProvider,
    'external': ExternalProvider,
}


def build_provider(name: str, **kwargs) -> BaseProvider:
    """Создает поставщика по имени из PROVIDERS"""
    try:
        provider_class = PROVIDERS[name]
    except KeyError:
        raise ValueError(f"Неизвестный поставщик наблюдений: {name}") from None
    return provider_class(**kwargs)


__all__ = [
    'PROVIDERS',
    'BackgroundProvider',
    'BaseProvider',
    'ExternalProvider',
    'GroundTruthProvider',
    'NoisyProvider',
    'adapt_external',
    'build_provider',
    'observe_ground_truth',
    'observe_noisy',
    'parse_external',
]
