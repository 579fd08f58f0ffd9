"""
Утилиты для чтения раздела VISIOPATH из настроек проекта.
"""

import dataclasses
import logging
from typing import Any, Dict, Type, TypeVar

from django.conf import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')


class ConfigUtils:
    """Доступ к словарю настроек VISIOPATH."""

    @staticmethod
    def section(name: str) -> Dict[str, Any]:
        """
        Возвращает копию раздела настроек.

        Args:
            name: Имя раздела (например, 'SOLVER')

        Returns:
            Словарь значений (пустой, если раздел не задан)
        """
        visiopath = getattr(settings, 'VISIOPATH', {}) or {}
        return dict(visiopath.get(name, {}))

    @staticmethod
    def build(cls: Type[T], name: str, **overrides: Any) -> T:
        """
        Собирает dataclass-конфигурацию из раздела настроек.

        Неизвестные ключи раздела игнорируются, явные overrides
        имеют приоритет над настройками.
        """
        known = {field.name for field in dataclasses.fields(cls)}
        values = {}
        for key, value in ConfigUtils.section(name).items():
            if key in known:
                values[key] = value
            else:
                logger.warning(f"Неизвестный параметр {name}.{key} пропущен")
        values.update(overrides)
        for key, value in list(values.items()):
            if isinstance(value, list):
                values[key] = tuple(value)
        return cls(**values)
