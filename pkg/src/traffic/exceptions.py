"""
Исключения симулятора
"""

from pathlib import Path
from typing import Optional, Union


class TrafficError(Exception):
    """Базовое исключение симулятора"""
    pass


class ScenarioConfigError(TrafficError):
    """Ошибка файла сценария с указанием строки"""

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None, line: Optional[int] = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = self.path or '<сценарий>'
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")


class ActuationError(TrafficError):
    """Управление эго вне допустимых границ"""
    pass


class UnknownVehicleError(TrafficError, KeyError):
    """Автомобиль отсутствует в мире"""
    pass
