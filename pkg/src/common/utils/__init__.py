"""
Утилиты общего назначения для проекта.
"""

from .config import ConfigUtils
from .files import FileUtils
from .numeric import NumericUtils

__all__ = [
    'ConfigUtils',
    'FileUtils',
    'NumericUtils',
]
