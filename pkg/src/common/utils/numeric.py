"""
Мелкие численные утилиты.
"""

import math
from typing import Iterable

import numpy as np


class NumericUtils:
    """Проверки конечности и насыщение."""

    @staticmethod
    def all_finite(*values) -> bool:
        """True, если все переданные числа и массивы конечны."""
        for value in values:
            if isinstance(value, np.ndarray):
                if not np.all(np.isfinite(value)):
                    return False
            elif isinstance(value, Iterable):
                if not np.all(np.isfinite(np.asarray(value, dtype=float))):
                    return False
            elif not math.isfinite(value):
                return False
        return True

    @staticmethod
    def saturate(value: float, lower: float, upper: float) -> float:
        """sat[value; lower, upper]"""
        return min(max(value, lower), upper)
