"""
Исключения планировщика
"""


class PlannerError(Exception):
    """Базовое исключение планировщика"""
    pass


class InvalidArgumentError(PlannerError, ValueError):
    """Недопустимый аргумент (нечисловые значения, несогласованные длины)"""
    pass


class DegenerateBoundsError(PlannerError):
    """
    Вырожденные боковые ограничения: после ограничения комфортом
    нижняя граница u_y превышает верхнюю (автомобиль прижат к краю дороги
    и движется наружу).
    """

    def __init__(self, lower_unclipped: float, upper_unclipped: float):
        self.lower_unclipped = lower_unclipped
        self.upper_unclipped = upper_unclipped
        super().__init__(
            f"Вырожденные боковые границы: u_y_L={lower_unclipped:.4f}, u_y_U={upper_unclipped:.4f}"
        )


class BackwardPassError(PlannerError):
    """Обратный проход не удался (индефинитный гессиан, лимит активного множества)"""
    pass


class ForwardPassError(PlannerError):
    """Прямой проход дал нечисловую траекторию"""
    pass
