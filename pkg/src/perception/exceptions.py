"""
Исключения слоя восприятия
"""


class PerceptionError(Exception):
    """Базовое исключение восприятия"""
    pass


class InvalidObservationError(PerceptionError, ValueError):
    """Недопустимое наблюдение или аргумент"""
    pass


class UnknownVehicleError(PerceptionError, KeyError):
    """Эго-автомобиль отсутствует в мире"""
    pass


class ExternalFormatError(PerceptionError):
    """Ответ внешней модели не соответствует схеме (нужен повторный запрос)"""
    pass


class ExternalUnavailableError(PerceptionError):
    """Внешняя модель недоступна (таймаут, сетевая ошибка, код ответа)"""
    pass
