# errors.py
"""Иерархия исключений cmapforge.

Все ошибки наследуются от ValueError, поэтому вызывающему коду достаточно
ловить один тип. CLI и MCP-сервер превращают их в код выхода или в
ответ {"status": "error", ...}.
"""


class CmapforgeError(ValueError):
    """Базовая ошибка инструментария."""


class InvalidInputError(CmapforgeError):
    """Нечисловые или бесконечные значения на входе."""


class InvalidArgumentError(CmapforgeError):
    """Некорректный параметр (количество, поле спецификации и т.п.)."""


class RangeError(CmapforgeError):
    """Параметр вне допустимого диапазона или вырожденный диапазон данных."""


class GamutError(CmapforgeError):
    """Цвет вне гаммы sRGB."""

    def __init__(self, message: str, max_chroma: float | None = None):
        super().__init__(message)
        self.max_chroma = max_chroma


class DegeneratePathError(CmapforgeError):
    """Суммарный контраст пути равен нулю для выбранной метрики."""


class ConstraintViolationError(CmapforgeError):
    """Нарушены ограничения семейства цветовых карт."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class InvalidOperationError(CmapforgeError):
    """Операция неприменима к данной карте."""


class InvalidPolicyError(CmapforgeError):
    """Некорректная политика отрисовки."""


class DimensionMismatchError(CmapforgeError):
    """Размеры изображений/сеток не совпадают."""


class ParseError(CmapforgeError):
    """Ошибка разбора файла; line - номер строки (с 1), если известен."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownPresetError(CmapforgeError):
    """Запрошен несуществующий пресет."""
