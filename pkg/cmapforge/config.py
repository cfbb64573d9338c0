# config.py
import logging
from dataclasses import dataclass, field
from enum import Enum

from cmapforge.colorspace import GAMUT_TOL
from cmapforge.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


class Metric(str, Enum):
    """Метрика перцептивного контраста между соседними элементами"""
    LIGHTNESS = "lightness"
    CIE76 = "cie76"


class MapAttribute(str, Enum):
    """Таксономия цветовых карт"""
    LINEAR = "linear"
    DIVERGING = "diverging"
    RAINBOW = "rainbow"
    CYCLIC = "cyclic"
    ISOLUMINANT = "isoluminant"
    LOW_CONTRAST = "low-contrast"


class DivergingStyle(str, Enum):
    REVERSING = "reversing"
    LINEAR_DIVERGING = "linear-diverging"


class CyclicStyle(str, Enum):
    ZIGZAG = "zigzag"
    DIAMOND = "diamond"
    DIVERGING_CYCLIC = "diverging-cyclic"
    GREY = "grey"


class RangeMode(str, Enum):
    AUTO = "auto"
    EXPLICIT = "explicit"
    CYCLIC = "cyclic"


class RenderMode(str, Enum):
    LINEAR = "linear"
    DIVERGING = "diverging"
    CYCLIC = "cyclic"


class Direction(str, Enum):
    """Куда тянуть цвет при модуляции вспомогательными данными"""
    TOWARD_BLACK = "black"
    TOWARD_WHITE = "white"


class ImageFormat(str, Enum):
    PPM = "ppm"
    PNG = "png"


@dataclass
class ToolkitConfig:
    """Конфигурация инструментария - численные константы конвейера и значения по умолчанию."""
    gamut_tolerance: float = GAMUT_TOL
    catalogue_gamut_tolerance: float = 0.01

    # Выравнивание контраста
    dense_samples: int = 2048
    iterations: int = 15
    default_n: int = 256
    auto_metric_lightness_range: float = 10.0

    # Сглаживание (sigma задаётся для карты из 256 элементов)
    diverging_sigma: float = 5.0
    rainbow_sigma: float = 7.0
    cyclic_sigma: float = 7.0

    # Анализ равномерности
    flat_fraction: float = 0.25
    flat_floor: float = 1e-3
    discontinuity_factor: float = 3.0
    kink_angle_deg: float = 20.0
    kink_median_factor: float = 4.0
    kink_min_step_fraction: float = 0.1
    reversal_neighbourhood_sigmas: float = 3.0

    # Отрисовка и рельеф
    background: tuple[float, float, float] = (0.5, 0.5, 0.5)
    azimuth_deg: float = 135.0
    elevation_deg: float = 45.0
    spectrum_band_low_cycles: float = 4.0
    spectrum_band_high: float = 0.25
    spectrum_bins: int = 24

    # Пути к данным пакета
    presets_resource: str = field(default="data/presets.json")

    def validate(self) -> None:
        """Проверка согласованности настроек"""
        if self.dense_samples < 16:
            raise InvalidArgumentError("dense_samples must be at least 16")
        if self.iterations < 1:
            raise InvalidArgumentError("iterations must be at least 1")
        if self.default_n < 2:
            raise InvalidArgumentError("default_n must be at least 2")
        if not 0 < self.flat_fraction < 1:
            raise InvalidArgumentError("flat_fraction must lie in (0, 1)")
        if self.discontinuity_factor <= 1:
            raise InvalidArgumentError("discontinuity_factor must exceed 1")
        if not all(0.0 <= c <= 1.0 for c in self.background):
            raise InvalidArgumentError(f"background colour {self.background} is outside [0, 1]")
        if not 0 < self.elevation_deg <= 90:
            raise InvalidArgumentError("elevation_deg must lie in (0, 90]")
        if not 0 < self.spectrum_band_high <= 0.5:
            raise InvalidArgumentError("spectrum_band_high must lie in (0, 0.5]")


DEFAULT_CONFIG = ToolkitConfig()
