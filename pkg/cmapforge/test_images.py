# test_images.py
"""Тестовые изображения для оценки цветовых карт.

Линейное: синусоида на линейном пилообразном фоне, амплитуда которой растёт
от нуля внизу до полной вверху по квадратичному закону. Циклическое: та же
идея на спиральной (угловой) рампе с разрывом 2π справа.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, RangeMode
from cmapforge.errors import InvalidArgumentError, InvalidPolicyError, RangeError
from cmapforge.grids import RgbImage, ScalarGrid

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# ===== SPECS =====
@dataclass(frozen=True)
class LinearTestSpec:
    """amplitude - размах синусоиды (от пика до впадины) в долях диапазона рампы."""
    width: int = 512
    height: int = 256
    wavelength: float = 8.0
    amplitude: float = 0.10

    def validate(self) -> None:
        if self.width < 2 or self.height < 2:
            raise InvalidArgumentError(f"image must be at least 2x2, got {self.width}x{self.height}")
        if self.wavelength < 2:
            raise InvalidArgumentError(f"wavelength must be at least 2 pixels, got {self.wavelength}")
        if not 0 < self.amplitude < 0.5:
            raise InvalidArgumentError(f"amplitude must lie in (0, 0.5), got {self.amplitude}")


@dataclass(frozen=True)
class CyclicTestSpec:
    """amplitude - амплитуда синусоиды в радианах."""
    size: int = 512
    cycles: int = 100
    amplitude: float = math.pi / 10

    def validate(self) -> None:
        if self.size < 2:
            raise InvalidArgumentError(f"size must be at least 2, got {self.size}")
        if self.cycles < 1:
            raise InvalidArgumentError(f"cycles must be at least 1, got {self.cycles}")
        if self.amplitude <= 0:
            raise InvalidArgumentError(f"amplitude must be positive, got {self.amplitude}")


@dataclass(frozen=True)
class RangeSpec:
    """Отображение значений в индексы карты."""
    mode: RangeMode = RangeMode.AUTO
    lo: float | None = None
    hi: float | None = None
    period: float | None = None
    origin: float = 0.0

    @classmethod
    def auto(cls) -> "RangeSpec":
        return cls(RangeMode.AUTO)

    @classmethod
    def explicit(cls, lo: float, hi: float) -> "RangeSpec":
        return cls(RangeMode.EXPLICIT, lo=lo, hi=hi)

    @classmethod
    def cyclic(cls, period: float, origin: float = 0.0) -> "RangeSpec":
        return cls(RangeMode.CYCLIC, period=period, origin=origin)


# ===== GENERATORS =====
def linear_test_image(spec: LinearTestSpec = LinearTestSpec()) -> ScalarGrid:
    """
    Линейное тестовое изображение.

    v(x, y) = x/(W-1) + A * m(y) * sin(2*pi*x/wavelength), где m растёт как
    квадрат расстояния от нижней строки (0 внизу, 1 вверху), а A - половина
    заданного размаха. Каждая строка затем линейно растягивается на 0..255.

    Args:
        spec: размеры, длина волны и относительный размах синусоиды.

    Returns:
        ScalarGrid: значения (height, width) в [0, 255].
    """
    spec.validate()
    x = np.arange(spec.width, dtype=float)
    distance = spec.height - 1 - np.arange(spec.height, dtype=float)
    modulation = (distance / (spec.height - 1)) ** 2
    ramp = x / (spec.width - 1)
    sine = np.sin(TWO_PI * x / spec.wavelength)
    values = ramp[None, :] + (spec.amplitude / 2.0) * modulation[:, None] * sine[None, :]

    row_min = values.min(axis=1, keepdims=True)
    row_max = values.max(axis=1, keepdims=True)
    image = (values - row_min) / (row_max - row_min) * 255.0
    logger.info(f"Generated linear test image {spec.width}x{spec.height}, "
                f"{spec.width / spec.wavelength:g} cycles")
    return ScalarGrid(image)


def spiral_value(theta: np.ndarray, radius_fraction: np.ndarray, spec: CyclicTestSpec = CyclicTestSpec()) -> np.ndarray:
    """Значение спирального изображения при угле theta и радиусе r/R; результат в [0, 2*pi)."""
    theta = np.asarray(theta, dtype=float)
    modulation = np.asarray(radius_fraction, dtype=float) ** 2
    value = np.mod(theta + spec.amplitude * modulation * np.sin(spec.cycles * theta), TWO_PI)
    return np.where(value >= TWO_PI, 0.0, value)


def cyclic_test_image(spec: CyclicTestSpec = CyclicTestSpec()) -> ScalarGrid:
    """
    Циклическое тестовое изображение размером size x size.

    Угол отсчитывается против часовой стрелки от направления вправо, ось y
    изображения направлена вниз. Пиксели дальше радиуса R = size/2 от центра
    маскируются.
    """
    spec.validate()
    centre = (spec.size - 1) / 2.0
    coords = np.arange(spec.size, dtype=float)
    dx = coords[None, :] - centre
    dy = centre - coords[:, None]
    radius = np.hypot(dx, dy) / (spec.size / 2.0)
    theta = np.mod(np.arctan2(dy, dx), TWO_PI)
    values = spiral_value(theta, np.minimum(radius, 1.0), spec)
    logger.info(f"Generated cyclic test image {spec.size}x{spec.size}, {spec.cycles} cycles")
    return ScalarGrid(values, mask=radius > 1.0)


# ===== COLOUR LOOKUP =====
def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def map_indices(grid: ScalarGrid, n: int, range_spec: RangeSpec) -> np.ndarray:
    """Индексы карты (целые 0..n-1) для каждой ячейки; замаскированные ячейки получают 0."""
    mode = RangeMode(range_spec.mode)
    if mode is RangeMode.CYCLIC:
        period = range_spec.period
        if period is None or period <= 0:
            raise InvalidPolicyError(f"cyclic range needs a positive period, got {period}")
        fraction = np.mod(grid.filled(range_spec.origin) - range_spec.origin, period) / period
        index = np.floor(fraction * n + 0.5).astype(np.int64) % n
    else:
        if mode is RangeMode.AUTO:
            valid = grid.valid()
            if valid.size == 0:
                raise RangeError("cannot derive an automatic range from a fully masked grid")
            lo, hi = float(valid.min()), float(valid.max())
            if lo == hi:
                raise RangeError(f"data range is degenerate (all values equal {lo})")
        else:
            lo, hi = range_spec.lo, range_spec.hi
            if lo is None or hi is None or not lo < hi:
                raise RangeError(f"explicit range needs lo < hi, got ({lo}, {hi})")
        position = (grid.filled(lo) - lo) / (hi - lo) * (n - 1)
        index = np.clip(round_half_away(position), 0, n - 1).astype(np.int64)
    return np.where(grid.mask, 0, index)


def apply_map(
    grid: ScalarGrid,
    cmap: ColorMap,
    range_spec: RangeSpec = RangeSpec(),
    background: tuple[float, float, float] = DEFAULT_CONFIG.background,
) -> RgbImage:
    """
    Раскрашивает сетку картой поиском ближайшего индекса (без интерполяции цветов).

    Raises:
        RangeError: автоматический диапазон на пустой/полностью замаскированной
            или постоянной сетке; некорректный явный диапазон.
    """
    index = map_indices(grid, cmap.n, range_spec)
    pixels = cmap.entries[index]
    pixels = np.where(grid.mask[:, :, None], np.asarray(background, dtype=float), pixels)
    return RgbImage(pixels)
