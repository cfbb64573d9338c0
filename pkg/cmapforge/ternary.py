# ternary.py
"""Тернарные изображения: три канала данных, взвешивающие три базисных цвета.

Базис с почти равной светлотой и хроматичностью (сумма цветов - белый) даёт
изображение, в котором перестановка каналов почти не меняет светлоту.
"""
import logging
from dataclasses import dataclass

import numpy as np

from cmapforge.colorspace import RgbColor, srgb_to_lab_array
from cmapforge.config import DEFAULT_CONFIG
from cmapforge.errors import InvalidInputError, RangeError
from cmapforge.grids import RgbImage, ScalarGrid, check_same_shape

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TernaryBasis:
    red_basis: RgbColor
    green_basis: RgbColor
    blue_basis: RgbColor

    def __post_init__(self):
        total = self.matrix().sum(axis=0)
        if not np.allclose(total, 1.0, rtol=0.0, atol=1e-9):
            raise InvalidInputError(f"basis colours must sum to white, got {tuple(np.round(total, 6))}")

    def matrix(self) -> np.ndarray:
        """Строки - базисные цвета."""
        return np.array([self.red_basis.as_array(), self.green_basis.as_array(), self.blue_basis.as_array()])


def paper_basis() -> TernaryBasis:
    """Базис с согласованной светлотой (~50/46/44) и хроматичностью."""
    return TernaryBasis(
        RgbColor(0.90, 0.17, 0.00),
        RgbColor(0.00, 0.50, 0.00),
        RgbColor(0.10, 0.33, 1.00),
    )


def rgb_basis() -> TernaryBasis:
    return TernaryBasis(RgbColor(1.0, 0.0, 0.0), RgbColor(0.0, 1.0, 0.0), RgbColor(0.0, 0.0, 1.0))


def secondaries(basis: TernaryBasis) -> tuple[RgbColor, RgbColor, RgbColor]:
    """Попарные суммы: красный+зелёный, зелёный+синий, красный+синий."""
    r, g, b = basis.matrix()
    return RgbColor(*(r + g)), RgbColor(*(g + b)), RgbColor(*(r + b))


def compose(
    ch1: ScalarGrid,
    ch2: ScalarGrid,
    ch3: ScalarGrid,
    basis: TernaryBasis,
    background: tuple[float, float, float] = DEFAULT_CONFIG.background,
) -> RgbImage:
    """
    Сумма базисных цветов с весами из трёх каналов: c = v1*B1 + v2*B2 + v3*B3.

    Args:
        ch1, ch2, ch3: каналы, нормированные в [0, 1].
        basis: базисные цвета.

    Returns:
        RgbImage: ячейки, замаскированные хотя бы в одном канале, получают фон.

    Raises:
        DimensionMismatchError: размеры каналов различаются.
        RangeError: значения каналов вне [0, 1].
    """
    check_same_shape(ch1.shape, ch2.shape, "compose")
    check_same_shape(ch1.shape, ch3.shape, "compose")
    mask = ch1.mask | ch2.mask | ch3.mask
    channels = np.stack([ch.filled(0.0) for ch in (ch1, ch2, ch3)], axis=-1)
    if channels.min() < 0.0 or channels.max() > 1.0:
        raise RangeError("ternary channels must be normalized to [0, 1]")
    pixels = np.clip(channels @ basis.matrix(), 0.0, 1.0)
    pixels = np.where(mask[:, :, None], np.asarray(background, dtype=float), pixels)
    logger.info(f"Composed {ch1.width}x{ch1.height} ternary image")
    return RgbImage(pixels)


def lightness_image(img: RgbImage) -> ScalarGrid:
    """CIELAB-светлота каждого пикселя."""
    return ScalarGrid(srgb_to_lab_array(img.pixels)[..., 0])


def basis_gamut_vertices(basis: TernaryBasis) -> list[RgbColor]:
    """Восемь вершин параллелепипеда, натянутого на базисные цвета."""
    r, g, b = basis.matrix()
    zero = np.zeros(3)
    vertices = [zero, r, g, b, r + g, r + b, g + b, r + g + b]
    return [RgbColor(*map(float, v)) for v in vertices]


def normalize_channel(grid: ScalarGrid, clip: tuple[float, float] | None = (2.0, 98.0)) -> ScalarGrid:
    """Линейно растягивает канал в [0, 1]; clip - процентили, за которыми значения обрезаются."""
    valid = grid.valid()
    if valid.size == 0:
        raise RangeError("cannot normalize a fully masked channel")
    if clip is None:
        lo, hi = float(valid.min()), float(valid.max())
    else:
        if not 0.0 <= clip[0] < clip[1] <= 100.0:
            raise RangeError(f"percentile clip must satisfy 0 <= lo < hi <= 100, got {clip}")
        lo, hi = (float(v) for v in np.percentile(valid, clip))
    if hi <= lo:
        raise RangeError("channel range is degenerate")
    scaled = np.clip((grid.values - lo) / (hi - lo), 0.0, 1.0)
    return ScalarGrid(scaled, mask=grid.mask)
