# grids.py
from dataclasses import dataclass

import numpy as np

from cmapforge.errors import DimensionMismatchError, InvalidInputError


@dataclass(frozen=True, eq=False)
class ScalarGrid:
    """
    Двумерная сетка значений (height, width) с необязательной маской.

    mask=True помечает отсутствующие данные; NaN в values тоже считается
    маской.
    """
    values: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or min(values.shape) < 1:
            raise InvalidInputError(f"grid values must be a non-empty 2-D array, got shape {values.shape}")
        mask = np.isnan(values)
        if self.mask is not None:
            given = np.asarray(self.mask, dtype=bool)
            if given.shape != values.shape:
                raise DimensionMismatchError(f"mask shape {given.shape} does not match grid {values.shape}")
            mask |= given
        if not np.all(np.isfinite(values[~mask])):
            raise InvalidInputError("grid contains infinite values outside the mask")
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def valid(self) -> np.ndarray:
        """Значения вне маски (одномерный массив)."""
        return self.values[~self.mask]

    def filled(self, fill: float | None = None) -> np.ndarray:
        """Копия значений с замаскированными ячейками, заполненными fill (по умолчанию средним)."""
        valid = self.valid()
        if fill is None:
            fill = float(valid.mean()) if valid.size else 0.0
        return np.where(self.mask, fill, self.values)


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Изображение (height, width, 3) в закодированном sRGB."""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=float)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or min(pixels.shape[:2]) < 1:
            raise InvalidInputError(f"image must be a non-empty (h, w, 3) array, got shape {pixels.shape}")
        if not np.all(np.isfinite(pixels)):
            raise InvalidInputError("image contains non-finite values")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape[:2]

    @classmethod
    def from_grey(cls, grid: ScalarGrid, background: float = 0.5) -> "RgbImage":
        """Серое изображение из сетки значений в [0, 1]."""
        grey = np.clip(grid.filled(background), 0.0, 1.0)
        return cls(np.repeat(grey[:, :, None], 3, axis=2))


def check_same_shape(first: tuple[int, int], second: tuple[int, int], what: str) -> None:
    if tuple(first) != tuple(second):
        raise DimensionMismatchError(f"{what}: shapes {tuple(first)} and {tuple(second)} differ")
