# data_render.py
import logging
from dataclasses import dataclass

import numpy as np

from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, Direction, MapAttribute, RenderMode
from cmapforge.errors import InvalidPolicyError, RangeError
from cmapforge.grids import RgbImage, ScalarGrid, check_same_shape
from cmapforge.test_images import RangeSpec, apply_map, map_indices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenderPolicy:
    """
    Политика отрисовки данных.

    linear: lo/hi задают явный диапазон (иначе min/max данных);
    diverging: reference попадает на центральный элемент;
    cyclic: ((v - origin) mod period) / period.
    clamp=False выводит значения вне диапазона фоновым цветом вместо крайних элементов.
    """
    mode: RenderMode = RenderMode.LINEAR
    reference: float = 0.0
    period: float | None = None
    origin: float = 0.0
    lo: float | None = None
    hi: float | None = None
    clamp: bool = True

    def validate(self) -> None:
        mode = RenderMode(self.mode)
        if mode is RenderMode.CYCLIC and (self.period is None or self.period <= 0):
            raise InvalidPolicyError(f"cyclic rendering needs a positive period, got {self.period}")
        if (self.lo is None) != (self.hi is None):
            raise InvalidPolicyError("an explicit range needs both lo and hi")
        if self.lo is not None and not self.lo < self.hi:
            raise InvalidPolicyError(f"explicit range needs lo < hi, got ({self.lo}, {self.hi})")


def _range_for(grid: ScalarGrid, policy: RenderPolicy) -> RangeSpec:
    mode = RenderMode(policy.mode)
    if mode is RenderMode.CYCLIC:
        return RangeSpec.cyclic(policy.period, policy.origin)
    if mode is RenderMode.LINEAR:
        return RangeSpec.explicit(policy.lo, policy.hi) if policy.lo is not None else RangeSpec.auto()

    valid = grid.valid()
    if valid.size == 0:
        raise RangeError("cannot render a fully masked grid")
    vmin, vmax = float(valid.min()), float(valid.max())
    ref = policy.reference
    if not vmin <= ref <= vmax:
        logger.warning(f"Diverging reference {ref} lies outside the data range [{vmin}, {vmax}]")
    half = max(vmax - ref, ref - vmin)
    if half <= 0:
        raise RangeError(f"data range is degenerate around the reference {ref}")
    return RangeSpec.explicit(ref - half, ref + half)


def render(
    grid: ScalarGrid,
    cmap: ColorMap,
    policy: RenderPolicy = RenderPolicy(),
    background: tuple[float, float, float] = DEFAULT_CONFIG.background,
) -> RgbImage:
    """
    Отрисовка данных картой с учётом смысла значений.

    Для расходящихся данных диапазон симметризуется по наибольшему отклонению
    от опорного значения, так что равные отклонения получают равные цвета.

    Args:
        grid: данные.
        cmap: цветовая карта.
        policy: режим отрисовки.
        background: цвет замаскированных ячеек.

    Returns:
        RgbImage: изображение того же размера, что и grid.
    """
    policy.validate()
    mode = RenderMode(policy.mode)
    if mode is RenderMode.DIVERGING and MapAttribute.DIVERGING not in cmap.attributes:
        logger.warning(f"Diverging rendering with non-diverging map '{cmap.name}'")
    if mode is RenderMode.CYCLIC and not cmap.cyclic:
        logger.warning(f"Cyclic rendering with non-cyclic map '{cmap.name}'; expect a seam at the wrap")

    range_spec = _range_for(grid, policy)
    # автоматический диапазон покрывает все данные, выходить за него нечему
    if policy.clamp or mode is RenderMode.CYCLIC or range_spec.lo is None:
        image = apply_map(grid, cmap, range_spec, background)
    else:
        outside = (grid.filled(range_spec.lo) < range_spec.lo) | (grid.filled(range_spec.lo) > range_spec.hi)
        index = map_indices(grid, cmap.n, range_spec)
        hidden = grid.mask | outside
        pixels = np.where(hidden[:, :, None], np.asarray(background, dtype=float), cmap.entries[index])
        image = RgbImage(pixels)
    logger.info(f"Rendered {grid.width}x{grid.height} grid with '{cmap.name}' ({mode.value})")
    return image


def modulate(img: RgbImage, weights: ScalarGrid, direction: Direction = Direction.TOWARD_BLACK) -> RgbImage:
    """
    Модуляция цветов вспомогательными данными.

    toward-black: c' = w*c; toward-white: c' = w*c + (1 - w). w = 1 оставляет цвет
    без изменений. Замаскированные веса считаются равными 1.
    """
    check_same_shape(img.shape, weights.shape, "modulate")
    w = weights.filled(1.0)
    if w.min() < 0.0 or w.max() > 1.0:
        raise RangeError(f"modulation weights must lie in [0, 1], got [{w.min()}, {w.max()}]")
    w = w[:, :, None]
    if Direction(direction) is Direction.TOWARD_BLACK:
        pixels = w * img.pixels
    else:
        pixels = w * img.pixels + (1.0 - w)
    return RgbImage(np.clip(pixels, 0.0, 1.0))
