# relief_shading.py
"""Рельефная отмывка, мультипликативное наложение цвета и спектральные инструменты.

Отмывка ламбертова: без теней и без рассеянной составляющей. Нормаль строится
по центральным разностям, на краях - по односторонним.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft, linalg, ndimage
from scipy.signal import get_window

from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, ToolkitConfig
from cmapforge.data_render import RenderPolicy, render
from cmapforge.errors import InvalidArgumentError, RangeError
from cmapforge.grids import RgbImage, ScalarGrid, check_same_shape

logger = logging.getLogger(__name__)

_MIN_NOISE_SIZE = 16
# Остаток подгонки (в единицах log10), выше которого спектр не считается степенным
_POWER_LAW_RESIDUAL = 0.25


@dataclass(frozen=True)
class ShadingParams:
    """azimuth - по часовой стрелке от севера (верх изображения), elevation - над горизонтом, в градусах."""
    azimuth: float = DEFAULT_CONFIG.azimuth_deg
    elevation: float = DEFAULT_CONFIG.elevation_deg
    gradient_scale: float = 1.0

    def validate(self) -> None:
        if not 0.0 < self.elevation <= 90.0:
            raise RangeError(f"elevation must lie in (0, 90], got {self.elevation}")
        if self.gradient_scale <= 0:
            raise RangeError(f"gradient_scale must be positive, got {self.gradient_scale}")

    def light_vector(self) -> np.ndarray:
        """Направление на источник в осях (восток, вниз по изображению, вверх)."""
        az = math.radians(self.azimuth)
        el = math.radians(self.elevation)
        return np.array([math.sin(az) * math.cos(el), -math.cos(az) * math.cos(el), math.sin(el)])


@dataclass(frozen=True)
class SpectrumFit:
    """Прямая log10(A) = slope * log10(f) + intercept на полосе band; residual - СКО остатков."""
    slope: float
    intercept: float
    band: tuple[float, float]
    residual: float
    bins: int

    @property
    def is_power_law(self) -> bool:
        return self.residual <= _POWER_LAW_RESIDUAL


def _fill_nearest(grid: ScalarGrid) -> np.ndarray:
    if not grid.mask.any() or grid.mask.all():
        return grid.filled()
    indices = ndimage.distance_transform_edt(grid.mask, return_distances=False, return_indices=True)
    return grid.values[tuple(indices)]


def _axis_gradient(z: np.ndarray, valid: np.ndarray, axis: int) -> np.ndarray:
    """Центральная разность; односторонняя там, где один из соседей замаскирован."""
    z, valid = np.moveaxis(z, axis, -1), np.moveaxis(valid, axis, -1)
    grad = np.gradient(z, axis=-1)
    step = np.diff(z, axis=-1)
    forward = np.zeros_like(z)
    forward[..., :-1] = step
    backward = np.zeros_like(z)
    backward[..., 1:] = step
    next_ok = np.zeros_like(valid)
    next_ok[..., :-1] = valid[..., 1:]
    prev_ok = np.zeros_like(valid)
    prev_ok[..., 1:] = valid[..., :-1]
    grad = np.where(prev_ok & ~next_ok, backward, grad)
    grad = np.where(next_ok & ~prev_ok, forward, grad)
    return np.moveaxis(grad, -1, axis)


def shade(grid: ScalarGrid, params: ShadingParams = ShadingParams()) -> ScalarGrid:
    """
    Интенсивность освещения I = clamp(n . l, 0, 1) для каждой ячейки.

    Рядом с замаскированными ячейками берётся односторонняя разность по
    валидным соседям; сами они остаются замаскированными в результате.
    """
    params.validate()
    if grid.height < 2 or grid.width < 2:
        raise InvalidArgumentError(f"shading needs a grid of at least 2x2, got {grid.width}x{grid.height}")
    z, valid = _fill_nearest(grid), ~grid.mask
    dz_dy, dz_dx = _axis_gradient(z, valid, 0), _axis_gradient(z, valid, 1)
    s = params.gradient_scale
    nx, ny = -s * dz_dx, -s * dz_dy
    norm = np.sqrt(nx ** 2 + ny ** 2 + 1.0)
    lx, ly, lz = params.light_vector()
    intensity = np.clip((nx * lx + ny * ly + lz) / norm, 0.0, 1.0)
    return ScalarGrid(intensity, mask=grid.mask)


def combine_multiplicative(color: RgbImage, shading: ScalarGrid) -> RgbImage:
    """Умножает каждый канал цвета на интенсивность (это не смешивание с прозрачностью)."""
    check_same_shape(color.shape, shading.shape, "combine_multiplicative")
    intensity = shading.filled(1.0)
    if intensity.min() < 0.0 or intensity.max() > 1.0:
        raise RangeError("shading intensities must lie in [0, 1]")
    return RgbImage(color.pixels * intensity[:, :, None])


def one_on_f_noise(width: int, height: int, p: float, seed: int = 0) -> ScalarGrid:
    """
    Шум со спектром амплитуд 1/f^p.

    Случайные фазы из генератора с заданным seed, нулевая постоянная
    составляющая, обратное преобразование и линейная нормировка в [0, 1].
    """
    if width < _MIN_NOISE_SIZE or height < _MIN_NOISE_SIZE:
        raise InvalidArgumentError(f"noise grid must be at least {_MIN_NOISE_SIZE}x{_MIN_NOISE_SIZE}")
    if p < 0:
        raise RangeError(f"spectral exponent p must be non-negative, got {p}")
    rng = np.random.default_rng(seed)
    freq = np.hypot(fft.fftfreq(height)[:, None], fft.rfftfreq(width)[None, :])
    amplitude = np.zeros_like(freq)
    nonzero = freq > 0
    amplitude[nonzero] = freq[nonzero] ** -p
    phase = rng.uniform(0.0, 2.0 * math.pi, size=freq.shape)
    noise = fft.irfft2(amplitude * np.exp(1j * phase), s=(height, width))
    noise = (noise - noise.min()) / (noise.max() - noise.min())
    logger.info(f"Synthesized {width}x{height} 1/f^{p:g} noise (seed {seed})")
    return ScalarGrid(noise)


def spectrum_slope(
    grid: ScalarGrid,
    band: tuple[float, float] | None = None,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> SpectrumFit:
    """
    Наклон радиально усреднённого амплитудного спектра в логарифмических осях.

    Args:
        grid: данные; соотношение сторон не более 2:1.
        band: полоса частот (f_lo, f_hi) в циклах на пиксель; по умолчанию
            (4/size, 0.25).

    Returns:
        SpectrumFit: наклон, свободный член и остаток подгонки.

    Raises:
        InvalidArgumentError: слишком вытянутая сетка.
        RangeError: полоса вне (0, 0.5] или пуста после дискретизации.
    """
    h, w = grid.shape
    if max(h, w) > 2 * min(h, w):
        raise InvalidArgumentError(f"grid aspect {w}x{h} exceeds 2:1")
    f_lo, f_hi = band or (config.spectrum_band_low_cycles / min(h, w), config.spectrum_band_high)
    if not 0.0 < f_lo < f_hi <= 0.5:
        raise RangeError(f"frequency band must satisfy 0 < f_lo < f_hi <= 0.5, got ({f_lo}, {f_hi})")

    data = grid.filled()
    data = data - data.mean()
    window = np.outer(get_window("hann", h), get_window("hann", w))
    amplitude = np.abs(fft.fft2(data * window))
    freq = np.hypot(fft.fftfreq(h)[:, None], fft.fftfreq(w)[None, :])

    in_band = (freq >= f_lo) & (freq <= f_hi)
    edges = np.geomspace(f_lo, f_hi, config.spectrum_bins + 1)
    which = np.clip(np.searchsorted(edges, freq[in_band], side="right") - 1, 0, config.spectrum_bins - 1)
    counts = np.bincount(which, minlength=config.spectrum_bins)
    log_f = np.bincount(which, weights=np.log10(freq[in_band]), minlength=config.spectrum_bins)
    mean_a = np.bincount(which, weights=amplitude[in_band], minlength=config.spectrum_bins)
    filled = counts > 0
    if filled.sum() < 3:
        raise RangeError(f"frequency band ({f_lo}, {f_hi}) holds fewer than 3 populated bins")

    x = log_f[filled] / counts[filled]
    y = np.log10(np.maximum(mean_a[filled] / counts[filled], np.finfo(float).tiny))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), _, _, _ = linalg.lstsq(design, y)
    residual = float(np.sqrt(np.mean((y - design @ np.array([slope, intercept])) ** 2)))
    fit = SpectrumFit(float(slope), float(intercept), (float(f_lo), float(f_hi)), residual, int(filled.sum()))
    if not fit.is_power_law:
        logger.warning(f"Amplitude spectrum is not a power law (fit residual {residual:.3f})")
    return fit


def shade_and_drape(
    grid: ScalarGrid,
    cmap: ColorMap,
    policy: RenderPolicy = RenderPolicy(),
    params: ShadingParams = ShadingParams(),
) -> RgbImage:
    """Раскрашивает данные картой и накладывает на их же отмывку."""
    return combine_multiplicative(render(grid, cmap, policy), shade(grid, params))
