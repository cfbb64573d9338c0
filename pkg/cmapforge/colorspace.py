# colorspace.py
"""Преобразования sRGB <-> CIELAB и цветовые расстояния.

Все функции векторизованы по последней оси (..., 3). Скалярные обёртки
принимают и возвращают LabColor / RgbColor.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from cmapforge.errors import InvalidInputError

logger = logging.getLogger(__name__)

# Допуск проверки гаммы по умолчанию (в единицах закодированного sRGB)
GAMUT_TOL = 1e-6


# ===== TYPES =====
@dataclass(frozen=True)
class WhitePoint:
    """Опорный белый в XYZ (Yn = 1)."""
    xn: float
    yn: float
    zn: float

    @classmethod
    def from_xy(cls, x: float, y: float) -> "WhitePoint":
        """Белый по координатам цветности xy."""
        return cls(x / y, 1.0, (1.0 - x - y) / y)


D65 = WhitePoint.from_xy(0.3127, 0.3290)


@dataclass(frozen=True)
class LabColor:
    L: float
    a: float
    b: float

    @property
    def chroma(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def hue(self) -> float:
        """Угол тона в градусах, [0, 360)."""
        return math.degrees(math.atan2(self.b, self.a)) % 360.0

    def as_array(self) -> np.ndarray:
        return np.array([self.L, self.a, self.b], dtype=float)


@dataclass(frozen=True)
class RgbColor:
    """Закодированный (гамма-корректированный) sRGB, номинально [0, 1]."""
    r: float
    g: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=float)


# ===== MATRICES =====
# Первичные цвета sRGB (xy); матрица строится так, что (1, 1, 1) переходит ровно в белый D65
_PRIMARIES_XY = np.array([[0.64, 0.33], [0.30, 0.60], [0.15, 0.06]])


def _rgb_to_xyz_matrix(primaries: np.ndarray, white: WhitePoint) -> np.ndarray:
    x, y = primaries[:, 0], primaries[:, 1]
    columns = np.stack([x / y, np.ones(3), (1.0 - x - y) / y])
    scale = np.linalg.solve(columns, [white.xn, white.yn, white.zn])
    return columns * scale


_RGB_TO_XYZ = _rgb_to_xyz_matrix(_PRIMARIES_XY, D65)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

_DELTA = 6.0 / 29.0


def _as_triples(values: ArrayLike, what: str) -> np.ndarray:
    """Приводит вход к float-массиву (..., 3) и проверяет конечность."""
    if isinstance(values, (LabColor, RgbColor)):
        values = values.as_array()
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1:] != (3,):
        raise InvalidInputError(f"{what} must have a trailing dimension of 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} contains non-finite values")
    return arr


# ===== TRANSFER FUNCTIONS =====
def srgb_to_linear(c: ArrayLike) -> np.ndarray:
    """Снимает гамму sRGB; за пределами [0, 1] продолжается симметрично по знаку."""
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    lin = np.where(a <= 0.04045, a / 12.92, ((a + 0.055) / 1.055) ** 2.4)
    return np.sign(c) * lin


def linear_to_srgb(c: ArrayLike) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    enc = np.where(a <= 0.0031308, a * 12.92, 1.055 * a ** (1.0 / 2.4) - 0.055)
    return np.sign(c) * enc


def _lab_f(t: np.ndarray) -> np.ndarray:
    # Линейная ветвь ниже порога, корректно продолжается и для отрицательных t
    return np.where(t > _DELTA ** 3, np.cbrt(t), t / (3 * _DELTA ** 2) + 4.0 / 29.0)


def _lab_f_inv(f: np.ndarray) -> np.ndarray:
    return np.where(f > _DELTA, f ** 3, 3 * _DELTA ** 2 * (f - 4.0 / 29.0))


# ===== CONVERSIONS =====
def srgb_to_lab_array(rgb: ArrayLike, white: WhitePoint = D65) -> np.ndarray:
    """
    Переводит массив закодированных sRGB-цветов в CIELAB.

    Args:
        rgb: массив (..., 3), значения номинально в [0, 1].
        white: опорный белый.

    Returns:
        np.ndarray: массив (..., 3) со столбцами L, a, b.

    Raises:
        InvalidInputError: если во входе есть NaN или бесконечность.
    """
    rgb = _as_triples(rgb, "sRGB input")
    xyz = srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    fx = _lab_f(xyz[..., 0] / white.xn)
    fy = _lab_f(xyz[..., 1] / white.yn)
    fz = _lab_f(xyz[..., 2] / white.zn)
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def lab_to_srgb_array(lab: ArrayLike, white: WhitePoint = D65) -> np.ndarray:
    """
    Обратное преобразование CIELAB -> закодированный sRGB.

    Результат не обрезается: значения вне [0, 1] означают цвет вне гаммы.
    """
    lab = _as_triples(lab, "Lab input")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([
        white.xn * _lab_f_inv(fx),
        white.yn * _lab_f_inv(fy),
        white.zn * _lab_f_inv(fz),
    ], axis=-1)
    return linear_to_srgb(xyz @ _XYZ_TO_RGB.T)


def srgb_to_lab(color: RgbColor, white: WhitePoint = D65) -> LabColor:
    L, a, b = srgb_to_lab_array(color, white)
    return LabColor(float(L), float(a), float(b))


def lab_to_srgb(color: LabColor, white: WhitePoint = D65) -> RgbColor:
    r, g, b = lab_to_srgb_array(color, white)
    return RgbColor(float(r), float(g), float(b))


def lch_to_lab_array(lightness: ArrayLike, chroma: ArrayLike, hue_deg: ArrayLike) -> np.ndarray:
    """Цилиндрические координаты (L, C, h в градусах) -> Lab."""
    lightness, chroma, hue = np.broadcast_arrays(
        np.asarray(lightness, dtype=float),
        np.asarray(chroma, dtype=float),
        np.radians(np.asarray(hue_deg, dtype=float)),
    )
    return np.stack([lightness, chroma * np.cos(hue), chroma * np.sin(hue)], axis=-1)


# ===== GAMUT =====
def gamut_excess(lab: ArrayLike, white: WhitePoint = D65) -> np.ndarray:
    """Насколько каждый цвет выходит за [0, 1] в sRGB (0 для цветов внутри гаммы)."""
    rgb = lab_to_srgb_array(lab, white)
    excess = np.maximum(-rgb, rgb - 1.0)
    return np.maximum(excess.max(axis=-1), 0.0)


def in_gamut_array(lab: ArrayLike, tol: float = GAMUT_TOL, white: WhitePoint = D65) -> np.ndarray:
    return gamut_excess(lab, white) <= tol


def in_gamut(color: LabColor, tol: float = GAMUT_TOL, white: WhitePoint = D65) -> bool:
    """True, если цвет представим в sRGB с допуском tol по каждому каналу."""
    return bool(in_gamut_array(color, tol, white))


# ===== DIFFERENCES =====
def _pairwise(c1: ArrayLike, c2: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    a = _as_triples(c1, "Lab input")
    b = _as_triples(c2, "Lab input")
    return np.broadcast_arrays(a, b)


def _scalar_if_single(value: np.ndarray) -> float | np.ndarray:
    return float(value) if np.ndim(value) == 0 else value


def delta_e76(c1: LabColor | ArrayLike, c2: LabColor | ArrayLike) -> float | np.ndarray:
    """Евклидово расстояние в Lab."""
    a, b = _pairwise(c1, c2)
    return _scalar_if_single(np.linalg.norm(a - b, axis=-1))


def delta_e2000(c1: LabColor | ArrayLike, c2: LabColor | ArrayLike) -> float | np.ndarray:
    """
    Цветовое различие CIEDE2000 (kL = kC = kH = 1).

    Реализация по опубликованной формуле, включая ветвления по среднему тону
    и обнуление тона для ахроматических цветов.
    """
    p, q = _pairwise(c1, c2)
    L1, a1, b1 = p[..., 0], p[..., 1], p[..., 2]
    L2, a2, b2 = q[..., 0], q[..., 1], q[..., 2]

    c_bar = (np.hypot(a1, b1) + np.hypot(a2, b2)) / 2.0
    c_bar7 = c_bar ** 7
    g = 0.5 * (1.0 - np.sqrt(c_bar7 / (c_bar7 + 25.0 ** 7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.where(c1p == 0, 0.0, np.degrees(np.arctan2(b1, a1p)) % 360.0)
    h2p = np.where(c2p == 0, 0.0, np.degrees(np.arctan2(b2, a2p)) % 360.0)

    d_l = L2 - L1
    d_c = c2p - c1p
    c_prod = c1p * c2p
    dh = h2p - h1p
    dh = np.where(dh > 180.0, dh - 360.0, dh)
    dh = np.where(dh < -180.0, dh + 360.0, dh)
    dh = np.where(c_prod == 0, 0.0, dh)
    d_h = 2.0 * np.sqrt(c_prod) * np.sin(np.radians(dh) / 2.0)

    l_bar = (L1 + L2) / 2.0
    cp_bar = (c1p + c2p) / 2.0
    h_sum = h1p + h2p
    h_bar = np.where(
        np.abs(h1p - h2p) <= 180.0,
        h_sum / 2.0,
        np.where(h_sum < 360.0, (h_sum + 360.0) / 2.0, (h_sum - 360.0) / 2.0),
    )
    h_bar = np.where(c_prod == 0, h_sum, h_bar)

    t = (1.0
         - 0.17 * np.cos(np.radians(h_bar - 30.0))
         + 0.24 * np.cos(np.radians(2.0 * h_bar))
         + 0.32 * np.cos(np.radians(3.0 * h_bar + 6.0))
         - 0.20 * np.cos(np.radians(4.0 * h_bar - 63.0)))
    d_theta = 30.0 * np.exp(-(((h_bar - 275.0) / 25.0) ** 2))
    cp_bar7 = cp_bar ** 7
    r_c = 2.0 * np.sqrt(cp_bar7 / (cp_bar7 + 25.0 ** 7))
    s_l = 1.0 + 0.015 * (l_bar - 50.0) ** 2 / np.sqrt(20.0 + (l_bar - 50.0) ** 2)
    s_c = 1.0 + 0.045 * cp_bar
    s_h = 1.0 + 0.015 * cp_bar * t
    r_t = -np.sin(np.radians(2.0 * d_theta)) * r_c

    term_l = d_l / s_l
    term_c = d_c / s_c
    term_h = d_h / s_h
    de = np.sqrt(term_l ** 2 + term_c ** 2 + term_h ** 2 + r_t * term_c * term_h)
    return _scalar_if_single(de)
