# spline_path.py
"""Пути цветовых карт: B-сплайны 1-го и 2-го порядка в CIELAB.

Открытые пути используют равномерные узлы, зажатые на концах (кривая проходит
через первую и последнюю опорные точки), циклические - периодические узлы.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import BSpline

from cmapforge.colorspace import LabColor, gamut_excess
from cmapforge.config import DEFAULT_CONFIG, Metric
from cmapforge.errors import GamutError, InvalidArgumentError, InvalidInputError, RangeError

logger = logging.getLogger(__name__)


def _clamped_knots(n_points: int, degree: int) -> np.ndarray:
    inner = np.linspace(0.0, 1.0, n_points - degree + 1)
    return np.concatenate([np.zeros(degree), inner, np.ones(degree)])


def _periodic_knots(n_points: int, degree: int) -> np.ndarray:
    return (np.arange(n_points + 2 * degree + 1) - degree) / n_points


@dataclass(frozen=True, eq=False)
class MapPath:
    """
    B-сплайн через опорные точки в CIELAB.

    Args:
        control_points: массив (m, 3) опорных точек L, a, b.
        order: степень сплайна, 1 или 2.
        cyclic: замкнутый (периодический) путь.
        gamut_tol: допуск гаммы для опорных точек.
    """
    control_points: np.ndarray
    order: int = 2
    cyclic: bool = False
    gamut_tol: float = DEFAULT_CONFIG.catalogue_gamut_tolerance
    _spline: BSpline = field(init=False, repr=False)

    def __post_init__(self):
        points = np.array(self.control_points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise InvalidInputError(f"control points must be an (m, 3) array, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("control points contain non-finite values")
        if self.order not in (1, 2):
            raise InvalidArgumentError(f"spline order must be 1 or 2, got {self.order}")
        minimum = 3 if self.order == 2 else 2
        if len(points) < minimum:
            raise InvalidArgumentError(
                f"order {self.order} path needs at least {minimum} control points, got {len(points)}"
            )

        excess = gamut_excess(points)
        bad = np.flatnonzero(excess > self.gamut_tol)
        if bad.size:
            i = int(bad[0])
            raise GamutError(
                f"control point {i} {tuple(np.round(points[i], 3))} is out of the sRGB gamut "
                f"by {excess[i]:.4f}"
            )

        points.setflags(write=False)
        object.__setattr__(self, "control_points", points)

        if self.cyclic:
            coeffs = np.vstack([points, points[: self.order]])
            knots = _periodic_knots(len(points), self.order)
        else:
            coeffs = points
            knots = _clamped_knots(len(points), self.order)
        object.__setattr__(self, "_spline", BSpline(knots, coeffs, self.order, extrapolate=True))

    @classmethod
    def from_colors(cls, colors: list[LabColor], order: int = 2, cyclic: bool = False) -> "MapPath":
        return cls(np.array([c.as_array() for c in colors]), order=order, cyclic=cyclic)


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Дискретизированный путь: samples[i] = evaluate(path, params[i])."""
    samples: np.ndarray
    params: np.ndarray
    cyclic: bool = False

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        params = np.asarray(self.params, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise InvalidInputError(f"samples must be an (n, 3) array, got shape {samples.shape}")
        if len(samples) != len(params):
            raise InvalidArgumentError(f"{len(samples)} samples but {len(params)} params")
        if np.any(np.diff(params) <= 0):
            raise InvalidArgumentError("sample params must be strictly increasing")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "params", params)

    def __len__(self) -> int:
        return len(self.samples)


def evaluate_array(path: MapPath, t: ArrayLike) -> np.ndarray:
    """Векторная версия evaluate: массив параметров -> массив (k, 3) точек Lab."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)) or t.min() < 0.0 or t.max() > 1.0:
        raise RangeError("spline parameter must lie in [0, 1]")
    out = np.asarray(path._spline(t), dtype=float)
    if not path.cyclic:
        # концы открытого пути в точности равны крайним опорным точкам
        out[t == 0.0] = path.control_points[0]
        out[t == 1.0] = path.control_points[-1]
    return out


def evaluate(path: MapPath, t: float) -> LabColor:
    """Точка на сплайне при параметре t из [0, 1]."""
    L, a, b = evaluate_array(path, [t])[0]
    return LabColor(float(L), float(a), float(b))


def uniform_params(n: int, cyclic: bool) -> np.ndarray:
    if n < 2:
        raise InvalidArgumentError(f"sample count must be at least 2, got {n}")
    if cyclic:
        return np.arange(n) / n
    return np.linspace(0.0, 1.0, n)


def sample_uniform(path: MapPath, n: int) -> SampledPath:
    """
    Равномерная выборка по параметру сплайна.

    Для открытых путей t = i/(n-1), для циклических t = i/n (замыкающая точка
    не дублируется).
    """
    params = uniform_params(n, path.cyclic)
    return SampledPath(evaluate_array(path, params), params, cyclic=path.cyclic)


def step_contrasts(samples: np.ndarray, metric: Metric, cyclic: bool = False) -> np.ndarray:
    """Контраст между соседними цветами массива (n, 3); для cyclic добавляется шаг через стык."""
    samples = np.asarray(samples, dtype=float)
    if cyclic:
        steps = np.roll(samples, -1, axis=0) - samples
    else:
        steps = np.diff(samples, axis=0)
    if Metric(metric) is Metric.LIGHTNESS:
        return np.abs(steps[:, 0])
    return np.linalg.norm(steps, axis=1)


def path_arc_lengths(sampled: SampledPath, metric: Metric) -> np.ndarray:
    if len(sampled) < 2:
        raise InvalidArgumentError("need at least 2 samples")
    return step_contrasts(sampled.samples, metric, sampled.cyclic)


def lightness_range(path: MapPath, dense: int = DEFAULT_CONFIG.dense_samples) -> float:
    """Размах L вдоль пути (по плотной выборке)."""
    L = evaluate_array(path, np.linspace(0.0, 1.0, dense))[:, 0]
    return float(L.max() - L.min())


def auto_metric(path: MapPath, threshold: float = DEFAULT_CONFIG.auto_metric_lightness_range) -> Metric:
    """Выбор метрики: по светлоте, если размах L не меньше порога, иначе CIE76."""
    metric = Metric.LIGHTNESS if lightness_range(path) >= threshold else Metric.CIE76
    logger.info(f"Auto-selected metric: {metric.value}")
    return metric
