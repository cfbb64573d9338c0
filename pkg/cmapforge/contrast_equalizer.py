# contrast_equalizer.py
"""Выравнивание перцептивного контраста вдоль пути и диагностика равномерности карт.

Алгоритм выравнивания: путь плотно дискретизируется при равных приращениях
параметра, строится накопленная сумма контраста между соседними точками,
обратная функция берётся линейной интерполяцией в равноотстоящих уровнях.
Процедура повторяется на собственном результате заданное число раз.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter1d

from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, MapAttribute, Metric, ToolkitConfig
from cmapforge.errors import DegeneratePathError, InvalidArgumentError, RangeError
from cmapforge.spline_path import (
    MapPath,
    SampledPath,
    auto_metric,
    evaluate_array,
    step_contrasts,
    uniform_params,
)

logger = logging.getLogger(__name__)

# Малый наклон, делающий накопленный контраст строго возрастающим
_MONOTONE_EPS = 1e-9
_ZERO_CONTRAST = 1e-8


# ===== SPECS =====
@dataclass
class EqualizeSpec:
    """
    Параметры выравнивания.

    cyclic=None означает «как у пути». t_range ограничивает выравниваемый
    участок открытого пути (используется линейными картами с урезанным
    диапазоном светлоты).
    """
    n: int = DEFAULT_CONFIG.default_n
    metric: Metric = Metric.LIGHTNESS
    iterations: int = DEFAULT_CONFIG.iterations
    cyclic: bool | None = None
    dense_samples: int = DEFAULT_CONFIG.dense_samples
    t_range: tuple[float, float] = (0.0, 1.0)

    def validate(self, path: MapPath) -> None:
        if self.n < 2:
            raise InvalidArgumentError(f"n must be at least 2, got {self.n}")
        if self.iterations < 1:
            raise InvalidArgumentError(f"iterations must be at least 1, got {self.iterations}")
        if self.dense_samples < 16:
            raise InvalidArgumentError(f"dense_samples must be at least 16, got {self.dense_samples}")
        if self.cyclic is not None and self.cyclic != path.cyclic:
            raise InvalidArgumentError("EqualizeSpec.cyclic does not match the path")
        lo, hi = self.t_range
        if not 0.0 <= lo < hi <= 1.0:
            raise RangeError(f"t_range must satisfy 0 <= lo < hi <= 1, got {self.t_range}")
        if path.cyclic and (lo, hi) != (0.0, 1.0):
            raise InvalidArgumentError("t_range cannot be restricted on a cyclic path")


@dataclass
class SmoothSpec:
    """sigma задаётся в индексах карты из 256 элементов."""
    sigma: float = 0.0
    cyclic: bool | None = None
    reference_n: int = 256

    def scaled_sigma(self, n: int) -> float:
        return self.sigma * n / self.reference_n


# ===== EQUALIZATION =====
def equalize(path: MapPath, spec: EqualizeSpec) -> SampledPath:
    """
    Ставит n выборок на пути так, чтобы контраст между соседями был одинаков.

    Args:
        path: путь в CIELAB.
        spec: число элементов, метрика, число итераций.

    Returns:
        SampledPath: n выборок и их параметры (строго возрастающие).

    Raises:
        DegeneratePathError: если суммарный контраст пути по метрике равен нулю.
    """
    spec.validate(path)
    metric = Metric(spec.metric)
    lo, hi = spec.t_range

    u = np.linspace(0.0, 1.0, spec.dense_samples)
    t = lo + (hi - lo) * u
    for iteration in range(spec.iterations):
        dense = evaluate_array(path, t)
        # у циклического пути t=1 совпадает с t=0, поэтому шаг через стык уже учтён
        contrasts = step_contrasts(dense, metric)
        total = float(contrasts.sum())
        if total <= _ZERO_CONTRAST:
            raise DegeneratePathError(
                f"path has zero total contrast under the {metric.value} metric; "
                "use the cie76 metric for isoluminant or low-contrast paths"
            )
        cumulative = np.concatenate([[0.0], np.cumsum(contrasts)]) / total
        cumulative = (cumulative + _MONOTONE_EPS * u) / (1.0 + _MONOTONE_EPS)
        cumulative[-1] = 1.0
        t = np.interp(u, cumulative, t)
        logger.debug(f"Equalize pass {iteration + 1}: total {metric.value} contrast {total:.4f}")

    levels = uniform_params(spec.n, path.cyclic)
    params = np.interp(levels, u, t)
    samples = evaluate_array(path, params)
    logger.info(f"Equalized path to {spec.n} samples ({metric.value}, {spec.iterations} passes)")
    return SampledPath(samples, params, cyclic=path.cyclic)


def equalize_entries(
    cmap: ColorMap,
    n: int | None = None,
    metric: Metric | None = None,
    sigma: float = 0.0,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """Повторно выравнивает уже существующую карту: её элементы считаются путём 1-го порядка."""
    path = MapPath(cmap.lab(), order=1, cyclic=cmap.cyclic, gamut_tol=config.catalogue_gamut_tolerance)
    metric = Metric(metric) if metric is not None else auto_metric(path, config.auto_metric_lightness_range)
    spec = EqualizeSpec(
        n=cmap.n if n is None else n,
        metric=metric,
        iterations=config.iterations,
        dense_samples=config.dense_samples,
    )
    sampled = smooth_reversals(equalize(path, spec), SmoothSpec(sigma=sigma))
    provenance = cmap.provenance.model_copy(
        update={"metric": metric.value, "iterations": config.iterations, "sigma": float(sigma)}
    )
    return ColorMap.from_lab(sampled.samples, name=cmap.name, attributes=cmap.attributes, provenance=provenance)


# ===== SMOOTHING =====
def smooth_reversals(sampled: SampledPath, spec: SmoothSpec) -> SampledPath:
    """
    Гауссово сглаживание L, a, b вдоль индекса карты.

    Открытые карты продолжаются за концы точечным (нечётным) отражением,
    поэтому линейный участок у края не искажается; циклические сворачиваются.
    """
    if spec.sigma < 0:
        raise RangeError(f"sigma must be non-negative, got {spec.sigma}")
    n = len(sampled)
    if spec.sigma == 0:
        return sampled
    if n < 3:
        raise InvalidArgumentError("smoothing needs at least 3 samples")

    cyclic = sampled.cyclic if spec.cyclic is None else spec.cyclic
    sigma = spec.scaled_sigma(n)
    if cyclic:
        smoothed = gaussian_filter1d(sampled.samples, sigma, axis=0, mode="wrap")
    else:
        radius = int(4.0 * sigma + 0.5)
        padded = np.pad(sampled.samples, ((radius, radius), (0, 0)), mode="reflect", reflect_type="odd")
        smoothed = gaussian_filter1d(padded, sigma, axis=0, mode="nearest")[radius:radius + n]
    logger.debug(f"Smoothed {n} samples with sigma={sigma:.3f} ({'wrap' if cyclic else 'odd reflection'})")
    return SampledPath(smoothed, sampled.params, cyclic=sampled.cyclic)


# ===== UNIFORMITY ANALYSIS =====
@dataclass
class StepStats:
    mean: float
    min: float
    max: float
    cov: float

    @classmethod
    def of(cls, values: np.ndarray) -> "StepStats":
        mean = float(values.mean())
        cov = float(values.std() / mean) if mean > 0 else 0.0
        return cls(mean, float(values.min()), float(values.max()), cov)


@dataclass
class FlatSpot:
    """Серия шагов start..start+length-1 (по модулю числа шагов для циклических карт)."""
    start: int
    length: int
    fraction: float
    expected: bool = False


@dataclass
class Discontinuity:
    index: int
    kind: str  # "jump" (индекс шага) или "kink" (индекс элемента)
    value: float


@dataclass
class UniformityReport:
    """Отчёт analyze_uniformity."""
    n: int
    cyclic: bool
    sigma: float
    lightness: np.ndarray
    delta_l: np.ndarray
    delta_e: np.ndarray
    lightness_stats: StepStats
    delta_e_stats: StepStats
    reversals: list[int] = field(default_factory=list)
    flat_spots: list[FlatSpot] = field(default_factory=list)
    discontinuities: list[Discontinuity] = field(default_factory=list)
    neighbourhood: float = 0.0

    @property
    def warnings(self) -> list[str]:
        found = [
            f"flat spot at steps {s.start}..{s.start + s.length - 1} ({100 * s.fraction:.1f}% of map)"
            for s in self.flat_spots if not s.expected
        ]
        found += [f"{d.kind} at {'step' if d.kind == 'jump' else 'entry'} {d.index} ({d.value:.2f})"
                  for d in self.discontinuities]
        return found

    @property
    def clean(self) -> bool:
        return not self.warnings

    def core_mask(self) -> np.ndarray:
        """Шаги дальше чем на окрестность сглаживания от любого обращения светлоты."""
        steps = len(self.delta_l)
        if not self.reversals or self.neighbourhood <= 0:
            return np.ones(steps, dtype=bool)
        centres = np.arange(steps) + 0.5
        reversals = np.asarray(self.reversals, dtype=float)
        dist = np.abs(centres[:, None] - reversals[None, :])
        if self.cyclic:
            dist = np.minimum(dist, self.n - dist)
        return dist.min(axis=1) > self.neighbourhood

    def core_cov(self, metric: Metric = Metric.LIGHTNESS) -> float:
        """Коэффициент вариации шагов вне окрестностей сглаженных обращений."""
        values = self.delta_l if Metric(metric) is Metric.LIGHTNESS else self.delta_e
        values = values[self.core_mask()]
        return StepStats.of(values).cov if values.size else 0.0

    def summary(self) -> dict:
        return {
            "n": self.n,
            "cyclic": self.cyclic,
            "delta_l": vars(self.lightness_stats),
            "delta_e": vars(self.delta_e_stats),
            "reversals": list(self.reversals),
            "flat_spots": [vars(s) for s in self.flat_spots],
            "discontinuities": [vars(d) for d in self.discontinuities],
            "warnings": self.warnings,
        }


def _runs(mask: np.ndarray, cyclic: bool) -> list[tuple[int, int]]:
    """Максимальные серии True: список (начало, длина); для циклических серия может проходить через стык."""
    steps = len(mask)
    if mask.all():
        return [(0, steps)]
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    runs = [(int(a), int(b - a)) for a, b in zip(edges[::2], edges[1::2])]
    if cyclic and len(runs) > 1 and mask[0] and mask[-1]:
        first_start, first_len = runs.pop(0)
        last_start, last_len = runs.pop()
        runs.append((last_start, last_len + first_len))
    return runs


def _reversal_entries(delta_signed: np.ndarray, floor: float, cyclic: bool) -> list[int]:
    """Элементы, на которых меняется знак ΔL (шаги с |ΔL| <= floor пропускаются)."""
    n_steps = len(delta_signed)
    significant = np.flatnonzero(np.abs(delta_signed) > floor)
    if significant.size < 2:
        return []
    pairs = list(zip(significant[:-1], significant[1:]))
    if cyclic:
        pairs.append((significant[-1], significant[0] + n_steps))
    n_entries = n_steps if cyclic else n_steps + 1
    found = set()
    for i, j in pairs:
        if np.sign(delta_signed[i]) != np.sign(delta_signed[j % n_steps]):
            # обращение лежит между элементами i+1 и j
            found.add(int(np.floor((i + 1 + j) / 2 + 0.5)) % n_entries)
    return sorted(found)


def _kinks(steps: np.ndarray, delta_e: np.ndarray, cyclic: bool, config: ToolkitConfig) -> list[Discontinuity]:
    if cyclic:
        first, second = steps, np.roll(steps, -1, axis=0)
        entries = (np.arange(len(steps)) + 1) % len(steps)
        len1, len2 = delta_e, np.roll(delta_e, -1)
    else:
        first, second = steps[:-1], steps[1:]
        entries = np.arange(1, len(steps))
        len1, len2 = delta_e[:-1], delta_e[1:]
    threshold_len = config.kink_min_step_fraction * delta_e.mean()
    valid = (len1 > threshold_len) & (len2 > threshold_len)
    if not valid.any():
        return []
    cosines = np.einsum("ij,ij->i", first[valid], second[valid]) / (len1[valid] * len2[valid])
    angles = np.degrees(np.arccos(np.clip(cosines, -1.0, 1.0)))
    limit = max(config.kink_angle_deg, config.kink_median_factor * float(np.median(angles)))
    return [
        Discontinuity(int(e), "kink", float(a))
        for e, a in zip(entries[valid], angles)
        if a > limit
    ]


def analyze_uniformity(cmap: ColorMap, config: ToolkitConfig = DEFAULT_CONFIG) -> UniformityReport:
    """
    Ищет плоские участки и разрывы в карте.

    Плоский участок - максимальная серия шагов с |ΔL| < flat_fraction * mean|ΔL|.
    Он считается ожидаемым для изолюминантных и малоконтрастных карт, а также
    для сглаженных карт, если лежит в окрестности 3σ от обращения светлоты.
    Разрывы - скачки (ΔE76 > discontinuity_factor * mean) и изломы направления
    шага в Lab.
    """
    lab = cmap.lab()
    cyclic = cmap.cyclic
    if cyclic:
        steps = np.roll(lab, -1, axis=0) - lab
    else:
        steps = np.diff(lab, axis=0)
    signed_dl = steps[:, 0]
    delta_l = np.abs(signed_dl)
    delta_e = np.linalg.norm(steps, axis=1)
    n_steps = len(steps)

    sigma = float(cmap.provenance.sigma)
    sigma_n = sigma * cmap.n / 256.0
    neighbourhood = config.reversal_neighbourhood_sigmas * sigma_n
    reversals = _reversal_entries(signed_dl, config.flat_floor, cyclic)

    report = UniformityReport(
        n=cmap.n,
        cyclic=cyclic,
        sigma=sigma,
        lightness=lab[:, 0],
        delta_l=delta_l,
        delta_e=delta_e,
        lightness_stats=StepStats.of(delta_l),
        delta_e_stats=StepStats.of(delta_e),
        reversals=reversals,
        neighbourhood=neighbourhood,
    )

    # Плоские участки
    threshold = max(config.flat_fraction * delta_l.mean(), config.flat_floor)
    low_contrast = bool(cmap.attributes & {MapAttribute.ISOLUMINANT, MapAttribute.LOW_CONTRAST})
    core = report.core_mask()
    for start, length in _runs(delta_l < threshold, cyclic):
        covered = (start + np.arange(length)) % n_steps
        near_reversal = sigma_n > 0 and not core[covered].any()
        report.flat_spots.append(FlatSpot(start, length, length / n_steps, low_contrast or near_reversal))

    # Скачки и изломы
    mean_e = delta_e.mean()
    if mean_e > 0:
        for i in np.flatnonzero(delta_e > config.discontinuity_factor * mean_e):
            report.discontinuities.append(Discontinuity(int(i), "jump", float(delta_e[i] / mean_e)))
        report.discontinuities.extend(_kinks(steps, delta_e, cyclic, config))

    if report.warnings:
        logger.warning(f"Colour map '{cmap.name}': {len(report.warnings)} uniformity warning(s)")
    else:
        logger.info(f"Colour map '{cmap.name}': uniformity check clean")
    return report
