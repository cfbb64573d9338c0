# map_catalog.py
"""Построение цветовых карт всех семейств таксономии и проверка их ограничений.

Координаты опорных точек пресетов хранятся в data/presets.json.
"""
import colorsys
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Literal

import numpy as np
from pydantic import BaseModel, ValidationError

from cmapforge.colormap import ColorMap, PathModel, Provenance
from cmapforge.colorspace import LabColor, delta_e76, in_gamut_array, lch_to_lab_array
from cmapforge.config import (
    DEFAULT_CONFIG,
    CyclicStyle,
    DivergingStyle,
    MapAttribute,
    Metric,
    ToolkitConfig,
)
from cmapforge.contrast_equalizer import EqualizeSpec, SmoothSpec, equalize, smooth_reversals
from cmapforge.errors import (
    ConstraintViolationError,
    GamutError,
    InvalidArgumentError,
    InvalidOperationError,
    ParseError,
    RangeError,
    UnknownPresetError,
)
from cmapforge.spline_path import MapPath, SampledPath, auto_metric, evaluate_array

logger = logging.getLogger(__name__)

_MIN_ENTRIES = 8


# ===== PRESET DATA =====
class PresetModel(BaseModel):
    """Запись пресета в data/presets.json."""
    family: Literal["linear", "diverging", "rainbow", "cyclic", "isoluminant"]
    description: str = ""
    order: int = 1
    control_points: list[tuple[float, float, float]] | None = None
    lightness_span: tuple[float, float] | None = None
    style: str | None = None
    end_low: tuple[float, float, float] | None = None
    centre: tuple[float, float, float] | None = None
    end_high: tuple[float, float, float] | None = None
    lightness: float | None = None
    chroma: float | None = None


class PresetFile(BaseModel):
    version: int
    presets: dict[str, PresetModel]


@lru_cache(maxsize=1)
def load_presets(resource: str = DEFAULT_CONFIG.presets_resource) -> dict[str, PresetModel]:
    """Читает и кэширует файл пресетов пакета."""
    text = resources.files("cmapforge").joinpath(resource).read_text(encoding="utf-8")
    try:
        data = PresetFile.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ParseError(f"invalid preset file {resource}: {e}") from e
    logger.info(f"Loaded {len(data.presets)} presets (format v{data.version})")
    return data.presets


def preset_attributes(preset: PresetModel) -> frozenset[MapAttribute]:
    if preset.family == "linear":
        return frozenset({MapAttribute.LINEAR})
    if preset.family == "diverging":
        if DivergingStyle(preset.style) is DivergingStyle.LINEAR_DIVERGING:
            return frozenset({MapAttribute.DIVERGING, MapAttribute.LINEAR})
        return frozenset({MapAttribute.DIVERGING})
    if preset.family == "rainbow":
        return frozenset({MapAttribute.RAINBOW})
    if preset.family == "cyclic":
        return frozenset({MapAttribute.CYCLIC})
    return frozenset({MapAttribute.ISOLUMINANT, MapAttribute.CYCLIC})


def list_presets() -> dict[str, list[str]]:
    """Имя пресета -> отсортированный список его атрибутов."""
    return {
        name: sorted(a.value for a in preset_attributes(preset))
        for name, preset in sorted(load_presets().items())
    }


def get_preset(name: str) -> PresetModel:
    presets = load_presets()
    if name not in presets:
        raise UnknownPresetError(f"unknown preset '{name}'; available: {', '.join(sorted(presets))}")
    return presets[name]


def _preset_by_style(family: str, style: str) -> tuple[str, PresetModel]:
    for name, preset in sorted(load_presets().items()):
        if preset.family == family and preset.style == style:
            return name, preset
    raise UnknownPresetError(f"no {family} preset with style '{style}'")


# ===== VALIDATION =====
def validate_map(cmap: ColorMap, config: ToolkitConfig = DEFAULT_CONFIG) -> list[str]:
    """
    Проверяет инварианты атрибутов карты.

    Returns:
        list[str]: описания нарушений (пустой список, если карта корректна).
    """
    violations = []
    if cmap.provenance.gamut_residual > config.catalogue_gamut_tolerance:
        violations.append(f"gamut residual {cmap.provenance.gamut_residual:.4f} exceeds tolerance")

    lab = cmap.lab()
    L = lab[:, 0]
    attributes = cmap.attributes

    if MapAttribute.LINEAR in attributes:
        dl = np.diff(L)
        if not (np.all(dl > 0) or np.all(dl < 0)):
            violations.append("linear map lightness is not strictly monotone")
        else:
            steps = np.abs(dl)
            groups = [steps]
            if MapAttribute.DIVERGING in attributes:
                # половины по обе стороны центра равномерны каждая сама по себе;
                # окрестность центра шириной 3 sigma сглажена
                half = cmap.n // 2
                margin = int(np.ceil(3.0 * SmoothSpec(sigma=cmap.provenance.sigma).scaled_sigma(cmap.n)))
                groups = [steps[:max(half - margin, 1)], steps[min(half + margin, len(steps) - 1):]]
            deviation = max(float(np.max(np.abs(g - g.mean())) / g.mean()) for g in groups)
            if deviation > 0.01:
                violations.append(f"linear map |dL| deviates {100 * deviation:.2f}% from uniform")

    if MapAttribute.CYCLIC in attributes:
        steps = np.linalg.norm(np.roll(lab, -1, axis=0) - lab, axis=1)
        if steps[-1] > 2.0 * steps.mean():
            violations.append(f"cyclic wrap step {steps[-1]:.3f} exceeds twice the mean step {steps.mean():.3f}")

    if MapAttribute.ISOLUMINANT in attributes and L.max() - L.min() > 2.0:
        violations.append(f"isoluminant map lightness spread {L.max() - L.min():.3f} exceeds 2")

    if MapAttribute.DIVERGING in attributes:
        centre_chroma = float(np.hypot(*lab[cmap.n // 2, 1:]))
        if centre_chroma > 2.0:
            violations.append(f"diverging centre chroma {centre_chroma:.3f} exceeds 2")
        chroma_gap = abs(float(np.hypot(*lab[0, 1:])) - float(np.hypot(*lab[-1, 1:])))
        if chroma_gap > 2.0:
            violations.append(f"diverging end chroma differs by {chroma_gap:.2f}")
    return violations


def ensure_valid(cmap: ColorMap, config: ToolkitConfig = DEFAULT_CONFIG) -> ColorMap:
    violations = validate_map(cmap, config)
    if violations:
        raise ConstraintViolationError(
            f"colour map '{cmap.name}' violates its attributes: {'; '.join(violations)}", violations
        )
    return cmap


# ===== BUILDERS =====
def _check_n(n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise InvalidArgumentError(f"n must be at least {minimum}, got {n}")


def _provenance(name: str, path: MapPath, metric: Metric, sigma: float, config: ToolkitConfig) -> Provenance:
    return Provenance(
        source=name,
        path=PathModel(order=path.order, cyclic=path.cyclic, control_points=path.control_points.tolist()),
        metric=metric.value,
        iterations=config.iterations,
        sigma=float(sigma),
    )


def _equalized_map(
    path: MapPath,
    n: int,
    metric: Metric,
    sigma: float,
    name: str,
    attributes: frozenset[MapAttribute],
    config: ToolkitConfig,
    t_range: tuple[float, float] = (0.0, 1.0),
) -> ColorMap:
    spec = EqualizeSpec(
        n=n,
        metric=metric,
        iterations=config.iterations,
        dense_samples=config.dense_samples,
        t_range=t_range,
    )
    sampled = smooth_reversals(equalize(path, spec), SmoothSpec(sigma=sigma))
    cmap = ColorMap.from_lab(
        sampled.samples,
        name=name,
        attributes=attributes,
        provenance=_provenance(name, path, metric, sigma, config),
    )
    logger.info(f"Built colour map '{name}' ({n} entries, {', '.join(sorted(a.value for a in attributes))})")
    return cmap


def build_linear(
    path: MapPath,
    n: int = DEFAULT_CONFIG.default_n,
    lightness_span: tuple[float, float] | None = None,
    sigma: float = 0.0,
    name: str = "linear",
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """
    Линейная карта: светлота меняется равномерно от lo до hi.

    Args:
        path: путь с монотонной светлотой.
        n: число элементов.
        lightness_span: (lo, hi); по умолчанию весь диапазон светлоты пути.

    Raises:
        ConstraintViolationError: светлота пути немонотонна.
        RangeError: диапазон вне светлоты пути или lo >= hi.
    """
    _check_n(n)
    if path.cyclic:
        raise InvalidArgumentError("a linear map needs an open path")
    t = np.linspace(0.0, 1.0, config.dense_samples)
    L = evaluate_array(path, t)[:, 0]
    dl = np.diff(L)
    if np.all(dl >= 0) and L[-1] > L[0]:
        increasing = True
    elif np.all(dl <= 0) and L[-1] < L[0]:
        increasing = False
    else:
        raise ConstraintViolationError(f"path lightness for '{name}' is not monotone")

    low_l, high_l = float(L.min()), float(L.max())
    lo, hi = lightness_span if lightness_span is not None else (low_l, high_l)
    if lo >= hi:
        raise RangeError(f"lightness span must satisfy lo < hi, got ({lo}, {hi})")
    if lo < low_l - 1e-9 or hi > high_l + 1e-9:
        raise RangeError(f"lightness span ({lo}, {hi}) exceeds the path range ({low_l:.3f}, {high_l:.3f})")

    if increasing:
        t_lo, t_hi = np.interp([lo, hi], L, t)
    else:
        t_hi, t_lo = np.interp([lo, hi], L[::-1], t[::-1])
    t_range = (float(max(t_lo, 0.0)), float(min(t_hi, 1.0)))

    cmap = _equalized_map(path, n, Metric.LIGHTNESS, sigma, name, frozenset({MapAttribute.LINEAR}), config, t_range)
    return ensure_valid(cmap, config)


@dataclass(frozen=True)
class DivergingSpec:
    """Концы, нейтральный центр и стиль расходящейся карты."""
    end_low: LabColor
    end_high: LabColor
    centre: LabColor
    style: DivergingStyle = DivergingStyle.REVERSING

    def validate(self) -> None:
        violations = []
        if self.centre.chroma > 2.0:
            violations.append(f"centre chroma {self.centre.chroma:.2f} exceeds 2 (centre must be neutral)")
        if abs(self.end_low.chroma - self.end_high.chroma) > 2.0:
            violations.append(
                f"end chroma {self.end_low.chroma:.2f} and {self.end_high.chroma:.2f} differ by more than 2"
            )
        if DivergingStyle(self.style) is DivergingStyle.REVERSING:
            if abs(self.end_low.L - self.end_high.L) > 2.0:
                violations.append(f"end lightness {self.end_low.L} and {self.end_high.L} differ by more than 2")
            ends = (self.end_low.L, self.end_high.L)
            if not (self.centre.L > max(ends) or self.centre.L < min(ends)):
                violations.append("centre lightness must be above or below both ends")
        elif not (min(self.end_low.L, self.end_high.L) < self.centre.L < max(self.end_low.L, self.end_high.L)):
            violations.append("linear-diverging centre lightness must lie between the end lightnesses")
        if violations:
            raise ConstraintViolationError("; ".join(violations), violations)


def build_diverging(
    spec: DivergingSpec,
    n: int = DEFAULT_CONFIG.default_n,
    sigma: float = DEFAULT_CONFIG.diverging_sigma,
    name: str = "diverging",
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """
    Расходящаяся карта через нейтральный центр.

    Стиль reversing даёт обращение светлоты в центре (сглаживается sigma),
    linear-diverging - монотонную светлоту без обращения.
    """
    _check_n(n, 3)
    spec.validate()
    path = MapPath.from_colors([spec.end_low, spec.centre, spec.end_high], order=1)
    attributes = {MapAttribute.DIVERGING}
    if DivergingStyle(spec.style) is DivergingStyle.LINEAR_DIVERGING:
        attributes.add(MapAttribute.LINEAR)

    # половины выравниваются отдельно и делят центральный элемент floor(n/2)
    half = n // 2
    halves = []
    for colors, count in (([spec.end_low, spec.centre], half + 1), ([spec.centre, spec.end_high], n - half)):
        half_spec = EqualizeSpec(
            n=count,
            metric=Metric.LIGHTNESS,
            iterations=config.iterations,
            dense_samples=config.dense_samples,
        )
        halves.append(equalize(MapPath.from_colors(colors, order=1), half_spec))
    low, high = halves
    joined = SampledPath(
        np.concatenate([low.samples, high.samples[1:]]),
        np.concatenate([0.5 * low.params, 0.5 + 0.5 * high.params[1:]]),
    )
    sampled = smooth_reversals(joined, SmoothSpec(sigma=sigma))
    cmap = ColorMap.from_lab(
        sampled.samples,
        name=name,
        attributes=frozenset(attributes),
        provenance=_provenance(name, path, Metric.LIGHTNESS, sigma, config),
    )
    logger.info(f"Built colour map '{name}' ({n} entries, halves of {half + 1} and {n - half})")

    centre_error = float(delta_e76(cmap.lab()[n // 2], spec.centre.as_array()))
    if centre_error > 2.0:
        raise ConstraintViolationError(
            f"diverging map '{name}': central entry is {centre_error:.2f} dE76 from the centre colour",
            [f"centre error {centre_error:.2f}"],
        )
    return ensure_valid(cmap, config)


def build_rainbow(
    n: int = DEFAULT_CONFIG.default_n,
    sigma: float = DEFAULT_CONFIG.rainbow_sigma,
    name: str = "rainbow_bgyr",
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """Радуга синий-зелёный-жёлтый-красный-розовый без голубого; обращения у жёлтого и красного сглажены."""
    _check_n(n, _MIN_ENTRIES)
    preset = get_preset(name)
    path = MapPath(np.array(preset.control_points), order=preset.order)
    cmap = _equalized_map(path, n, Metric.LIGHTNESS, sigma, name, frozenset({MapAttribute.RAINBOW}), config)
    return ensure_valid(cmap, config)


def _check_anchor_spacing(cmap: ColorMap, control_points: np.ndarray, tolerance: float) -> list[str]:
    """
    Экстремумы светлоты опорных точек должны стоять на индексах j*n/m.

    При нечётных и малых n ожидаемая позиция дробная, поэтому к допуску
    max(tolerance * n, 0.5) добавляется полшага округления.
    """
    n, m = cmap.n, len(control_points)
    L = cmap.lab()[:, 0]
    ctrl_l = control_points[:, 0]
    problems = []
    for j in range(m):
        before, after = ctrl_l[j - 1], ctrl_l[(j + 1) % m]
        if ctrl_l[j] > max(before, after):
            pick = np.argmax
        elif ctrl_l[j] < min(before, after):
            pick = np.argmin
        else:
            continue
        expected = j * n / m
        window = (int(round(expected)) + np.arange(-(n // (2 * m)), n // (2 * m) + 1)) % n
        found = int(window[pick(L[window])])
        offset = abs(found - expected)
        offset = min(offset, n - offset)
        if offset > max(tolerance * n, 0.5) + 0.5:
            problems.append(f"anchor {j} found at entry {found}, expected {expected:.1f}")
    return problems


def build_cyclic(
    style: CyclicStyle,
    n: int = DEFAULT_CONFIG.default_n,
    sigma: float = DEFAULT_CONFIG.cyclic_sigma,
    name: str | None = None,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """
    Циклическая карта заданного стиля: зигзаг, ромб, бело-красно-бело-синяя или серая.

    Путь периодический 1-го порядка, выравнивается по светлоте, поэтому
    опорные точки с равными перепадами светлоты встают через равные интервалы.
    """
    _check_n(n, _MIN_ENTRIES)
    style = CyclicStyle(style)
    preset_name, preset = _preset_by_style("cyclic", style.value)
    path = MapPath(np.array(preset.control_points), order=1, cyclic=True)
    cmap = _equalized_map(path, n, Metric.LIGHTNESS, sigma, name or preset_name, frozenset({MapAttribute.CYCLIC}), config)

    problems = _check_anchor_spacing(cmap, path.control_points, tolerance=0.02)
    if problems:
        raise ConstraintViolationError(f"cyclic map '{cmap.name}': {'; '.join(problems)}", problems)
    return ensure_valid(cmap, config)


def max_isoluminant_chroma(lightness: float, tol: float = DEFAULT_CONFIG.catalogue_gamut_tolerance) -> float:
    """
    Наибольшая хроматичность окружности постоянной светлоты, целиком лежащей в гамме.

    Бисекция по хроматичности для 360 тонов; результат - минимум по тонам.
    """
    if not 0.0 < lightness < 100.0:
        raise RangeError(f"lightness must lie in (0, 100), got {lightness}")
    hues = np.arange(360.0)
    lo = np.zeros_like(hues)
    hi = np.full_like(hues, 150.0)
    for _ in range(40):
        mid = (lo + hi) / 2.0
        ok = in_gamut_array(lch_to_lab_array(lightness, mid, hues), tol)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return float(lo.min())


def build_isoluminant(
    lightness: float,
    n: int = DEFAULT_CONFIG.default_n,
    chroma: float | None = None,
    name: str | None = None,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """
    Изолюминантная карта - окружность тонов при постоянной светлоте.

    Raises:
        GamutError: окружность с такой хроматичностью не помещается в гамму;
            в сообщении указывается максимальная допустимая хроматичность.
    """
    _check_n(n, _MIN_ENTRIES)
    max_chroma = max_isoluminant_chroma(lightness, config.catalogue_gamut_tolerance)
    if chroma is None:
        chroma = float(np.floor(0.9 * max_chroma))
    if chroma <= 0:
        raise GamutError(f"no chromatic circle fits the gamut at L={lightness}", max_chroma=max_chroma)
    if chroma > max_chroma:
        raise GamutError(
            f"chroma {chroma} at L={lightness} is out of gamut; maximum feasible chroma is {max_chroma:.1f}",
            max_chroma=max_chroma,
        )
    hues = np.arange(12) * 30.0
    path = MapPath(lch_to_lab_array(lightness, chroma, hues), order=2, cyclic=True)
    name = name or f"iso_l{lightness:g}"
    attributes = frozenset({MapAttribute.ISOLUMINANT, MapAttribute.CYCLIC})
    cmap = _equalized_map(path, n, Metric.CIE76, 0.0, name, attributes, config)

    L = cmap.lab()[:, 0]
    if L.max() - L.min() > 1.0:
        raise ConstraintViolationError(f"isoluminant map '{name}' lightness spread {L.max() - L.min():.3f} exceeds 1")
    return ensure_valid(cmap, config)


def build_from_path(
    path: MapPath,
    n: int = DEFAULT_CONFIG.default_n,
    metric: Metric | None = None,
    sigma: float = 0.0,
    name: str = "custom",
    attributes: frozenset[MapAttribute] = frozenset(),
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """Карта по пользовательскому пути (файл пути в CLI); метрика выбирается автоматически, если не задана."""
    _check_n(n)
    metric = Metric(metric) if metric is not None else auto_metric(path, config.auto_metric_lightness_range)
    if path.cyclic:
        attributes = frozenset(attributes) | {MapAttribute.CYCLIC}
    cmap = _equalized_map(path, n, metric, sigma, name, frozenset(attributes), config)
    return ensure_valid(cmap, config)


def build_preset(
    name: str,
    n: int | None = None,
    sigma: float | None = None,
    config: ToolkitConfig = DEFAULT_CONFIG,
) -> ColorMap:
    """Строит пресет по имени; sigma=None - значение по умолчанию для семейства."""
    preset = get_preset(name)
    if n is None:
        n = config.default_n
    elif n < 2:
        raise ConstraintViolationError(f"preset '{name}' needs at least 2 entries, got n={n}", [f"n={n}"])
    if preset.family == "linear":
        path = MapPath(np.array(preset.control_points), order=preset.order)
        span = tuple(preset.lightness_span) if preset.lightness_span else None
        return build_linear(path, n, span, sigma or 0.0, name=name, config=config)
    if preset.family == "diverging":
        spec = DivergingSpec(
            end_low=LabColor(*preset.end_low),
            end_high=LabColor(*preset.end_high),
            centre=LabColor(*preset.centre),
            style=DivergingStyle(preset.style),
        )
        return build_diverging(spec, n, config.diverging_sigma if sigma is None else sigma, name=name, config=config)
    if preset.family == "rainbow":
        return build_rainbow(n, config.rainbow_sigma if sigma is None else sigma, name=name, config=config)
    if preset.family == "cyclic":
        return build_cyclic(
            CyclicStyle(preset.style), n, config.cyclic_sigma if sigma is None else sigma, name=name, config=config
        )
    return build_isoluminant(preset.lightness, n, preset.chroma, name=name, config=config)


# ===== TRANSFORMS =====
def _round_half_away(x: float) -> int:
    return int(np.sign(x) * np.floor(abs(x) + 0.5))


def cyclic_shift(cmap: ColorMap, fraction: float) -> ColorMap:
    """Поворот циклической карты на round(fraction * N) позиций."""
    if not cmap.cyclic:
        raise InvalidOperationError(f"colour map '{cmap.name}' is not cyclic; only cyclic maps can be shifted")
    k = _round_half_away(fraction * cmap.n)
    return cmap.with_entries(np.roll(cmap.entries, -k, axis=0), shift=cmap.provenance.shift + fraction)


def reverse(cmap: ColorMap) -> ColorMap:
    """Обращает порядок элементов; атрибуты сохраняются."""
    return cmap.with_entries(cmap.entries[::-1].copy(), reversed=not cmap.provenance.reversed)


# ===== LINT FIXTURES =====
def hsv_hue_circle(n: int = 252) -> ColorMap:
    """Круг тонов HSV (s = v = 1) - отрицательный пример для анализа равномерности."""
    _check_n(n, 6)
    entries = [colorsys.hsv_to_rgb(i / n, 1.0, 1.0) for i in range(n)]
    return ColorMap(np.array(entries), name="hsv_hue_circle", provenance=Provenance(source="fixture"))


def rgb_rainbow(n: int = 257) -> ColorMap:
    """Радуга из отрезков прямых в RGB: синий-голубой-зелёный-жёлтый-красный."""
    _check_n(n, 5)
    knots = np.linspace(0.0, 1.0, 5)
    corners = np.array([[0, 0, 1], [0, 1, 1], [0, 1, 0], [1, 1, 0], [1, 0, 0]], dtype=float)
    t = np.linspace(0.0, 1.0, n)
    entries = np.stack([np.interp(t, knots, corners[:, c]) for c in range(3)], axis=1)
    return ColorMap(entries, name="rgb_rainbow", provenance=Provenance(source="fixture"))


def rgb_diverging(n: int = 255) -> ColorMap:
    """Наивная сине-бело-красная карта, интерполированная в RGB."""
    _check_n(n, 3)
    t = np.linspace(0.0, 1.0, n)
    corners = np.array([[0, 0, 1], [1, 1, 1], [1, 0, 0]], dtype=float)
    entries = np.stack([np.interp(t, [0.0, 0.5, 1.0], corners[:, c]) for c in range(3)], axis=1)
    return ColorMap(
        entries,
        name="rgb_diverging",
        attributes=frozenset({MapAttribute.DIVERGING}),
        provenance=Provenance(source="fixture"),
    )
