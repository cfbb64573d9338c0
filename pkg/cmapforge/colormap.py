# colormap.py
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from pydantic import BaseModel, Field

from cmapforge.colorspace import lab_to_srgb_array, srgb_to_lab_array
from cmapforge.config import DEFAULT_CONFIG, MapAttribute
from cmapforge.errors import InvalidArgumentError, InvalidInputError

logger = logging.getLogger(__name__)


class PathModel(BaseModel):
    """Описание пути - формат JSON-файла пути и часть происхождения карты."""
    order: int = Field(2, ge=1, le=2)
    cyclic: bool = False
    control_points: list[tuple[float, float, float]] = Field(..., min_length=2)


class Provenance(BaseModel):
    """Параметры, с которыми построена карта."""
    source: str = "custom"
    path: PathModel | None = None
    metric: str | None = None
    iterations: int | None = None
    sigma: float = 0.0
    shift: float = 0.0
    reversed: bool = False
    gamut_residual: float = 0.0


def parse_attributes(text: str) -> frozenset[MapAttribute]:
    """Разбирает строку вида "diverging|linear"."""
    names = [part.strip() for part in text.split("|") if part.strip()]
    try:
        return frozenset(MapAttribute(name) for name in names)
    except ValueError as e:
        raise InvalidArgumentError(f"unknown map attribute in '{text}': {e}") from e


def format_attributes(attributes: frozenset[MapAttribute]) -> str:
    return "|".join(sorted(a.value for a in attributes))


@dataclass(frozen=True, eq=False)
class ColorMap:
    """
    Цветовая карта: N sRGB-элементов, атрибуты таксономии и происхождение.

    entries хранится как массив (N, 3) только для чтения.
    """
    entries: np.ndarray
    name: str = "custom"
    attributes: frozenset[MapAttribute] = frozenset()
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[1] != 3 or len(entries) < 2:
            raise InvalidInputError(f"colour map entries must be an (N>=2, 3) array, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("colour map entries contain non-finite values")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "attributes", frozenset(MapAttribute(a) for a in self.attributes))

    @classmethod
    def from_lab(
        cls,
        lab: np.ndarray,
        name: str = "custom",
        attributes: frozenset[MapAttribute] = frozenset(),
        provenance: Provenance | None = None,
    ) -> "ColorMap":
        """Переводит Lab-выборку в sRGB, обрезает до [0, 1] и записывает остаток обрезки."""
        rgb = lab_to_srgb_array(lab)
        residual = float(max(np.max(-rgb), np.max(rgb - 1.0), 0.0))
        if residual > DEFAULT_CONFIG.gamut_tolerance:
            logger.warning(f"Colour map '{name}': clamped gamut residual {residual:.5f}")
        provenance = (provenance or Provenance()).model_copy(update={"gamut_residual": residual})
        return cls(np.clip(rgb, 0.0, 1.0), name=name, attributes=attributes, provenance=provenance)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def cyclic(self) -> bool:
        return MapAttribute.CYCLIC in self.attributes

    def lab(self) -> np.ndarray:
        return srgb_to_lab_array(self.entries)

    def with_entries(self, entries: np.ndarray, **provenance_updates) -> "ColorMap":
        provenance = self.provenance.model_copy(update=provenance_updates)
        return replace(self, entries=entries, provenance=provenance)
