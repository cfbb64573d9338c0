# cli_io.py
"""Форматы файлов: карты (CSV/JSON), пути (JSON), сетки (ASCII) и изображения (PPM/PNG)."""
import json
import logging
import re
from pathlib import Path

import numpy as np
import png
from pydantic import BaseModel, Field, ValidationError

from cmapforge.colormap import ColorMap, PathModel, Provenance, format_attributes, parse_attributes
from cmapforge.config import ImageFormat
from cmapforge.errors import CmapforgeError, InvalidArgumentError, ParseError
from cmapforge.grids import RgbImage, ScalarGrid
from cmapforge.spline_path import MapPath

logger = logging.getLogger(__name__)

CSV_FORMAT_VERSION = 1
_HEADER_RE = re.compile(r"^#\s*cmapforge\s+v(\d+)\s*,(.*)$")


# ===== COLOUR MAPS =====
class MapDocument(BaseModel):
    """JSON-представление карты."""
    format: str = "cmapforge"
    version: int = CSV_FORMAT_VERSION
    name: str
    n: int
    attributes: list[str] = Field(default_factory=list)
    entries: list[tuple[float, float, float]]
    provenance: Provenance = Field(default_factory=Provenance)


def _fmt(value: float) -> str:
    # +0.0 убирает "-0.000000"
    return f"{round(float(value), 6) + 0.0:.6f}"


def format_map_csv(cmap: ColorMap) -> str:
    header = (
        f"# cmapforge v{CSV_FORMAT_VERSION}, n={cmap.n}, attributes={format_attributes(cmap.attributes)}, "
        f"sigma={cmap.provenance.sigma:g}"
    )
    rows = [",".join(_fmt(v) for v in row) for row in cmap.entries]
    return "\n".join([header, *rows]) + "\n"


def parse_map_csv(text: str, name: str = "custom") -> ColorMap:
    """
    Разбирает CSV карты.

    Заголовок необязателен; если он есть, поле n проверяется по числу строк,
    поле sigma необязательно.

    Raises:
        ParseError: с номером строки, где обнаружена ошибка.
    """
    lines = text.splitlines()
    expected_n = None
    attributes = frozenset()
    sigma = 0.0
    rows = []
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _HEADER_RE.match(line)
            if number == 1 and match:
                if int(match.group(1)) != CSV_FORMAT_VERSION:
                    raise ParseError(f"unsupported map format version {match.group(1)}", line=number)
                fields = dict(
                    part.strip().split("=", 1) for part in match.group(2).split(",") if "=" in part
                )
                try:
                    expected_n = int(fields["n"]) if "n" in fields else None
                    sigma = float(fields.get("sigma", 0.0))
                    attributes = parse_attributes(fields.get("attributes", ""))
                except (ValueError, CmapforgeError) as e:
                    raise ParseError(f"malformed header: {e}", line=number) from e
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 comma-separated values, got {len(parts)}", line=number)
        try:
            row = [float(p) for p in parts]
        except ValueError as e:
            raise ParseError(f"non-numeric value: {e}", line=number) from e
        if not all(np.isfinite(row)) or min(row) < 0.0 or max(row) > 1.0:
            raise ParseError(f"colour values must lie in [0, 1], got {line}", line=number)
        rows.append(row)

    if expected_n is not None and len(rows) != expected_n:
        raise ParseError(f"header declares n={expected_n} but file has {len(rows)} entries", line=len(lines) + 1)
    if len(rows) < 2:
        raise ParseError("a colour map needs at least 2 entries", line=len(lines) + 1)
    return ColorMap(np.array(rows), name=name, attributes=attributes,
                    provenance=Provenance(source=name, sigma=sigma))


def map_to_document(cmap: ColorMap) -> MapDocument:
    return MapDocument(
        name=cmap.name,
        n=cmap.n,
        attributes=sorted(a.value for a in cmap.attributes),
        entries=[tuple(round(float(v), 6) + 0.0 for v in row) for row in cmap.entries],
        provenance=cmap.provenance,
    )


def format_map_json(cmap: ColorMap) -> str:
    return map_to_document(cmap).model_dump_json(indent=2) + "\n"


def parse_map_json(text: str) -> ColorMap:
    try:
        doc = MapDocument.model_validate_json(text)
    except ValidationError as e:
        raise ParseError(f"invalid colour map document: {e}") from e
    if len(doc.entries) != doc.n:
        raise ParseError(f"document declares n={doc.n} but has {len(doc.entries)} entries")
    return ColorMap(
        np.array(doc.entries),
        name=doc.name,
        attributes=parse_attributes("|".join(doc.attributes)),
        provenance=doc.provenance,
    )


def write_map(cmap: ColorMap, path: str | Path) -> None:
    """Формат выбирается по расширению: .json - JSON, иначе CSV."""
    path = Path(path)
    text = format_map_json(cmap) if path.suffix.lower() == ".json" else format_map_csv(cmap)
    path.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote colour map '{cmap.name}' to {path}")


def read_map(path: str | Path) -> ColorMap:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    if path.suffix.lower() == ".json":
        return parse_map_json(text)
    return parse_map_csv(text, name=path.stem)


# ===== PATH FILES =====
def read_path_file(path: str | Path) -> MapPath:
    """Файл пути: JSON с полями order, cyclic, control_points."""
    try:
        model = PathModel.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    except ValidationError as e:
        raise ParseError(f"invalid path file {path}: {e}") from e
    return MapPath(np.array(model.control_points), order=model.order, cyclic=model.cyclic)


# ===== ASCII GRIDS =====
def parse_ascii_grid(text: str) -> ScalarGrid:
    """Первая строка "width height", далее значения построчно; nan - отсутствующие данные."""
    lines = text.splitlines()
    header_line = next((i for i, line in enumerate(lines) if line.strip()), None)
    if header_line is None:
        raise ParseError("empty grid file", line=1)
    header = lines[header_line].split()
    try:
        width, height = (int(v) for v in header)
    except ValueError as e:
        raise ParseError(f"header must be 'width height', got '{lines[header_line].strip()}'",
                         line=header_line + 1) from e
    if width < 1 or height < 1:
        raise ParseError(f"grid dimensions must be positive, got {width}x{height}", line=header_line + 1)

    values = []
    for number, line in enumerate(lines[header_line + 1:], start=header_line + 2):
        for token in line.split():
            try:
                values.append(float(token))
            except ValueError as e:
                raise ParseError(f"non-numeric value '{token}'", line=number) from e
            if np.isinf(values[-1]):
                raise ParseError(f"infinite value '{token}'", line=number)
    if len(values) != width * height:
        raise ParseError(f"expected {width * height} values, found {len(values)}", line=len(lines) + 1)
    return ScalarGrid(np.array(values).reshape(height, width))


def format_ascii_grid(grid: ScalarGrid) -> str:
    rows = [f"{grid.width} {grid.height}"]
    for values, mask in zip(grid.values, grid.mask):
        rows.append(" ".join("nan" if m else repr(float(v)) for v, m in zip(values, mask)))
    return "\n".join(rows) + "\n"


def read_ascii_grid(path: str | Path) -> ScalarGrid:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return parse_ascii_grid(text)


def write_ascii_grid(grid: ScalarGrid, path: str | Path) -> None:
    Path(path).write_text(format_ascii_grid(grid), encoding="utf-8", newline="\n")
    logger.info(f"Wrote {grid.width}x{grid.height} grid to {path}")


# ===== IMAGES =====
def quantize(img: RgbImage) -> np.ndarray:
    """8-битное квантование: floor(255*c + 0.5) с обрезкой до 0..255."""
    return np.clip(np.floor(img.pixels * 255.0 + 0.5), 0, 255).astype(np.uint8)


def encode_ppm(img: RgbImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + quantize(img).tobytes()


def write_image(img: RgbImage, path: str | Path, fmt: ImageFormat | None = None) -> None:
    """
    Записывает изображение; формат по расширению (.png - PNG, иначе PPM), если не задан явно.
    """
    path = Path(path)
    if fmt is None:
        fmt = ImageFormat.PNG if path.suffix.lower() == ".png" else ImageFormat.PPM
    fmt = ImageFormat(fmt)
    if fmt is ImageFormat.PPM:
        path.write_bytes(encode_ppm(img))
    elif fmt is ImageFormat.PNG:
        data = quantize(img)
        writer = png.Writer(width=img.width, height=img.height, greyscale=False, bitdepth=8)
        with open(path, "wb") as f:
            writer.write(f, data.reshape(img.height, img.width * 3).tolist())
    else:
        raise InvalidArgumentError(f"unsupported image format {fmt}")
    logger.info(f"Wrote {img.width}x{img.height} {fmt.value.upper()} image to {path}")
