# mcp_server.py
import logging

import numpy as np
from mcp.server.fastmcp import FastMCP

from cmapforge.cli_io import read_map, write_image, write_map
from cmapforge.colormap import ColorMap
from cmapforge.colorspace import delta_e2000, delta_e76
from cmapforge.config import DEFAULT_CONFIG, MapAttribute, Metric, RenderMode
from cmapforge.contrast_equalizer import analyze_uniformity
from cmapforge.data_render import RenderPolicy, render
from cmapforge.errors import CmapforgeError
from cmapforge.map_catalog import build_from_path, build_preset, cyclic_shift, list_presets as catalog_presets, reverse
from cmapforge.spline_path import MapPath
from cmapforge.test_images import TWO_PI, CyclicTestSpec, LinearTestSpec, cyclic_test_image, linear_test_image

# Init server
mcp = FastMCP("cmapforge")

logger = logging.getLogger(__name__)


# ===== LOGGING SETTINGS =====
def setup_logging() -> None:
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler('cmapforge_mcp.log', encoding='utf-8')
        ]
    )


# ===== HELPERS =====
def _map_from_request(
    preset: str | None,
    control_points: list[list[float]] | None,
    order: int = 2,
    cyclic: bool = False,
    n: int | None = None,
    sigma: float | None = None,
    metric: str | None = None,
) -> ColorMap:
    """Строит карту по имени пресета или по контрольным точкам в Lab."""
    if (preset is None) == (control_points is None):
        raise CmapforgeError("give exactly one of 'preset' or 'control_points'")
    if preset is not None:
        return build_preset(preset, n=n, sigma=sigma)
    path = MapPath(np.asarray(control_points, dtype=float), order=order, cyclic=cyclic)
    return build_from_path(
        path,
        n=DEFAULT_CONFIG.default_n if n is None else n,
        metric=Metric(metric) if metric else None,
        sigma=sigma or 0.0,
    )


def _entries_payload(cmap: ColorMap) -> list[list[float]]:
    return [[round(float(v), 6) for v in row] for row in cmap.entries]


# ===== TOOLS =====
@mcp.tool()
def list_presets() -> dict:
    """
    Возвращает список встроенных пресетов с их атрибутами.

    Returns:
        dict: {"status": "success", "presets": {имя: [атрибуты]}, "count": int}
              или {"status": "error", "error": str}
    """
    try:
        presets = catalog_presets()
        logger.info(f"Listing presets: {len(presets)} found")
        return {"status": "success", "presets": presets, "count": len(presets)}
    except Exception as e:
        logger.error(f"Error listing presets: {e}")
        return {"status": "error", "error": "Failed to list presets"}


@mcp.tool()
def generate_colormap(
    preset: str | None = None,
    control_points: list[list[float]] | None = None,
    order: int = 2,
    cyclic: bool = False,
    n: int | None = None,
    sigma: float | None = None,
    metric: str | None = None,
    shift: float = 0.0,
    reverse_map: bool = False,
    out_path: str | None = None,
) -> dict:
    """
    Генерирует цветовую карту с выровненным перцептивным контрастом.

    Карта строится либо по пресету, либо по контрольным точкам пути в CIELAB.

    Args:
        preset (str | None): имя пресета (см. list_presets)
        control_points (list[list[float]] | None): контрольные точки пути [[L, a, b], ...]
        order (int): порядок сплайна, 1 или 2
        cyclic (bool): замкнутый путь
        n (int | None): число элементов карты
        sigma (float | None): σ сглаживания обращений светлоты
        metric (str | None): "lightness" или "cie76"; по умолчанию выбирается автоматически
        shift (float): циклический сдвиг в долях карты (только для циклических карт)
        reverse_map (bool): развернуть карту
        out_path (str | None): если задан, карта записывается в файл (.csv или .json)

    Returns:
        dict: {"status": "success", "name", "n", "attributes", "entries", "report"}
              или {"status": "error", "error": str}
    """
    try:
        cmap = _map_from_request(preset, control_points, order, cyclic, n, sigma, metric)
        if shift:
            cmap = cyclic_shift(cmap, shift)
        if reverse_map:
            cmap = reverse(cmap)
        if out_path:
            write_map(cmap, out_path)

        logger.info(f"Generated colour map '{cmap.name}' with {cmap.n} entries")
        return {
            "status": "success",
            "name": cmap.name,
            "n": cmap.n,
            "attributes": sorted(a.value for a in cmap.attributes),
            "entries": _entries_payload(cmap),
            "report": analyze_uniformity(cmap).summary(),
        }

    except CmapforgeError as e:
        logger.warning(f"Rejected colour map request: {e}")
        return {"status": "error", "error": str(e)}
    except Exception as e:
        logger.error(f"Error generating colour map: {e}")
        return {"status": "error", "error": "Failed to generate colour map"}


@mcp.tool()
def analyze_colormap(
    path: str | None = None,
    entries: list[list[float]] | None = None,
    cyclic: bool = False,
) -> dict:
    """
    Проверяет карту на плоские участки и разрывы.

    Карта берётся из файла (.csv или .json) или передаётся списком элементов.

    Args:
        path (str | None): файл цветовой карты
        entries (list[list[float]] | None): элементы карты, sRGB в [0, 1]
        cyclic (bool): для entries - считать карту циклической

    Returns:
        dict: {"status": "success", "name", "clean": bool, "report": {...}}
              или {"status": "error", "error": str}
    """
    try:
        if (path is None) == (entries is None):
            return {"status": "error", "error": "Give exactly one of 'path' or 'entries'"}
        if path is not None:
            cmap = read_map(path)
        else:
            attributes = frozenset({MapAttribute.CYCLIC}) if cyclic else frozenset()
            cmap = ColorMap(np.asarray(entries, dtype=float), name="request", attributes=attributes)

        report = analyze_uniformity(cmap)
        logger.info(f"Analyzed '{cmap.name}' ({cmap.n} entries): {len(report.warnings)} warning(s)")
        return {"status": "success", "name": cmap.name, "clean": report.clean, "report": report.summary()}

    except CmapforgeError as e:
        logger.warning(f"Rejected analysis request: {e}")
        return {"status": "error", "error": str(e)}
    except Exception as e:
        logger.error(f"Error analyzing colour map: {e}")
        return {"status": "error", "error": "Failed to analyze colour map"}


@mcp.tool()
def colour_difference(lab1: list[float], lab2: list[float], formula: str = "ciede2000") -> dict:
    """
    Цветовое различие двух цветов CIELAB.

    Args:
        lab1, lab2 (list[float]): цвета [L, a, b]
        formula (str): "ciede2000" или "cie76"

    Returns:
        dict: {"status": "success", "formula": str, "delta_e": float}
    """
    formulas = {"ciede2000": delta_e2000, "cie76": delta_e76}
    try:
        if formula not in formulas:
            return {"status": "error", "error": f"Unknown formula '{formula}', expected one of {sorted(formulas)}"}
        value = float(formulas[formula](lab1, lab2))
        return {"status": "success", "formula": formula, "delta_e": value}
    except CmapforgeError as e:
        return {"status": "error", "error": str(e)}
    except Exception as e:
        logger.error(f"Error computing colour difference: {e}")
        return {"status": "error", "error": "Failed to compute colour difference"}


@mcp.tool()
def write_test_image(
    out_path: str,
    kind: str = "linear",
    preset: str | None = None,
    map_path: str | None = None,
) -> dict:
    """
    Записывает тестовое изображение, отрисованное цветовой картой.

    Args:
        out_path (str): файл .png или .ppm
        kind (str): "linear" (синусоида на рампе) или "cyclic" (спираль)
        preset (str | None): имя пресета
        map_path (str | None): файл цветовой карты (вместо пресета)

    Returns:
        dict: {"status": "success", "path": str, "width": int, "height": int}
    """
    try:
        if (preset is None) == (map_path is None):
            return {"status": "error", "error": "Give exactly one of 'preset' or 'map_path'"}
        cmap = build_preset(preset) if preset is not None else read_map(map_path)
        if kind == "linear":
            image = render(linear_test_image(LinearTestSpec()), cmap,
                           RenderPolicy(RenderMode.LINEAR, lo=0.0, hi=255.0))
        elif kind == "cyclic":
            image = render(cyclic_test_image(CyclicTestSpec()), cmap,
                           RenderPolicy(RenderMode.CYCLIC, period=TWO_PI))
        else:
            return {"status": "error", "error": f"Unknown test image kind '{kind}'"}
        write_image(image, out_path)

        logger.info(f"Wrote {kind} test image for '{cmap.name}' to {out_path}")
        return {"status": "success", "path": out_path, "width": image.width, "height": image.height}

    except CmapforgeError as e:
        logger.warning(f"Rejected test image request: {e}")
        return {"status": "error", "error": str(e)}
    except Exception as e:
        logger.error(f"Error writing test image: {e}")
        return {"status": "error", "error": "Failed to write test image"}



def main():
    """Точка входа MCP-сервера"""
    setup_logging()
    try:
        # валидация конфигурации
        DEFAULT_CONFIG.validate()
        logger.info("Starting cmapforge MCP Server...")
        mcp.run(transport="stdio")
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    except Exception as e:
        logger.error(f"Server error: {e}")
        raise


if __name__ == "__main__":
    main()
