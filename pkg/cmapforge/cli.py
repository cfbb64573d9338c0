# cli.py
"""Командная строка cmapforge.

Подкоманды: generate, equalize, analyze, testimage, render, shade, ternary, presets.
Коды выхода: 0 - успех, 2 - ошибка; analyze возвращает 1, если найдены замечания.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from cmapforge import __version__
from cmapforge.cli_io import (
    format_map_csv,
    read_ascii_grid,
    read_map,
    read_path_file,
    write_ascii_grid,
    write_image,
    write_map,
)
from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, Direction, Metric, RenderMode
from cmapforge.contrast_equalizer import analyze_uniformity, equalize_entries
from cmapforge.data_render import RenderPolicy, modulate, render
from cmapforge.errors import CmapforgeError
from cmapforge.grids import RgbImage, ScalarGrid
from cmapforge.map_catalog import (
    build_from_path,
    build_preset,
    cyclic_shift,
    list_presets,
    load_presets,
    reverse,
)
from cmapforge.relief_shading import (
    ShadingParams,
    combine_multiplicative,
    one_on_f_noise,
    shade,
    spectrum_slope,
)
from cmapforge.ternary import compose, lightness_image, normalize_channel, paper_basis, rgb_basis
from cmapforge.test_images import CyclicTestSpec, LinearTestSpec, TWO_PI, cyclic_test_image, linear_test_image

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_ERROR = 2


# ===== LOGGING SETTINGS =====
def setup_logging(level: str = "WARNING", log_file: str | None = None) -> None:
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


# ===== HELPERS =====
def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'LO,HI', got '{text}'")
    return lo, hi


def _load_map(ref: str) -> ColorMap:
    """Файл карты или имя пресета."""
    if not Path(ref).exists() and ref in load_presets():
        return build_preset(ref)
    return read_map(ref)


def _diverging_or_cyclic_policy(args) -> RenderPolicy:
    if getattr(args, "cyclic", None) is not None:
        return RenderPolicy(RenderMode.CYCLIC, period=args.cyclic, origin=args.origin)
    if getattr(args, "diverging", None) is not None:
        return RenderPolicy(RenderMode.DIVERGING, reference=args.diverging)
    lo, hi = args.range if getattr(args, "range", None) else (None, None)
    return RenderPolicy(RenderMode.LINEAR, lo=lo, hi=hi, clamp=not getattr(args, "no_clamp", False))


def _print_summary(cmap: ColorMap, out=None) -> None:
    out = sys.stdout if out is None else out
    report = analyze_uniformity(cmap)
    stats = report.lightness_stats
    print(
        f"{cmap.name}: n={cmap.n}, attributes={','.join(sorted(a.value for a in cmap.attributes)) or '-'}, "
        f"mean |dL|={stats.mean:.4f}, CoV(dL)={stats.cov:.4f}, "
        f"mean dE76={report.delta_e_stats.mean:.4f}, warnings={len(report.warnings)}",
        file=out,
    )


# ===== COMMANDS =====
def cmd_generate(args) -> int:
    if args.preset:
        cmap = build_preset(args.preset, n=args.n, sigma=args.sigma)
    else:
        path = read_path_file(args.path)
        metric = Metric(args.metric) if args.metric else None
        name = args.name or Path(args.path).stem
        cmap = build_from_path(path, n=DEFAULT_CONFIG.default_n if args.n is None else args.n, metric=metric,
                               sigma=args.sigma or 0.0, name=name)
    if args.shift:
        cmap = cyclic_shift(cmap, args.shift)
    if args.reverse:
        cmap = reverse(cmap)

    if args.out:
        write_map(cmap, args.out)
        _print_summary(cmap)
    else:
        sys.stdout.write(format_map_csv(cmap))
        _print_summary(cmap, out=sys.stderr)
    return EXIT_OK


def cmd_equalize(args) -> int:
    cmap = read_map(args.map)
    metric = Metric(args.metric) if args.metric else None
    result = equalize_entries(cmap, n=args.n, metric=metric, sigma=args.sigma)
    write_map(result, args.out)
    _print_summary(result)
    return EXIT_OK


def cmd_analyze(args) -> int:
    cmap = _load_map(args.map)
    report = analyze_uniformity(cmap)
    if args.json:
        print(json.dumps(report.summary(), indent=2))
    else:
        print(f"map: {cmap.name} ({cmap.n} entries{', cyclic' if report.cyclic else ''})")
        for label, stats in (("|dL|", report.lightness_stats), ("dE76", report.delta_e_stats)):
            print(f"{label}: mean={stats.mean:.4f} min={stats.min:.4f} max={stats.max:.4f} cov={stats.cov:.4f}")
        print(f"lightness reversals at entries: {report.reversals or '-'}")
        for spot in report.flat_spots:
            state = "expected" if spot.expected else "FLAT SPOT"
            print(f"{state}: steps {spot.start}..{spot.start + spot.length - 1} ({100 * spot.fraction:.1f}%)")
        for d in report.discontinuities:
            print(f"DISCONTINUITY: {d.kind} at {d.index} ({d.value:.2f})")
        print("clean" if report.clean else f"{len(report.warnings)} warning(s)")

    if args.csv:
        rows = ["index,L,dL,dE76"]
        for i, lightness in enumerate(report.lightness):
            if i < len(report.delta_l):
                rows.append(f"{i},{lightness:.6f},{report.delta_l[i]:.6f},{report.delta_e[i]:.6f}")
            else:
                rows.append(f"{i},{lightness:.6f},,")
        Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK if report.clean else EXIT_WARNINGS


def cmd_testimage(args) -> int:
    cmap = _load_map(args.map)
    if args.kind == "linear":
        spec = LinearTestSpec(args.width, args.height, args.wavelength, args.amplitude)
        image = render(linear_test_image(spec), cmap, RenderPolicy(RenderMode.LINEAR, lo=0.0, hi=255.0))
    else:
        spec = CyclicTestSpec(args.size, args.cycles)
        image = render(cyclic_test_image(spec), cmap, RenderPolicy(RenderMode.CYCLIC, period=TWO_PI))
    write_image(image, args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    cmap = _load_map(args.map)
    grid = read_ascii_grid(args.data)
    image = render(grid, cmap, _diverging_or_cyclic_policy(args))
    if args.modulate:
        image = modulate(image, read_ascii_grid(args.modulate), Direction(args.direction))
    write_image(image, args.out)
    return EXIT_OK


def cmd_shade(args) -> int:
    if args.noise is not None:
        grid = one_on_f_noise(args.size, args.size, args.noise, args.seed)
    elif args.data:
        grid = read_ascii_grid(args.data)
    else:
        raise CmapforgeError("shade needs --data or --noise")
    if args.grid_out:
        write_ascii_grid(grid, args.grid_out)
    if args.noise is not None:
        fit = spectrum_slope(grid)
        print(f"noise amplitude spectrum slope: {fit.slope:.3f} (residual {fit.residual:.3f})")

    params = ShadingParams(args.azimuth, args.elevation, args.scale)
    shading = shade(grid, params)
    if args.drape_map:
        colour = render(grid, _load_map(args.drape_map), _diverging_or_cyclic_policy(args))
        image = combine_multiplicative(colour, shading)
    else:
        image = RgbImage.from_grey(shading)
    write_image(image, args.out)
    return EXIT_OK


def cmd_ternary(args) -> int:
    basis = paper_basis() if args.basis == "paper" else rgb_basis()
    clip = None if args.no_clip else args.clip
    channels = [normalize_channel(read_ascii_grid(f), clip) for f in (args.c1, args.c2, args.c3)]
    image = compose(*channels, basis)
    write_image(image, args.out)
    if args.lightness_out:
        lightness = lightness_image(image)
        write_image(RgbImage.from_grey(ScalarGrid(lightness.values / 100.0)), args.lightness_out)
    return EXIT_OK


def cmd_presets(args) -> int:
    for name, attributes in list_presets().items():
        print(f"{name}\t{','.join(attributes)}")
    return EXIT_OK


# ===== PARSER =====
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmapforge", description="Perceptually uniform colour map toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    parser.add_argument("--log-file", default=None, help="also write the log to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a colour map from a preset or a path file")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset")
    source.add_argument("--path", help="JSON path file {order, cyclic, control_points}")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--metric", choices=[m.value for m in Metric], default=None)
    p.add_argument("--shift", type=float, default=0.0, help="cyclic rotation as a fraction of the map")
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--name", default=None)
    p.add_argument("--out", help="output .csv or .json (default: CSV on stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("equalize", help="re-equalize an existing colour map")
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--metric", choices=[m.value for m in Metric], default=None)
    p.add_argument("--sigma", type=float, default=0.0)
    p.set_defaults(func=cmd_equalize)

    p = sub.add_parser("analyze", help="report flat spots and discontinuities")
    p.add_argument("map", help="colour map file or preset name")
    p.add_argument("--csv", help="write the lightness profile and step contrasts as CSV")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("testimage", help="render a test image with a colour map")
    p.add_argument("--kind", choices=["linear", "cyclic"], default="linear")
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--wavelength", type=float, default=8.0)
    p.add_argument("--amplitude", type=float, default=0.10)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--cycles", type=int, default=100)
    p.set_defaults(func=cmd_testimage)

    p = sub.add_parser("render", help="render an ASCII grid with a colour map")
    p.add_argument("--map", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--diverging", type=float, metavar="REF")
    mode.add_argument("--cyclic", type=float, metavar="PERIOD")
    mode.add_argument("--range", type=_pair, metavar="LO,HI")
    p.add_argument("--origin", type=float, default=0.0)
    p.add_argument("--no-clamp", action="store_true", help="show out-of-range values as background")
    p.add_argument("--modulate", metavar="GRID", help="weights grid in [0, 1]")
    p.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.TOWARD_BLACK.value)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("shade", help="relief shading, optionally draped with a colour map")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--data")
    source.add_argument("--noise", type=float, metavar="P", help="synthesize 1/f^P noise instead of reading data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--azimuth", type=float, default=DEFAULT_CONFIG.azimuth_deg)
    p.add_argument("--elevation", type=float, default=DEFAULT_CONFIG.elevation_deg)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--drape-map")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--diverging", type=float, metavar="REF")
    mode.add_argument("--cyclic", type=float, metavar="PERIOD")
    p.add_argument("--origin", type=float, default=0.0)
    p.add_argument("--grid-out", help="write the input or synthesized grid as an ASCII grid")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_shade)

    p = sub.add_parser("ternary", help="compose three channels into a ternary image")
    p.add_argument("--c1", required=True)
    p.add_argument("--c2", required=True)
    p.add_argument("--c3", required=True)
    p.add_argument("--basis", choices=["paper", "rgb"], default="paper", help="paper: lightness-matched basis")
    p.add_argument("--clip", type=_pair, default=(2.0, 98.0), metavar="LO,HI", help="percentile clip")
    p.add_argument("--no-clip", action="store_true", help="scale by min/max instead of percentiles")
    p.add_argument("--out", required=True)
    p.add_argument("--lightness-out", help="also write the lightness image")
    p.set_defaults(func=cmd_ternary)

    p = sub.add_parser("presets", help="list built-in presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    try:
        # валидация конфигурации
        DEFAULT_CONFIG.validate()
        return args.func(args)
    except CmapforgeError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
