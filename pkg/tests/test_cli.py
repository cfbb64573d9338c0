import json

import numpy as np
import png
import pytest

from cmapforge import cli
from cmapforge.cli_io import read_map, write_ascii_grid, write_map
from cmapforge.grids import ScalarGrid
from cmapforge.map_catalog import hsv_hue_circle


def _grid_file(tmp_path, name, values):
    target = tmp_path / name
    write_ascii_grid(ScalarGrid(np.asarray(values, dtype=float)), target)
    return str(target)


# ===== GENERATE =====
def test_presets_listing(capsys):
    assert cli.main(["presets"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "diverging_bwr\tdiverging" in lines
    assert "divlinear_bgy\tdiverging,linear" in lines


def test_generate_to_file(tmp_path, capsys):
    out = tmp_path / "grey.csv"
    assert cli.main(["generate", "--preset", "linear_grey_0_100", "--n", "16", "--out", str(out)]) == 0
    assert read_map(out).n == 16
    assert "linear_grey_0_100: n=16" in capsys.readouterr().out


def test_generate_to_stdout(capsys):
    assert cli.main(["generate", "--preset", "cyclic_grey", "--n", "16"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("# cmapforge v1, n=16, attributes=cyclic")
    assert len(captured.out.splitlines()) == 17
    assert "cyclic_grey: n=16" in captured.err


def test_generate_is_byte_deterministic(tmp_path):
    for name in ("a.csv", "b.csv"):
        assert cli.main(["generate", "--preset", "rainbow_bgyr", "--n", "32", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_generate_from_path_file(tmp_path):
    path_file = tmp_path / "ramp.json"
    path_file.write_text(json.dumps({"order": 1, "control_points": [[10, 0, 0], [90, 0, 0]]}))
    out = tmp_path / "ramp_map.json"
    assert cli.main(["generate", "--path", str(path_file), "--n", "24", "--out", str(out)]) == 0
    cmap = read_map(out)
    assert cmap.name == "ramp"
    assert cmap.provenance.metric == "lightness"


def test_generate_shift_and_reverse(tmp_path):
    plain, shifted = tmp_path / "plain.csv", tmp_path / "shifted.csv"
    assert cli.main(["generate", "--preset", "cyclic_mygbm", "--n", "32", "--out", str(plain)]) == 0
    assert cli.main(["generate", "--preset", "cyclic_mygbm", "--n", "32", "--shift", "0.25",
                     "--reverse", "--out", str(shifted)]) == 0
    expected = np.roll(read_map(plain).entries, -8, axis=0)[::-1]
    assert np.array_equal(read_map(shifted).entries, expected)


@pytest.mark.parametrize("argv", [
    ["generate", "--preset", "jet"],
    ["generate", "--preset", "linear_grey_0_100", "--shift", "0.5"],
    ["generate", "--preset", "iso_l70", "--n", "4"],
])
def test_generate_errors_exit_with_two(argv, capsys):
    assert cli.main(argv) == cli.EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_equalize(tmp_path):
    source, out = tmp_path / "in.csv", tmp_path / "out.csv"
    assert cli.main(["generate", "--preset", "linear_kryw_0_100", "--n", "32", "--out", str(source)]) == 0
    assert cli.main(["equalize", "--map", str(source), "--out", str(out), "--n", "48"]) == 0
    assert read_map(out).n == 48


# ===== ANALYZE =====
def test_analyze_clean_preset(capsys):
    assert cli.main(["analyze", "linear_grey_0_100"]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip().endswith("clean")


def test_analyze_flags_hsv_circle(tmp_path, capsys):
    target = tmp_path / "hsv.csv"
    write_map(hsv_hue_circle(), target)
    assert cli.main(["analyze", str(target)]) == cli.EXIT_WARNINGS
    assert "warning(s)" in capsys.readouterr().out


def test_analyze_truncated_file(tmp_path, capsys):
    target = tmp_path / "short.csv"
    target.write_text("# cmapforge v1, n=5\n0,0,0\n1,1,1\n")
    assert cli.main(["analyze", str(target)]) == cli.EXIT_ERROR
    assert "declares n=5" in capsys.readouterr().err


def test_analyze_missing_file(tmp_path):
    assert cli.main(["analyze", str(tmp_path / "nothing.csv")]) == cli.EXIT_ERROR


def test_analyze_profile_csv_and_json(tmp_path, capsys):
    profile = tmp_path / "profile.csv"
    source = tmp_path / "grey.csv"
    cli.main(["generate", "--preset", "linear_grey_0_100", "--n", "8", "--out", str(source)])
    capsys.readouterr()
    assert cli.main(["analyze", str(source), "--csv", str(profile), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n"] == 8
    assert report["warnings"] == []
    rows = profile.read_text().splitlines()
    assert rows[0] == "index,L,dL,dE76"
    assert len(rows) == 9
    assert rows[-1].endswith(",,")


# ===== IMAGES =====
def test_linear_testimage_ppm(tmp_path):
    out = tmp_path / "linear.ppm"
    argv = ["testimage", "--map", "linear_grey_0_100", "--out", str(out), "--width", "64", "--height", "16"]
    assert cli.main(argv) == 0
    data = out.read_bytes()
    header = b"P6\n64 16\n255\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 64 * 16 * 3


def test_cyclic_testimage_png(tmp_path):
    out = tmp_path / "spiral.png"
    argv = ["testimage", "--kind", "cyclic", "--map", "cyclic_mrybm", "--out", str(out), "--size", "32", "--cycles", "4"]
    assert cli.main(argv) == 0
    width, height, _, _ = png.Reader(filename=str(out)).read()
    assert (width, height) == (32, 32)


def test_render_explicit_range(tmp_path):
    data = _grid_file(tmp_path, "data.txt", [[0.0, 1.0, 5.0]])
    out = tmp_path / "render.ppm"
    argv = ["render", "--map", "linear_grey_0_100", "--data", data, "--out", str(out), "--range", "0,1"]
    assert cli.main(argv) == 0
    pixels = out.read_bytes()[-9:]
    assert list(pixels) == [0, 0, 0, 255, 255, 255, 255, 255, 255]


def test_render_modulation_shape_mismatch(tmp_path, capsys):
    data = _grid_file(tmp_path, "data.txt", [[0.0, 1.0]])
    weights = _grid_file(tmp_path, "weights.txt", [[1.0, 1.0, 1.0]])
    argv = ["render", "--map", "linear_grey_0_100", "--data", data, "--out", str(tmp_path / "r.ppm"),
            "--modulate", weights]
    assert cli.main(argv) == cli.EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_bad_range_argument_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["render", "--map", "x", "--data", "y", "--out", "z", "--range", "1"])
    assert info.value.code == 2


def test_shade_noise(tmp_path, capsys):
    out, grid_out = tmp_path / "shade.png", tmp_path / "noise.txt"
    argv = ["shade", "--noise", "1.8", "--size", "64", "--out", str(out), "--grid-out", str(grid_out),
            "--drape-map", "linear_kryw_0_100"]
    assert cli.main(argv) == 0
    assert "noise amplitude spectrum slope:" in capsys.readouterr().out
    assert grid_out.read_text().startswith("64 64\n")
    width, height, _, _ = png.Reader(filename=str(out)).read()
    assert (width, height) == (64, 64)


def test_ternary(tmp_path):
    rng = np.random.default_rng(0)
    channels = [_grid_file(tmp_path, f"c{i}.txt", rng.uniform(0.0, 10.0, (8, 8))) for i in range(3)]
    out, lightness = tmp_path / "ternary.ppm", tmp_path / "lightness.ppm"
    argv = ["ternary", "--c1", channels[0], "--c2", channels[1], "--c3", channels[2],
            "--out", str(out), "--lightness-out", str(lightness)]
    assert cli.main(argv) == 0
    assert out.read_bytes().startswith(b"P6\n8 8\n255\n")
    assert lightness.exists()


def test_ternary_basis_choices(tmp_path):
    channels = [_grid_file(tmp_path, f"c{i}.txt", [[0.0, 1.0], [2.0, 3.0]]) for i in range(3)]
    base = ["ternary", "--c1", channels[0], "--c2", channels[1], "--c3", channels[2], "--no-clip"]
    paper, rgb = tmp_path / "paper.ppm", tmp_path / "rgb.ppm"
    assert cli.main(base + ["--basis", "paper", "--out", str(paper)]) == 0
    assert cli.main(base + ["--basis", "rgb", "--out", str(rgb)]) == 0
    assert paper.read_bytes() != rgb.read_bytes()
    assert cli.build_parser().parse_args(base + ["--out", "x.ppm"]).basis == "paper"


# ===== DETERMINISM =====
def _render_argv(tmp_path):
    data = _grid_file(tmp_path, "data.txt", np.linspace(-1.0, 1.0, 24).reshape(4, 6))
    return ["render", "--map", "diverging_bwr", "--data", data, "--diverging", "0"]


def _ternary_argv(tmp_path):
    rng = np.random.default_rng(3)
    channels = [_grid_file(tmp_path, f"t{i}.txt", rng.uniform(0.0, 5.0, (6, 6))) for i in range(3)]
    return ["ternary", "--c1", channels[0], "--c2", channels[1], "--c3", channels[2]]


@pytest.mark.parametrize("suffix", [".ppm", ".png"])
@pytest.mark.parametrize("make_argv", [
    lambda tmp: ["testimage", "--map", "linear_kryw_0_100", "--width", "64", "--height", "16"],
    lambda tmp: ["testimage", "--kind", "cyclic", "--map", "cyclic_grey", "--size", "32", "--cycles", "4"],
    _render_argv,
    lambda tmp: ["shade", "--noise", "1.5", "--size", "32", "--seed", "4", "--drape-map", "cyclic_mygbm",
                 "--cyclic", "1"],
    _ternary_argv,
])
def test_image_commands_are_byte_deterministic(tmp_path, make_argv, suffix):
    argv = make_argv(tmp_path)
    first, second = tmp_path / f"first{suffix}", tmp_path / f"second{suffix}"
    assert cli.main(argv + ["--out", str(first)]) == 0
    assert cli.main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("n", ["8", "32", "64", "100"])
def test_generate_small_diverging_presets(tmp_path, n):
    out = tmp_path / "bwr.csv"
    assert cli.main(["generate", "--preset", "diverging_bwr", "--n", n, "--out", str(out)]) == 0
    assert read_map(out).n == int(n)
