import logging

import numpy as np
import pytest

from cmapforge import cli
from cmapforge.colormap import ColorMap
from cmapforge.config import DEFAULT_CONFIG, ToolkitConfig
from cmapforge.errors import InvalidArgumentError


def test_default_config_is_valid():
    DEFAULT_CONFIG.validate()


@pytest.mark.parametrize("overrides", [
    {"dense_samples": 8},
    {"iterations": 0},
    {"default_n": 1},
    {"flat_fraction": 1.5},
    {"discontinuity_factor": 1.0},
    {"background": (0.5, 1.2, 0.5)},
    {"elevation_deg": 0.0},
    {"spectrum_band_high": 0.75},
])
def test_invalid_config_is_rejected(overrides):
    with pytest.raises(InvalidArgumentError):
        ToolkitConfig(**overrides).validate()


def test_cli_refuses_to_run_with_invalid_config(monkeypatch, capsys):
    monkeypatch.setattr(cli, "DEFAULT_CONFIG", ToolkitConfig(iterations=0))
    assert cli.main(["presets"]) == cli.EXIT_ERROR
    assert "iterations" in capsys.readouterr().err


def test_gamut_warning_respects_tolerance(caplog):
    inside = np.array([[50.0, 0.0, 0.0], [60.0, 0.0, 0.0]])
    with caplog.at_level(logging.WARNING):
        cmap = ColorMap.from_lab(inside, name="grey")
    assert "gamut residual" not in caplog.text
    assert cmap.provenance.gamut_residual <= DEFAULT_CONFIG.gamut_tolerance

    outside = np.array([[50.0, 0.0, 0.0], [50.0, 120.0, 0.0]])
    with caplog.at_level(logging.WARNING):
        cmap = ColorMap.from_lab(outside, name="loud")
    assert "clamped gamut residual" in caplog.text
    assert cmap.provenance.gamut_residual > DEFAULT_CONFIG.gamut_tolerance
    assert np.all((cmap.entries >= 0.0) & (cmap.entries <= 1.0))
