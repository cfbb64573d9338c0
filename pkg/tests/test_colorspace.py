import math

import numpy as np
import pytest

from cmapforge.colorspace import (
    LabColor,
    RgbColor,
    delta_e2000,
    delta_e76,
    in_gamut,
    in_gamut_array,
    lab_to_srgb,
    lab_to_srgb_array,
    lch_to_lab_array,
    srgb_to_lab,
    srgb_to_lab_array,
)
from cmapforge.errors import InvalidInputError

# Пары (Lab1, Lab2, ΔE2000) из опубликованного набора проверочных данных CIEDE2000
CIEDE2000_PAIRS = [
    ((50.0, 2.6772, -79.7751), (50.0, 0.0, -82.7485), 2.0425),
    ((50.0, 3.1571, -77.2803), (50.0, 0.0, -82.7485), 2.8615),
    ((50.0, 2.8361, -74.0200), (50.0, 0.0, -82.7485), 3.4412),
    ((50.0, -1.3802, -84.2814), (50.0, 0.0, -82.7485), 1.0000),
    ((50.0, 0.0, 0.0), (50.0, -1.0, 2.0), 2.3669),
    ((50.0, 2.49, -0.001), (50.0, -2.49, 0.0009), 7.1792),
    ((50.0, 2.5, 0.0), (73.0, 25.0, -18.0), 27.1492),
    ((50.0, 2.5, 0.0), (61.0, -5.0, 29.0), 22.8977),
    ((50.0, 2.5, 0.0), (56.0, -27.0, -3.0), 31.9030),
    ((50.0, 2.5, 0.0), (58.0, 24.0, 15.0), 19.4535),
    ((60.2574, -34.0099, 36.2677), (60.4626, -34.1751, 39.4387), 1.2644),
    ((63.0109, -31.0961, -5.8663), (62.8187, -29.7946, -4.0864), 1.2630),
    ((61.2901, 3.7196, -5.3901), (61.4292, 2.2480, -4.9620), 1.8731),
    ((35.0831, -44.1164, 3.7933), (35.0232, -40.0716, 1.5901), 1.8645),
    ((22.7233, 20.0904, -46.6940), (23.0331, 14.9730, -42.5619), 2.0373),
]


def _ciede2000_reference(lab1, lab2):
    """Построчная запись формулы CIEDE2000 на math, без numpy."""
    L1, a1, b1 = lab1
    L2, a2, b2 = lab2
    c_bar = (math.hypot(a1, b1) + math.hypot(a2, b2)) / 2
    g = 0.5 * (1 - math.sqrt(c_bar ** 7 / (c_bar ** 7 + 25 ** 7)))
    a1p, a2p = (1 + g) * a1, (1 + g) * a2
    c1p, c2p = math.hypot(a1p, b1), math.hypot(a2p, b2)

    def hue(b, ap):
        if b == 0 and ap == 0:
            return 0.0
        return math.degrees(math.atan2(b, ap)) % 360

    h1p, h2p = hue(b1, a1p), hue(b2, a2p)
    dLp = L2 - L1
    dCp = c2p - c1p
    if c1p * c2p == 0:
        dhp = 0.0
    elif abs(h2p - h1p) <= 180:
        dhp = h2p - h1p
    elif h2p - h1p > 180:
        dhp = h2p - h1p - 360
    else:
        dhp = h2p - h1p + 360
    dHp = 2 * math.sqrt(c1p * c2p) * math.sin(math.radians(dhp / 2))

    Lbp = (L1 + L2) / 2
    Cbp = (c1p + c2p) / 2
    if c1p * c2p == 0:
        hbp = h1p + h2p
    elif abs(h1p - h2p) <= 180:
        hbp = (h1p + h2p) / 2
    elif h1p + h2p < 360:
        hbp = (h1p + h2p + 360) / 2
    else:
        hbp = (h1p + h2p - 360) / 2

    T = (1 - 0.17 * math.cos(math.radians(hbp - 30)) + 0.24 * math.cos(math.radians(2 * hbp))
         + 0.32 * math.cos(math.radians(3 * hbp + 6)) - 0.20 * math.cos(math.radians(4 * hbp - 63)))
    d_theta = 30 * math.exp(-((hbp - 275) / 25) ** 2)
    Rc = 2 * math.sqrt(Cbp ** 7 / (Cbp ** 7 + 25 ** 7))
    Sl = 1 + 0.015 * (Lbp - 50) ** 2 / math.sqrt(20 + (Lbp - 50) ** 2)
    Sc = 1 + 0.045 * Cbp
    Sh = 1 + 0.015 * Cbp * T
    Rt = -math.sin(math.radians(2 * d_theta)) * Rc
    return math.sqrt((dLp / Sl) ** 2 + (dCp / Sc) ** 2 + (dHp / Sh) ** 2 + Rt * (dCp / Sc) * (dHp / Sh))


# ===== CONVERSIONS =====
def test_white_maps_to_neutral_axis():
    lab = srgb_to_lab(RgbColor(1.0, 1.0, 1.0))
    assert lab.L == pytest.approx(100.0, abs=1e-6)
    assert abs(lab.a) < 0.01 and abs(lab.b) < 0.01


@pytest.mark.parametrize("rgb, lightness", [
    ((1.0, 0.0, 0.0), 53.0),
    ((0.0, 1.0, 0.0), 88.0),
    ((0.0, 0.0, 1.0), 32.0),
])
def test_primary_lightness(rgb, lightness):
    assert srgb_to_lab(RgbColor(*rgb)).L == pytest.approx(lightness, abs=1.0)


@pytest.mark.parametrize("rgb, expected", [
    ((1.0, 0.0, 0.0), (53.24, 80.09, 67.20)),
    ((0.0, 0.0, 1.0), (32.30, 79.19, -107.86)),
])
def test_reference_lab_values(rgb, expected):
    lab = srgb_to_lab(RgbColor(*rgb))
    assert (lab.L, lab.a, lab.b) == pytest.approx(expected, abs=0.05)


@pytest.mark.parametrize("rgb, lightness", [
    ((0.0, 1.0, 1.0), 91.11),
    ((1.0, 0.0, 1.0), 60.32),
    ((1.0, 1.0, 0.0), 97.14),
])
def test_secondary_lightness(rgb, lightness):
    assert srgb_to_lab(RgbColor(*rgb)).L == pytest.approx(lightness, abs=0.05)


def test_lab_to_srgb_white_and_black():
    white = lab_to_srgb(LabColor(100.0, 0.0, 0.0))
    black = lab_to_srgb(LabColor(0.0, 0.0, 0.0))
    assert white.as_array() == pytest.approx([1.0, 1.0, 1.0], abs=1e-6)
    assert black.as_array() == pytest.approx([0.0, 0.0, 0.0], abs=1e-6)


def test_round_trip_random_colours():
    rng = np.random.default_rng(0)
    rgb = rng.random((1000, 3))
    back = lab_to_srgb_array(srgb_to_lab_array(rgb))
    assert np.max(np.abs(back - rgb)) < 1e-6


def test_round_trip_outside_unit_cube():
    rgb = np.array([[-0.2, 0.5, 1.3], [1.1, -0.01, 0.0]])
    assert lab_to_srgb_array(srgb_to_lab_array(rgb)) == pytest.approx(rgb, abs=1e-9)


def test_grey_ramp_is_monotone_and_neutral():
    v = np.linspace(0.0, 1.0, 256)
    lab = srgb_to_lab_array(np.stack([v, v, v], axis=1))
    assert np.all(np.diff(lab[:, 0]) > 0)
    assert np.max(np.abs(lab[:, 1:])) < 1e-6


def test_lch_to_lab():
    lab = lch_to_lab_array(70.0, 40.0, [0.0, 90.0])
    assert lab == pytest.approx(np.array([[70.0, 40.0, 0.0], [70.0, 0.0, 40.0]]), abs=1e-9)


def test_lab_colour_derived_values():
    c = LabColor(50.0, 0.0, -10.0)
    assert c.chroma == pytest.approx(10.0)
    assert c.hue == pytest.approx(270.0)
    assert LabColor(50.0, 0.0, 0.0).chroma == 0.0


@pytest.mark.parametrize("bad", [
    (float("nan"), 0.0, 0.0),
    (0.5, float("inf"), 0.5),
])
def test_non_finite_input_rejected(bad):
    with pytest.raises(InvalidInputError):
        srgb_to_lab(RgbColor(*bad))
    with pytest.raises(InvalidInputError):
        lab_to_srgb(LabColor(*bad))


def test_wrong_shape_rejected():
    with pytest.raises(InvalidInputError):
        srgb_to_lab_array(np.zeros((4, 2)))


# ===== GAMUT =====
def test_in_gamut_examples():
    assert in_gamut(LabColor(70.0, 0.0, 0.0))
    assert not in_gamut(LabColor(50.0, 300.0, 0.0))


@pytest.mark.parametrize("hue", [0.0, 90.0, 180.0, 270.0])
def test_moderate_chroma_at_l70_in_gamut(hue):
    lab = lch_to_lab_array(70.0, 40.0, hue)
    assert in_gamut(LabColor(*lab), tol=0.01)


def test_in_gamut_array_shape():
    lab = np.array([[70.0, 0.0, 0.0], [50.0, 300.0, 0.0], [100.0, 0.0, 0.0]])
    assert in_gamut_array(lab).tolist() == [True, False, True]


# ===== DIFFERENCES =====
def test_delta_e76_examples():
    a = LabColor(50.0, 0.0, 0.0)
    assert delta_e76(a, a) == 0.0
    assert delta_e76(a, LabColor(60.0, 0.0, 0.0)) == pytest.approx(10.0)
    # sqrt(2.6772^2 + 2.9734^2)
    assert delta_e76((50.0, 2.6772, -79.7751), (50.0, 0.0, -82.7485)) == pytest.approx(4.0011, abs=1e-3)


def test_delta_e76_is_a_metric():
    rng = np.random.default_rng(1)
    x, y, z = (rng.uniform([0, -80, -80], [100, 80, 80], (200, 3)) for _ in range(3))
    dxy, dyz, dxz = delta_e76(x, y), delta_e76(y, z), delta_e76(x, z)
    assert np.allclose(dxy, delta_e76(y, x))
    assert np.all(dxz <= dxy + dyz + 1e-9)
    assert np.all(dxy > 0)


def test_delta_e_vectorized_broadcast():
    ref = np.array([50.0, 0.0, 0.0])
    others = np.array([[50.0, 0.0, 0.0], [60.0, 0.0, 0.0]])
    assert delta_e76(ref, others) == pytest.approx([0.0, 10.0])
    assert delta_e2000(others, ref).shape == (2,)


@pytest.mark.parametrize("lab1, lab2, expected", CIEDE2000_PAIRS)
def test_delta_e2000_reference_pairs(lab1, lab2, expected):
    assert delta_e2000(lab1, lab2) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("lab1, lab2, expected", CIEDE2000_PAIRS)
def test_delta_e2000_matches_hand_transcription(lab1, lab2, expected):
    assert delta_e2000(lab1, lab2) == pytest.approx(_ciede2000_reference(lab1, lab2), abs=1e-9)


def test_delta_e2000_matches_colour_science():
    colour = pytest.importorskip("colour")
    rng = np.random.default_rng(2)
    lab1 = rng.uniform([0, -100, -100], [100, 100, 100], (500, 3))
    lab2 = rng.uniform([0, -100, -100], [100, 100, 100], (500, 3))
    expected = colour.difference.delta_E_CIE2000(lab1, lab2)
    assert np.max(np.abs(delta_e2000(lab1, lab2) - expected)) < 1e-4


def test_delta_e2000_symmetric_and_zero():
    rng = np.random.default_rng(3)
    lab1 = rng.uniform([0, -100, -100], [100, 100, 100], (300, 3))
    lab2 = rng.uniform([0, -100, -100], [100, 100, 100], (300, 3))
    assert np.max(np.abs(delta_e2000(lab1, lab2) - delta_e2000(lab2, lab1))) < 1e-9
    assert delta_e2000(LabColor(40.0, 10.0, -5.0), LabColor(40.0, 10.0, -5.0)) == 0.0


def test_delta_e2000_lightness_only_is_smaller_than_cie76():
    a, b = LabColor(50.0, 0.0, 0.0), LabColor(60.0, 0.0, 0.0)
    assert delta_e2000(a, b) < delta_e76(a, b)
