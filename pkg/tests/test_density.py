import math

import numpy as np
import pytest

from clarke_kit import density
from clarke_kit.density import SCENARIOS, cusp_ratio, density_curve


def test_half_plane():
    c = density_curve(SCENARIOS["half_plane"][0], [0.0, 0.0], [1.0, 0.1, 0.001], 10_000, seed=1)
    assert all(abs(r - 0.5) <= 0.02 for r in c.ratios)


def test_full_plane_exact():
    c = density_curve(SCENARIOS["full_plane"][0], [0.0, 0.0], [0.5, 0.1], 1000)
    assert c.ratios == [1.0, 1.0]


def test_cusp_exact_area_against_integration():
    # independent check of the closed form by midpoint integration of the slice widths
    for delta in (0.2, 0.1, 0.05):
        xs = (np.arange(200_000) + 0.5) * delta / 200_000
        width = 2 * np.minimum(xs**2, np.sqrt(delta**2 - xs**2))
        area = width.sum() * delta / 200_000
        assert cusp_ratio(delta) == pytest.approx(area / (math.pi * delta**2), rel=1e-4)


def test_cusp_small_delta_asymptote():
    # area ~ 2 delta^3 / 3 for small delta, so ratio ~ 2 delta / (3 pi)
    assert cusp_ratio(1e-3) == pytest.approx(2e-3 / (3 * math.pi), rel=1e-3)


def test_cusp_monte_carlo_matches_area():
    c = density_curve(SCENARIOS["cusp"][0], [0.0, 0.0], [0.1], 1_000_000, seed=2)
    se = c.std_errors()[0]
    assert abs(c.ratios[0] - cusp_ratio(0.1)) <= 4 * se


def test_cusp_decreasing_and_slope():
    c = density_curve(SCENARIOS["cusp"][0], [0.0, 0.0], [0.2, 0.1, 0.05, 0.025], 100_000)
    assert all(b < a for a, b in zip(c.ratios, c.ratios[1:]))
    assert c.loglog_slope() == pytest.approx(1.0, abs=0.2)


@pytest.mark.parametrize("name", ["half_plane", "quadrant", "epi_abs"])
def test_epi_lipschitz_positive(name):
    c = density_curve(SCENARIOS[name][0], [0.0, 0.0], [0.1, 0.05, 0.01], 100_000)
    assert min(c.ratios) >= 0.1


def test_deterministic_and_stable_under_doubling():
    dom = SCENARIOS["quadrant"][0]
    a = density_curve(dom, [0.0, 0.0], [0.1, 0.05], 20_000, seed=3)
    b = density_curve(dom, [0.0, 0.0], [0.1, 0.05], 20_000, seed=3)
    assert a.ratios == b.ratios
    c = density_curve(dom, [0.0, 0.0], [0.1, 0.05], 40_000, seed=3)
    for ra, rc, se in zip(a.ratios, c.ratios, a.std_errors()):
        assert abs(ra - rc) <= 3 * se


def test_scalar_oracle_path_agrees():
    dom = SCENARIOS["epi_abs"][0]
    a = density_curve(dom, [0.0, 0.0], [0.1], 2000, seed=4)
    b = density_curve(lambda x: bool(dom(np.asarray(x))), [0.0, 0.0], [0.1], 2000, seed=4, vectorized=False)
    assert a.ratios == b.ratios


def test_validation():
    with pytest.raises(ValueError):
        density_curve(SCENARIOS["quadrant"][0], [0.0, 0.0], [0.1], 999)
    with pytest.raises(ValueError):
        density_curve(SCENARIOS["quadrant"][0], [0.0, 0.0], [-0.1], 1000)


def test_scenarios_flags():
    assert SCENARIOS["cusp"][1] is False
    assert density.SCENARIOS["half_plane"][1] is True
