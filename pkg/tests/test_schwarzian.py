import pytest

from src.errors import DomainError, SeriesDomainError
from src.schwarzian.schwarzian_derivative import (
    SchwarzianSeries,
    b1_from_schwarzian,
    b_norm_estimate,
    has_vanishing_b1,
    homotopy_schwarzian_check,
    schwarzian,
)
from src.series.catalog import b1_map, monomial_map
from src.series.laurent_series import EXTERIOR, INTERIOR, LaurentSeries


def test_b1_read_off_the_schwarzian():
    phi = schwarzian(b1_map(0.3 - 0.2j, 20))
    assert phi.coeff(-4) == pytest.approx(-6 * (0.3 - 0.2j))
    assert b1_from_schwarzian(phi) == pytest.approx(0.3 - 0.2j)


def test_vanishing_b1():
    assert has_vanishing_b1(monomial_map(0.1, 0.3, 2, 20))
    assert not has_vanishing_b1(b1_map(0.1, 20))


def test_homotopy_transform_of_schwarzian():
    f = monomial_map(0.2, 0.3, 2, 30)
    assert homotopy_schwarzian_check(f, 0.6 + 0.2j) < 1e-12


def test_homotopy_check_rejects_t_zero():
    with pytest.raises(SeriesDomainError):
        homotopy_schwarzian_check(b1_map(0.2), 0)


def test_b_norm_of_b1_map():
    # S = -6b / (z^2 - b)^2 for z + b/z; the weighted sup sits on |z| -> 1 and is at most 6|b| / (1 - |b|)^2
    b = 0.2
    report = b_norm_estimate(schwarzian(b1_map(b, 60)), r_max=4.0, grid=128)
    assert 0 < report.value <= 6 * b / (1 - b) ** 2 + 1e-9
    assert report.flagged_rings < 128


def test_b_norm_needs_exterior_series():
    phi = schwarzian(LaurentSeries.from_coefficients({1: 1.0, 2: 0.1}, INTERIOR, 10))
    with pytest.raises(DomainError):
        b_norm_estimate(phi)


def test_b_norm_of_z_minus_four():
    # (r^2 - 1)^2 / r^4 climbs to 1 as r grows
    phi = SchwarzianSeries(LaurentSeries.from_coefficients({-4: 1.0}, EXTERIOR, 12))
    report = b_norm_estimate(phi, r_max=100.0, grid=256)
    assert report.flagged_rings == 0
    assert report.value == pytest.approx((100.0 ** 2 - 1) ** 2 / 100.0 ** 4, rel=1e-12)
    assert 0.999 < report.value <= 1.0


def test_b_norm_of_zero_schwarzian():
    phi = SchwarzianSeries(LaurentSeries.from_coefficients({-4: 0.0}, EXTERIOR, 12))
    report = b_norm_estimate(phi)
    assert report.value == 0.0
    assert report.refinement_delta == 0.0
