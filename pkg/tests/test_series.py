import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import ClassMismatchError, InputError, SeriesDomainError
from src.series.catalog import b1_map, koebe_sigma, monomial_map
from src.series.laurent_series import (
    EXTERIOR,
    INTERIOR,
    LaurentSeries,
    derivative,
    exp_series,
    homotopy,
    koebe_qc,
    load_series,
    log1p_series,
    mul,
    pow_series,
    reciprocal,
    require_sigma,
    sigma_from_s,
    sqrt_transform,
)


def test_from_coefficients_keeps_order_window():
    f = b1_map(0.3, order=10)
    assert f.hi == 1 and f.lo == -8
    assert f.coeff(-1) == pytest.approx(0.3)
    assert f.coeff(-5) == 0
    assert f.is_sigma()


def test_reciprocal_of_one_minus_z():
    a = LaurentSeries.from_coefficients({0: 1.0, 1: -1.0}, INTERIOR, 10)
    assert_allclose(reciprocal(a).coeffs, np.ones(10), atol=1e-14)


def test_exp_inverts_log1p():
    u = LaurentSeries.from_coefficients({1: 0.5}, INTERIOR, 12)
    back = exp_series(log1p_series(u))
    assert back.coeff(0) == pytest.approx(1.0)
    assert back.coeff(1) == pytest.approx(0.5)
    assert max(abs(back.coeff(p)) for p in range(2, 13)) < 1e-12


def test_square_root_squares_back():
    a = LaurentSeries.from_coefficients({0: 1.0, 1: 1.0}, INTERIOR, 16)
    root = pow_series(a, 0.5)
    square = mul(root, root)
    assert square.coeff(0) == pytest.approx(1.0)
    assert square.coeff(1) == pytest.approx(1.0)
    assert max(abs(square.coeff(p)) for p in range(2, 16)) < 1e-12


def test_koebe_coefficients():
    t = 0.3 + 0.2j
    f = koebe_qc(t, 1, order=8)
    for m in range(1, 9):
        assert f.coeff(m) == pytest.approx(m * t ** (m - 1))


@pytest.mark.parametrize("n", range(3, 9))
def test_root_transform_coefficient_equality(n):
    for theta in 2 * np.pi * np.arange(8) / 8:
        t = 0.1 * np.exp(1j * theta)
        f = koebe_qc(t, n - 1, order=n + 2)
        assert abs(f.coeff(n) - 2 * t / (n - 1)) < 1e-12


def test_sigma_from_s_of_koebe():
    f = koebe_sigma(0.5, order=12)
    assert f.coeff(1) == pytest.approx(1.0)
    assert f.coeff(0) == pytest.approx(-1.0)
    assert f.coeff(-1) == pytest.approx(0.25)
    assert max(abs(f.coeff(p)) for p in range(f.lo, -1)) < 1e-12


def test_sigma_from_s_rejects_exterior():
    with pytest.raises(ClassMismatchError):
        sigma_from_s(b1_map(0.2))


def test_homotopy_scales_coefficients():
    f = monomial_map(0.2, 0.4, 2, order=10)
    g = homotopy(f, 0.5)
    assert g.coeff(1) == pytest.approx(1.0)
    assert g.coeff(0) == pytest.approx(0.1)
    assert g.coeff(-2) == pytest.approx(0.4 * 0.125)


def test_homotopy_needs_unit_disk():
    with pytest.raises(SeriesDomainError):
        homotopy(b1_map(0.2), 1.0)


def test_sqrt_transform_of_b1_map():
    g = sqrt_transform(b1_map(0.6, order=20), 0.0)
    assert g.coeff(1) == pytest.approx(1.0)
    assert g.coeff(-1) == pytest.approx(0.0, abs=1e-14)
    assert g.coeff(-3) == pytest.approx(0.3)


def test_derivative_and_evaluate():
    f = b1_map(0.3, order=6)
    df = derivative(f)
    assert df.coeff(0) == pytest.approx(1.0)
    assert df.coeff(-2) == pytest.approx(-0.3)
    assert complex(f(2.0)) == pytest.approx(2.15)


def test_domain_mismatch():
    a = LaurentSeries.identity(INTERIOR, 4)
    b = LaurentSeries.identity(EXTERIOR, 4)
    with pytest.raises(SeriesDomainError):
        a + b


def test_b1_map_outside_univalence_range():
    with pytest.raises(SeriesDomainError):
        b1_map(1.2)


def test_require_sigma_rejects_class_s():
    with pytest.raises(ClassMismatchError):
        require_sigma(koebe_qc(0.5, 1, order=6))


def test_load_series_corrupt_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_series(str(path))


def test_load_series_wrong_length(write_json):
    path = write_json("short.json", {"domain": "exterior", "lo": -1, "hi": 1, "coeffs": [[0.5, 0], [1, 0]]})
    with pytest.raises(InputError):
        load_series(path)


def test_series_file_round_trip(b1_series_file):
    f = load_series(b1_series_file)
    assert f.is_sigma()
    assert f.coeff(-1) == pytest.approx(0.5)


def test_log1p_rejects_minus_one():
    u = LaurentSeries.from_coefficients({0: -1.0, 1: 0.5}, INTERIOR, 5)
    with pytest.raises(SeriesDomainError):
        log1p_series(u)


def test_pow_rejects_fractional_leading_power():
    a = LaurentSeries.from_coefficients({1: 1.0, 2: 1.0}, INTERIOR, 6)
    with pytest.raises(SeriesDomainError):
        pow_series(a, 0.5)


def test_log1p_of_exterior_geometric_term():
    # log(1 - b z^-2) = -sum b^k z^-2k / k
    b = 0.3 + 0.2j
    out = log1p_series(LaurentSeries.from_coefficients({-2: -b}, EXTERIOR, 12))
    for k in range(1, 6):
        assert out.coeff(-2 * k) == pytest.approx(-b ** k / k, abs=1e-14)
        assert out.coeff(-2 * k + 1) == 0


def test_homotopy_composes():
    f = monomial_map(0.2, 0.4, 2, order=12)
    s, t = 0.7, 0.4 + 0.3j
    composed = homotopy(homotopy(f, s), t)
    direct = homotopy(f, s * t)
    assert (composed.lo, composed.hi) == (direct.lo, direct.hi)
    assert_allclose(composed.coeffs, direct.coeffs, rtol=1e-13, atol=1e-15)


def test_sqrt_transform_is_odd():
    g = sqrt_transform(monomial_map(0.0, 0.45, 2, order=20), 0.0)
    even = [p for p in range(g.lo, g.hi + 1) if p % 2 == 0]
    assert even
    assert max(abs(g.coeff(p)) for p in even) < 1e-14
    assert g.coeff(-5) == pytest.approx(0.225)


def test_product_builds_koebe_qc():
    t, n = 0.4 - 0.1j, 12
    geo = LaurentSeries(0, n - 1, t ** np.arange(n), INTERIOR)
    z = LaurentSeries.monomial(1, INTERIOR, order=n)
    f = mul(mul(geo, geo), z)
    reference = koebe_qc(t, 1, order=n)
    for m in range(1, n):
        assert f.coeff(m) == pytest.approx(m * t ** (m - 1), rel=1e-12)
        assert f.coeff(m) == pytest.approx(reference.coeff(m), rel=1e-12)
