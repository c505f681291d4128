import numpy as np
import pytest
import scipy.linalg

from src.errors import DomainError, InputError, InsufficientTruncationError
from src.grunsky.grunsky_matrix import (
    GrunskyMatrix,
    area_block_check,
    grunsky_coefficients,
    grunsky_norm,
    grunsky_norm_of,
    h_x_value,
    homotopy_dilatation,
    kuhnau_bound,
    required_terms,
    takagi_vector,
)
from src.series.catalog import b1_map, koebe_sigma, monomial_map, sample_univalent_maps
from src.series.laurent_series import EXTERIOR, LaurentSeries

N = 32


@pytest.mark.parametrize("b", [0.3, 0.5, 0.7])
def test_diagonal_family(b):
    B = grunsky_coefficients(b1_map(b, 2 * N + 1), N)
    for m in range(1, N + 1):
        assert abs(B.alpha(m, m) - b ** m / m) < 1e-12
    off = B.entries - np.diag(np.diag(B.entries))
    assert np.max(np.abs(off)) < 1e-12
    report = grunsky_norm(B)
    assert report.value == pytest.approx(b, abs=1e-8)
    assert report.converged


def test_identity_has_zero_norm():
    f = LaurentSeries.identity(EXTERIOR, 2 * N + 1)
    assert grunsky_norm_of(f, N).value == 0.0


def test_koebe_sigma_norm():
    assert grunsky_norm_of(koebe_sigma(0.5, 2 * N + 1), N).value == pytest.approx(0.25, abs=1e-8)


def test_insufficient_truncation():
    assert required_terms(N) == 2 * N - 1
    with pytest.raises(InsufficientTruncationError):
        grunsky_coefficients(b1_map(0.5, 10), N)


def test_catalog_maps_are_univalent(rng):
    for name, f in sample_univalent_maps(2 * N + 1).items():
        n = min(N, (1 - f.lo) // 2)
        B = grunsky_coefficients(f, n)
        assert grunsky_norm(B).value <= 1 + 1e-8, name
        for _ in range(100):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x *= rng.random() / np.linalg.norm(x)
            assert abs(h_x_value(B, x)) <= np.linalg.norm(x) ** 2 + 1e-12, name


def test_takagi_vector_attains_norm():
    B = grunsky_coefficients(koebe_sigma(0.4 + 0.3j, 41), 20)
    value, x = takagi_vector(B)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert value == pytest.approx(grunsky_norm(B).value, rel=1e-8)
    h = x @ B.entries @ x
    assert h.real == pytest.approx(value, rel=1e-8)
    assert abs(h.imag) < 1e-8


def test_h_x_needs_unit_ball():
    B = grunsky_coefficients(b1_map(0.5, 2 * N + 1), N)
    with pytest.raises(DomainError):
        h_x_value(B, np.full(4, 1.0))


def test_area_block_inequality(rng):
    B = grunsky_coefficients(b1_map(0.9j, 2 * N + 1), N)
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    x /= np.linalg.norm(x)
    lhs, rhs = area_block_check(B, x, (1, 10), (3, 20))
    assert lhs <= rhs + 1e-12


def test_kuhnau_bound_limits():
    assert kuhnau_bound(0.4, 1.0) == pytest.approx(0.4)
    assert kuhnau_bound(0.4, 0.0) == pytest.approx(0.16)
    with pytest.raises(DomainError):
        kuhnau_bound(1.0, 0.5)


def test_homotopy_dilatation_of_b1_map():
    assert homotopy_dilatation(b1_map(0.5), 0.5) == (1, pytest.approx(0.125))
    assert homotopy_dilatation(LaurentSeries.identity(EXTERIOR), 0.5) == (0, 0.0)


def test_matrix_dump_round_trip_and_errors():
    B = grunsky_coefficients(b1_map(0.3, 21), 10)
    back = GrunskyMatrix.from_dict(B.to_dict())
    np.testing.assert_allclose(back.entries, B.entries)
    with pytest.raises(InputError):
        GrunskyMatrix.from_dict({"N": 3, "entries": [[1, 0]]})


def test_norm_grows_with_truncation():
    B = grunsky_coefficients(monomial_map(0.1, 0.3, 2, order=2 * N + 1), N)
    values = [grunsky_norm(B.leading_block(n)).value for n in (2, 4, 8, 16, 32)]
    assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))
    assert values[-1] > 0


def test_power_iteration_above_dense_limit(rng):
    n = 300
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    s = np.concatenate([[0.9], np.linspace(0.5, 0.0, n - 1)])
    A = (Q * s) @ Q.T
    report = grunsky_norm(GrunskyMatrix(n, A))
    assert report.method == "power"
    assert report.value == pytest.approx(scipy.linalg.svd(A, compute_uv=False)[0], rel=1e-8)
    assert report.value == pytest.approx(0.9, rel=1e-8)
