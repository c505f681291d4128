import numpy as np
import pytest

from src.errors import DomainError, InputError
from src.metrics.hyperbolic import (
    blaschke_factor,
    contour_derivative,
    curvature_check,
    hyperbolic_density,
    hyperbolic_distance,
    pullback,
    pullback_density,
)
from src.metrics.metric_bounds import (
    caratheodory_lower_bound,
    geodesic_coincidence_experiment,
    radial_grid,
    sweep_family,
    sweep_frame,
    sweep_summary,
    teichmuller_upper_bound,
    upper_is_exact,
)
from src.series.catalog import b1_map, monomial_map


def test_teichmuller_upper_bound():
    assert teichmuller_upper_bound(0.0) == 0.0
    assert teichmuller_upper_bound(0.5) == pytest.approx(np.arctanh(0.5))
    for bad in (-0.1, 1.0):
        with pytest.raises(DomainError):
            teichmuller_upper_bound(bad)


def test_b1_metrics_coincide():
    f, known_k = sweep_family("b1_map", {"b": 0.6}, order=65)
    samples = geodesic_coincidence_experiment(f, known_k, radial_grid(0.9, 10), N=32)
    summary = sweep_summary(samples)
    assert summary["samples"] == 10
    assert summary["max_gap"] < 1e-6
    assert summary["chain_ok"]
    assert summary["empirical_radius"] is None


def test_lower_bound_vanishes_at_origin():
    assert caratheodory_lower_bound(b1_map(0.6, 17), 0, N=8) == 0.0


def test_lower_bound_of_b1_map():
    # f_t = z + b t^2 / z has Grunsky norm |b| |t|^2
    assert caratheodory_lower_bound(b1_map(0.6, 17), 0.5, N=8) == pytest.approx(np.arctanh(0.15), abs=1e-10)
    assert caratheodory_lower_bound(b1_map(0.6, 17), 0.5j, N=8) == pytest.approx(np.arctanh(0.15), abs=1e-10)


def test_lower_bound_grows_with_truncation():
    f = monomial_map(0.1, 0.3, 2, order=33)
    values = [caratheodory_lower_bound(f, 0.7, N=N) for N in (2, 4, 8, 16)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] > 0


def test_lower_bound_needs_t_in_disk():
    for t in (1.0, 1.2j):
        with pytest.raises(DomainError):
            caratheodory_lower_bound(b1_map(0.6, 17), t, N=8)


def test_upper_exactness_by_family():
    assert upper_is_exact("b1_map")
    assert upper_is_exact("koebe_qc")
    assert not upper_is_exact("monomial_map")
    f, known_k = sweep_family("monomial_map", {"bm": 0.2, "m": 2}, order=17)
    summary = sweep_summary(geodesic_coincidence_experiment(f, known_k, radial_grid(0.5, 2), N=8),
                            upper_exact=upper_is_exact("monomial_map"))
    assert summary["upper_exact"] is False


def test_empty_grid_rejected():
    f, known_k = sweep_family("b1_map", {"b": 0.6}, order=17)
    with pytest.raises(DomainError):
        geodesic_coincidence_experiment(f, known_k, [], N=8)


def test_unknown_family():
    with pytest.raises(InputError):
        sweep_family("joukowski", {}, order=17)


def test_koebe_rows_keep_chain():
    f, known_k = sweep_family("koebe_qc", {"t": 0.5}, order=33)
    samples = geodesic_coincidence_experiment(f, known_k, radial_grid(0.5, 3), N=16)
    frame = sweep_frame(samples)
    assert list(frame.columns) == ["t_re", "t_im", "lower", "upper", "gap", "kappa_gap"]
    assert len(frame) == 3
    assert (frame["lower"] <= frame["upper"] + 1e-6).all()


def test_radial_grid():
    grid = radial_grid(0.6, 3, angle=np.pi / 2)
    assert np.allclose(np.abs(grid), [0.2, 0.4, 0.6])
    assert np.allclose(np.real(grid), 0.0)
    with pytest.raises(DomainError):
        radial_grid(1.0)


def test_hyperbolic_distance():
    assert hyperbolic_distance(0, 0.5) == pytest.approx(np.arctanh(0.5))
    a = blaschke_factor(0.3 + 0.2j, 0.7)
    t1, t2 = 0.1 - 0.4j, -0.5 + 0.2j
    assert hyperbolic_distance(a(t1), a(t2)) == pytest.approx(hyperbolic_distance(t1, t2))
    with pytest.raises(DomainError):
        hyperbolic_distance(1.0, 0)


@pytest.mark.parametrize("t0", [0.0, 0.3 + 0.2j, -0.5j, 0.6])
def test_density_curvature(t0):
    assert abs(curvature_check(hyperbolic_density, t0)) < 1e-4 * hyperbolic_density(t0) ** 2


def test_blaschke_pullback_curvature(rng):
    for _ in range(5):
        a = 0.5 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        h = blaschke_factor(a, 2 * np.pi * rng.random())
        t0 = 0.6 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        density = pullback(h)
        assert abs(curvature_check(density, t0)) < 1e-4 * density(t0) ** 2


def test_pullback_of_automorphism_is_density():
    h = blaschke_factor(0.4j, 1.0)
    t = 0.2 - 0.3j
    assert pullback_density(h, t) == pytest.approx(float(hyperbolic_density(t)))


def test_contour_derivative_matches_analytic():
    h = blaschke_factor(-0.3 + 0.1j)
    t = 0.25 + 0.25j
    assert contour_derivative(h, t, 0.3) == pytest.approx(complex(h.derivative(t)), abs=1e-10)
    plain = lambda w: np.asarray(h(w))
    assert pullback_density(plain, t) == pytest.approx(pullback_density(h, t), rel=1e-10)


def test_curvature_rejects_bad_density():
    with pytest.raises(DomainError):
        curvature_check(lambda t: -1.0, 0.0)
