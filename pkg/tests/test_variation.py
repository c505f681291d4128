import numpy as np
import pytest

from src.errors import ConvergenceError, DegenerateError, DomainError, GridResolutionError, InputError
from src.processors.experiment_pipeline import random_rational, smooth_field
from src.quaddiff.beltrami_field import BeltramiField
from src.quaddiff.quad_diff import QuadDiff
from src.variation.beltrami_solver import RESIDUAL_TOL, BeltramiSolver, beurling_multiplier
from src.variation.first_order import (
    first_order_accuracy,
    first_order_map,
    first_order_value,
    functional_derivative,
    l1_directional_derivative,
    norm_derivative_check,
)
from src.variation.functional_spec import F1, HYDRODYNAMIC, FunctionalSpec, FunctionalTerm, load_functional


def test_functional_validation():
    with pytest.raises(DomainError):
        FunctionalSpec.evaluation(0.5)
    with pytest.raises(DomainError):
        FunctionalSpec((FunctionalTerm(2.0, -1),))
    with pytest.raises(DegenerateError):
        FunctionalSpec((FunctionalTerm(2.0, 0, 0.0),))
    with pytest.raises(DomainError):
        FunctionalSpec((FunctionalTerm(2.0),), interior_point=1.5, interior_weight=1.0)


def test_functional_file(write_json):
    J = FunctionalSpec.evaluation(2.0 + 1.0j, order=1, weight=0.5j, normalization=F1)
    back = load_functional(write_json("J.json", J.to_dict()))
    assert back.terms == J.terms
    assert back.normalization == F1
    with pytest.raises(InputError):
        load_functional(write_json("bad.json", {"terms": [{"point": [2, 0]}], "normalization": "other"}))


def test_coefficient_functional_derivative_is_constant():
    psi0 = functional_derivative(FunctionalSpec.coefficient(1))
    z = np.array([0.0, 0.5, -0.3 + 0.6j])
    np.testing.assert_allclose(psi0(z), -np.ones(3), atol=1e-12)


def test_first_order_value_of_constant_field():
    J = FunctionalSpec.coefficient(1)
    assert first_order_value(J, BeltramiField.constant(0.1)) == pytest.approx(0.1, rel=1e-6)
    assert first_order_value(J.scaled(2.0), BeltramiField.constant(0.1)) == pytest.approx(0.2, rel=1e-6)


def test_first_order_map_of_constant_field():
    mu = BeltramiField.constant(0.1j)
    z = 2.0 - 1.0j
    assert first_order_map(mu, z) == pytest.approx(z + 0.1j / z, rel=1e-7)
    with pytest.raises(DomainError):
        first_order_map(mu, 0.5)


def test_first_order_map_fixes_one():
    mu = BeltramiField.constant(0.05)
    z = 3.0
    expected = z + 0.05 / z - 0.05
    assert first_order_map(mu, z, F1, tol=1e-6) == pytest.approx(expected, rel=1e-4)


def test_beurling_multiplier_is_unimodular():
    m = beurling_multiplier(16, 0.1)
    assert m[0, 0] == 0
    np.testing.assert_allclose(np.abs(m.ravel()[1:]), 1.0)


def test_directional_derivative_matches_differences(rng):
    for _ in range(5):
        formula, fd = norm_derivative_check(random_rational(rng), random_rational(rng))
        assert formula == pytest.approx(fd, abs=1e-5)


def test_directional_derivative_of_positive_phi():
    # |phi|/phi = 1 for phi = 1, so the derivative is Re integral of psi
    psi = QuadDiff.polynomial([0.5 + 0.2j, 1.0])
    assert l1_directional_derivative(QuadDiff.constant(1.0), psi) == pytest.approx(0.5 * np.pi, rel=1e-8)
    with pytest.raises(DegenerateError):
        l1_directional_derivative(QuadDiff.polynomial([0.0]), psi)


def test_solver_rejects_support_on_edge():
    samples = np.zeros((16, 16), dtype=complex)
    samples[0, 5] = 0.1
    with pytest.raises(DomainError):
        BeltramiSolver(grid_size=16).solve(BeltramiField.from_grid(samples, 0.1, 0j))


def test_solver_iteration_budget():
    solver = BeltramiSolver(grid_size=64, max_iter=1, tol=1e-14)
    with pytest.raises(ConvergenceError):
        solver.solve(BeltramiField.constant(0.3))


def test_solver_small_grid_constant_field():
    solution = BeltramiSolver(grid_size=128).solve(BeltramiField.constant(0.1))
    assert solution.coefficient(1) == pytest.approx(0.1, abs=5e-3)
    assert solution.residual_report()["grid_size"] == 128
    assert solution.fit.coeff(-1) == pytest.approx(0.1, abs=5e-3)


@pytest.mark.parametrize("c", [0.1, 0.5])
def test_solver_residual_for_constant_fields(c):
    solution = BeltramiSolver(grid_size=128).solve(BeltramiField.constant(c))
    assert solution.residual < RESIDUAL_TOL
    assert solution.residual_report()["beltrami_residual"] == solution.residual


def test_solver_residual_for_smooth_fields(rng):
    solver = BeltramiSolver(grid_size=128)
    for _ in range(2):
        assert solver.solve(smooth_field(rng, 0.3)).residual < RESIDUAL_TOL


def test_solver_reports_unresolved_grid():
    with pytest.raises(GridResolutionError):
        BeltramiSolver(grid_size=64, residual_tol=1e-9).solve(BeltramiField.constant(0.3))


@pytest.mark.slow
@pytest.mark.parametrize("c", [0.05, 0.1])
def test_solver_reproduces_b1_map(c):
    solution = BeltramiSolver(grid_size=512).solve(BeltramiField.constant(c))
    z = 2.0 * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(solution.evaluate(z) - (z + c / z))) < 5e-3
    assert solution.coefficient(1) == pytest.approx(c, abs=1e-3)
    assert solution.fit.coeff(-1) == pytest.approx(c, abs=1e-3)


@pytest.mark.slow
def test_solver_f1_normalization():
    solution = BeltramiSolver(grid_size=256).solve(BeltramiField.constant(0.1), F1)
    assert complex(solution.evaluate(1.0)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_first_order_error_is_second_order(rng):
    J = FunctionalSpec.coefficient(1, normalization=HYDRODYNAMIC)
    solver = BeltramiSolver(grid_size=256)
    for _ in range(3):
        report = first_order_accuracy(J, smooth_field(rng), solver=solver)
        assert report.slope == pytest.approx(2.0, abs=0.3)
