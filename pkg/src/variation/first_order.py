"""First-order variation: psi_0 of a functional, J-hat(mu) to first order, and L1 norm derivatives."""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from src.errors import DegenerateError, DomainError
from src.quaddiff.beltrami_field import GRID, BeltramiField
from src.quaddiff.pairing import pairing
from src.quaddiff.quad_diff import POLE, QuadDiff, QuadTerm, l1_norm
from src.quaddiff.quadrature import DISK, build_rule
from src.variation.beltrami_solver import BeltramiSolver
from src.variation.functional_spec import F1, HYDRODYNAMIC, FunctionalSpec, pole_weight

logger = logging.getLogger(__name__)

EPS_LIST = (0.02, 0.01, 0.005)


def kernel(z: complex, normalization: str = F1) -> QuadDiff:
    """g(., z) = 1/(w - z) - 1/(w - 1); the second term only under f(1) = 1."""
    terms = [QuadTerm(POLE, 1.0, location=complex(z), order=1)]
    if normalization == F1:
        terms.append(QuadTerm(POLE, -1.0, location=1 + 0j, order=1))
    return QuadDiff(tuple(terms), DISK)


def functional_derivative(J: FunctionalSpec) -> QuadDiff:
    """psi_0 = sum w_js d^s/dz^s g(., z)|z=z_j + w_a g(., a)."""
    terms = []
    value_weight = 0j
    for term in J.terms:
        if term.weight == 0:
            continue
        terms.append(QuadTerm(POLE, term.weight * pole_weight(term.order), location=complex(term.point),
                              order=term.order + 1))
        if term.order == 0:
            value_weight += term.weight
    if J.interior_point is not None and J.interior_weight != 0:
        terms.append(QuadTerm(POLE, complex(J.interior_weight), location=complex(J.interior_point), order=1))
        value_weight += J.interior_weight
    if J.normalization == F1 and value_weight != 0:
        terms.append(QuadTerm(POLE, -value_weight, location=1 + 0j, order=1))
    return QuadDiff(tuple(terms), DISK)


def first_order_value(J: FunctionalSpec, mu: BeltramiField, tol: float = 1e-8) -> complex:
    """-(1/pi) <mu, psi_0>."""
    return -pairing(mu, functional_derivative(J), tol) / np.pi


def first_order_map(mu: BeltramiField, z: complex, normalization: str = HYDRODYNAMIC, tol: float = 1e-8) -> complex:
    """f^mu(z) to first order in mu, for z off the support of mu."""
    z = complex(z)
    if mu.kind != GRID and mu.domain != DISK:
        raise DomainError("first_order_map takes Beltrami fields supported in the disk")
    if abs(z) <= mu.support_radius():
        raise DomainError(f"z = {z} lies inside the support of mu")
    return z - pairing(mu, kernel(z, normalization), tol) / np.pi


def l1_directional_derivative(phi: QuadDiff, psi: QuadDiff, tol: float = 1e-10) -> float:
    """Re integral of psi |phi| / phi: the derivative of t -> ||phi + t psi||_1 at 0."""
    _check_pair(phi, psi)
    rule = build_rule(lambda z: _signed(phi, psi, z), phi.domain, tol)
    return float(rule.estimates[0].real)


def _check_pair(phi: QuadDiff, psi: QuadDiff):
    if phi.is_zero():
        raise DegenerateError("phi is identically zero")
    if phi.domain != psi.domain:
        raise DomainError("phi and psi live on different domains")


def _signed(phi: QuadDiff, psi: QuadDiff, z: np.ndarray) -> np.ndarray:
    p = phi(z)
    mag = np.abs(p)
    out = np.zeros(p.shape, dtype=complex)
    nz = mag > 0
    out[nz] = psi(z[nz]) * mag[nz] / p[nz]
    return out


def norm_derivative_check(phi: QuadDiff, psi: QuadDiff, delta: float = 1e-4, tol: float = 1e-10) -> Tuple[float, float]:
    """(formula, central difference of h(t) = ||phi + t psi||_1) on one shared rule."""
    _check_pair(phi, psi)
    integrands = [
        lambda z: _signed(phi, psi, z),
        lambda z: np.abs(phi(z) + delta * psi(z)),
        lambda z: np.abs(phi(z) - delta * psi(z)),
    ]
    rule = build_rule(integrands, phi.domain, tol)
    formula = float(rule.estimates[0].real)
    difference = float((rule.estimates[1].real - rule.estimates[2].real) / (2 * delta))
    return formula, difference


def auxiliary_first_order_max(J: FunctionalSpec, psi_p: QuadDiff, xi: complex, k: float, tol: float = 1e-8) -> float:
    """(k/pi) ||psi_0 + xi psi_p||_1."""
    psi0 = functional_derivative(J)
    if psi0.domain != psi_p.domain:
        raise DomainError("psi_p must live on the disk")
    return k * l1_norm(psi0 + psi_p * complex(xi), tol) / np.pi


def auxiliary_slope(J: FunctionalSpec, psi_p: QuadDiff, tol: float = 1e-10) -> float:
    """h_p'(0) for h_p(xi) = ||psi_0 + xi psi_p||_1."""
    return l1_directional_derivative(functional_derivative(J), psi_p, tol)


@dataclass
class AccuracyReport:
    eps: List[float]
    errors: List[float]
    slope: float
    increments: List[complex]
    first_order: List[complex]

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "errors": self.errors,
            "slope": self.slope,
            "increments": [[v.real, v.imag] for v in self.increments],
            "first_order": [[v.real, v.imag] for v in self.first_order],
        }


def first_order_accuracy(J: FunctionalSpec, mu: BeltramiField, eps_list: Sequence[float] = EPS_LIST,
                         solver: BeltramiSolver = None) -> AccuracyReport:
    """Log-log slope of |J-hat(eps mu) - first_order_value(J, eps mu)| against eps.

    mu is rasterized once so the solver and the pairing see the same field.
    """
    solver = solver or BeltramiSolver()
    grid = solver.rasterize(mu)
    errors, increments, first = [], [], []
    for eps in eps_list:
        scaled = grid.scaled(eps)
        solution = solver.solve(scaled, J.normalization)
        exact = J.increment(solution)
        approx = first_order_value(J, scaled)
        increments.append(complex(exact))
        first.append(complex(approx))
        errors.append(float(abs(exact - approx)))
        logger.debug("eps=%.4g: increment %.6g, first order %.6g", eps, abs(exact), abs(approx))
    if min(errors) == 0:
        slope = float("nan")
    else:
        slope = float(linregress(np.log(eps_list), np.log(errors)).slope)
    return AccuracyReport(list(eps_list), errors, slope, increments, first)
