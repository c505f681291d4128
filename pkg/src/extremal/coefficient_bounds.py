"""Coefficient bounds for S_k, the k_n bracket and the level-set dilatation estimates."""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.optimize import brentq

from src.errors import DegenerateError, DomainError
from src.extremal.l1_span import ExtremalSolution, l1_distance_to_span, reduced_rho_basis
from src.quaddiff.quad_diff import QuadDiff, l1_norm
from src.quaddiff.quadrature import EXTERIOR, build_rule

logger = logging.getLogger(__name__)

CROSSING_TOL = 1e-10


def _check_k(k: float):
    if not 0 <= k < 1:
        raise DomainError(f"dilatation k must lie in [0, 1), got {k}")


@dataclass
class CoeffBound:
    n: int
    k: float
    bound: float
    admissible: bool

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "bound": self.bound, "admissible": self.admissible}


def coeff_bound(n: int, k: float) -> CoeffBound:
    """|a_n| <= 2k/(n - 1) on S_k, sharp for k <= 1/(n^2 + 1); n = 2 gives 2k for all k."""
    if n < 2:
        raise DomainError("coefficient bounds start at n = 2")
    _check_k(k)
    if n == 2:
        return CoeffBound(n, k, 2.0 * k, True)
    return CoeffBound(n, k, 2.0 * k / (n - 1), k <= 1.0 / (n * n + 1))


@dataclass
class KnBracket:
    n: int
    lower: float
    upper: float
    root: float
    crossing_ok: bool
    competitor_loses: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lower": self.lower,
            "upper": self.upper,
            "root": self.root,
            "crossing_ok": self.crossing_ok,
            "competitor_loses": self.competitor_loses,
        }


def kn_bracket(n: int) -> KnBracket:
    """1/(n^2 + 1) <= k_n <= (2/(n(n - 1)))^(1/(n - 2)), the upper end being the root of 2k/(n-1) = n k^(n-1)."""
    if n < 3:
        raise DomainError("k_n bracket needs n >= 3")
    lower = 1.0 / (n * n + 1)
    upper = (2.0 / (n * (n - 1))) ** (1.0 / (n - 2))

    def gap(k):
        return 2.0 * k / (n - 1) - n * k ** (n - 1)

    root = brentq(gap, 0.5 * upper, 1.0, xtol=1e-14)
    return KnBracket(n, lower, upper, root, abs(root - upper) <= CROSSING_TOL, gap(lower) >= 0)


def k0_lower_bound(j_norm: float, M: float) -> float:
    """||J'|| / (||J'|| + M + 1) with ||J'|| = ||psi_0||_1 / pi."""
    if j_norm <= 0:
        raise DomainError("||J'|| must be positive")
    if M < 0:
        raise DomainError("M must be non-negative")
    return j_norm / (j_norm + M + 1.0)


def min_dilatation_for_level(r: float, d: float) -> float:
    """First-order minimal dilatation r/d; the O(r^2) remainder is not modelled."""
    if d == 0:
        raise DegenerateError("distance d = 0 gives no level bound")
    if r < 0 or d < 0:
        raise DomainError("r and d must be non-negative")
    return r / d


def coefficient_differential(n: int) -> QuadDiff:
    """psi_n(z) = z^(-n-1) on the exterior disk, with (k/pi)||psi_n||_1 = 2k/(n - 1)."""
    if n < 2:
        raise DomainError("coefficient differential needs n >= 2")
    return QuadDiff.monomial(1.0, -n - 1, EXTERIOR)


@dataclass
class FixedPointBound:
    n: int
    kappa: float
    distance: float
    d_n: float
    bound: float
    solution: ExtremalSolution

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "distance": self.distance,
            "d_n": self.d_n,
            "bound": self.bound,
            "free_bound": 2 * self.kappa / (self.n - 1),
            "solution": self.solution.to_dict(),
        }


def fixed_point_coeff_bound(n: int, kappa: float, points: Sequence[complex], restarts: int = 5, seed: int = 0,
                            tol: float = 1e-4) -> FixedPointBound:
    """First-order |a_n| bound (kappa/pi) inf ||psi_n - psi||_1 when the maps fix ``points``.

    psi ranges over the integrable part of span{rho_s} on the exterior disk.
    """
    _check_k(kappa)
    psi_n = coefficient_differential(n)
    basis = reduced_rho_basis(points, EXTERIOR) if len(points) > 1 else []
    solution = l1_distance_to_span(psi_n, basis, tol=tol, restarts=restarts, seed=seed)
    d_n = solution.d * (n - 1) / (2 * np.pi)
    bound = kappa * solution.d / np.pi
    logger.info("fixed-point bound n=%d: d_n=%.6f, bound %.6g (free %.6g)", n, d_n, bound, 2 * kappa / (n - 1))
    return FixedPointBound(n, kappa, solution.d, d_n, bound, solution)


@dataclass
class CompetitorReport:
    n: int
    k: float
    bound: float
    values: List[float]
    extremal_value: float
    violations: int

    @property
    def max_value(self) -> float:
        return max(self.values) if self.values else 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "bound": self.bound,
            "max_value": self.max_value,
            "extremal_value": self.extremal_value,
            "violations": self.violations,
            "samples": len(self.values),
        }


def _random_phase_field(rng, k: float, modes: int = 3):
    """mu = k a exp(i phi) on the exterior disk with a smooth random phase."""
    c = (rng.standard_normal(modes) + 1j * rng.standard_normal(modes)) / np.arange(1, modes + 1)
    theta0 = rng.uniform(0, 2 * np.pi)
    amplitude = rng.uniform(0.5, 1.0)

    def mu(z):
        phase = theta0 + sum(np.real(cj * z ** -(j + 1)) for j, cj in enumerate(c))
        return k * amplitude * np.exp(1j * phase)
    return mu


def coefficient_competitors(n: int, k: float, samples: int = 50, seed: int = 0, tol: float = 1e-9) -> CompetitorReport:
    """First-order |a_n| = (1/pi)|<mu, psi_n>| of random S_k competitors against 2k/(n - 1)."""
    _check_k(k)
    psi_n = coefficient_differential(n)
    rng = np.random.default_rng(seed)
    fields = [_random_phase_field(rng, k) for _ in range(samples)]
    integrands = [lambda z, mu=mu: mu(z) * psi_n(z) for mu in fields]
    integrands.append(lambda z: k * np.abs(psi_n(z)))
    rule = build_rule(integrands, EXTERIOR, tol)
    values = [float(abs(v) / np.pi) for v in rule.estimates[:-1]]
    extremal = float(abs(rule.estimates[-1]) / np.pi)
    bound = coeff_bound(n, k).bound
    violations = sum(v > bound + tol for v in values)
    return CompetitorReport(n, k, bound, values, extremal, violations)


def functional_norm(psi: QuadDiff, tol: float = 1e-10) -> float:
    """||J'|| = ||psi_0||_1 / pi."""
    return l1_norm(psi, tol) / np.pi
