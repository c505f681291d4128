"""L1 distance from psi_0 to the span of a rational basis, by IRLS, with KKT verification."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.errors import DomainError, KKTError
from src.quaddiff.quad_diff import RHO, QuadDiff, QuadTerm, l1_norm
from src.quaddiff.quadrature import DISK, QuadratureRule, build_rule

logger = logging.getLogger(__name__)

EPS_SCHEDULE = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
INNER_ITER = 50
KKT_TOL = 1e-4
RULE_TOL = 1e-8
REFINEMENTS = 3


def rho_basis(points: Sequence[Optional[complex]], domain: str = DISK) -> List[QuadDiff]:
    """rho_s(z) = (e_s - 1) / ((z - 1)(z - e_s)); None or inf gives -1/(z - 1)."""
    finite = [complex(e) for e in points if e is not None and not np.isinf(e)]
    if len(set(finite)) != len(finite) or len(finite) < len(points) - 1:
        raise DomainError("basis points must be pairwise distinct")
    return [QuadDiff.rho(e, domain=domain) for e in points]


def reduced_rho_basis(points: Sequence[complex], domain: str) -> List[QuadDiff]:
    """Combinations rho_s - ((e_s - 1)/(e_1 - 1)) rho_1 whose z^-2 terms cancel at infinity."""
    if any(e is None or np.isinf(e) for e in points):
        raise DomainError("reduced basis needs finite points")
    rho_basis(points)
    e1 = complex(points[0])
    out = []
    for e in points[1:]:
        e = complex(e)
        ratio = (e - 1) / (e1 - 1)
        out.append(QuadDiff((QuadTerm(RHO, 1.0, location=e), QuadTerm(RHO, -ratio, location=e1)), domain))
    return out


@dataclass
class ExtremalSolution:
    """psi_e = psi_0 + sum xi_s basis_s with d = ||psi_e||_1 minimal."""
    d: float
    xi: np.ndarray
    psi_e: QuadDiff
    kkt_residuals: List[float] = field(default_factory=list)
    quadrature_report: dict = field(default_factory=dict)
    restart_objectives: List[float] = field(default_factory=list)
    accepted: bool = False

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "xi": [[float(v.real), float(v.imag)] for v in self.xi],
            "kkt_residuals": self.kkt_residuals,
            "quadrature_report": self.quadrature_report,
            "restart_objectives": self.restart_objectives,
            "accepted": self.accepted,
        }


@dataclass
class KKTReport:
    passed: bool
    residuals: List[float]
    in_span: bool = False


def _combine(psi0: QuadDiff, basis: Sequence[QuadDiff], xi: np.ndarray) -> QuadDiff:
    out = psi0
    for b, c in zip(basis, xi):
        out = out + b * complex(c)
    return out


def _objective(a: np.ndarray, P: np.ndarray, w: np.ndarray, xi: np.ndarray) -> float:
    return float(np.sum(w * np.abs(a - P @ xi)))


def _weighted_ls(a, P, u):
    """argmin sum u |a - P xi|^2 by the normal equations."""
    A = P.conj().T @ (u[:, None] * P)
    b = P.conj().T @ (u * a)
    try:
        return scipy.linalg.solve(A, b, assume_a="pos")
    except (scipy.linalg.LinAlgError, ValueError):
        return scipy.linalg.lstsq(A, b)[0]


def irls_lad(a: np.ndarray, P: np.ndarray, w: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Weighted complex least absolute deviations min sum w |a - P xi|."""
    scale = max(float(np.max(np.abs(a))), 1e-300)
    xi = start.copy()
    for eps in EPS_SCHEDULE:
        for _ in range(INNER_ITER):
            r = np.abs(a - P @ xi)
            u = w / np.maximum(r, eps * scale)
            new = _weighted_ls(a, P, u)
            if np.linalg.norm(new - xi) <= 1e-12 * max(1.0, np.linalg.norm(xi)):
                xi = new
                break
            xi = new
    return xi


def _solve_on_rule(psi0, basis, rule: QuadratureRule, restarts: int, rng) -> Tuple[np.ndarray, List[float]]:
    z, w = rule.nodes, rule.weights
    a = psi0(z)
    P = np.stack([b(z) for b in basis], axis=1)
    ls = _weighted_ls(a, P, w)
    starts = [ls, np.zeros(len(basis), dtype=complex)]
    spread = max(float(np.linalg.norm(ls)), 1.0)
    for _ in range(max(restarts - 2, 0)):
        starts.append(ls + spread * (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))))
    best, best_obj, objectives = None, np.inf, []
    for start in starts[:max(restarts, 1)]:
        xi = irls_lad(a, P, w, start)
        obj = _objective(a, P, w, xi)
        objectives.append(obj)
        if obj < best_obj:
            best, best_obj = xi, obj
    return best, objectives


def kkt_check(sol: ExtremalSolution, psi0: QuadDiff, basis: Sequence[QuadDiff], tol: float = KKT_TOL,
              quad_tol: float = RULE_TOL) -> KKTReport:
    """Residuals of <|psi_e|/psi_e, basis_s> = 0 and <|psi_e|/psi_e, psi_0> = d, each scaled by a norm."""
    psi0_norm = l1_norm(psi0, quad_tol)
    if sol.d <= tol * psi0_norm:
        return KKTReport(True, [0.0] * (len(basis) + 1), in_span=True)
    psi_e = sol.psi_e

    def sign(z):
        p = psi_e(z)
        mag = np.abs(p)
        out = np.zeros(p.shape, dtype=complex)
        nz = mag > 0
        out[nz] = mag[nz] / p[nz]
        return out

    integrands = [lambda z, b=b: sign(z) * b(z) for b in basis]
    integrands.append(lambda z: sign(z) * psi0(z))
    integrands.extend(lambda z, b=b: np.abs(b(z)) for b in basis)
    rule = build_rule(integrands, psi0.domain, quad_tol)
    m = len(basis)
    est = rule.estimates
    residuals = [float(abs(est[s]) / max(est[m + 1 + s].real, 1e-300)) for s in range(m)]
    residuals.append(float(abs(est[m] - sol.d) / psi0_norm))
    return KKTReport(all(r < tol for r in residuals), residuals)


def l1_distance_to_span(psi0: QuadDiff, basis: Sequence[QuadDiff], tol: float = KKT_TOL, restarts: int = 5,
                        seed: int = 0, rule_tol: float = RULE_TOL, refinements: int = REFINEMENTS,
                        strict: bool = True) -> ExtremalSolution:
    """inf over xi of ||psi_0 + sum xi_s basis_s||_1.

    The integral is discretized on an adaptive rule resolving |psi_0| and
    every |basis_s|; the rule is refined around the zeros of psi_e until the
    KKT residuals fall below ``tol``. Reported xi follows psi_e = psi_0 + sum xi_s basis_s.
    """
    basis = list(basis)
    for b in basis:
        if b.domain != psi0.domain:
            raise DomainError("basis and psi_0 live on different domains")
    if not basis:
        d = l1_norm(psi0, rule_tol)
        sol = ExtremalSolution(d, np.zeros(0, dtype=complex), psi0, restart_objectives=[d])
        report = kkt_check(sol, psi0, basis, tol, rule_tol)
        sol.kkt_residuals, sol.accepted = report.residuals, report.passed
        return sol

    rng = np.random.default_rng(seed)
    integrands = [lambda z: np.abs(psi0(z))] + [lambda z, b=b: np.abs(b(z)) for b in basis]
    current_tol = rule_tol
    sol = None
    for round_ in range(refinements + 1):
        rule = build_rule(integrands, psi0.domain, current_tol)
        xi_opt, objectives = _solve_on_rule(psi0, basis, rule, restarts, rng)
        xi = -xi_opt
        psi_e = _combine(psi0, basis, xi)
        d = float(rule.integrate(np.abs(psi_e(rule.nodes))).real)
        sol = ExtremalSolution(d, xi, psi_e, quadrature_report=rule.report(), restart_objectives=objectives)
        report = kkt_check(sol, psi0, basis, tol, current_tol)
        sol.kkt_residuals, sol.accepted = report.residuals, report.passed
        logger.debug("l1 span round %d: d=%.10g, kkt=%s", round_, d, ["%.1e" % r for r in report.residuals])
        if report.passed:
            return sol
        current_tol /= 10
        integrands = integrands[:len(basis) + 1] + [lambda z, p=psi_e: np.abs(p(z))]

    if strict:
        raise KKTError(f"KKT residuals {max(sol.kkt_residuals):.2e} above {tol:.0e} after {refinements} refinements")
    return sol
