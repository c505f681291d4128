"""<mu, psi> pairings, Grunsky moments of mu and the alpha_D estimate."""

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from src.errors import DomainError
from src.grunsky.grunsky_matrix import takagi
from src.quaddiff.beltrami_field import CONSTANT, GRID, BeltramiField
from src.quaddiff.quad_diff import QuadDiff, a1sq_from_vector, l1_norm
from src.quaddiff.quadrature import DISK, build_rule, fsum_complex, square_cell_rule

logger = logging.getLogger(__name__)

CELL_ORDER = 4
ASCENT_STEPS = 200


def cell_integrals(funcs: Sequence[Callable[[np.ndarray], np.ndarray]], centers: np.ndarray,
                   spacing: float, order: int = CELL_ORDER) -> np.ndarray:
    """(K, B) integrals of each function over the square cells at ``centers``."""
    nodes, weights = square_cell_rule(np.asarray(centers).ravel(), spacing, order)
    flat = nodes.ravel()
    return np.stack([np.sum(np.asarray(f(flat)).reshape(nodes.shape) * weights, axis=1) for f in funcs])


def _grid_pairings(mu: BeltramiField, funcs: Sequence[Callable]) -> np.ndarray:
    mask = mu.samples != 0
    if not np.any(mask):
        return np.zeros(len(funcs), dtype=complex)
    integrals = cell_integrals(funcs, mu.cell_centers()[mask], mu.spacing)
    return np.array([fsum_complex(row * mu.samples[mask]) for row in integrals])


def pair_many(mu: BeltramiField, funcs: Sequence[Callable], domain: str = DISK, tol: float = 1e-8) -> np.ndarray:
    """Integrals of mu * f over ``domain`` for each f, sharing one adaptive rule."""
    if mu.kind == GRID:
        if domain != DISK:
            raise DomainError("grid Beltrami fields pair only with quadratic differentials on the disk")
        return _grid_pairings(mu, funcs)
    if mu.domain != domain:
        raise DomainError(f"mu lives on the {mu.domain}, psi on the {domain}")
    if mu.kind == CONSTANT and mu.value == 0:
        return np.zeros(len(funcs), dtype=complex)
    integrands = [lambda z, f=f: mu(z) * f(z) for f in funcs]
    rule = build_rule(integrands, domain, tol)
    return np.asarray(rule.estimates, dtype=complex)


def pairing(mu: BeltramiField, psi: QuadDiff, tol: float = 1e-8) -> complex:
    """<mu, psi> = integral of mu * psi over the domain of psi."""
    return complex(pair_many(mu, [psi], psi.domain, tol)[0])


def grunsky_moment_matrix(mu: BeltramiField, N: int, tol: float = 1e-10) -> np.ndarray:
    """M_mn = (1/pi) sqrt(mn) integral of mu z^(m+n-2), so <mu, psi_x> = x^T M x."""
    if N < 1:
        raise DomainError("basis size must be positive")
    if mu.kind != GRID and mu.domain != DISK:
        raise DomainError("alpha_D is taken over Beltrami fields on the disk")
    funcs = [lambda z, j=j: z ** j for j in range(2 * N - 1)]
    moments = pair_many(mu, funcs, DISK, tol)
    idx = np.arange(1, N + 1)
    return np.sqrt(np.outer(idx, idx)) * moments[idx[:, None] + idx[None, :] - 2] / np.pi


@dataclass
class AlphaReport:
    value: float
    x: np.ndarray
    basis_size: int
    psi_norm: float
    restart_values: List[float]

    def to_dict(self) -> dict:
        return {
            "alpha": self.value,
            "basis_size": self.basis_size,
            "psi_norm": self.psi_norm,
            "x": [[float(v.real), float(v.imag)] for v in self.x],
            "restart_values": self.restart_values,
        }


def _ascend(M: np.ndarray, x: np.ndarray, steps: int = ASCENT_STEPS) -> np.ndarray:
    """Projected ascent of |x^T M x| on the unit sphere."""
    for _ in range(steps):
        value = x @ M @ x
        y = (np.exp(-1j * np.angle(value)) * (M @ x)).conj()
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        step = y / norm
        if np.linalg.norm(step - x) < 1e-13:
            break
        x = step
    return x


def alpha_D(mu: BeltramiField, basis_size: int = 8, restarts: int = 5, seed: int = 0,
            tol: float = 1e-10) -> AlphaReport:
    """Lower estimate of sup |<mu, psi>| over unit-norm psi = omega^2.

    The search runs over x supported on the first ``basis_size`` indices; the
    winning psi_x is renormalized by its quadrature L1 norm.
    """
    M = grunsky_moment_matrix(mu, basis_size, tol)
    rng = np.random.default_rng(seed)
    _, best_x = takagi(M)
    best = abs(best_x @ M @ best_x)
    restart_values = [float(best)]
    for _ in range(restarts):
        x = rng.standard_normal(basis_size) + 1j * rng.standard_normal(basis_size)
        x = _ascend(M, x / np.linalg.norm(x))
        value = abs(x @ M @ x)
        restart_values.append(float(value))
        if value > best:
            best, best_x = value, x

    psi_norm = l1_norm(a1sq_from_vector(best_x), tol=max(tol, 1e-10))
    value = float(best / psi_norm) if psi_norm > 0 else 0.0
    logger.debug("alpha_D basis=%d: %.6g (|x^T M x| = %.6g, ||psi||_1 = %.6g)", basis_size, value, best, psi_norm)
    return AlphaReport(value, best_x, basis_size, float(psi_norm), restart_values)
