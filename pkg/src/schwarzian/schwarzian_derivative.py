"""Schwarzian derivatives of truncated series and the hyperbolic sup norm of the result."""

import logging
from dataclasses import dataclass

import numpy as np

from src.errors import DegenerateError, DomainError, SeriesDomainError
from src.series.laurent_series import (
    EXTERIOR,
    LaurentSeries,
    derivative,
    homotopy,
    int_powers,
    leading_term,
    reciprocal,
    require_sigma,
)

logger = logging.getLogger(__name__)

R_MAX = 20.0
GRID = 256
TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SchwarzianSeries:
    """S_f as a truncated series; for class-Sigma sources it starts at z^-4."""
    series: LaurentSeries

    def coeff(self, power: int) -> complex:
        return self.series.coeff(power)

    def __call__(self, z):
        return self.series(z)


@dataclass
class BNormReport:
    value: float
    coarse_value: float
    refinement_delta: float
    r_min_trusted: float
    flagged_rings: int


def schwarzian(f: LaurentSeries) -> SchwarzianSeries:
    """(f''/f')' - (f''/f')^2 / 2."""
    f1 = derivative(f)
    if leading_term(f1)[1] == 0:
        raise DegenerateError("f' has no invertible leading coefficient")
    f2 = derivative(f1)
    g = f2 * reciprocal(f1)
    s = derivative(g) - 0.5 * (g * g)
    return SchwarzianSeries(s)


def b1_from_schwarzian(phi: SchwarzianSeries) -> complex:
    """lim z^4 S_f(z) = -6 b1."""
    return -phi.coeff(-4) / 6.0


def has_vanishing_b1(f: LaurentSeries, tol: float = 1e-12) -> bool:
    return abs(b1_from_schwarzian(schwarzian(require_sigma(f)))) <= tol


def homotopy_schwarzian_check(f: LaurentSeries, t: complex) -> float:
    """max |S_{f_t} - t^-2 S_f(z/t)| over shared coefficients."""
    t = complex(t)
    if t == 0 or abs(t) >= 1:
        raise SeriesDomainError("homotopy_schwarzian_check needs 0 < |t| < 1")
    lhs = schwarzian(homotopy(f, t)).series
    base = schwarzian(f).series
    rhs = LaurentSeries(base.lo, base.hi, base.coeffs * int_powers(t, -base.powers - 2), base.domain)
    lo, hi = max(lhs.lo, rhs.lo), min(lhs.hi, rhs.hi)
    if hi < lo:
        return 0.0
    return float(max(abs(lhs.coeff(p) - rhs.coeff(p)) for p in range(lo, hi + 1)))


def _tail(series: LaurentSeries, r: np.ndarray, terms: int) -> np.ndarray:
    """Size of the last ``terms`` retained exterior terms on |z| = r."""
    powers = series.powers[:terms]
    mags = np.abs(series.coeffs[:terms])
    return np.sum(mags[None, :] * r[:, None] ** powers[None, :].astype(float), axis=1)


def _weighted_max(phi: SchwarzianSeries, r_max: float, grid: int, tail_tol: float):
    r = 1.0 + (r_max - 1.0) * np.arange(1, grid + 1) / grid
    theta = 2 * np.pi * np.arange(grid) / grid
    series = phi.series
    tail_terms = max(1, len(series) // 4)
    tails = _tail(series, r, tail_terms)
    trusted = tails <= tail_tol
    if not np.any(trusted):
        return 0.0, float("inf"), int(grid)
    rr = r[trusted]
    z = rr[:, None] * np.exp(1j * theta)[None, :]
    weighted = (rr[:, None] ** 2 - 1) ** 2 * np.abs(series(z))
    return float(np.max(weighted)), float(rr[0]), int(np.count_nonzero(~trusted))


def b_norm_estimate(phi: SchwarzianSeries, r_max: float = R_MAX, grid: int = GRID,
                    tail_tol: float = TAIL_TOL) -> BNormReport:
    """Grid lower estimate of sup (|z|^2 - 1)^2 |phi(z)| over 1 < |z| <= r_max.

    Rings where the truncated tail is not negligible are flagged and skipped.
    """
    if phi.series.domain != EXTERIOR:
        raise DomainError("the B norm is taken over the exterior disk")
    if r_max <= 1:
        raise DomainError("r_max must exceed 1")
    value, r_min, flagged = _weighted_max(phi, r_max, grid, tail_tol)
    coarse, _, _ = _weighted_max(phi, r_max, max(grid // 2, 2), tail_tol)
    if flagged:
        logger.warning("b_norm_estimate: %d rings below r=%.3f skipped (series tail above %.0e)",
                       flagged, r_min, tail_tol)
    return BNormReport(value, coarse, abs(value - coarse), r_min, flagged)
