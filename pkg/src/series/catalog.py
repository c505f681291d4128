"""Explicit univalent map families with known quasiconformal data."""

from typing import Dict

from src.errors import SeriesDomainError
from src.series.laurent_series import (
    DEFAULT_ORDER,
    EXTERIOR,
    LaurentSeries,
    koebe_qc,
    sigma_from_s,
    sqrt_transform,
)


def b1_map(b: complex, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """z + b/z; univalent on |z| > 1 for |b| <= 1, extremal dilatation |b|."""
    if abs(b) > 1:
        raise SeriesDomainError("z + b/z is univalent only for |b| <= 1")
    return LaurentSeries.from_coefficients({1: 1.0, -1: b}, EXTERIOR, order)


def monomial_map(b0: complex, bm: complex, m: int, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """z + b0 + bm z^-m; univalent for m |bm| <= 1."""
    if m < 1:
        raise SeriesDomainError("monomial_map needs m >= 1")
    if m * abs(bm) > 1:
        raise SeriesDomainError("z + b0 + bm z^-m is univalent only for m |bm| <= 1")
    return LaurentSeries.from_coefficients({1: 1.0, 0: b0, -m: bm}, EXTERIOR, order)


def koebe_sigma(t: complex, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """zeta - 2t + t^2/zeta, the Sigma-class image of z/(1 - t z)^2."""
    return sigma_from_s(koebe_qc(t, 1, order=order))


def sample_univalent_maps(order: int = DEFAULT_ORDER) -> Dict[str, LaurentSeries]:
    """Named class-Sigma maps used by the univalence checks."""
    return {
        "identity": LaurentSeries.identity(EXTERIOR, order),
        "b1_0.3": b1_map(0.3, order),
        "b1_0.5i": b1_map(0.5j, order),
        "b1_0.95": b1_map(0.95, order),
        "monomial_m2": monomial_map(0.2, 0.4, 2, order),
        "monomial_m3": monomial_map(-0.1j, 0.3 - 0.1j, 3, order),
        "koebe_sigma_0.5": koebe_sigma(0.5, order),
        "koebe_sigma_0.8i": koebe_sigma(0.8j, order),
        "sqrt_b1_0.6": sqrt_transform(b1_map(0.6, order), 0.0),
        "sqrt_monomial_m2": sqrt_transform(monomial_map(0.0, 0.45, 2, order), 0.0),
    }
