"""Hyperbolic geometry of the unit disk (curvature -4)."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.errors import DomainError

CONTOUR_POINTS = 64


def _in_disk(t: complex, what: str = "point"):
    if abs(t) >= 1:
        raise DomainError(f"{what} {t} is not inside the unit disk")


def hyperbolic_density(t) -> np.ndarray:
    """1 / (1 - |t|^2)."""
    t = np.asarray(t, dtype=complex)
    return 1.0 / (1.0 - np.abs(t) ** 2)


def hyperbolic_distance(t1: complex, t2: complex) -> float:
    _in_disk(t1)
    _in_disk(t2)
    t1, t2 = complex(t1), complex(t2)
    return float(np.arctanh(abs((t1 - t2) / (1 - np.conj(t2) * t1))))


@dataclass(frozen=True)
class BlaschkeFactor:
    """e^(i theta) (t - a) / (1 - conj(a) t)."""
    a: complex
    theta: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        return np.exp(1j * self.theta) * (t - self.a) / (1 - np.conj(self.a) * t)

    def derivative(self, t):
        t = np.asarray(t, dtype=complex)
        return np.exp(1j * self.theta) * (1 - abs(self.a) ** 2) / (1 - np.conj(self.a) * t) ** 2


def blaschke_factor(a: complex, theta: float = 0.0) -> BlaschkeFactor:
    _in_disk(a, "Blaschke zero")
    return BlaschkeFactor(complex(a), float(theta))


def contour_derivative(h: Callable, t: complex, radius: float, points: int = CONTOUR_POINTS) -> complex:
    """h'(t) = (1 / 2 pi i) contour integral of h(w) / (w - t)^2, trapezoid rule."""
    theta = 2 * np.pi * np.arange(points) / points
    w = t + radius * np.exp(1j * theta)
    return complex(np.mean(np.asarray(h(w)) * np.exp(-1j * theta)) / radius)


def _at(func: Callable, t: complex) -> complex:
    return complex(np.asarray(func(np.array([t])), dtype=complex).ravel()[0])


def pullback_density(h: Callable, t: complex, derivative: Optional[Callable] = None) -> float:
    """|h'(t)| / (1 - |h(t)|^2) for a holomorphic h into the disk."""
    t = complex(t)
    _in_disk(t)
    value = _at(h, t)
    if abs(value) >= 1:
        raise DomainError(f"h({t}) = {value} is not inside the unit disk")
    derivative = derivative or getattr(h, "derivative", None)
    if derivative is not None:
        dh = _at(derivative, t)
    else:
        dh = contour_derivative(h, t, 0.5 * (1 - abs(t)))
    return abs(dh) / (1 - abs(value) ** 2)


def pullback(h: Callable, derivative: Optional[Callable] = None) -> Callable:
    """Density sampler t -> pullback_density(h, t)."""
    return lambda t: pullback_density(h, t, derivative)


def curvature_check(density: Callable, t0: complex, h: float = 1e-3) -> float:
    """Five-point Laplacian of log density minus 4 density^2 at t0; 0 for curvature -4."""
    t0 = complex(t0)
    stencil = [t0, t0 + h, t0 - h, t0 + 1j * h, t0 - 1j * h]
    values = np.array([float(np.real(density(s))) for s in stencil])
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise DomainError(f"density must be positive on the stencil around {t0}")
    logs = np.log(values)
    laplacian = (logs[1:].sum() - 4 * logs[0]) / h ** 2
    return float(laplacian - 4 * values[0] ** 2)
