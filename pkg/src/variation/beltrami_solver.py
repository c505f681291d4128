"""Small-dilatation Beltrami solver on a square lattice.

omega = d-bar f solves omega = mu + mu B[omega], with the Beurling transform B
applied as the Fourier multiplier conj(k)/k on a zero-padded doubled grid.
Then f = z + C[omega], the Cauchy transform taken as a linear FFT
convolution with 1/(pi z). Off the grid, f and its derivatives are summed
directly over the cells carrying omega.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.fft
import scipy.linalg
from scipy.ndimage import maximum_filter, minimum_filter

from src.errors import ConvergenceError, DomainError, GridResolutionError
from src.quaddiff.beltrami_field import GRID, BeltramiField
from src.quaddiff.quadrature import square_cell_rule
from src.series.laurent_series import EXTERIOR, LaurentSeries
from src.variation.functional_spec import F1, HYDRODYNAMIC, NORMALIZATIONS, pole_weight

logger = logging.getLogger(__name__)

GRID_SIZE = 256
PADDING = 4.0
MAX_ITER = 200
TOL = 1e-10
RESIDUAL_TOL = 1e-2
FIT_TERMS = 16
FIT_POINTS = 256
CELL_ORDER = 4
BAND = 9
CHUNK_ENTRIES = 2_000_000


def beurling_multiplier(n: int, spacing: float) -> np.ndarray:
    """conj(k)/k on an n x n frequency grid, zero at k = 0."""
    freq = scipy.fft.fftfreq(n, d=spacing)
    kx = freq[None, :]
    ky = freq[:, None]
    k = kx + 1j * ky
    out = np.zeros((n, n), dtype=complex)
    nz = k != 0
    out[nz] = np.conj(k[nz]) / k[nz]
    return out


def cauchy_kernel_fft(n: int, spacing: float) -> np.ndarray:
    """Spectrum of h^2 / (pi z) on the 2n x 2n wrap-around offset grid, 0 at the origin."""
    offsets = np.arange(2 * n)
    offsets = np.where(offsets < n, offsets, offsets - 2 * n) * spacing
    z = offsets[None, :] + 1j * offsets[:, None]
    kernel = np.zeros((2 * n, 2 * n), dtype=complex)
    nz = z != 0
    kernel[nz] = spacing ** 2 / (np.pi * z[nz])
    return scipy.fft.fft2(kernel)


def _pad(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = a
    return out


@dataclass
class BeltramiSolution:
    """Solved map f^mu under the requested normalization."""
    field: BeltramiField
    omega: np.ndarray
    samples: np.ndarray
    normalization: str
    shift: complex
    iterations: int
    increments: list
    residual: float
    fit: Optional[LaurentSeries] = None
    fit_radius: float = 0.0
    _nodes: np.ndarray = field(default=None, repr=False)
    _weighted: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        mask = self.omega != 0
        centers = self.field.cell_centers()[mask]
        nodes, weights = square_cell_rule(centers, self.field.spacing, CELL_ORDER)
        self._nodes = nodes.ravel()
        self._weighted = (weights * self.omega[mask][:, None]).ravel()

    def _kernel_sum(self, z: np.ndarray, order: int) -> np.ndarray:
        """sum over cells of omega * (w - z)^-(order+1)."""
        out = np.zeros(z.shape, dtype=complex)
        if self._nodes.size == 0:
            return out
        flat = z.ravel()
        chunk = max(1, CHUNK_ENTRIES // self._nodes.size)
        result = np.empty(flat.shape, dtype=complex)
        for start in range(0, flat.size, chunk):
            block = flat[start:start + chunk]
            diff = self._nodes[None, :] - block[:, None]
            result[start:start + chunk] = (self._weighted[None, :] / diff ** (order + 1)).sum(axis=1)
        return result.reshape(z.shape)

    def evaluate(self, z):
        """f(z) = z + shift - (1/pi) integral omega(w) / (w - z)."""
        z = np.asarray(z, dtype=complex)
        return z + self.shift - self._kernel_sum(z, 0) / np.pi

    def derivative(self, z, order: int = 1):
        if order == 0:
            return self.evaluate(z)
        z = np.asarray(z, dtype=complex)
        out = -pole_weight(order) * self._kernel_sum(z, order) / np.pi
        if order == 1:
            out = out + 1.0
        return out

    def coefficient(self, n: int) -> complex:
        """b_n = (1/pi) integral omega w^(n-1), n >= 1."""
        if n < 1:
            raise DomainError("b_n is defined for n >= 1")
        return complex(np.sum(self._weighted * self._nodes ** (n - 1)) / np.pi)

    def residual_report(self) -> dict:
        return {
            "iterations": self.iterations,
            "beltrami_residual": self.residual,
            "last_increment": self.increments[-1] if self.increments else 0.0,
            "grid_size": self.field.grid_size,
            "spacing": self.field.spacing,
        }

    def to_dict(self) -> dict:
        """Lattice dump of the sampled map."""
        origin = self.field.origin
        return {
            "grid_size": self.field.grid_size,
            "spacing": self.field.spacing,
            "origin": [origin.real, origin.imag],
            "samples": [[float(v.real), float(v.imag)] for v in self.samples.ravel()],
        }


class BeltramiSolver:
    """Neumann-series solver for mu of small sup norm with compact support."""

    def __init__(self, grid_size: int = GRID_SIZE, padding: float = PADDING, max_iter: int = MAX_ITER,
                 tol: float = TOL, residual_tol: float = RESIDUAL_TOL, fit_terms: int = FIT_TERMS):
        if grid_size < 8:
            raise DomainError("solver grid needs at least 8 cells per side")
        if padding < 2:
            raise DomainError("support padding factor must be at least 2")
        self.grid_size = grid_size
        self.padding = padding
        self.max_iter = max_iter
        self.tol = tol
        self.residual_tol = residual_tol
        self.fit_terms = fit_terms
        logger.debug("BeltramiSolver grid=%d padding=%.1f tol=%.0e", grid_size, padding, tol)

    def rasterize(self, mu: BeltramiField) -> BeltramiField:
        if mu.kind == GRID:
            return mu
        return mu.to_grid(self.grid_size, self.padding * mu.support_radius())

    def _iterate(self, mu: np.ndarray, multiplier: np.ndarray):
        omega = mu.copy()
        n = mu.shape[0]
        increments = []
        for iteration in range(1, self.max_iter + 1):
            b_omega = scipy.fft.ifft2(multiplier * scipy.fft.fft2(_pad(omega)))[:n, :n]
            new = mu + mu * b_omega
            step = float(np.max(np.abs(new - omega)))
            omega = new
            increments.append(step)
            if step <= self.tol:
                return omega, iteration, increments
        raise ConvergenceError(
            f"Neumann iteration did not reach {self.tol:.0e} in {self.max_iter} steps (last step {increments[-1]:.2e})"
        )

    def _residual(self, mu: np.ndarray, F: np.ndarray, h: float) -> float:
        """Relative max |d-bar f - mu d f| away from jumps of mu and the grid edge."""
        scale = float(np.max(np.abs(mu), initial=0.0))
        if scale == 0:
            return 0.0
        fy, fx = np.gradient(F, h)
        df = 0.5 * (fx - 1j * fy)
        dbar = 0.5 * (fx + 1j * fy)
        r = np.abs(dbar - mu * df)
        spread = np.maximum(maximum_filter(mu.real, BAND) - minimum_filter(mu.real, BAND),
                            maximum_filter(mu.imag, BAND) - minimum_filter(mu.imag, BAND))
        support = (np.abs(mu) > 0).astype(np.uint8)
        edge = maximum_filter(support, BAND) > minimum_filter(support, BAND)
        smooth = (spread <= 0.25 * scale) & ~edge
        smooth[:BAND, :] = smooth[-BAND:, :] = False
        smooth[:, :BAND] = smooth[:, -BAND:] = False
        if not np.any(smooth):
            return 0.0
        return float(np.max(r[smooth]) / scale)

    def _fit(self, solution: BeltramiSolution, radius: float) -> LaurentSeries:
        """Least-squares z + b0 + b1/z + ... on |z| = radius."""
        z = radius * np.exp(2j * np.pi * np.arange(FIT_POINTS) / FIT_POINTS)
        rhs = solution.evaluate(z) - z
        powers = -np.arange(0, self.fit_terms + 1)
        A = z[:, None] ** powers[None, :]
        coef = scipy.linalg.lstsq(A, rhs)[0]
        terms = {1: 1.0}
        terms.update({int(p): complex(c) for p, c in zip(powers, coef)})
        return LaurentSeries.from_coefficients(terms, EXTERIOR, order=self.fit_terms + 2)

    def solve(self, mu: BeltramiField, normalization: str = HYDRODYNAMIC) -> BeltramiSolution:
        if normalization not in NORMALIZATIONS:
            raise DomainError(f"normalization must be one of {NORMALIZATIONS}")
        grid = self.rasterize(mu)
        n, h = grid.grid_size, grid.spacing
        samples = np.asarray(grid.samples)
        if np.any(samples[[0, -1], :]) or np.any(samples[:, [0, -1]]):
            raise DomainError("support of mu touches the edge of the grid window")

        omega, iterations, increments = self._iterate(samples, beurling_multiplier(2 * n, h))
        cauchy = scipy.fft.ifft2(cauchy_kernel_fft(n, h) * scipy.fft.fft2(_pad(omega)))[:n, :n]
        z = grid.cell_centers()
        F = z + cauchy

        residual = self._residual(samples, F, h)
        solution = BeltramiSolution(grid, omega, F, normalization, 0j, iterations, increments, residual)
        if normalization == F1:
            shift = 1.0 - complex(solution.evaluate(1.0 + 0j))
            solution.shift = shift
            solution.samples = F + shift
        if residual > self.residual_tol:
            raise GridResolutionError(
                f"Beltrami residual {residual:.3e} exceeds {self.residual_tol:.1e} at grid {n}"
            )
        radius = 2.0 * max(grid.support_radius(), h)
        solution.fit = self._fit(solution, radius)
        solution.fit_radius = radius
        logger.info("solved Beltrami equation: %d iterations, residual %.2e, b1 %.6g",
                    iterations, residual, abs(solution.fit.coeff(-1)))
        return solution


def solve_beltrami(mu: BeltramiField, normalization: str = HYDRODYNAMIC, grid_size: int = GRID_SIZE,
                   max_iter: int = MAX_ITER, tol: float = TOL, padding: float = PADDING) -> BeltramiSolution:
    return BeltramiSolver(grid_size, padding, max_iter, tol).solve(mu, normalization)
