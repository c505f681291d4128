"""Monte Carlo check of |J-hat(mu)| <= (k/pi)||psi_0||_1 + C k^2 over random lattice fields."""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from src.quaddiff.beltrami_field import BeltramiField
from src.quaddiff.pairing import cell_integrals
from src.quaddiff.quad_diff import l1_norm
from src.variation.beltrami_solver import BeltramiSolver
from src.variation.first_order import functional_derivative
from src.variation.functional_spec import FunctionalSpec

logger = logging.getLogger(__name__)

GRID_SIZE = 64
HALF_WIDTH = 2.0


@dataclass
class SharpBoundReport:
    k: float
    samples: int
    psi0_norm: float
    bound: float
    max_value: float
    teichmuller_value: float
    violations: int
    distance_to_teichmuller: float
    fitted_C: Optional[float]
    solved: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "samples": self.samples,
            "psi0_norm": self.psi0_norm,
            "first_order_bound": self.bound,
            "max_first_order_value": self.max_value,
            "teichmuller_grid_value": self.teichmuller_value,
            "violations": self.violations,
            "distance_to_teichmuller": self.distance_to_teichmuller,
            "fitted_C": self.fitted_C,
            "solved_samples": self.solved,
        }


def _lattice(grid_size: int, half_width: float):
    h = 2.0 * half_width / grid_size
    idx = np.arange(grid_size)
    origin = complex(-half_width + 0.5 * h, -half_width + 0.5 * h)
    centers = origin + h * (idx[None, :] + 1j * idx[:, None])
    inside = np.abs(centers) + h / np.sqrt(2) <= 1.0
    return centers, inside, h, origin


def sharp_bound_experiment(J: FunctionalSpec, k: float, samples: int = 1000, seed: int = 0,
                           grid_size: int = GRID_SIZE, half_width: float = HALF_WIDTH, tol: float = 1e-9,
                           solve: int = 0, solver: Optional[BeltramiSolver] = None,
                           progress: bool = False) -> SharpBoundReport:
    """Random fields with sup norm k on cells inside the disk, against the Teichmuller-form maximum.

    ``solve`` of the samples, the largest first, are also run through the
    Beltrami solver to fit the second-order constant C.
    """
    psi0 = functional_derivative(J)
    psi0_norm = l1_norm(psi0, tol)
    bound = k * psi0_norm / np.pi

    centers, inside, h, origin = _lattice(grid_size, half_width)
    cells = cell_integrals([psi0], centers[inside], h)[0]
    rng = np.random.default_rng(seed)

    values: List[float] = []
    phases: List[np.ndarray] = []
    for _ in tqdm(range(samples), desc="sharp bound", disable=not progress):
        amplitude = np.where(rng.random(cells.size) < 0.5, 1.0, rng.random(cells.size))
        mu = k * amplitude * np.exp(2j * np.pi * rng.random(cells.size))
        values.append(float(abs(np.sum(mu * cells)) / np.pi))
        phases.append(mu)

    teich = k * np.abs(cells) / np.where(cells == 0, 1, cells)
    teich_value = float(abs(np.sum(teich * cells)) / np.pi)
    violations = int(sum(v > bound + tol for v in values))

    best = int(np.argmax(values)) if values else 0
    distance = 0.0
    if values:
        value = -np.sum(phases[best] * cells) / np.pi
        t = k * np.exp(1j * (np.angle(value) + np.pi))
        psi_c = psi0(centers[inside])
        unit = np.abs(psi_c) / np.where(psi_c == 0, 1, psi_c)
        distance = float(np.mean(np.abs(phases[best] - t * unit)) / max(k, 1e-300))

    fitted_C, solved = None, 0
    if solve and values:
        solver = solver or BeltramiSolver(grid_size=grid_size)
        ranked = np.argsort(values)[::-1][:solve]
        excess = []
        for j in ranked:
            samples_grid = np.zeros(centers.shape, dtype=complex)
            samples_grid[inside] = phases[j]
            field = BeltramiField.from_grid(samples_grid, h, origin)
            exact = abs(J.increment(solver.solve(field, J.normalization)))
            excess.append((exact - bound) / (k * k) if k > 0 else 0.0)
        fitted_C = float(max(0.0, max(excess)))
        solved = len(ranked)

    logger.info("sharp bound k=%.3g: max %.6g vs bound %.6g (%d violations of %d)",
                k, max(values, default=0.0), bound, violations, samples)
    return SharpBoundReport(k, samples, psi0_norm, bound, max(values, default=0.0), teich_value,
                            violations, distance, fitted_C, solved)
