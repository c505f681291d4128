"""Beltrami coefficients: closed forms and lattice samples."""

import json
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from src.errors import DegenerateError, DomainError, InputError
from src.quaddiff.quad_diff import QuadDiff
from src.quaddiff.quadrature import DISK, EXTERIOR

logger = logging.getLogger(__name__)

TEICHMULLER = "teichmuller"
CONSTANT = "constant"
FUNCTION = "function"
GRID = "grid"
SUPERSAMPLE = 4


class GridFile(BaseModel):
    grid_size: int
    spacing: float
    origin: Tuple[float, float]
    samples: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _check_shape(self):
        if self.grid_size <= 0 or self.spacing <= 0:
            raise ValueError("grid_size and spacing must be positive")
        if len(self.samples) != self.grid_size ** 2:
            raise ValueError(f"expected grid_size^2 = {self.grid_size ** 2} samples")
        return self


@dataclass(frozen=True, eq=False)
class BeltramiField:
    """mu with a recorded sup norm.

    Closed forms live on ``domain`` (the unit disk or its exterior); grid
    fields hold one value per square cell, ``samples[row, col]`` at
    ``origin + spacing * (col + 1j * row)``.
    """
    kind: str
    sup_norm: float
    domain: str = DISK
    k: float = 0.0
    psi: Optional[QuadDiff] = None
    value: complex = 0j
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    samples: Optional[np.ndarray] = None
    spacing: float = 0.0
    origin: complex = 0j

    def __post_init__(self):
        if not 0 <= self.sup_norm < 1:
            raise DomainError(f"Beltrami coefficient needs sup norm < 1, got {self.sup_norm:.6g}")
        if self.domain not in (DISK, EXTERIOR):
            raise DomainError(f"unknown domain {self.domain!r}")

    # --- constructors ---
    @classmethod
    def teichmuller(cls, psi: QuadDiff, k: float) -> "BeltramiField":
        if not 0 <= k < 1:
            raise DomainError("Teichmuller dilatation k must lie in [0, 1)")
        if psi.is_zero():
            raise DegenerateError("psi is identically zero")
        return cls(TEICHMULLER, float(k), psi.domain, k=float(k), psi=psi)

    @classmethod
    def constant(cls, c: complex, domain: str = DISK) -> "BeltramiField":
        return cls(CONSTANT, abs(c), domain, value=complex(c))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], sup_norm: float,
                      domain: str = DISK, check: bool = True) -> "BeltramiField":
        field = cls(FUNCTION, float(sup_norm), domain, func=func)
        if check and domain == DISK:
            x = np.linspace(-1, 1, 129)
            z = (x[None, :] + 1j * x[:, None]).ravel()
            observed = float(np.max(np.abs(field(z)), initial=0.0))
            if observed > sup_norm * (1 + 1e-9) + 1e-15:
                raise DomainError(f"declared sup norm {sup_norm:.6g} below sampled {observed:.6g}")
        return field

    @classmethod
    def from_grid(cls, samples: np.ndarray, spacing: float, origin: complex) -> "BeltramiField":
        samples = np.array(samples, dtype=complex)
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
            raise DomainError("grid samples must be a square array")
        samples.setflags(write=False)
        sup = float(np.max(np.abs(samples), initial=0.0))
        return cls(GRID, sup, DISK, samples=samples, spacing=float(spacing), origin=complex(origin))

    @classmethod
    def zero(cls) -> "BeltramiField":
        return cls.constant(0.0)

    # --- evaluation ---
    def _in_domain(self, z: np.ndarray) -> np.ndarray:
        if self.domain == DISK:
            return np.abs(z) < 1
        return np.abs(z) > 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == GRID:
            return self._grid_lookup(z)
        inside = self._in_domain(z)
        out = np.zeros(z.shape, dtype=complex)
        if self.kind == CONSTANT:
            out[inside] = self.value
        elif self.kind == FUNCTION:
            out[inside] = np.asarray(self.func(z[inside]), dtype=complex)
        else:
            psi = self.psi(z[inside])
            mag = np.abs(psi)
            vals = np.zeros(psi.shape, dtype=complex)
            nz = mag > 0
            vals[nz] = self.k * mag[nz] / psi[nz]
            out[inside] = vals
        return out

    def _grid_lookup(self, z: np.ndarray) -> np.ndarray:
        n = self.samples.shape[0]
        col = np.rint((z.real - self.origin.real) / self.spacing).astype(int)
        row = np.rint((z.imag - self.origin.imag) / self.spacing).astype(int)
        ok = (col >= 0) & (col < n) & (row >= 0) & (row < n)
        out = np.zeros(z.shape, dtype=complex)
        out[ok] = self.samples[row[ok], col[ok]]
        return out

    # --- grid helpers ---
    @property
    def grid_size(self) -> int:
        return 0 if self.samples is None else self.samples.shape[0]

    def cell_centers(self) -> np.ndarray:
        n = self.grid_size
        idx = np.arange(n)
        return self.origin + self.spacing * (idx[None, :] + 1j * idx[:, None])

    def support_radius(self) -> float:
        if self.kind != GRID:
            return 1.0 if self.domain == DISK else float("inf")
        mask = self.samples != 0
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(self.cell_centers()[mask]))) + self.spacing / np.sqrt(2)

    def scaled(self, eps: float) -> "BeltramiField":
        if self.kind == GRID:
            return BeltramiField.from_grid(self.samples * eps, self.spacing, self.origin)
        if self.kind == CONSTANT:
            return BeltramiField.constant(self.value * eps, self.domain)
        if self.kind == TEICHMULLER:
            if eps >= 0:
                return BeltramiField.teichmuller(self.psi, self.k * eps)
        base = self
        return BeltramiField.from_function(lambda z: eps * base(z), abs(eps) * self.sup_norm, self.domain, check=False)

    def to_grid(self, grid_size: int, half_width: float, supersample: int = SUPERSAMPLE) -> "BeltramiField":
        """Cell averages over ``grid_size``^2 square cells covering [-L, L]^2."""
        if self.kind == GRID:
            return self
        if self.domain != DISK:
            raise DomainError("only disk-supported fields can be rasterized")
        h = 2.0 * half_width / grid_size
        origin = complex(-half_width + 0.5 * h, -half_width + 0.5 * h)
        sub = (np.arange(supersample) + 0.5) / supersample - 0.5
        offsets = h * (sub[None, :] + 1j * sub[:, None]).ravel()
        samples = np.zeros((grid_size, grid_size), dtype=complex)
        idx = np.arange(grid_size)
        for row in range(grid_size):
            y = origin.imag + h * row
            if abs(y) > 1 + h:
                continue
            centers = origin.real + h * idx + 1j * y
            near = np.abs(centers) < 1 + h
            if not np.any(near):
                continue
            pts = centers[near][:, None] + offsets[None, :]
            samples[row, near] = np.mean(self(pts.ravel()).reshape(pts.shape), axis=1)
        return BeltramiField.from_grid(samples, h, origin)

    def to_dict(self) -> dict:
        if self.kind != GRID:
            raise DomainError("only grid fields have a lattice dump")
        return {
            "grid_size": self.grid_size,
            "spacing": self.spacing,
            "origin": [self.origin.real, self.origin.imag],
            "samples": [[float(v.real), float(v.imag)] for v in self.samples.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BeltramiField":
        try:
            model = GridFile(**data)
        except (ValidationError, TypeError) as exc:
            raise InputError(f"invalid grid dump: {exc}") from exc
        n = model.grid_size
        samples = np.array([complex(re, im) for re, im in model.samples]).reshape(n, n)
        return cls.from_grid(samples, model.spacing, complex(*model.origin))


def load_grid_field(path: str) -> BeltramiField:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (IOError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read grid file {path}: {exc}") from exc
    return BeltramiField.from_dict(data)


def teich_beltrami(psi: QuadDiff, k: float) -> BeltramiField:
    """k |psi| / psi, zero on the zero set of psi."""
    return BeltramiField.teichmuller(psi, k)
