"""Grunsky lower and Teichmuller upper bounds along homotopy disks."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import DomainError, InputError
from src.grunsky.grunsky_matrix import grunsky_norm_of, homotopy_dilatation
from src.series.catalog import b1_map, koebe_sigma, monomial_map
from src.series.laurent_series import LaurentSeries, homotopy, require_sigma

logger = logging.getLogger(__name__)

CHAIN_TOL = 1e-9
GAP_TOL = 1e-6
EXACT_FAMILIES = ("b1_map", "koebe_qc", "koebe_sigma")


@dataclass
class MetricSample:
    t: complex
    lower: float
    upper: float
    gap: float
    kappa_gap: float

    def to_dict(self) -> dict:
        return {
            "t_re": self.t.real,
            "t_im": self.t.imag,
            "lower": self.lower,
            "upper": self.upper,
            "gap": self.gap,
            "kappa_gap": self.kappa_gap,
        }


def teichmuller_upper_bound(k: float) -> float:
    """tanh^-1 k, the Teichmuller distance for extremal dilatation k."""
    if not 0 <= k < 1:
        raise DomainError(f"dilatation k must lie in [0, 1), got {k}")
    return float(np.arctanh(k))


def caratheodory_lower_bound(f: LaurentSeries, t: complex, N: int = 32, restarts: int = 3, seed: int = 0) -> float:
    """tanh^-1 of the Grunsky norm of f_t, each h_x being a holomorphic map of the disk fixing 0."""
    t = complex(t)
    if abs(t) >= 1:
        raise DomainError("t must lie in the unit disk")
    kappa = grunsky_norm_of(homotopy(f, t), N, restarts=restarts, seed=seed).value
    if kappa >= 1:
        raise DomainError(f"Grunsky norm {kappa:.12g} of f_t reached 1")
    return float(np.arctanh(kappa))


def upper_is_exact(family: str) -> bool:
    """True when the family's k(f_t) comes from an explicit extremal extension."""
    return family in EXACT_FAMILIES


def sweep_family(family: str, params: Dict[str, complex], order: int) -> Tuple[LaurentSeries, Callable[[complex], float]]:
    """Map and k(f_t): exact for b1_map and koebe_qc, leading order only for monomial_map."""
    if family == "b1_map":
        b = complex(params.get("b", 0.6))
        return b1_map(b, order), lambda t: abs(b) * abs(t) ** 2
    if family in ("koebe_qc", "koebe_sigma"):
        t0 = complex(params.get("t", 0.5))
        return koebe_sigma(t0, order), lambda s: abs(t0) ** 2 * abs(s) ** 2
    if family == "monomial_map":
        m = int(np.real(params.get("m", 2)))
        f = monomial_map(complex(params.get("b0", 0.0)), complex(params.get("bm", 0.2)), m, order)
        return f, lambda t: homotopy_dilatation(f, t)[1]
    raise InputError(f"unknown family {family!r}; expected b1_map, koebe_qc or monomial_map")


def geodesic_coincidence_experiment(f: LaurentSeries, known_k: Callable[[complex], float], t_grid: Iterable[complex],
                                    N: int = 32, restarts: int = 3, seed: int = 0) -> List[MetricSample]:
    """Lower (Grunsky) and upper (Teichmuller) distance bounds from 0 to f_t over ``t_grid``."""
    require_sigma(f)
    t_grid = [complex(t) for t in t_grid]
    if not t_grid:
        raise DomainError("t grid is empty")
    samples = []
    for t in t_grid:
        lower = caratheodory_lower_bound(f, t, N, restarts=restarts, seed=seed)
        k = float(known_k(t))
        upper = teichmuller_upper_bound(k)
        samples.append(MetricSample(t, lower, upper, upper - lower, k - float(np.tanh(lower))))
        if lower > upper + CHAIN_TOL:
            logger.warning("metric chain violated at t=%s: lower %.12g > upper %.12g", t, lower, upper)
    return samples


def sweep_frame(samples: List[MetricSample]) -> pd.DataFrame:
    columns = ["t_re", "t_im", "lower", "upper", "gap", "kappa_gap"]
    return pd.DataFrame([s.to_dict() for s in samples], columns=columns)


def sweep_summary(samples: List[MetricSample], tol: float = GAP_TOL, upper_exact: bool = True) -> dict:
    """max gap, chain check and the smallest |t| where the gap exceeds ``tol``.

    With ``upper_exact`` False the upper column is a leading-order estimate
    and ``chain_ok`` is only indicative.
    """
    frame = sweep_frame(samples)
    radius = np.hypot(frame["t_re"], frame["t_im"])
    exceeding = radius[frame["gap"].abs() > tol]
    empirical_radius: Optional[float] = float(exceeding.min()) if len(exceeding) else None
    return {
        "samples": int(len(frame)),
        "max_gap": float(frame["gap"].abs().max()),
        "chain_ok": bool((frame["lower"] <= frame["upper"] + CHAIN_TOL).all()),
        "gap_tol": tol,
        "upper_exact": upper_exact,
        "empirical_radius": empirical_radius,
    }


def radial_grid(r_max: float = 0.9, points: int = 10, angle: float = 0.0) -> List[complex]:
    """t = r e^(i angle) for r in (0, r_max]."""
    if not 0 < r_max < 1:
        raise DomainError("r_max must lie in (0, 1)")
    return [complex(r * np.exp(1j * angle)) for r in np.linspace(r_max / points, r_max, points)]
