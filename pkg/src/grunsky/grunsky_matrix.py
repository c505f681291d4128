"""Grunsky coefficients, the weighted Grunsky matrix and its norm."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from src.errors import DomainError, InputError, InsufficientTruncationError
from src.series.laurent_series import LaurentSeries, require_sigma

logger = logging.getLogger(__name__)

DENSE_SVD_LIMIT = 256
CONVERGENCE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class GrunskyMatrix:
    """Weighted entries beta_mn = sqrt(mn) alpha_mn, m, n = 1..N."""
    N: int
    entries: np.ndarray

    def alpha(self, m: int, n: int) -> complex:
        return complex(self.entries[m - 1, n - 1] / np.sqrt(m * n))

    def leading_block(self, size: int) -> "GrunskyMatrix":
        return GrunskyMatrix(size, self.entries[:size, :size])

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "entries": [[float(v.real), float(v.imag)] for v in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GrunskyMatrix":
        try:
            N = int(data["N"])
            flat = np.array([complex(re, im) for re, im in data["entries"]])
            return cls(N, flat.reshape(N, N))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid Grunsky matrix dump: {exc}") from exc


@dataclass
class GrunskyNormReport:
    value: float
    value_half: float
    N: int
    converged: bool
    method: str

    def to_dict(self) -> dict:
        return {
            "norm": self.value,
            "norm_half": self.value_half,
            "N": self.N,
            "converged": self.converged,
            "method": self.method,
        }


def required_terms(N: int) -> int:
    """alpha_mn for m, n <= N involves b_1 .. b_(2N-1)."""
    return 2 * N - 1


def grunsky_coefficients(f: LaurentSeries, N: int) -> GrunskyMatrix:
    require_sigma(f)
    if N < 1:
        raise DomainError("Grunsky truncation N must be positive")
    need = required_terms(N)
    if f.lo > -need:
        raise InsufficientTruncationError(
            f"alpha_mn up to N={N} needs b_1..b_{need}; series stops at z^{f.lo}"
        )

    b = np.array([f.coeff(-k) for k in range(0, need + 1)])

    # P(u, v) = (f(z) - f(zeta)) / (z - zeta) in u = 1/z, v = 1/zeta.
    # Only b_k with k = i + j - 1 feeds the u^i v^j term, i, j >= 1.
    idx = np.arange(N + 1)
    P = np.zeros((N + 1, N + 1), dtype=complex)
    P[0, 0] = 1.0
    ii, jj = np.meshgrid(idx[1:], idx[1:], indexing="ij")
    P[1:, 1:] = -b[ii + jj - 1]

    # log P by P L' = P' in u, coefficients are polynomials in v cut at degree N
    L = np.zeros_like(P)
    for m in range(1, N + 1):
        acc = m * P[m]
        for i in range(1, m):
            acc = acc - (m - i) * np.convolve(P[i], L[m - i])[:N + 1]
        L[m] = acc / m

    alpha = -L[1:, 1:]
    weights = np.sqrt(np.outer(idx[1:], idx[1:]).astype(float))
    entries = weights * alpha
    entries = 0.5 * (entries + entries.T)
    return GrunskyMatrix(N, entries)


def _sigma_max(entries: np.ndarray, restarts: int = 3, seed: int = 0) -> Tuple[float, str]:
    if entries.size == 0:
        return 0.0, "empty"
    if entries.shape[0] <= DENSE_SVD_LIMIT:
        return float(scipy.linalg.svd(entries, compute_uv=False)[0]), "svd"

    rng = np.random.default_rng(seed)
    gram = entries.conj().T @ entries
    best = 0.0
    for _ in range(restarts):
        x = rng.standard_normal(entries.shape[0]) + 1j * rng.standard_normal(entries.shape[0])
        x /= np.linalg.norm(x)
        value = 0.0
        for _ in range(1000):
            y = gram @ x
            norm = np.linalg.norm(y)
            if norm == 0:
                break
            x = y / norm
            new_value = float(np.sqrt(norm))
            if abs(new_value - value) < 1e-14 * max(1.0, new_value):
                value = new_value
                break
            value = new_value
        best = max(best, value)
    return best, "power"


def grunsky_norm(B: GrunskyMatrix, restarts: int = 3, seed: int = 0) -> GrunskyNormReport:
    """sigma_max of the truncated matrix, a lower bound for kappa(f), with its value at N/2."""
    value, method = _sigma_max(B.entries, restarts, seed)
    half = B.N // 2
    value_half = _sigma_max(B.entries[:half, :half], restarts, seed)[0] if half else 0.0
    converged = abs(value - value_half) < CONVERGENCE_TOL
    logger.debug("grunsky norm N=%d: %.3e (N/2: %.3e, %s)", B.N, value, value_half, method)
    return GrunskyNormReport(value, value_half, B.N, converged, method)


def takagi_vector(B: GrunskyMatrix, iterations: int = 500) -> Tuple[float, np.ndarray]:
    """Unit x with x^T B x = sigma_max (real, non-negative)."""
    return takagi(B.entries, iterations)


def takagi(entries: np.ndarray, iterations: int = 500) -> Tuple[float, np.ndarray]:
    """Top Takagi value and vector of a complex symmetric matrix."""
    N = entries.shape[0]
    V, s, Wh = scipy.linalg.svd(entries)
    if s[0] == 0:
        x = np.zeros(N, dtype=complex)
        x[0] = 1.0
        return 0.0, x

    # top singular cluster of the symmetric matrix, B = U diag(s) U^T on it
    cluster = np.flatnonzero(np.abs(s - s[0]) <= 1e-10 * max(1.0, s[0]))
    W = Wh.conj().T
    Z = V[:, cluster].T @ W[:, cluster]
    Q = scipy.linalg.sqrtm(Z)
    U = V[:, cluster] @ np.atleast_2d(Q).conj()
    x = U[:, 0].conj()
    x /= np.linalg.norm(x)

    value = x @ entries @ x
    if abs(value) < s[0] * (1 - 1e-10):
        for _ in range(iterations):
            y = (np.exp(-1j * np.angle(value)) * (entries @ x)).conj()
            norm = np.linalg.norm(y)
            if norm == 0:
                break
            x = y / norm
            value = x @ entries @ x
            if abs(value) >= s[0] * (1 - 1e-12):
                break
    x = x * np.exp(-0.5j * np.angle(value))
    return float(abs(value)), x


def h_x_value(B: GrunskyMatrix, x: np.ndarray) -> complex:
    """x^T B x = sum sqrt(mn) alpha_mn x_m x_n."""
    x = np.asarray(x, dtype=complex)
    if len(x) > B.N:
        if np.any(x[B.N:] != 0):
            raise DomainError(f"support of x exceeds the truncation N={B.N}")
        x = x[:B.N]
    if np.linalg.norm(x) > 1 + 1e-12:
        raise DomainError("h_x needs ||x|| <= 1")
    padded = np.zeros(B.N, dtype=complex)
    padded[:len(x)] = x
    return complex(padded @ B.entries @ padded)


def area_block_check(B: GrunskyMatrix, x: np.ndarray, rows: Tuple[int, int], cols: Tuple[int, int]) -> Tuple[float, float]:
    """Both sides of |sum_{m in rows} sum_{n in cols} beta_mn x_m x_n|^2 <= sum|x_m|^2 sum|x_n|^2.

    ``rows`` and ``cols`` are inclusive 1-based index ranges.
    """
    x = np.asarray(x, dtype=complex)
    (j, M), (l, N) = rows, cols
    xm = x[j - 1:M]
    xn = x[l - 1:N]
    lhs = abs(xm @ B.entries[j - 1:M, l - 1:N] @ xn) ** 2
    rhs = float(np.sum(np.abs(xm) ** 2) * np.sum(np.abs(xn) ** 2))
    return float(lhs), rhs


def kuhnau_bound(k: float, alpha: float) -> float:
    """Upper bound k (k + alpha) / (1 + alpha k) for kappa(f) given k(f) and alpha_D(f)."""
    if not 0 <= k < 1:
        raise DomainError("k must lie in [0, 1)")
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    return k * (k + alpha) / (1 + alpha * k)


def homotopy_dilatation(f: LaurentSeries, t: complex, tol: float = 1e-14) -> Tuple[int, float]:
    """Leading term ((m + 1)/2) |b_m| |t|^(m+1) of k(f_t), m the first nonzero b_m (m >= 1).

    Exact for z + b/z. Returns (m, value); identity maps give (0, 0.0).
    """
    require_sigma(f)
    for m in range(1, -f.lo + 1):
        bm = f.coeff(-m)
        if abs(bm) > tol:
            return m, 0.5 * (m + 1) * abs(bm) * abs(t) ** (m + 1)
    return 0, 0.0


def grunsky_norm_of(f: LaurentSeries, N: int, restarts: int = 3, seed: int = 0) -> GrunskyNormReport:
    return grunsky_norm(grunsky_coefficients(f, N), restarts=restarts, seed=seed)
