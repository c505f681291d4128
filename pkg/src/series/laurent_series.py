"""Truncated Laurent series with a tracked precision window.

An ``interior`` series is an expansion in z around 0, known up to
O(z^(hi+1)). An ``exterior`` series is an expansion in 1/z around
infinity, known up to O(z^(lo-1)). Internally both are handled in the
small variable s (s = z inside, s = 1/z outside) as ``s^val * sum c_i s^i``
so the recursions below are written once.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from src.errors import ClassMismatchError, DegenerateError, InputError, SeriesDomainError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 64
INTERIOR = "interior"
EXTERIOR = "exterior"

Number = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    lo: int
    hi: int
    coeffs: np.ndarray
    domain: str

    def __post_init__(self):
        if self.domain not in (INTERIOR, EXTERIOR):
            raise SeriesDomainError(f"unknown domain tag {self.domain!r}")
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or len(coeffs) != self.hi - self.lo + 1:
            raise SeriesDomainError(
                f"expected {self.hi - self.lo + 1} coefficients for powers {self.lo}..{self.hi}, got {coeffs.size}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    # --- construction ---
    @classmethod
    def from_coefficients(cls, coefficients: dict, domain: str, order: int = DEFAULT_ORDER) -> "LaurentSeries":
        """Series with the given {power: coefficient} terms, exact to ``order`` retained powers."""
        powers = list(coefficients)
        if domain == INTERIOR:
            lo = min(powers)
            hi = max(max(powers), lo + order - 1)
        else:
            hi = max(powers)
            lo = min(min(powers), hi - order + 1)
        coeffs = np.zeros(hi - lo + 1, dtype=complex)
        for power, value in coefficients.items():
            coeffs[power - lo] += value
        return cls(lo, hi, coeffs, domain)

    @classmethod
    def identity(cls, domain: str, order: int = DEFAULT_ORDER) -> "LaurentSeries":
        return cls.from_coefficients({1: 1.0}, domain, order)

    @classmethod
    def monomial(cls, power: int, domain: str, coefficient: Number = 1.0, order: int = DEFAULT_ORDER) -> "LaurentSeries":
        return cls.from_coefficients({power: coefficient}, domain, order)

    # --- access ---
    def coeff(self, power: int) -> complex:
        """Coefficient of z**power; zero outside the retained range."""
        if self.lo <= power <= self.hi:
            return complex(self.coeffs[power - self.lo])
        return 0j

    @property
    def powers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __len__(self):
        return self.hi - self.lo + 1

    def is_sigma(self, tol: float = 1e-12) -> bool:
        """z + b0 + b1/z + ... in the exterior convention."""
        return self.domain == EXTERIOR and self.hi == 1 and abs(self.coeff(1) - 1) <= tol

    def is_class_s(self, tol: float = 1e-12) -> bool:
        """z + a2 z^2 + ... in the interior convention."""
        if self.domain != INTERIOR or abs(self.coeff(1) - 1) > tol:
            return False
        return all(abs(self.coeff(p)) <= tol for p in range(self.lo, 1))

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        return f"LaurentSeries(domain={self.domain}, lo={self.lo}, hi={self.hi})"

    # --- arithmetic ---
    def __add__(self, other):
        if isinstance(other, LaurentSeries):
            return add(self, other)
        return _add_scalar(self, complex(other))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.lo, self.hi, -self.coeffs, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return mul(self, other)
        return LaurentSeries(self.lo, self.hi, self.coeffs * complex(other), self.domain)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return mul(self, reciprocal(other))
        return self * (1.0 / complex(other))

    # --- serialization ---
    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "lo": self.lo,
            "hi": self.hi,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentSeries":
        try:
            model = SeriesFile(**data)
        except (ValidationError, TypeError) as exc:
            raise InputError(f"invalid series data: {exc}") from exc
        coeffs = np.array([complex(re, im) for re, im in model.coeffs])
        return cls(model.lo, model.hi, coeffs, model.domain)


class SeriesFile(BaseModel):
    domain: Literal["interior", "exterior"]
    lo: int
    hi: int
    coeffs: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _check_length(self):
        if self.hi < self.lo:
            raise ValueError("hi must be >= lo")
        if len(self.coeffs) != self.hi - self.lo + 1:
            raise ValueError(f"coeffs must have hi - lo + 1 = {self.hi - self.lo + 1} entries")
        return self


def load_series(path: str) -> LaurentSeries:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (IOError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read series file {path}: {exc}") from exc
    return LaurentSeries.from_dict(data)


def save_series(series: LaurentSeries, path: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(series.to_dict(), f, indent=2)
    return path


def require_sigma(f: LaurentSeries, tol: float = 1e-12) -> LaurentSeries:
    if not f.is_sigma(tol):
        raise ClassMismatchError("expected a class-Sigma series z + b0 + b1/z + ... (exterior, leading coefficient 1)")
    return f


def require_class_s(f: LaurentSeries, tol: float = 1e-12) -> LaurentSeries:
    if not f.is_class_s(tol):
        raise ClassMismatchError("expected a class-S series z + a2 z^2 + ... (interior, leading coefficient 1)")
    return f


# --- canonical form in the small variable ---
def _to_canon(a: LaurentSeries) -> Tuple[int, np.ndarray]:
    if a.domain == INTERIOR:
        return a.lo, np.array(a.coeffs)
    return -a.hi, np.array(a.coeffs[::-1])


def _from_canon(val: int, c: np.ndarray, domain: str) -> LaurentSeries:
    c = np.asarray(c, dtype=complex)
    if domain == INTERIOR:
        return LaurentSeries(val, val + len(c) - 1, c, domain)
    return LaurentSeries(-(val + len(c) - 1), -val, c[::-1], domain)


def _strip(val: int, c: np.ndarray) -> Tuple[int, np.ndarray]:
    """Drop exact leading zeros; the known window is unchanged."""
    nz = np.flatnonzero(c)
    if len(nz) == 0 or nz[0] == 0:
        return val, c
    return val + int(nz[0]), c[nz[0]:]


def _cap(c: np.ndarray, order: Optional[int]) -> np.ndarray:
    if order is not None and len(c) > order:
        return c[:order]
    return c


def int_powers(t: complex, exponents) -> np.ndarray:
    """t**e for integer exponents by repeated multiplication (exact at t = 0, e = 0)."""
    exponents = np.asarray(exponents, dtype=int)
    if exponents.size == 0:
        return np.zeros(0, dtype=complex)
    top = int(np.max(np.abs(exponents)))
    table = np.cumprod(np.concatenate([[1.0 + 0j], np.full(top, complex(t))]))
    out = table[np.abs(exponents)]
    negative = exponents < 0
    if np.any(negative):
        out = out.copy()
        out[negative] = 1.0 / out[negative]
    return out


def _check_domains(a: LaurentSeries, b: LaurentSeries):
    if a.domain != b.domain:
        raise SeriesDomainError(f"domain-tag mismatch: {a.domain} vs {b.domain}")


def add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    _check_domains(a, b)
    va, ca = _to_canon(a)
    vb, cb = _to_canon(b)
    val = min(va, vb)
    top = min(va + len(ca), vb + len(cb)) - 1
    if top < val:
        raise SeriesDomainError("operands share no known coefficients")
    out = np.zeros(top - val + 1, dtype=complex)
    na = max(0, min(len(ca), top - va + 1))
    nb = max(0, min(len(cb), top - vb + 1))
    out[va - val:va - val + na] += ca[:na]
    out[vb - val:vb - val + nb] += cb[:nb]
    return _from_canon(val, out, a.domain)


def _add_scalar(a: LaurentSeries, value: complex) -> LaurentSeries:
    val, c = _to_canon(a)
    if val > 0:
        c = np.concatenate([np.zeros(val, dtype=complex), c])
        val = 0
    elif val + len(c) <= 0:
        # constant lies beyond the known window
        return a
    c = c.copy()
    c[-val] += value
    return _from_canon(val, c, a.domain)


def mul(a: LaurentSeries, b: LaurentSeries, order: Optional[int] = None) -> LaurentSeries:
    """Product truncated to the window both operands guarantee."""
    _check_domains(a, b)
    va, ca = _strip(*_to_canon(a))
    vb, cb = _strip(*_to_canon(b))
    n = min(len(ca), len(cb))
    prod = np.convolve(ca[:n], cb[:n])[:n]
    return _from_canon(va + vb, _cap(prod, order), a.domain)


def reciprocal(a: LaurentSeries, order: Optional[int] = None) -> LaurentSeries:
    val, c = _strip(*_to_canon(a))
    if c[0] == 0:
        raise DegenerateError("cannot invert a series with no nonzero known coefficient")
    c = _cap(c, order)
    n = len(c)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / c[0]
    for k in range(1, n):
        out[k] = -out[0] * np.dot(c[1:k + 1], out[k - 1::-1][:k])
    return _from_canon(-val, out, a.domain)


def _unit_part(u: LaurentSeries, what: str) -> np.ndarray:
    """Coefficients of u from s^0 up to its known top; u must vanish or stay bounded."""
    val, c = _strip(*_to_canon(u))
    if val < 0 and np.any(c != 0):
        raise SeriesDomainError(f"{what} needs an argument that stays bounded at the expansion point")
    if val > 0:
        c = np.concatenate([np.zeros(val, dtype=complex), c])
    return c


def log1p_series(u: LaurentSeries, order: Optional[int] = None) -> LaurentSeries:
    """log(1 + u), the branch vanishing with u."""
    c = _cap(_unit_part(u, "log1p"), order)
    w = c.copy()
    w[0] += 1.0
    if w[0] == 0:
        raise SeriesDomainError("log1p is singular: constant term of u equals -1")
    if abs(c[0]) >= 1:
        raise SeriesDomainError("constant term of u must have modulus < 1")
    n = len(w)
    out = np.zeros(n, dtype=complex)
    out[0] = np.log(w[0]) if c[0] != 0 else 0.0
    k = np.arange(n)
    for m in range(1, n):
        # w L' = w'
        acc = m * w[m] - np.dot(k[1:m] * out[1:m], w[m - 1:0:-1])
        out[m] = acc / (m * w[0])
    return _from_canon(0, out, u.domain)


def exp_series(u: LaurentSeries, order: Optional[int] = None) -> LaurentSeries:
    c = _cap(_unit_part(u, "exp"), order)
    n = len(c)
    out = np.zeros(n, dtype=complex)
    out[0] = np.exp(c[0])
    k = np.arange(n)
    for m in range(1, n):
        # E' = u' E
        out[m] = np.dot(k[1:m + 1] * c[1:m + 1], out[m - 1::-1][:m]) / m
    return _from_canon(0, out, u.domain)


def pow_series(a: LaurentSeries, r: Union[Fraction, int, float], order: Optional[int] = None) -> LaurentSeries:
    """a**r with the principal power of the leading coefficient."""
    r = Fraction(r).limit_denominator(10 ** 6)
    val, c = _strip(*_to_canon(a))
    if c[0] == 0:
        raise DegenerateError("cannot raise a series with no nonzero known coefficient")
    new_val = val * r
    if new_val.denominator != 1:
        lead = val if a.domain == INTERIOR else -val
        raise SeriesDomainError(f"leading power {lead} times {r} is not an integer")
    c = _cap(c, order)
    lead = c[0]
    w = c / lead
    rf = float(r)
    n = len(w)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    k = np.arange(n)
    for m in range(1, n):
        # w P' = r w' P
        coef = rf * k[1:m + 1] - (m - k[1:m + 1])
        out[m] = np.dot(coef * w[1:m + 1], out[m - 1::-1][:m]) / m
    return _from_canon(int(new_val), out * complex(lead) ** rf, a.domain)


def derivative(a: LaurentSeries) -> LaurentSeries:
    """d/dz in native powers."""
    powers = a.powers
    coeffs = a.coeffs * powers
    lo, hi = a.lo - 1, a.hi - 1
    if a.domain == INTERIOR and a.lo == 0 and len(coeffs) > 1:
        coeffs, lo = coeffs[1:], a.lo
    return LaurentSeries(lo, hi, coeffs, a.domain)


def rescale(a: LaurentSeries, t: Number) -> LaurentSeries:
    """a(t z): coefficient c_p -> c_p t^p."""
    t = complex(t)
    if t == 0:
        raise SeriesDomainError("rescale needs t != 0")
    return LaurentSeries(a.lo, a.hi, a.coeffs * int_powers(t, a.powers), a.domain)


def substitute_power(a: LaurentSeries, k: int) -> LaurentSeries:
    """a(z^k) for a positive integer k."""
    if k < 1:
        raise SeriesDomainError("substitute_power needs k >= 1")
    val, c = _to_canon(a)
    out = np.zeros(k * len(c), dtype=complex)
    out[::k] = c
    return _from_canon(k * val, out, a.domain)


def truncate(a: LaurentSeries, order: int) -> LaurentSeries:
    val, c = _to_canon(a)
    return _from_canon(val, _cap(c, order), a.domain)


def evaluate(a: LaurentSeries, z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for power, c in zip(a.powers, a.coeffs):
        if c != 0:
            out += c * z ** int(power)
    return out


def homotopy(f: LaurentSeries, t: Number) -> LaurentSeries:
    """f_t(z) = t f(z/t): b_n -> b_n t^(n+1), b0 -> b0 t."""
    require_sigma(f)
    t = complex(t)
    if abs(t) >= 1:
        raise SeriesDomainError("homotopy needs |t| < 1")
    if t == 0:
        coeffs = np.zeros(len(f), dtype=complex)
        coeffs[1 - f.lo] = 1.0
        return LaurentSeries(f.lo, f.hi, coeffs, EXTERIOR)
    scale = int_powers(t, 1 - f.powers)
    return LaurentSeries(f.lo, f.hi, f.coeffs * scale, EXTERIOR)


def sqrt_transform(f: LaurentSeries, f0: Number, order: Optional[int] = None) -> LaurentSeries:
    """The odd map (f(z^2) - f0)^(1/2)."""
    require_sigma(f)
    g = substitute_power(f, 2) - complex(f0)
    return pow_series(g, Fraction(1, 2), order=order)


def koebe_qc(t: Number, n: int = 1, order: int = DEFAULT_ORDER) -> LaurentSeries:
    """f_{1,t} = z/(1 - t z)^2 and its n-fold root transforms f_{n,t} = f_{1,t}(z^n)^(1/n)."""
    t = complex(t)
    if abs(t) >= 1:
        raise SeriesDomainError("koebe_qc needs |t| < 1")
    if n < 1:
        raise SeriesDomainError("koebe_qc needs n >= 1")
    if n == 1:
        m = np.arange(1, order + 1)
        return LaurentSeries(1, order, m * int_powers(t, m - 1), INTERIOR)
    base = koebe_qc(t, 1, order=-(-order // n))
    return pow_series(substitute_power(base, n), Fraction(1, n), order=order)


def sigma_from_s(f: LaurentSeries) -> LaurentSeries:
    """F(zeta) = 1 / f(1/zeta), taking class S to class Sigma."""
    require_class_s(f)
    val, c = _to_canon(f)
    return reciprocal(_from_canon(val, c, EXTERIOR))


def leading_term(a: LaurentSeries) -> Tuple[int, complex]:
    """(native power, coefficient) of the dominant known term at the expansion point."""
    val, c = _strip(*_to_canon(a))
    power = val if a.domain == INTERIOR else -val
    return power, complex(c[0])
