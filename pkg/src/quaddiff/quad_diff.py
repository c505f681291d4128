"""Integrable holomorphic quadratic differentials as sums of rational terms."""

import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError
from scipy.special import comb

from src.errors import DegenerateError, DomainError, InputError, IntegrabilityError
from src.quaddiff.quadrature import DISK, EXTERIOR, build_rule

logger = logging.getLogger(__name__)

MONOMIAL = "monomial"
POLYNOMIAL = "polynomial"
POLE = "pole"
RHO = "rho"


@dataclass(frozen=True)
class QuadTerm:
    """One rational piece.

    monomial: c z^p; polynomial: sum c_k z^k; pole: c / (z - a)^m;
    rho: (e - 1) / ((z - 1)(z - e)), with e = infinity meaning -1 / (z - 1).
    """
    kind: str
    coefficient: complex = 1.0
    power: int = 0
    coefficients: Tuple[complex, ...] = ()
    location: complex = 0j
    order: int = 1
    at_infinity: bool = False

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == MONOMIAL:
            return self.coefficient * z ** self.power
        if self.kind == POLYNOMIAL:
            return np.polyval(np.array(self.coefficients[::-1], dtype=complex), z) if self.coefficients else np.zeros_like(z)
        if self.kind == POLE:
            return self.coefficient / (z - self.location) ** self.order
        if self.at_infinity:
            return -self.coefficient / (z - 1)
        e = self.location
        return self.coefficient * (e - 1) / ((z - 1) * (z - e))

    def poles(self) -> List[Tuple[complex, int]]:
        if self.kind == MONOMIAL and self.power < 0:
            return [(0j, -self.power)]
        if self.kind == POLE:
            return [(complex(self.location), self.order)]
        if self.kind == RHO:
            return [(1 + 0j, 1)] if self.at_infinity else [(1 + 0j, 1), (complex(self.location), 1)]
        return []

    def infinity_expansion(self) -> Dict[int, complex]:
        """Coefficients of z^p at infinity for p >= -2."""
        out: Dict[int, complex] = {}
        if self.kind == MONOMIAL:
            if self.power >= -2:
                out[self.power] = self.coefficient
        elif self.kind == POLYNOMIAL:
            out.update({k: c for k, c in enumerate(self.coefficients)})
        elif self.kind == POLE:
            # c z^-m sum_j C(m+j-1, j) a^j z^-j
            for j in range(0, 3):
                p = -self.order - j
                if p >= -2:
                    out[p] = self.coefficient * comb(self.order + j - 1, j, exact=True) * self.location ** j
        elif self.at_infinity:
            out = {-1: -self.coefficient, -2: -self.coefficient}
        else:
            out = {-2: self.coefficient * (self.location - 1)}
        return out

    def scaled(self, c: complex) -> "QuadTerm":
        if self.kind == POLYNOMIAL:
            return QuadTerm(POLYNOMIAL, coefficients=tuple(complex(v) * c for v in self.coefficients))
        return QuadTerm(self.kind, self.coefficient * c, self.power, self.coefficients,
                        self.location, self.order, self.at_infinity)

    def to_dict(self) -> dict:
        if self.kind == MONOMIAL:
            return {"kind": MONOMIAL, "c": _pair(self.coefficient), "p": self.power}
        if self.kind == POLYNOMIAL:
            return {"kind": POLYNOMIAL, "coeffs": [_pair(c) for c in self.coefficients]}
        if self.kind == POLE:
            return {"kind": POLE, "c": _pair(self.coefficient), "a": _pair(self.location), "m": self.order}
        return {"kind": RHO, "c": _pair(self.coefficient),
                "e": None if self.at_infinity else _pair(self.location)}


def _pair(v: complex) -> List[float]:
    v = complex(v)
    return [v.real, v.imag]


class TermModel(BaseModel):
    kind: Literal["monomial", "polynomial", "pole", "rho"]
    c: Tuple[float, float] = (1.0, 0.0)
    p: int = 0
    coeffs: List[Tuple[float, float]] = []
    a: Tuple[float, float] = (0.0, 0.0)
    m: int = 1
    e: Optional[Tuple[float, float]] = None


class QuadDiffFile(BaseModel):
    domain: Literal["disk", "exterior"] = "disk"
    terms: List[TermModel]


@dataclass(frozen=True, eq=False)
class QuadDiff:
    terms: Tuple[QuadTerm, ...]
    domain: str = DISK

    def __post_init__(self):
        if self.domain not in (DISK, EXTERIOR):
            raise DomainError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "terms", tuple(self.terms))
        self.check_integrable()

    # --- constructors ---
    @classmethod
    def monomial(cls, c: complex, p: int, domain: str = DISK) -> "QuadDiff":
        return cls((QuadTerm(MONOMIAL, complex(c), int(p)),), domain)

    @classmethod
    def constant(cls, c: complex, domain: str = DISK) -> "QuadDiff":
        return cls.monomial(c, 0, domain)

    @classmethod
    def polynomial(cls, coefficients: Iterable[complex], domain: str = DISK) -> "QuadDiff":
        return cls((QuadTerm(POLYNOMIAL, coefficients=tuple(complex(c) for c in coefficients)),), domain)

    @classmethod
    def pole(cls, c: complex, a: complex, m: int = 1, domain: str = DISK) -> "QuadDiff":
        return cls((QuadTerm(POLE, complex(c), location=complex(a), order=int(m)),), domain)

    @classmethod
    def rho(cls, e: Optional[complex], c: complex = 1.0, domain: str = DISK) -> "QuadDiff":
        if e is None or np.isinf(e):
            return cls((QuadTerm(RHO, complex(c), at_infinity=True),), domain)
        if e == 1:
            raise DegenerateError("rho kernel degenerates at e = 1")
        return cls((QuadTerm(RHO, complex(c), location=complex(e)),), domain)

    # --- algebra ---
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for term in self.terms:
            out = out + term(z)
        return out

    def __add__(self, other: "QuadDiff") -> "QuadDiff":
        if self.domain != other.domain:
            raise DomainError("cannot add quadratic differentials on different domains")
        return QuadDiff(self.terms + other.terms, self.domain)

    def __mul__(self, c: complex) -> "QuadDiff":
        return QuadDiff(tuple(t.scaled(complex(c)) for t in self.terms), self.domain)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other: "QuadDiff") -> "QuadDiff":
        return self + (-other)

    def is_zero(self) -> bool:
        for term in self.terms:
            if term.kind == POLYNOMIAL:
                if any(c != 0 for c in term.coefficients):
                    return False
            elif term.coefficient != 0:
                return False
        return True

    def poles(self) -> List[Tuple[complex, int]]:
        return [p for term in self.terms for p in term.poles()]

    def check_integrable(self, tol: float = 1e-10):
        for a, m in self.poles():
            inside = abs(a) <= 1 + 1e-12 if self.domain == DISK else abs(a) >= 1 - 1e-12
            if inside and m > 1:
                raise IntegrabilityError(f"pole of order {m} at {a} is not integrable on the {self.domain}")
        if self.domain == EXTERIOR:
            expansion: Dict[int, complex] = {}
            scale = 1.0
            for term in self.terms:
                for p, c in term.infinity_expansion().items():
                    expansion[p] = expansion.get(p, 0) + c
                    scale = max(scale, abs(c))
            bad = {p: c for p, c in expansion.items() if abs(c) > tol * scale}
            if bad:
                worst = max(bad)
                raise IntegrabilityError(f"psi is not O(z^-3) at infinity: z^{worst} coefficient {bad[worst]:.3g}")

    # --- serialization ---
    def to_dict(self) -> dict:
        return {"domain": self.domain, "terms": [t.to_dict() for t in self.terms]}

    @classmethod
    def from_dict(cls, data: dict) -> "QuadDiff":
        try:
            model = QuadDiffFile(**data)
        except (ValidationError, TypeError) as exc:
            raise InputError(f"invalid quadratic differential: {exc}") from exc
        terms = []
        for t in model.terms:
            c = complex(*t.c)
            if t.kind == MONOMIAL:
                terms.append(QuadTerm(MONOMIAL, c, t.p))
            elif t.kind == POLYNOMIAL:
                terms.append(QuadTerm(POLYNOMIAL, coefficients=tuple(complex(*v) for v in t.coeffs)))
            elif t.kind == POLE:
                terms.append(QuadTerm(POLE, c, location=complex(*t.a), order=t.m))
            elif t.e is None:
                terms.append(QuadTerm(RHO, c, at_infinity=True))
            else:
                e = complex(*t.e)
                if e == 1:
                    raise DegenerateError("rho kernel degenerates at e = 1")
                terms.append(QuadTerm(RHO, c, location=e))
        return cls(tuple(terms), model.domain)


def load_quaddiff(path: str) -> QuadDiff:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (IOError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read quadratic differential {path}: {exc}") from exc
    return QuadDiff.from_dict(data)


def l1_norm(psi: QuadDiff, tol: float = 1e-8, max_cells: Optional[int] = None) -> float:
    """||psi||_1 over its domain by adaptive polar quadrature."""
    kwargs = {"max_cells": max_cells} if max_cells else {}
    rule = build_rule(lambda z: np.abs(psi(z)), psi.domain, tol, **kwargs)
    logger.debug("l1_norm: %d cells, error %.2e", rule.cells, rule.error)
    return float(rule.estimates[0].real)


def a1sq_from_vector(x: Iterable[complex]) -> QuadDiff:
    """psi = (1/pi) sum sqrt(mn) x_m x_n z^(m+n-2) = omega^2 on the disk."""
    x = np.asarray(list(x), dtype=complex)
    if x.size == 0:
        return QuadDiff.polynomial([0.0])
    omega = np.sqrt(np.arange(1, len(x) + 1)) * x
    return QuadDiff.polynomial(np.convolve(omega, omega) / np.pi)
