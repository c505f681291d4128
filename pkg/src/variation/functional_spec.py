"""Distortion functionals J(f) = sum w_js f^(s)(z_j) + w_a f(a), linearized at the identity."""

import json
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError

from src.errors import DegenerateError, DomainError, InputError

HYDRODYNAMIC = "hydrodynamic"
F1 = "f1"
NORMALIZATIONS = (HYDRODYNAMIC, F1)


@dataclass(frozen=True)
class FunctionalTerm:
    point: complex
    order: int = 0
    weight: complex = 1.0


class TermFile(BaseModel):
    point: Tuple[float, float]
    order: int = 0
    weight: Tuple[float, float] = (1.0, 0.0)


class FunctionalFile(BaseModel):
    terms: List[TermFile] = []
    interior_point: Optional[Tuple[float, float]] = None
    interior_weight: Tuple[float, float] = (0.0, 0.0)
    normalization: Literal["hydrodynamic", "f1"] = HYDRODYNAMIC
    name: str = ""


@dataclass(frozen=True)
class FunctionalSpec:
    """Point weights of grad J(0); the z_j lie in the exterior disk, a in the disk."""
    terms: Tuple[FunctionalTerm, ...] = ()
    interior_point: Optional[complex] = None
    interior_weight: complex = 0.0
    normalization: str = HYDRODYNAMIC
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.normalization not in NORMALIZATIONS:
            raise DomainError(f"normalization must be one of {NORMALIZATIONS}")
        for term in self.terms:
            if term.order < 0:
                raise DomainError("derivative order must be non-negative")
            if abs(term.point) <= 1:
                raise DomainError(f"evaluation point {term.point} is not in the exterior disk")
        if self.interior_point is not None and abs(self.interior_point) >= 1:
            raise DomainError(f"interior point {self.interior_point} is not in the unit disk")
        weights = [t.weight for t in self.terms]
        if self.interior_point is not None:
            weights.append(self.interior_weight)
        if not any(w != 0 for w in weights):
            raise DegenerateError("functional has no nonzero weight (grad J(0) = 0)")

    @classmethod
    def coefficient(cls, n: int, radius: float = 2.0, points: int = 64,
                    normalization: str = HYDRODYNAMIC) -> "FunctionalSpec":
        """b_n = (1/2 pi i) contour integral of f z^(n-1) by the trapezoid rule on |z| = radius."""
        if n < 1:
            raise DomainError("coefficient functional needs n >= 1")
        if radius <= 1:
            raise DomainError("contour radius must exceed 1")
        z = radius * np.exp(2j * np.pi * np.arange(points) / points)
        terms = tuple(FunctionalTerm(complex(zj), 0, complex(zj ** n / points)) for zj in z)
        return cls(terms, normalization=normalization, name=f"b{n}")

    @classmethod
    def evaluation(cls, point: complex, order: int = 0, weight: complex = 1.0,
                   normalization: str = HYDRODYNAMIC) -> "FunctionalSpec":
        return cls((FunctionalTerm(complex(point), order, complex(weight)),), normalization=normalization,
                   name=f"f^({order})({complex(point):.3g})")

    def value_terms(self):
        """(point, weight) of every f-value term, the interior point included."""
        out = [(t.point, t.weight) for t in self.terms if t.order == 0]
        if self.interior_point is not None:
            out.append((self.interior_point, self.interior_weight))
        return out

    def identity_value(self) -> complex:
        """J(id)."""
        total = 0j
        for term in self.terms:
            if term.order == 0:
                total += term.weight * term.point
            elif term.order == 1:
                total += term.weight
        if self.interior_point is not None:
            total += self.interior_weight * self.interior_point
        return total

    def evaluate(self, solution) -> complex:
        """J(f) for a solved map exposing ``evaluate`` and ``derivative``."""
        total = 0j
        for term in self.terms:
            total += term.weight * complex(solution.derivative(term.point, term.order))
        if self.interior_point is not None:
            total += self.interior_weight * complex(solution.evaluate(self.interior_point))
        return total

    def increment(self, solution) -> complex:
        """J(f^mu) - J(id)."""
        return self.evaluate(solution) - self.identity_value()

    def scaled(self, c: complex) -> "FunctionalSpec":
        terms = tuple(FunctionalTerm(t.point, t.order, t.weight * c) for t in self.terms)
        return FunctionalSpec(terms, self.interior_point, self.interior_weight * c, self.normalization, self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "normalization": self.normalization,
            "terms": [{"point": _pair(t.point), "order": t.order, "weight": _pair(t.weight)} for t in self.terms],
            "interior_point": None if self.interior_point is None else _pair(self.interior_point),
            "interior_weight": _pair(self.interior_weight),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionalSpec":
        try:
            model = FunctionalFile(**data)
        except (ValidationError, TypeError) as exc:
            raise InputError(f"invalid functional: {exc}") from exc
        terms = tuple(FunctionalTerm(complex(*t.point), t.order, complex(*t.weight)) for t in model.terms)
        a = None if model.interior_point is None else complex(*model.interior_point)
        return cls(terms, a, complex(*model.interior_weight), model.normalization, model.name)


def load_functional(path: str) -> FunctionalSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (IOError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read functional {path}: {exc}") from exc
    return FunctionalSpec.from_dict(data)


def _pair(v: complex) -> List[float]:
    v = complex(v)
    return [v.real, v.imag]


def pole_weight(order: int) -> float:
    """s! in d^s/dz^s 1/(w - z) = s! / (w - z)^(s+1)."""
    return float(math.factorial(order))
