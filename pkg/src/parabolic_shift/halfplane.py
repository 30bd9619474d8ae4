"""Parabolic self-maps of the upper half-plane in Herglotz form

    f(z) = z + beta + int (1 + t z) / (t - z) dmu(t).

Points of the half-plane are plain Python ``complex`` values with positive
imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _backend
from .errors import DomainError
from .measure import RealMeasure, moment
from .quadrature import DEFAULT_MAX_DEPTH, DEFAULT_ORDER, DEFAULT_RTOL, gauss_legendre


@dataclass(frozen=True)
class QuadratureSettings:
    order: int = DEFAULT_ORDER
    rtol: float = DEFAULT_RTOL
    max_depth: int = DEFAULT_MAX_DEPTH

    def rule(self):
        return gauss_legendre(self.order)


@dataclass(frozen=True)
class ParabolicMap:
    """The pair ``(beta, mu)``; the identity ``beta = 0, mu = 0`` is rejected."""

    beta: float
    mu: RealMeasure = field(default_factory=RealMeasure)
    quad: QuadratureSettings = field(default_factory=QuadratureSettings, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")
        if self.beta == 0.0 and self.mu.is_empty:
            raise ValueError(
                "beta and mu must not both be null: f(z) = z is not a parabolic map"
            )

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def scaled(self, factor: float) -> "ParabolicMap":
        return ParabolicMap(self.beta * factor, self.mu.scaled(factor), self.quad)


def _check_point(z) -> complex:
    z = complex(z)
    if not (z.imag > 0 and math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"point {z!r} is not in the upper half-plane")
    return z


def _integral(fmap: ParabolicMap, z: complex) -> tuple[float, float]:
    nodes, weights = fmap.quad.rule()
    return _backend.kernel.herglotz_integral(
        fmap.mu.packed, z.real, z.imag, nodes, weights, fmap.quad.rtol, fmap.quad.max_depth
    )


def evaluate(fmap: ParabolicMap, z: complex) -> complex:
    """``f(z)``.  The imaginary part is ``Im z`` plus :func:`imaginary_gain`,
    so ``Im f(z) >= Im z`` exactly in floating point.

    Raises:
        DomainError: ``Im z <= 0``.
        QuadratureFailure: a piece or tail integral did not stabilize.
    """
    z = _check_point(z)
    re, im = _integral(fmap, z)
    return complex(z.real + (fmap.beta + re), z.imag + im)


def imaginary_gain(fmap: ParabolicMap, z: complex) -> float:
    """``Im f(z) - Im z = Im z * int (1 + t**2) / |t - z|**2 dmu(t)``."""
    z = _check_point(z)
    return _integral(fmap, z)[1]


def drift(fmap: ParabolicMap) -> float:
    """``beta - int t dmu``, the horizontal speed of finite-shift orbits.

    Raises:
        UndefinedMoment: ``int |t| dmu`` diverges.
    """
    return fmap.beta - moment(fmap.mu, "first")
