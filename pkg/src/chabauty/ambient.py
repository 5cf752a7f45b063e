"""Heisenberg group arithmetic — products, commutators, automorphisms, dilations.

H = ℂ × ℝ with (z₁,t₁)(z₂,t₂) = (z₁+z₂, t₁+t₂+½·Im(z₁·conj z₂)).  Coordinates
may be floats or ``Fraction``; rational input stays exact through every
operation here.  The commutator convention is [x, y] = y⁻¹x⁻¹yx = (xy)⁻¹(yx),
the one for which [x, y] = (0, Im(conj z₁·z₂)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from chabauty.errors import DegenerateBasisError, DomainError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HeisElement:
    x: Real = 0
    y: Real = 0
    t: Real = 0

    @classmethod
    def from_complex(cls, z: complex, t: Real = 0) -> HeisElement:
        return cls(z.real, z.imag, t)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def is_central(self) -> bool:
        return self.x == 0 and self.y == 0

    def __mul__(self, other: HeisElement) -> HeisElement:
        return heis_mul(self, other)

    def inverse(self) -> HeisElement:
        return HeisElement(-self.x, -self.y, -self.t)

    def norm(self) -> float:
        """Euclidean norm of the coordinates (z, t) ∈ ℝ³."""
        return math.sqrt(float(self.x) ** 2 + float(self.y) ** 2 + float(self.t) ** 2)

    def as_tuple(self) -> tuple[Real, Real, Real]:
        return (self.x, self.y, self.t)


IDENTITY = HeisElement(0, 0, 0)


def symplectic(x1: Real, y1: Real, x2: Real, y2: Real) -> Real:
    """Im(conj(z₁)·z₂) for z₁ = x₁+iy₁, z₂ = x₂+iy₂."""
    return x1 * y2 - y1 * x2


def heis_mul(a: HeisElement, b: HeisElement) -> HeisElement:
    # Im(z₁·conj z₂) = −Im(conj z₁·z₂)
    return HeisElement(
        a.x + b.x,
        a.y + b.y,
        a.t + b.t - HALF * symplectic(a.x, a.y, b.x, b.y),
    )


def heis_commutator(a: HeisElement, b: HeisElement) -> HeisElement:
    return HeisElement(0, 0, symplectic(a.x, a.y, b.x, b.y))


def heis_power(a: HeisElement, k: int) -> HeisElement:
    # powers of one element commute, so the correction term vanishes
    return HeisElement(k * a.x, k * a.y, k * a.t)


# ── automorphisms ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class HeisAutomorphism:
    """α = ι_w ∘ M: the linear part M acts by (z, t) ↦ (Mz, det(M)·t),
    the inner part w by conjugation with (w, 0), i.e. (z, t) ↦ (z, t + Im(w·conj z)).
    """

    matrix: tuple[Real, Real, Real, Real] = (1, 0, 0, 1)
    inner: tuple[Real, Real] = (0, 0)

    def __post_init__(self) -> None:
        if self.det == 0:
            raise DegenerateBasisError(f"singular matrix {self.matrix}")

    @property
    def det(self) -> Real:
        a, b, c, d = self.matrix
        return a * d - b * c

    @classmethod
    def dilation(cls, s: Real) -> HeisAutomorphism:
        if s <= 0:
            raise DomainError(f"dilation factor must be positive, got {s}")
        return cls((s, 0, 0, s))

    @classmethod
    def conjugation(cls, w: complex | tuple[Real, Real]) -> HeisAutomorphism:
        if isinstance(w, complex):
            w = (w.real, w.imag)
        return cls((1, 0, 0, 1), tuple(w))

    def linear(self, x: Real, y: Real) -> tuple[Real, Real]:
        a, b, c, d = self.matrix
        return a * x + b * y, c * x + d * y

    def compose(self, other: HeisAutomorphism) -> HeisAutomorphism:
        """self ∘ other."""
        a1, b1, c1, d1 = self.matrix
        a2, b2, c2, d2 = other.matrix
        matrix = (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
        wx, wy = self.linear(*other.inner)
        return HeisAutomorphism(matrix, (self.inner[0] + wx, self.inner[1] + wy))

    def __call__(self, x: HeisElement) -> HeisElement:
        return aut_apply(self, x)


def aut_apply(alpha: HeisAutomorphism, x: HeisElement) -> HeisElement:
    mx, my = alpha.linear(x.x, x.y)
    wx, wy = alpha.inner
    # Im(w·conj z') = Im(conj z'·w)
    return HeisElement(mx, my, alpha.det * x.t + symplectic(mx, my, wx, wy))


def dilate(s: Real, x: HeisElement) -> HeisElement:
    """φ_s(z, t) = (sz, s²t)."""
    if s <= 0:
        raise DomainError(f"dilation factor must be positive, got {s}")
    return HeisElement(s * x.x, s * x.y, s * s * x.t)
