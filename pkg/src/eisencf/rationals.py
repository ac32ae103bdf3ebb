"""Exact ring rationals: quotients of two lattice elements.

These are the elements of the quotient field of the ring, stored in reduced
form with a canonically chosen unit, so equal values have identical
representations.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ZeroDenominator
from .rings import (
    LatticeInt,
    NearestResult,
    Ring,
    canonical_unit,
    exact_div,
    nearest_scaled,
    ring_gcd,
)


class RingRational:
    """Reduced quotient num/den of two lattice elements, den != 0."""

    __slots__ = ("num", "den")

    def __init__(self, num: LatticeInt, den: LatticeInt) -> None:
        if den.is_zero():
            raise ZeroDenominator("ring rational with zero denominator")
        g = ring_gcd(num, den)
        if not g.is_zero():
            num = exact_div(num, g)
            den = exact_div(den, g)
        u = canonical_unit(den)
        object.__setattr__(self, "num", num * u)
        object.__setattr__(self, "den", den * u)

    def __setattr__(self, name, value):
        raise AttributeError("RingRational is immutable")

    @classmethod
    def from_element(cls, a: LatticeInt) -> "RingRational":
        return cls(a, a.ring.one)

    @property
    def ring(self) -> Ring:
        return self.den.ring

    def coords(self) -> tuple[Fraction, Fraction]:
        """Exact coordinates (u, v) in the ring basis: value = u + v*basis."""
        w = self.num * self.den.conj()
        n = self.den.norm()
        return Fraction(w.x, n), Fraction(w.y, n)

    def scaled_coords(self) -> tuple[int, int, int]:
        """Integers (U, V, N) with value coordinates (U/N, V/N)."""
        w = self.num * self.den.conj()
        return w.x, w.y, self.den.norm()

    def abs_sq(self) -> Fraction:
        return Fraction(self.num.norm(), self.den.norm())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def as_element(self) -> LatticeInt | None:
        """The value as a lattice element, or None if it is not integral."""
        if self.den.norm() != 1:
            return None
        return self.num * self.den.conj()

    def nearest(self) -> NearestResult:
        U, V, N = self.scaled_coords()
        return nearest_scaled(U, V, N, self.den.ring)

    # -- field arithmetic ------------------------------------------------

    def __add__(self, other) -> "RingRational":
        if isinstance(other, RingRational):
            return RingRational(
                self.num * other.den + other.num * self.den,
                self.den * other.den,
            )
        return RingRational(self.num + other * self.den, self.den)

    def __sub__(self, other) -> "RingRational":
        if isinstance(other, RingRational):
            return RingRational(
                self.num * other.den - other.num * self.den,
                self.den * other.den,
            )
        return RingRational(self.num - other * self.den, self.den)

    def __mul__(self, other) -> "RingRational":
        if isinstance(other, RingRational):
            return RingRational(self.num * other.num, self.den * other.den)
        return RingRational(self.num * other, self.den)

    def __neg__(self) -> "RingRational":
        return RingRational(-self.num, self.den)

    def inverse(self) -> "RingRational":
        if self.num.is_zero():
            raise ZeroDenominator("inverse of zero")
        return RingRational(self.den, self.num)

    def __truediv__(self, other: "RingRational") -> "RingRational":
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        # reduced canonical form is unique, so structural equality suffices
        return (
            isinstance(other, RingRational)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((RingRational, self.num, self.den))

    def __repr__(self) -> str:
        return f"RingRational({self.num!r}, {self.den!r})"

    def to_complex(self) -> complex:
        u, v = self.coords()
        if self.ring is Ring.EISENSTEIN:
            return complex(u + v / 2, float(v) * 3**0.5 / 2)
        return complex(u, v)
