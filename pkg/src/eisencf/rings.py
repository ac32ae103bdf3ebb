"""Exact arithmetic on the Eisenstein and Gaussian integer lattices.

Eisenstein integers are stored in the (1, rho) basis where
rho = 1/2 + (sqrt(3)/2) i is a sixth root of unity, so the coordinate pair
(x, y) denotes the complex number x + y*rho and its squared modulus is the
integer quadratic form x^2 + x*y + y^2.  Gaussian integers use the (1, i)
basis with form x^2 + y^2.  Working in these bases keeps every distance
comparison an exact integer (or rational) comparison.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Iterator, NamedTuple, Union

Scalar = Union[int, Fraction]


class EisensteinInt:
    """Element x + y*rho of the triangular lattice Z[rho]."""

    __slots__ = ("x", "y")

    def __init__(self, x: int, y: int) -> None:
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("EisensteinInt is immutable")

    @property
    def ring(self) -> "Ring":
        return Ring.EISENSTEIN

    def norm(self) -> int:
        return self.x * self.x + self.x * self.y + self.y * self.y

    def conj(self) -> "EisensteinInt":
        # conj(rho) = 1 - rho
        return EisensteinInt(self.x + self.y, -self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __add__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "EisensteinInt") -> "EisensteinInt":
        return EisensteinInt(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "EisensteinInt":
        return EisensteinInt(-self.x, -self.y)

    def __mul__(self, other: "EisensteinInt") -> "EisensteinInt":
        # rho^2 = rho - 1
        a, b, c, d = self.x, self.y, other.x, other.y
        return EisensteinInt(a * c - b * d, a * d + b * c + b * d)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EisensteinInt)
            and self.x == other.x
            and self.y == other.y
        )

    def __hash__(self) -> int:
        return hash((EisensteinInt, self.x, self.y))

    def __repr__(self) -> str:
        return f"EisensteinInt({self.x}, {self.y})"

    def to_complex(self) -> complex:
        return complex(self.x + self.y / 2, self.y * math.sqrt(3) / 2)


class GaussianInt:
    """Element x + y*i of the square lattice Z[i]."""

    __slots__ = ("x", "y")

    def __init__(self, x: int, y: int) -> None:
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianInt is immutable")

    @property
    def ring(self) -> "Ring":
        return Ring.GAUSSIAN

    def norm(self) -> int:
        return self.x * self.x + self.y * self.y

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.x, -self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __add__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.x, -self.y)

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        a, b, c, d = self.x, self.y, other.x, other.y
        return GaussianInt(a * c - b * d, a * d + b * c)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GaussianInt)
            and self.x == other.x
            and self.y == other.y
        )

    def __hash__(self) -> int:
        return hash((GaussianInt, self.x, self.y))

    def __repr__(self) -> str:
        return f"GaussianInt({self.x}, {self.y})"

    def to_complex(self) -> complex:
        return complex(self.x, self.y)


LatticeInt = Union[EisensteinInt, GaussianInt]


class Ring(enum.Enum):
    """Selects the lattice: its element type, norm form and unit group."""

    EISENSTEIN = "eisenstein"
    GAUSSIAN = "gaussian"

    def element(self, x: int, y: int) -> LatticeInt:
        return (EisensteinInt if self is Ring.EISENSTEIN else GaussianInt)(x, y)

    @property
    def zero(self) -> LatticeInt:
        return self.element(0, 0)

    @property
    def one(self) -> LatticeInt:
        return self.element(1, 0)

    def qf(self, s, t):
        """Squared modulus of s + t*basis, for any scalar type."""
        if self is Ring.EISENSTEIN:
            return s * s + s * t + t * t
        return s * s + t * t

    def conj_coords(self, s, t):
        """Coordinates of the complex conjugate of s + t*basis."""
        if self is Ring.EISENSTEIN:
            return s + t, -t
        return s, -t

    def mul_coords(self, a: int, b: int, u, v):
        """Coordinates of (a + b*basis) * (u + v*basis); u, v any scalar."""
        if self is Ring.EISENSTEIN:
            return a * u - b * v, a * v + b * u + b * v
        return a * u - b * v, a * v + b * u

    @property
    def covering_radius_sq(self) -> Fraction:
        # max distance from a point of the plane to the lattice, squared
        return Fraction(1, 3) if self is Ring.EISENSTEIN else Fraction(1, 2)

    @property
    def min_quotient_norm(self) -> int:
        # smallest norm of a partial quotient a_n, n >= 1
        return 3 if self is Ring.EISENSTEIN else 2

    @property
    def iterate_lower_bound_sq(self) -> int:
        # |z_n|^2 >= this for n >= 1 along a nearest-integer expansion
        return 3 if self is Ring.EISENSTEIN else 2

    def units(self) -> list[LatticeInt]:
        if self is Ring.EISENSTEIN:
            coords = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
        else:
            coords = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        return [self.element(x, y) for x, y in coords]


def tie_key(a: LatticeInt) -> tuple[int, int, int]:
    """Deterministic total order used to break nearest-point ties."""
    return (a.norm(), a.x, a.y)


class NearestResult(NamedTuple):
    element: LatticeInt
    tie: bool
    dist_sq: Fraction


def _round_div(p: int, q: int) -> int:
    """Nearest integer to p/q for q > 0, halves rounded up."""
    return (2 * p + q) // (2 * q)


_OFFSETS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]


def nearest_scaled(U: int, V: int, N: int, ring: Ring) -> NearestResult:
    """Nearest lattice point to the point with coordinates (U/N, V/N).

    All comparisons are exact integer comparisons of squared distances
    scaled by N^2.  The 3x3 block around the coordinatewise rounding
    provably contains every minimizer for both lattices.
    """
    bu = _round_div(U, N)
    bv = _round_div(V, N)
    best: list[tuple[int, LatticeInt]] = []
    best_num = None
    for dx, dy in _OFFSETS:
        cx = bu + dx
        cy = bv + dy
        s = U - cx * N
        t = V - cy * N
        if ring is Ring.EISENSTEIN:
            num = s * s + s * t + t * t
        else:
            num = s * s + t * t
        if best_num is None or num < best_num:
            best_num = num
            best = [(num, ring.element(cx, cy))]
        elif num == best_num:
            best.append((num, ring.element(cx, cy)))
    tie = len(best) > 1
    winner = min((e for _, e in best), key=tie_key)
    return NearestResult(winner, tie, Fraction(best_num, N * N))


def nearest_lattice(u: Scalar, v: Scalar, ring: Ring) -> NearestResult:
    """Nearest lattice point to u + v*basis with exact tie detection."""
    un, ud = u.numerator, u.denominator
    vn, vd = v.numerator, v.denominator
    N = ud * vd // math.gcd(ud, vd)
    return nearest_scaled(un * (N // ud), vn * (N // vd), N, ring)


def enumerate_up_to_norm(N: int, ring: Ring) -> Iterator[LatticeInt]:
    """Yield every element with 1 <= norm <= N in (norm, x, y) order."""
    if N < 0:
        raise ValueError("norm bound must be nonnegative")
    for _, x, y in sorted(_lattice_triples(N, ring)):
        yield ring.element(x, y)


def count_up_to_norm(N: int, ring: Ring) -> int:
    return sum(1 for _ in _lattice_triples(N, ring))


def _lattice_triples(N: int, ring: Ring) -> Iterator[tuple[int, int, int]]:
    if N < 1:
        return
    if ring is Ring.EISENSTEIN:
        ymax = math.isqrt(4 * N // 3)
        for y in range(-ymax, ymax + 1):
            disc = 4 * N - 3 * y * y
            if disc < 0:
                continue
            s = math.isqrt(disc)
            for x in range((-y - s) // 2 - 1, (-y + s) // 2 + 2):
                n = x * x + x * y + y * y
                if 1 <= n <= N:
                    yield n, x, y
    else:
        ymax = math.isqrt(N)
        for y in range(-ymax, ymax + 1):
            s = math.isqrt(N - y * y)
            for x in range(-s, s + 1):
                n = x * x + y * y
                if 1 <= n <= N:
                    yield n, x, y


def nearest_quotient(a: LatticeInt, b: LatticeInt) -> LatticeInt:
    """Lattice point nearest to a/b; the remainder a - q*b has norm < norm(b)."""
    w = a * b.conj()
    n = b.norm()
    return a.ring.element(_round_div(w.x, n), _round_div(w.y, n))


def ring_gcd(a: LatticeInt, b: LatticeInt) -> LatticeInt:
    """Greatest common divisor via norm-decreasing nearest-quotient division."""
    while not b.is_zero():
        a, b = b, a - nearest_quotient(a, b) * b
    return a


def exact_div(a: LatticeInt, b: LatticeInt) -> LatticeInt:
    """Quotient a/b when b divides a exactly."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero element")
    w = a * b.conj()
    n = b.norm()
    if w.x % n or w.y % n:
        raise ValueError(f"{b!r} does not divide {a!r}")
    return a.ring.element(w.x // n, w.y // n)


def canonical_unit(d: LatticeInt) -> LatticeInt:
    """Unit u such that d*u has the lexicographically largest coordinates."""
    ring = d.ring
    return max(ring.units(), key=lambda u: ((d * u).x, (d * u).y))
