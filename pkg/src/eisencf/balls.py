"""Certified arbitrary-precision arithmetic: midpoint-radius balls.

A ``RealBall`` is an mpf midpoint plus an mpf radius that is a rigorous
upper bound on the distance to the true value.  Midpoints are computed with
round-to-nearest at the working precision; radii are combined with
round-up arithmetic at a short fixed precision, so every derived bound is
itself rigorous.  ``ComplexAP`` stores a complex number as the pair of its
real coordinates in the lattice basis (value = u + v*basis), which keeps
every lattice operation a rational-coefficient operation on the two
coordinates.

Guard count: each midpoint operation below contributes at most 2 ulp of
rounding error at the working precision, accounted into the radius with a
factor-4 safety margin (g = 2 extra bits per operation).
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import PrecisionInsufficient
from .rings import LatticeInt, NearestResult, Ring, tie_key

_RAD_PREC = 53  # precision for radius bookkeeping (round-up, so rigorous)

_mpf = mpmath.mpf
_ZERO = _mpf(0)


def _exact(n: int):
    """Exact mpf of an arbitrary-size integer."""
    return mpmath.fadd(n, 0, exact=True)


def _neg(x):
    """Exact negation (the unary operator would round at the ambient precision)."""
    return mpmath.fneg(x, exact=True)


def _abs(x):
    """Exact absolute value (never rounds, unlike abs() on mpf)."""
    return _neg(x) if x < 0 else x


def _add_up(x, y):
    return mpmath.fadd(x, y, prec=_RAD_PREC, rounding="u")


def _mul_up(x, y):
    return mpmath.fmul(x, y, prec=_RAD_PREC, rounding="u")


def _div_up(x, y):
    return mpmath.fdiv(x, y, prec=_RAD_PREC, rounding="u")


def _sub_down(x, y):
    return mpmath.fsub(x, y, prec=_RAD_PREC, rounding="d")


def sqrt_up(x, prec: int = 200) -> mpmath.mpf:
    """Rigorous upper bound for sqrt(x), x >= 0."""
    if x <= 0:
        return _ZERO
    with mpmath.workprec(prec + 10):
        s = mpmath.sqrt(x)
    return mpmath.fmul(s, mpmath.fadd(1, mpmath.ldexp(1, -prec), exact=True), prec=prec + 10, rounding="u")


def sqrt_down(x, prec: int = 200) -> mpmath.mpf:
    """Rigorous lower bound for sqrt(x), clipped at 0."""
    if x <= 0:
        return _ZERO
    with mpmath.workprec(prec + 10):
        s = mpmath.sqrt(x)
    s = mpmath.fmul(s, mpmath.fsub(1, mpmath.ldexp(1, -prec), exact=True), prec=prec + 10, rounding="d")
    return s if s > 0 else _ZERO


class RealBall:
    """Midpoint-radius interval for one real quantity."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad, prec: int) -> None:
        self.mid = mid
        self.rad = rad
        self.prec = prec

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_int(cls, n: int, prec: int) -> "RealBall":
        return cls(_exact(n), _ZERO, prec)

    @classmethod
    def from_fraction(cls, fr: Fraction, prec: int) -> "RealBall":
        mid = mpmath.fdiv(
            _exact(fr.numerator), _exact(fr.denominator), prec=prec, rounding="n"
        )
        return cls(mid, cls._ulp(mid, prec), prec)

    @classmethod
    def from_mpf(cls, mid, prec: int, rad=_ZERO) -> "RealBall":
        return cls(mid, rad, prec)

    @staticmethod
    def _ulp(mid, prec: int):
        # bound on the round-to-nearest error of one operation at `prec`
        return _mul_up(_abs(mid), mpmath.ldexp(1, 2 - prec)) if mid else _ZERO

    def _wrap(self, mid, extra_rad) -> "RealBall":
        return RealBall(mid, _add_up(extra_rad, self._ulp(mid, self.prec)), self.prec)

    # -- arithmetic ------------------------------------------------------

    def add(self, other: "RealBall") -> "RealBall":
        mid = mpmath.fadd(self.mid, other.mid, prec=self.prec, rounding="n")
        return self._wrap(mid, _add_up(self.rad, other.rad))

    def sub(self, other: "RealBall") -> "RealBall":
        mid = mpmath.fsub(self.mid, other.mid, prec=self.prec, rounding="n")
        return self._wrap(mid, _add_up(self.rad, other.rad))

    def mul(self, other: "RealBall") -> "RealBall":
        mid = mpmath.fmul(self.mid, other.mid, prec=self.prec, rounding="n")
        r = _add_up(
            _add_up(_mul_up(_abs(self.mid), other.rad), _mul_up(_abs(other.mid), self.rad)),
            _mul_up(self.rad, other.rad),
        )
        return self._wrap(mid, r)

    def div(self, other: "RealBall") -> "RealBall":
        # |x/y - mx/my| <= (rx*|my| + |mx|*ry) / (|my| * (|my| - ry))
        den_low = _sub_down(_abs(other.mid), other.rad)
        if den_low <= 0:
            raise PrecisionInsufficient("division by an interval containing zero")
        mid = mpmath.fdiv(self.mid, other.mid, prec=self.prec, rounding="n")
        numer = _add_up(
            _mul_up(self.rad, _abs(other.mid)), _mul_up(_abs(self.mid), other.rad)
        )
        r = _div_up(numer, mpmath.fmul(_abs(other.mid), den_low, prec=_RAD_PREC, rounding="d"))
        return self._wrap(mid, r)

    def add_int(self, n: int) -> "RealBall":
        mid = mpmath.fadd(self.mid, _exact(n), prec=self.prec, rounding="n")
        return self._wrap(mid, self.rad)

    def mul_int(self, n: int) -> "RealBall":
        mid = mpmath.fmul(self.mid, _exact(n), prec=self.prec, rounding="n")
        return self._wrap(mid, _mul_up(self.rad, _exact(abs(n))))

    def neg(self) -> "RealBall":
        return RealBall(_neg(self.mid), self.rad, self.prec)

    # -- bounds ----------------------------------------------------------

    def lower(self):
        return mpmath.fsub(self.mid, self.rad, prec=self.prec, rounding="d")

    def upper(self):
        return mpmath.fadd(self.mid, self.rad, prec=self.prec, rounding="u")

    def contains_zero(self) -> bool:
        return _abs(self.mid) <= self.rad

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"RealBall({mpmath.nstr(self.mid, 12)} +- {mpmath.nstr(self.rad, 3)})"


def _qf_ball(u: RealBall, v: RealBall, ring: Ring) -> RealBall:
    if ring is Ring.EISENSTEIN:
        return u.mul(u).add(u.mul(v)).add(v.mul(v))
    return u.mul(u).add(v.mul(v))


_SQRT3_CACHE: dict[int, RealBall] = {}


def sqrt3_ball(prec: int) -> RealBall:
    ball = _SQRT3_CACHE.get(prec)
    if ball is None:
        with mpmath.workprec(prec):
            mid = mpmath.sqrt(mpmath.mpf(3))
        ball = RealBall(mid, _mul_up(mid, mpmath.ldexp(1, 2 - prec)), prec)
        _SQRT3_CACHE[prec] = ball
    return ball


_OFFSETS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]


def _nearest_int(x) -> int:
    """Nearest integer to an mpf, computed exactly (mpf values are dyadic)."""
    n = int(x)
    f = mpmath.fsub(x, n, exact=True)
    if f >= 0.5:
        n += 1
    elif f < -0.5:
        n -= 1
    return n


class ComplexAP:
    """Arbitrary-precision complex value with a tracked error bound.

    The value is u + v*basis where (u, v) are the lattice-basis
    coordinates; basis is rho for the Eisenstein ring and i for the
    Gaussian ring.
    """

    __slots__ = ("u", "v", "ring")

    def __init__(self, u: RealBall, v: RealBall, ring: Ring) -> None:
        self.u = u
        self.v = v
        self.ring = ring

    @property
    def precision_bits(self) -> int:
        return self.u.prec

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_coords(cls, u: Fraction, v: Fraction, ring: Ring, prec: int) -> "ComplexAP":
        return cls(RealBall.from_fraction(u, prec), RealBall.from_fraction(v, prec), ring)

    @classmethod
    def from_rational(cls, z, prec: int) -> "ComplexAP":
        u, v = z.coords()
        return cls.from_coords(u, v, z.ring, prec)

    @classmethod
    def from_cartesian(cls, re: Fraction, im: Fraction, ring: Ring, prec: int) -> "ComplexAP":
        """Exact rational cartesian parts re + im*i, converted to the basis."""
        if ring is Ring.GAUSSIAN:
            return cls.from_coords(re, im, ring, prec)
        # u = re - im/sqrt(3), v = 2*im/sqrt(3)
        s3 = sqrt3_ball(prec)
        imb = RealBall.from_fraction(im, prec)
        t = imb.div(s3)
        u = RealBall.from_fraction(re, prec).sub(t)
        v = t.mul_int(2)
        return cls(u, v, ring)

    @classmethod
    def from_mpf_cartesian(cls, re, im, ring: Ring, prec: int, err=_ZERO) -> "ComplexAP":
        """Cartesian parts given as mpf values accurate to within `err`."""
        if ring is Ring.GAUSSIAN:
            return cls(RealBall.from_mpf(re, prec, err), RealBall.from_mpf(im, prec, err), ring)
        s3 = sqrt3_ball(prec)
        imb = RealBall.from_mpf(im, prec, err)
        t = imb.div(s3)
        u = RealBall.from_mpf(re, prec, err).sub(t)
        v = t.mul_int(2)
        return cls(u, v, ring)

    # -- arithmetic ------------------------------------------------------

    def sub_element(self, a: LatticeInt) -> "ComplexAP":
        return ComplexAP(self.u.add_int(-a.x), self.v.add_int(-a.y), self.ring)

    def add_element(self, a: LatticeInt) -> "ComplexAP":
        return ComplexAP(self.u.add_int(a.x), self.v.add_int(a.y), self.ring)

    def add(self, other: "ComplexAP") -> "ComplexAP":
        return ComplexAP(self.u.add(other.u), self.v.add(other.v), self.ring)

    def sub(self, other: "ComplexAP") -> "ComplexAP":
        return ComplexAP(self.u.sub(other.u), self.v.sub(other.v), self.ring)

    def mul(self, other: "ComplexAP") -> "ComplexAP":
        u1, v1, u2, v2 = self.u, self.v, other.u, other.v
        if self.ring is Ring.EISENSTEIN:
            u = u1.mul(u2).sub(v1.mul(v2))
            v = u1.mul(v2).add(v1.mul(u2)).add(v1.mul(v2))
        else:
            u = u1.mul(u2).sub(v1.mul(v2))
            v = u1.mul(v2).add(v1.mul(u2))
        return ComplexAP(u, v, self.ring)

    def mul_element(self, a: LatticeInt) -> "ComplexAP":
        if self.ring is Ring.EISENSTEIN:
            u = self.u.mul_int(a.x).sub(self.v.mul_int(a.y))
            v = self.v.mul_int(a.x).add(self.u.mul_int(a.y)).add(self.v.mul_int(a.y))
        else:
            u = self.u.mul_int(a.x).sub(self.v.mul_int(a.y))
            v = self.v.mul_int(a.x).add(self.u.mul_int(a.y))
        return ComplexAP(u, v, self.ring)

    def add_coords(self, cu: Fraction, cv: Fraction) -> "ComplexAP":
        prec = self.precision_bits
        return ComplexAP(
            self.u.add(RealBall.from_fraction(cu, prec)),
            self.v.add(RealBall.from_fraction(cv, prec)),
            self.ring,
        )

    def abs_sq(self) -> RealBall:
        return _qf_ball(self.u, self.v, self.ring)

    def inverse(self) -> "ComplexAP":
        q = self.abs_sq()
        if q.lower() <= 0:
            raise PrecisionInsufficient("cannot certify a nonzero modulus")
        cu, cv = (
            (self.u.add(self.v), self.v.neg())
            if self.ring is Ring.EISENSTEIN
            else (self.u, self.v.neg())
        )
        return ComplexAP(cu.div(q), cv.div(q), self.ring)

    # -- lattice geometry ------------------------------------------------

    def _base_point(self) -> tuple[int, int]:
        return _nearest_int(self.u.mid), _nearest_int(self.v.mid)

    def _candidate_distances(self) -> list[tuple[RealBall, LatticeInt]]:
        bu, bv = self._base_point()
        out = []
        for dx, dy in _OFFSETS:
            cx, cy = bu + dx, bv + dy
            d = _qf_ball(self.u.add_int(-cx), self.v.add_int(-cy), self.ring)
            out.append((d, self.ring.element(cx, cy)))
        return out

    def nearest(self, margin: int = 8) -> NearestResult:
        """Certified nearest lattice point.

        Requires the winner to beat every other candidate by `margin`
        times the combined tracked error; raises PrecisionInsufficient
        otherwise.  Certified mode can never certify an exact tie, so the
        tie flag is always False.
        """
        cands = self._candidate_distances()
        cands.sort(key=lambda de: (de[0].mid, tie_key(de[1])))
        d0, winner = cands[0]
        for d, _ in cands[1:]:
            gap = _sub_down(d.mid, d0.mid)
            if gap <= _mul_up(_exact(margin), _add_up(d.rad, d0.rad)):
                raise PrecisionInsufficient(
                    "nearest-point winner not separated at this precision"
                )
        return NearestResult(winner, False, d0)

    def lattice_distance_sq(self) -> tuple[RealBall, LatticeInt]:
        """Distance^2 to the lattice as interval bounds, with a witness.

        Unlike nearest(), no separation is required: the returned interval
        is min of the candidate intervals, valid regardless of ordering.
        """
        cands = self._candidate_distances()
        lo = max(min(d.lower() for d, _ in cands), _ZERO)
        up = min(d.upper() for d, _ in cands)
        best = min(cands, key=lambda de: (de[0].mid, tie_key(de[1])))
        prec = best[0].prec
        half = _mul_up(mpmath.fsub(up, lo, prec=_RAD_PREC, rounding="u"), _mpf("0.5"))
        mid = mpmath.fadd(lo, half, prec=prec, rounding="n")
        rad = _add_up(half, RealBall._ulp(mid, prec))
        return RealBall(mid, rad, prec), best[1]

    # -- readouts ----------------------------------------------------------

    def to_floats(self) -> tuple[float, float]:
        u = float(self.u.mid)
        v = float(self.v.mid)
        if self.ring is Ring.EISENSTEIN:
            return u + v / 2, v * 3**0.5 / 2
        return u, v

    def __repr__(self) -> str:
        re, im = self.to_floats()
        return f"ComplexAP({re}, {im}, ring={self.ring.value}, prec={self.precision_bits})"
