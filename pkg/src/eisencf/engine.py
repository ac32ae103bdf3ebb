"""Nearest-integer continued fraction engine.

Produces the partial quotients a_n and iteration values z_n, maintains the
three-term recurrences for the numerator/denominator pair (p_n, q_n), and
checks the exact inequalities these sequences satisfy.  Exact mode works on
ring rationals with every comparison an exact integer or rational
comparison; certified mode works on ComplexAP balls and reports nothing it
cannot certify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .balls import ComplexAP, RealBall, sqrt_down, sqrt_up
from .errors import IndexOutOfRange
from .rationals import RingRational
from .rings import LatticeInt, Ring

EXACT = "exact"
CERTIFIED = "certified"


class QPair:
    """Sequences p_n, q_n indexed from -1, built by the usual recurrences.

    p_{-1} = 1, p_0 = a_0, p_{n+1} = a_{n+1} p_n + p_{n-1}, and likewise
    q_{-1} = 0, q_0 = 1, q_{n+1} = a_{n+1} q_n + q_{n-1}.
    """

    __slots__ = ("_p", "_q", "ring")

    def __init__(self, a: list[LatticeInt]) -> None:
        if not a:
            raise ValueError("quotient sequence must be nonempty")
        ring = a[0].ring
        p = [ring.one, a[0]]
        q = [ring.zero, ring.one]
        for el in a[1:]:
            p.append(el * p[-1] + p[-2])
            q.append(el * q[-1] + q[-2])
        self._p = p
        self._q = q
        self.ring = ring

    @property
    def last_index(self) -> int:
        return len(self._p) - 2

    def p(self, n: int) -> LatticeInt:
        if not -1 <= n <= self.last_index:
            raise IndexOutOfRange(f"p index {n} outside [-1, {self.last_index}]")
        return self._p[n + 1]

    def q(self, n: int) -> LatticeInt:
        if not -1 <= n <= self.last_index:
            raise IndexOutOfRange(f"q index {n} outside [-1, {self.last_index}]")
        return self._q[n + 1]

    def q_norms(self) -> list[int]:
        return [el.norm() for el in self._q]


def q_pair(a: list[LatticeInt]) -> QPair:
    return QPair(a)


@dataclass
class Expansion:
    """Result of running the nearest-integer algorithm."""

    ring: Ring
    mode: str  # EXACT or CERTIFIED
    a: list[LatticeInt]
    z_seq: list  # RingRational (exact) or ComplexAP (certified), z_0..z_m
    terminated: bool
    tie_steps: set[int]
    precision_bits: int | None = None
    _qpair: QPair | None = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.a) - 1

    @property
    def qpair(self) -> QPair:
        if self._qpair is None:
            self._qpair = QPair(self.a)
        return self._qpair


def expand(
    z,
    ring: Ring | None = None,
    max_steps: int = 64,
    precision_bits: int | None = None,
    stop_norm: int | None = None,
) -> Expansion:
    """Run the nearest-integer algorithm from z.

    z is a RingRational (exact mode) or a ComplexAP (certified mode).
    Exact mode detects termination exactly; certified mode never claims
    termination and raises PrecisionInsufficient when it cannot certify a
    step.  If stop_norm is given, the run also stops once norm(q_n)
    exceeds it.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if isinstance(z, RingRational):
        if ring is not None and ring is not z.ring:
            raise ValueError("ring argument does not match the input value")
        return _expand_exact(z, max_steps, stop_norm)
    if isinstance(z, ComplexAP):
        if ring is not None and ring is not z.ring:
            raise ValueError("ring argument does not match the input value")
        if precision_bits is not None and z.precision_bits != precision_bits:
            raise ValueError("input was built at a different precision")
        if z.precision_bits < 64:
            raise ValueError("certified mode requires precision_bits >= 64")
        return _expand_certified(z, max_steps, stop_norm)
    raise TypeError(f"cannot expand object of type {type(z).__name__}")


def _expand_exact(z: RingRational, max_steps: int, stop_norm: int | None) -> Expansion:
    ring = z.ring
    zs: list[RingRational] = [z]
    a: list[LatticeInt] = []
    ties: set[int] = set()
    terminated = False
    q_prev = ring.zero
    q_cur = ring.one
    for n in range(max_steps):
        zn = zs[-1]
        el, tie, _ = zn.nearest()
        a.append(el)
        if tie:
            ties.add(n)
        if n > 0:
            q_prev, q_cur = q_cur, el * q_cur + q_prev
        if zn.as_element() == el:
            terminated = True
            break
        zs.append((zn - el).inverse())
        if stop_norm is not None and q_cur.norm() > stop_norm:
            break
    return Expansion(ring, EXACT, a, zs[: len(a)], terminated, ties)


def _expand_certified(z: ComplexAP, max_steps: int, stop_norm: int | None) -> Expansion:
    ring = z.ring
    zs: list[ComplexAP] = [z]
    a: list[LatticeInt] = []
    q_prev = ring.zero
    q_cur = ring.one
    for n in range(max_steps):
        zn = zs[-1]
        el, _, _ = zn.nearest()
        a.append(el)
        if n > 0:
            q_prev, q_cur = q_cur, el * q_cur + q_prev
        diff = zn.sub_element(el)
        zs.append(diff.inverse())
        if stop_norm is not None and q_cur.norm() > stop_norm:
            break
    return Expansion(
        ring, CERTIFIED, a, zs[: len(a)], False, set(), z.precision_bits
    )


def fold_up(a: list[LatticeInt]) -> RingRational:
    """Evaluate the finite continued fraction [a_0; a_1, ..., a_m] exactly.

    Raises ZeroDenominator if an intermediate tail vanishes (possible for
    sequences that are not genuine algorithm outputs).
    """
    if not a:
        raise ValueError("quotient sequence must be nonempty")
    acc = RingRational.from_element(a[-1])
    for el in reversed(a[:-1]):
        acc = acc.inverse() + el
    return acc


def convergent(e: Expansion, n: int) -> RingRational:
    """The reduced fraction p_n/q_n."""
    if not 0 <= n <= e.m:
        raise IndexOutOfRange(f"convergent index {n} outside [0, {e.m}]")
    qp = e.qpair
    return RingRational(qp.p(n), qp.q(n))


@dataclass
class ResidualCheck:
    """|q_n z - p_n| computed two ways: directly and via 1/|z_{n+1} q_n + q_{n-1}|.

    The two enclosures must overlap (they bound the same exact value);
    `gap` is the width of their hull, i.e. a bound on how far apart the
    two computed routes could be.
    """

    direct_sq: object  # Fraction (exact) or RealBall (certified)
    identity_sq: object
    value: float
    gap: float
    overlap: bool


def residual(e: Expansion, qp: QPair, n: int) -> ResidualCheck:
    if not 0 <= n < e.m:
        raise IndexOutOfRange(f"residual index {n} outside [0, {e.m - 1}]")
    z = e.z_seq[0]
    z_next = e.z_seq[n + 1]
    qn, qn1 = qp.q(n), qp.q(n - 1)
    pn = qp.p(n)
    if e.mode == EXACT:
        direct = (z * qn - pn).abs_sq()
        w = z_next * qn + qn1
        ident = Fraction(1) / w.abs_sq()
        same = direct == ident
        gap = 0.0 if same else abs(float(direct) ** 0.5 - float(ident) ** 0.5)
        return ResidualCheck(direct, ident, float(direct) ** 0.5, gap, same)
    direct = z.mul_element(qn).sub_element(pn).abs_sq()
    w = z_next.mul_element(qn).add_element(qn1).abs_sq()
    ident = RealBall.from_int(1, direct.prec).div(w)
    prec = direct.prec
    d_lo, d_hi = sqrt_down(direct.lower(), prec), sqrt_up(direct.upper(), prec)
    i_lo, i_hi = sqrt_down(ident.lower(), prec), sqrt_up(ident.upper(), prec)
    overlap = not (d_lo > i_hi or i_lo > d_hi)
    gap = float(mpmath.fsub(max(d_hi, i_hi), min(d_lo, i_lo), prec=53, rounding="u"))
    return ResidualCheck(
        direct, ident, float(sqrt_up(direct.mid, prec)), max(gap, 0.0), overlap
    )


def normalized_residual_sq(e: Expansion, qp: QPair, n: int):
    """norm(q_n) * |q_n z - p_n|^2, i.e. the square of |q_n| |q_n z - p_n|."""
    r = residual(e, qp, n)
    nq = qp.q(n).norm()
    if e.mode == EXACT:
        return r.direct_sq * nq
    return r.direct_sq.mul_int(nq)


@dataclass
class RatioReport:
    """Ratios r_n = q_{n-1}/q_n and the skip-two ratios q_{n+1}/q_{n-1}.

    Violation lists are exact-norm failures of the bounds
    |q_{n+1}/q_{n-1}| >= 3/2 and min(|r_n|, |r_{n+1}|) <= sqrt(2/3);
    both bounds are theorems for Eisenstein nearest-integer expansions,
    so a nonempty list on such input falsifies the underlying result.
    """

    r: list[RingRational]
    r_abs_sq: list[Fraction]
    r_abs: list[float]
    skip2_sq: list[Fraction]
    skip2: list[float]
    skip_two_violations: list[int]
    alternation_violations: list[int]


def ratio_report(qp: QPair) -> RatioReport:
    last = qp.last_index
    if last < 2:
        raise ValueError("ratio report needs at least three quotients")
    r = [RingRational(qp.q(n - 1), qp.q(n)) for n in range(1, last + 1)]
    r_abs_sq = [
        Fraction(qp.q(n - 1).norm(), qp.q(n).norm()) for n in range(1, last + 1)
    ]
    r_abs = [float(f) ** 0.5 for f in r_abs_sq]
    skip2_sq = [
        Fraction(qp.q(n + 1).norm(), qp.q(n - 1).norm()) for n in range(1, last)
    ]
    skip2 = [float(f) ** 0.5 for f in skip2_sq]
    skip_viol = [
        n
        for n in range(1, last)
        if 4 * qp.q(n + 1).norm() < 9 * qp.q(n - 1).norm()
    ]
    alt_viol = []
    for n in range(1, last):
        # |r_n|^2 <= 2/3  or  |r_{n+1}|^2 <= 2/3, in exact-norm form
        first = 3 * qp.q(n - 1).norm() <= 2 * qp.q(n).norm()
        second = 3 * qp.q(n).norm() <= 2 * qp.q(n + 1).norm()
        if not (first or second):
            alt_viol.append(n)
    return RatioReport(r, r_abs_sq, r_abs, skip2_sq, skip2, skip_viol, alt_viol)


# -- exact comparisons between sqrt(W) and sqrt(A) +- offset ---------------


def sqrt_le_sqrt_plus(W: Fraction, A: int, offset: int) -> bool:
    """Exact test of sqrt(W) <= sqrt(A) + offset for W >= 0, A, offset >= 0."""
    d = W - A - offset * offset
    if d <= 0:
        return True
    return d * d <= 4 * offset * offset * A


def sqrt_ge_sqrt_minus(W: Fraction, A: int, offset: int) -> bool:
    """Exact test of sqrt(W) >= sqrt(A) - offset."""
    if A <= offset * offset:
        return True
    d = A + offset * offset - W
    if d <= 0:
        return True
    return d * d <= 4 * offset * offset * A


@dataclass
class InvariantReport:
    """Violating (and, in certified mode, unresolvable) indices per check."""

    determinant: list[int] = field(default_factory=list)
    quotient_norms: list[int] = field(default_factory=list)
    denominator_growth: list[int] = field(default_factory=list)
    iterate_bound: list[int] = field(default_factory=list)
    skip_two: list[int] = field(default_factory=list)
    alternation: list[int] = field(default_factory=list)
    sandwich: list[int] = field(default_factory=list)
    mobius: list[int] = field(default_factory=list)
    residual_agreement: list[int] = field(default_factory=list)
    unresolved: dict = field(default_factory=dict)

    def ok(self) -> bool:
        return not (
            self.determinant
            or self.quotient_norms
            or self.denominator_growth
            or self.iterate_bound
            or self.skip_two
            or self.alternation
            or self.sandwich
            or self.mobius
            or self.residual_agreement
            or any(self.unresolved.values())
        )

    def _mark_unresolved(self, check: str, n: int) -> None:
        self.unresolved.setdefault(check, []).append(n)


def invariant_report(
    e: Expansion,
    qp: QPair | None = None,
    residual_tol: float = 1e-50,
    mobius_tol: float = 1e-50,
) -> InvariantReport:
    """Check every per-step identity and inequality the expansion must satisfy."""
    qp = qp or e.qpair
    ring = e.ring
    rep = InvariantReport()
    last = qp.last_index

    for n in range(0, last + 1):
        det = qp.p(n) * qp.q(n - 1) - qp.q(n) * qp.p(n - 1)
        sign = 1 if (n - 1) % 2 == 0 else -1
        if det != ring.element(sign, 0):
            rep.determinant.append(n)

    for n in range(1, e.m + 1):
        if e.a[n].norm() < ring.min_quotient_norm:
            rep.quotient_norms.append(n)

    for n in range(0, last):
        if qp.q(n + 1).norm() <= qp.q(n).norm():
            rep.denominator_growth.append(n)

    lb = ring.iterate_lower_bound_sq
    for n in range(1, e.m + 1):
        zn = e.z_seq[n]
        if e.mode == EXACT:
            if zn.abs_sq() < lb:
                rep.iterate_bound.append(n)
        else:
            ball = zn.abs_sq()
            if ball.upper() < lb:
                rep.iterate_bound.append(n)
            elif ball.lower() < lb:
                rep._mark_unresolved("iterate_bound", n)

    if last >= 2:
        rr = ratio_report(qp)
        rep.skip_two = rr.skip_two_violations
        rep.alternation = rr.alternation_violations

    for n in range(0, e.m):
        _check_sandwich(e, qp, n, rep)

    for n in range(0, e.m):
        _check_mobius(e, qp, n, rep, mobius_tol)

    for n in range(0, e.m):
        rc = residual(e, qp, n)
        if not rc.overlap:
            rep.residual_agreement.append(n)
        elif rc.gap > (0.0 if e.mode == EXACT else residual_tol):
            rep._mark_unresolved("residual_agreement", n)

    return rep


def _check_sandwich(e: Expansion, qp: QPair, n: int, rep: InvariantReport) -> None:
    # |a_{n+1}| - 2 <= |z_{n+1} + q_{n-1}/q_n| <= |a_{n+1}| + 2
    A = e.a[n + 1].norm()
    ratio = RingRational(qp.q(n - 1), qp.q(n))
    if e.mode == EXACT:
        W = (e.z_seq[n + 1] + ratio).abs_sq()
        if not (sqrt_le_sqrt_plus(W, A, 2) and sqrt_ge_sqrt_minus(W, A, 2)):
            rep.sandwich.append(n)
        return
    u, v = ratio.coords()
    W = e.z_seq[n + 1].add_coords(u, v).abs_sq()
    w_lo = sqrt_down(W.lower())
    w_up = sqrt_up(W.upper())
    a_lo = sqrt_down(A)
    a_up = sqrt_up(A)
    if w_up < a_lo - 2 or w_lo > a_up + 2:
        rep.sandwich.append(n)
    elif not (w_lo >= a_up - 2 and w_up <= a_lo + 2):
        rep._mark_unresolved("sandwich", n)


def _check_mobius(
    e: Expansion, qp: QPair, n: int, rep: InvariantReport, tol: float
) -> None:
    # z * (q_n z_{n+1} + q_{n-1}) = p_n z_{n+1} + p_{n-1}
    z = e.z_seq[0]
    z_next = e.z_seq[n + 1]
    if e.mode == EXACT:
        lhs = z * (z_next * qp.q(n) + qp.q(n - 1))
        rhs = z_next * qp.p(n) + qp.p(n - 1)
        if lhs != rhs:
            rep.mobius.append(n)
        return
    # difference rearranged into the cancellation-free form
    # z_{n+1} (q_n z - p_n) + (q_{n-1} z - p_{n-1}), algebraically identical
    # for arbitrary values, so enclosing it near 0 verifies the identity
    # while keeping the enclosure width at the scale of the residuals.
    t1 = z_next.mul(z.mul_element(qp.q(n)).sub_element(qp.p(n)))
    t2 = z.mul_element(qp.q(n - 1)).sub_element(qp.p(n - 1))
    gap = t1.add(t2).abs_sq()
    prec = gap.prec
    if sqrt_down(gap.lower(), prec) > tol:
        rep.mobius.append(n)
    elif sqrt_up(gap.upper(), prec) > tol:
        rep._mark_unresolved("mobius", n)
