"""Brute-force verification of the approximation inequalities.

The central oracle enumerates every admissible rival denominator q with
1 <= norm(q) <= norm(q_n) and computes min over p of |q z - p|, which is
exactly the distance from q*z to the lattice, so the inner minimisation
over p collapses to a nearest-point computation.  A vectorised float64
prefilter discards rivals that provably cannot approach the minimum; the
survivors are re-evaluated with exact rationals or certified balls, so the
reported bounds are rigorous.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .balls import ComplexAP, RealBall, sqrt_down, sqrt_up
from .engine import Expansion, QPair, expand, residual
from .errors import DomainError, EnumerationTooLarge, PrecisionInsufficient
from .rationals import RingRational
from .rings import LatticeInt, Ring, nearest_scaled, tie_key

#: |qz - p| >= RATIO_FLOOR * |q_n z - p_n| for all admissible rivals
RATIO_FLOOR = {Ring.EISENSTEIN: 0.5, Ring.GAUSSIAN: 0.2}
RATIO_TOL = 1e-9

DEFAULT_QNORM_GUARD = 10**6
PRECISION_LADDER = (256, 512, 1024, 2048, 4096)


# -- lattice point arrays ---------------------------------------------------

_ARRAY_CACHE: dict[Ring, tuple[int, np.ndarray, np.ndarray, np.ndarray]] = {}


def lattice_arrays(ring: Ring, bound: int):
    """(xs, ys, norms) for all points with 1 <= norm <= bound, sorted by
    (norm, x, y); cached and sliced, so repeated calls are cheap."""
    cached = _ARRAY_CACHE.get(ring)
    if cached is None or cached[0] < bound:
        from .rings import _lattice_triples

        triples = sorted(_lattice_triples(bound, ring))
        norms = np.array([t[0] for t in triples], dtype=np.int64)
        xs = np.array([t[1] for t in triples], dtype=np.int64)
        ys = np.array([t[2] for t in triples], dtype=np.int64)
        _ARRAY_CACHE[ring] = (bound, xs, ys, norms)
        cached = _ARRAY_CACHE[ring]
    _, xs, ys, norms = cached
    k = int(np.searchsorted(norms, bound, side="right"))
    return xs[:k], ys[:k], norms[:k]


def _coords_floats(z) -> tuple[float, float, float]:
    """Float coordinates (u, v) of z in the ring basis plus an error bound."""
    if isinstance(z, RingRational):
        u, v = z.coords()
        uf, vf = float(u), float(v)
        err = (abs(uf) + abs(vf) + 1.0) * 2**-50
        return uf, vf, err
    uf, vf = float(z.u.mid), float(z.v.mid)
    rad = float(mpmath.fadd(z.u.rad, z.v.rad, prec=53, rounding="u"))
    err = (abs(uf) + abs(vf) + 1.0) * 2**-50 + 2.0 * rad
    return uf, vf, err


def _prefilter_dist_sq(ring: Ring, xs, ys, uf: float, vf: float):
    """Vectorised float64 distance^2 from each q*z to the lattice."""
    if ring is Ring.EISENSTEIN:
        s0 = xs * uf - ys * vf
        t0 = xs * vf + ys * uf + ys * vf
    else:
        s0 = xs * uf - ys * vf
        t0 = xs * vf + ys * uf
    fs = s0 - np.rint(s0)
    ft = t0 - np.rint(t0)
    best = None
    for dx in (-1.0, 0.0, 1.0):
        for dy in (-1.0, 0.0, 1.0):
            s = fs - dx
            t = ft - dy
            d = s * s + s * t + t * t if ring is Ring.EISENSTEIN else s * s + t * t
            best = d if best is None else np.minimum(best, d)
    return np.maximum(best, 0.0)


def _prefilter_error_bound(xs, ys, uf: float, vf: float, coord_err: float) -> float:
    """Rigorous bound on |float dist^2 - true dist^2| for the prefilter.

    Coordinates of q*z are integer combinations a*u - b*v etc. with
    |a|,|b| <= A and |u|,|v| <= C: each float coordinate is off by at most
    2*A*C*2^-52 (two rounded products and a sum) plus 2*A*coord_err from
    the input's own error.  The quadratic form has gradient bounded by 6
    on the 3x3 offset cell, and its own evaluation adds ~1e-14.
    """
    A = float(max(np.max(np.abs(xs)), np.max(np.abs(ys)), 1))
    C = abs(uf) + abs(vf) + 1.0
    per_coord = 4.0 * A * C * 2**-52 + 2.0 * A * coord_err
    return 12.0 * per_coord + 1e-13


# -- exact / certified refinement ------------------------------------------


def _refine_exact(z: RingRational, q: LatticeInt):
    """(dist_sq Fraction, best p) for the rival q against exact z."""
    U, V, N = z.scaled_coords()
    w = z.ring.mul_coords(q.x, q.y, U, V)
    el, _, dist_sq = nearest_scaled(w[0], w[1], N, z.ring)
    return dist_sq, el


def _refine_ball(z: ComplexAP, q: LatticeInt):
    """(dist_sq RealBall, witness p) for the rival q against a ball z."""
    return z.mul_element(q).lattice_distance_sq()


# -- the best-approximant verdict -------------------------------------------


@dataclass
class ApproxVerdict:
    """One index of the rival-denominator search."""

    n: int
    residual: float  # |q_n z - p_n|
    best_rival: float  # min over admissible (p, q) of |q z - p|
    ratio: float  # best_rival / residual
    ratio_low: float  # certified lower bound for the ratio
    witness_q: LatticeInt
    witness_p: LatticeInt
    q_count: int
    tie_affected: bool
    ring: Ring

    @property
    def falsified(self) -> bool:
        return self.ratio_low < RATIO_FLOOR[self.ring] - RATIO_TOL


def _search_index(
    z,
    e: Expansion,
    qp: QPair,
    n: int,
    xs,
    ys,
    norms,
    d2,
    err: float,
) -> ApproxVerdict:
    ring = e.ring
    qn_norm = qp.q(n).norm()
    count = int(np.searchsorted(norms, qn_norm, side="right"))
    rc = residual(e, qp, n)

    if e.mode == "exact":
        res_sq = rc.direct_sq
        res_up_f = float(res_sq)
        thr = res_up_f * (1.0 + 1e-6) + err
        idx = np.nonzero(d2[:count] <= thr)[0]
        best_sq = None
        witness = None
        for i in idx:
            q = ring.element(int(xs[i]), int(ys[i]))
            dist_sq, p = _refine_exact(z, q)
            key = (dist_sq, tie_key(q))
            if best_sq is None or key < (best_sq, tie_key(witness[0])):
                best_sq, witness = dist_sq, (q, p)
        ratio_sq = best_sq / res_sq
        ratio = math.sqrt(float(ratio_sq))
        # exact lower bound: shave one ulp off the float reading
        ratio_low = ratio * (1.0 - 1e-12)
        return ApproxVerdict(
            n,
            math.sqrt(float(res_sq)),
            math.sqrt(float(best_sq)),
            ratio,
            ratio_low,
            witness[0],
            witness[1],
            count,
            any(t <= n for t in e.tie_steps),
            ring,
        )

    res_sq = rc.direct_sq  # RealBall
    prec = res_sq.prec
    res_up = sqrt_up(res_sq.upper(), prec)
    res_lo = sqrt_down(res_sq.lower(), prec)
    if res_lo <= 0:
        raise PrecisionInsufficient("residual not certified positive")
    thr = float(mpmath.fmul(res_up, res_up, prec=53, rounding="u")) * (1.0 + 1e-6) + err
    idx = np.nonzero(d2[:count] <= thr)[0]
    best_ball = None
    best_low = None
    witness = None
    for i in idx:
        q = ring.element(int(xs[i]), int(ys[i]))
        ball, p = _refine_ball(z, q)
        low = ball.lower()
        best_low = low if best_low is None else min(best_low, low)
        key = (ball.mid, tie_key(q))
        if best_ball is None or key < (best_ball.mid, tie_key(witness[0])):
            best_ball, witness = ball, (q, p)
    rival_lo = sqrt_down(max(best_low, 0), prec)
    rival_mid = sqrt_up(best_ball.mid, prec)
    ratio = float(mpmath.fdiv(rival_mid, res_up, prec=53, rounding="n"))
    ratio_low = float(mpmath.fdiv(rival_lo, res_up, prec=53, rounding="d"))
    return ApproxVerdict(
        n,
        float(res_up),
        float(rival_mid),
        ratio,
        ratio_low,
        witness[0],
        witness[1],
        count,
        any(t <= n for t in e.tie_steps),
        ring,
    )


def admissible_indices(qp: QPair, max_qnorm: int) -> list[int]:
    """Expansion indices n >= 0 with norm(q_n) <= max_qnorm."""
    return [n for n in range(0, qp.last_index + 1) if qp.q(n).norm() <= max_qnorm]


def verify_best_approx(
    z,
    ring: Ring | None = None,
    n: int = 0,
    max_steps: int = 64,
    qnorm_guard: int = DEFAULT_QNORM_GUARD,
    expansion: Expansion | None = None,
) -> ApproxVerdict:
    """Exhaustively verify the best-approximant bound at index n.

    Enumerates every q with 1 <= norm(q) <= norm(q_n); the optimal p for
    each q is the lattice point nearest q*z.
    """
    e = expansion if expansion is not None else expand(z, ring, max_steps=max_steps)
    qp = e.qpair
    if not 0 <= n <= qp.last_index:
        raise DomainError(f"expansion did not reach index {n}")
    qn_norm = qp.q(n).norm()
    if qn_norm > qnorm_guard:
        raise EnumerationTooLarge(
            f"norm(q_n) = {qn_norm} exceeds the enumeration guard {qnorm_guard}"
        )
    if n >= e.m:
        raise DomainError(
            "index must be below the final step so the residual is defined"
        )
    xs, ys, norms = lattice_arrays(e.ring, qn_norm)
    uf, vf, cerr = _coords_floats(z)
    d2 = _prefilter_dist_sq(e.ring, xs, ys, uf, vf)
    err = _prefilter_error_bound(xs, ys, uf, vf, cerr)
    return _search_index(z, e, qp, n, xs, ys, norms, d2, err)


def verify_all_indices(
    z,
    ring: Ring | None = None,
    max_qnorm: int = 22500,
    max_steps: int = 64,
    qnorm_guard: int = DEFAULT_QNORM_GUARD,
) -> tuple[Expansion, list[ApproxVerdict]]:
    """Verdicts for every index with norm(q_n) <= max_qnorm."""
    if max_qnorm > qnorm_guard:
        raise EnumerationTooLarge(
            f"max_qnorm {max_qnorm} exceeds the enumeration guard {qnorm_guard}"
        )
    e = expand(z, ring, max_steps=max_steps, stop_norm=max_qnorm)
    qp = e.qpair
    xs, ys, norms = lattice_arrays(e.ring, max_qnorm)
    uf, vf, cerr = _coords_floats(z)
    d2 = _prefilter_dist_sq(e.ring, xs, ys, uf, vf)
    err = _prefilter_error_bound(xs, ys, uf, vf, cerr)
    verdicts = []
    for n in admissible_indices(qp, max_qnorm):
        if n >= e.m:
            break
        verdicts.append(_search_index(z, e, qp, n, xs, ys, norms, d2, err))
    return e, verdicts


# -- the badly-approximable bound -------------------------------------------


def delta_bound(M, ring: Ring = Ring.EISENSTEIN) -> Fraction:
    """The bound c/(M+2)^2 with c = 1/2 (Eisenstein) or 1/5 (Gaussian).

    M must be an exact rational at least as large as the smallest possible
    partial-quotient modulus (sqrt(3), resp. sqrt(2)).
    """
    M = Fraction(M)
    if M < 0 or M * M < ring.min_quotient_norm:
        raise DomainError(
            f"M={M} below the smallest admissible quotient modulus for {ring.value}"
        )
    c = Fraction(1, 2) if ring is Ring.EISENSTEIN else Fraction(1, 5)
    return c / (M + 2) ** 2


def delta_bound_from_norm(norm_sq: int, ring: Ring = Ring.EISENSTEIN, bits: int = 48) -> Fraction:
    """Certified lower bound of delta_bound(sqrt(norm_sq))."""
    if norm_sq < ring.min_quotient_norm:
        raise DomainError(f"norm {norm_sq} below the admissible quotient range")
    m_up = Fraction(math.isqrt(norm_sq << (2 * bits)) + 1, 1 << bits)
    c = Fraction(1, 2) if ring is Ring.EISENSTEIN else Fraction(1, 5)
    return c / (m_up + 2) ** 2


def growth_bound_check(qp: QPair, m=None, m_norm: int | None = None) -> bool:
    """Check norm(q_n) <= (M+1)^2 norm(q_{n-1}) for all n >= 1, exactly.

    Pass the quotient bound either as an exact rational `m`, or as
    `m_norm` meaning M = sqrt(m_norm) (the natural form when M is the
    largest quotient modulus actually observed).
    """
    if (m is None) == (m_norm is None):
        raise ValueError("pass exactly one of m, m_norm")
    for n in range(1, qp.last_index + 1):
        a = qp.q(n).norm()
        b = qp.q(n - 1).norm()
        if m is not None:
            mf = Fraction(m)
            if a > (mf + 1) ** 2 * b:
                return False
        else:
            # (M+1)^2 = m_norm + 1 + 2 sqrt(m_norm)
            d = a - (m_norm + 1) * b
            if d > 0 and d * d > 4 * m_norm * b * b:
                return False
    return True


BOUNDED = "BoundedQuotients"
UNBOUNDED_SUSPECTED = "UnboundedSuspected"


@dataclass
class BadApproxVerdict:
    """Observed quotient bound, its delta, and the enumerated infimum."""

    max_partial_quotient: float  # max |a_n| observed, as sqrt(norm)
    M: float  # the rational upper bound used for delta
    delta: Fraction  # certified lower bound of c/(M+2)^2
    empirical_inf: float  # min over enumerated q of |q|^2 |z - p/q|
    empirical_inf_low: float  # certified lower bound of the same minimum
    classification: str
    steps_used: int
    peak_quotient_norm: int
    peak_index: int
    normalized_residuals: list[float]  # |q_n| |q_n z - p_n| per step
    min_normalized_residual: float
    q_count: int


def classify_bad_approx(
    z,
    ring: Ring | None = None,
    steps: int = 48,
    rival_norm_bound: int = 22500,
    qnorm_guard: int = DEFAULT_QNORM_GUARD,
) -> BadApproxVerdict:
    """Probe the badly-approximable dichotomy for a certified input.

    Exact ring rationals are refused: they lie in the quotient field,
    where every expansion terminates and the dichotomy does not apply.
    """
    if isinstance(z, RingRational):
        raise DomainError(
            "input is an exact element of the quotient field; the bounded-"
            "quotient dichotomy applies only to numbers outside it"
        )
    if steps < 8:
        raise ValueError("steps must be >= 8")
    if rival_norm_bound > qnorm_guard:
        raise EnumerationTooLarge(
            f"rival_norm_bound {rival_norm_bound} exceeds guard {qnorm_guard}"
        )
    ring = z.ring
    e = expand(z, ring, max_steps=steps)
    qp = e.qpair
    # make sure the observed quotients cover the enumerated denominators
    tries = 0
    while qp.q(qp.last_index).norm() <= rival_norm_bound and tries < 3:
        steps *= 2
        tries += 1
        try:
            e = expand(z, ring, max_steps=steps)
        except PrecisionInsufficient:
            break  # cannot certify deeper steps; report what was covered
        qp = e.qpair
    steps_used = e.m + 1

    a_norms = [e.a[k].norm() for k in range(1, e.m + 1)]
    peak = max(a_norms)
    peak_index = 1 + a_norms.index(peak)
    prefix = a_norms[: max(1, len(a_norms) // 2)]
    classification = UNBOUNDED_SUSPECTED if peak > 4 * max(prefix) else BOUNDED

    delta = delta_bound_from_norm(peak, ring)
    delta_f = float(delta)

    prec = z.precision_bits
    nres = []
    min_nr = None
    for n in range(0, e.m):
        ball = residual(e, qp, n).direct_sq.mul_int(qp.q(n).norm())
        val = float(sqrt_up(ball.mid, prec))
        nres.append(val)
        if min_nr is None or val < min_nr:
            min_nr = val

    xs, ys, norms = lattice_arrays(ring, rival_norm_bound)
    uf, vf, cerr = _coords_floats(z)
    d2 = _prefilter_dist_sq(ring, xs, ys, uf, vf)
    err = _prefilter_error_bound(xs, ys, uf, vf, cerr)
    norms_f = norms.astype(np.float64)
    vals = norms_f * d2
    per_err = norms_f * err
    vmin = float(np.min(vals))
    sel = vals <= vmin + per_err + 1e-12
    inf_low = None
    inf_mid = None
    for i in np.nonzero(sel)[0]:
        q = ring.element(int(xs[i]), int(ys[i]))
        ball, _ = _refine_ball(z, q)
        scaled = ball.mul_int(int(norms[i]))
        low = scaled.lower()
        inf_low = low if inf_low is None else min(inf_low, low)
        mid = scaled.mid
        inf_mid = mid if inf_mid is None else min(inf_mid, mid)
    rest = np.nonzero(~sel)[0]
    if rest.size:
        rest_low = float(np.min(vals[rest] - per_err[rest]))
        inf_low = min(inf_low, mpmath.mpf(rest_low))
    empirical_inf = float(sqrt_up(inf_mid, prec))
    empirical_inf_low = float(sqrt_down(max(inf_low, 0), prec))

    m_up = Fraction(math.isqrt(peak << 96) + 1, 1 << 48)
    return BadApproxVerdict(
        max_partial_quotient=math.sqrt(peak),
        M=float(m_up),
        delta=delta,
        empirical_inf=empirical_inf,
        empirical_inf_low=empirical_inf_low,
        classification=classification,
        steps_used=steps_used,
        peak_quotient_norm=peak,
        peak_index=peak_index,
        normalized_residuals=nres,
        min_normalized_residual=min_nr if min_nr is not None else float("inf"),
        q_count=int(norms.size),
    )


# -- seeded scan over random inputs -----------------------------------------


def scan_samples(seed: int, count: int, ring: Ring) -> list[tuple[float, float, int, int]]:
    """Deterministic sample descriptions: (x, y, offset_x, offset_y).

    Each sample consumes exactly three uniform draws: a point of the
    square [-1/2, 1/2]^2 and an index into the lattice points of norm at
    most 12 (plus the origin), so runs are bit-reproducible from the seed.
    """
    from .rings import enumerate_up_to_norm

    offsets = [(0, 0)] + [(a.x, a.y) for a in enumerate_up_to_norm(12, ring)]
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        x = rng.random() - 0.5
        y = rng.random() - 0.5
        k = int(rng.random() * len(offsets))
        ox, oy = offsets[min(k, len(offsets) - 1)]
        out.append((x, y, ox, oy))
    return out


def build_sample(
    spec: tuple[float, float, int, int], ring: Ring, precision_bits: int
) -> ComplexAP:
    x, y, ox, oy = spec
    z = ComplexAP.from_cartesian(Fraction(x), Fraction(y), ring, precision_bits)
    return z.add_element(ring.element(ox, oy))


def scan_one(
    spec: tuple[float, float, int, int],
    ring: Ring,
    max_qnorm: int,
    precision_bits: int = 256,
) -> tuple[Expansion, list[ApproxVerdict]]:
    """Verdicts for one sample, with the precision-doubling retry ladder."""
    last_err: Exception | None = None
    for prec in PRECISION_LADDER:
        if prec < precision_bits:
            continue
        try:
            z = build_sample(spec, ring, prec)
            return verify_all_indices(z, ring, max_qnorm=max_qnorm)
        except PrecisionInsufficient as exc:
            last_err = exc
    raise last_err if last_err else PrecisionInsufficient("sample failed")
