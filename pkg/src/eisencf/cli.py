"""Command-line interface: reproducible expansion and verification jobs.

Every command emits JSON-lines records; each line is self-contained and
carries the schema version, the job seed and a hash of the configuration,
so output files are directly diffable fixtures.  Exit status: 0 success,
1 a verified bound was falsified, 2 configuration error, 3 precision
exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

from .approx import (
    PRECISION_LADDER,
    RATIO_FLOOR,
    RATIO_TOL,
    ApproxVerdict,
    classify_bad_approx,
    scan_samples,
    scan_one,
    verify_all_indices,
)
from .balls import ComplexAP
from .engine import expand
from .errors import (
    DomainError,
    EnumerationTooLarge,
    ParseError,
    PrecisionInsufficient,
    ZeroDenominator,
)
from .rationals import RingRational
from .rings import Ring

SCHEMA_VERSION = 1
DEFAULT_PRECISION = 256
PRECISION_ENV = "EISENCF_PRECISION"

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_CONFIG = 2
EXIT_PRECISION = 3


def _coord_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"expected two comma-separated integers, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ParseError(f"bad integer in {text!r}") from exc


def _decimal_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad decimal value {text!r}") from exc


def parse_input(args, ring: Ring, precision_bits: int):
    """RingRational from --num/--den, or ComplexAP from --re/--im."""
    exact = args.num is not None or args.den is not None
    decimal = args.re is not None or args.im is not None
    if exact == decimal:
        raise ParseError("give either --num/--den (exact) or --re/--im (decimal)")
    if exact:
        if args.num is None or args.den is None:
            raise ParseError("exact input needs both --num and --den")
        nx, ny = _coord_pair(args.num)
        dx, dy = _coord_pair(args.den)
        return RingRational(ring.element(nx, ny), ring.element(dx, dy))
    if args.re is None or args.im is None:
        raise ParseError("decimal input needs both --re and --im")
    re = _decimal_fraction(args.re)
    im = _decimal_fraction(args.im)
    return ComplexAP.from_cartesian(re, im, ring, precision_bits)


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


class Emitter:
    def __init__(self, stream, base: dict) -> None:
        self.stream = stream
        self.base = base
        self.falsified = False

    def emit(self, kind: str, payload: dict) -> None:
        record = {"v": SCHEMA_VERSION, "kind": kind}
        record.update(self.base)
        record.update(payload)
        if payload.get("falsified"):
            self.falsified = True
        self.stream.write(json.dumps(record) + "\n")


def _verdict_payload(sample: int | None, v: ApproxVerdict, a) -> dict:
    payload = {}
    if sample is not None:
        payload["sample"] = sample
    payload.update(
        {
            "n": v.n,
            "a_x": a.x,
            "a_y": a.y,
            "qn_norm": None,
            "residual": v.residual,
            "rival": v.best_rival,
            "ratio": v.ratio,
            "ratio_low": v.ratio_low,
            "tie": v.tie_affected,
            "terminated": False,
            "witness_q_x": v.witness_q.x,
            "witness_q_y": v.witness_q.y,
            "witness_p_x": v.witness_p.x,
            "witness_p_y": v.witness_p.y,
            "q_count": v.q_count,
            "falsified": v.falsified,
        }
    )
    return payload


def _residual_at(z, e, qp, n) -> float:
    if e.mode == "exact":
        return float((z * qp.q(n) - qp.p(n)).abs_sq()) ** 0.5
    ball = z.mul_element(qp.q(n)).sub_element(qp.p(n)).abs_sq()
    return max(float(ball.mid), 0.0) ** 0.5


def cmd_expand(args, emitter: Emitter) -> int:
    ring = Ring(args.ring)
    z = parse_input(args, ring, args.precision_bits)
    e = expand(z, ring, max_steps=args.steps)
    qp = e.qpair
    for n in range(0, e.m + 1):
        emitter.emit(
            "step",
            {
                "n": n,
                "a_x": e.a[n].x,
                "a_y": e.a[n].y,
                "qn_norm": qp.q(n).norm(),
                "residual": _residual_at(z, e, qp, n),
                "rival": None,
                "ratio": None,
                "tie": n in e.tie_steps,
                "terminated": e.terminated and n == e.m,
            },
        )
    return EXIT_OK


def cmd_verify(args, emitter: Emitter) -> int:
    ring = Ring(args.ring)
    z = parse_input(args, ring, args.precision_bits)
    e, verdicts = verify_all_indices(
        z, ring, max_qnorm=args.max_qnorm, max_steps=args.steps
    )
    qp = e.qpair
    wanted = verdicts if args.index is None else [
        v for v in verdicts if v.n == args.index
    ]
    if args.index is not None and not wanted:
        raise DomainError(f"index {args.index} has no admissible verdict")
    for v in wanted:
        payload = _verdict_payload(None, v, e.a[v.n])
        payload["qn_norm"] = qp.q(v.n).norm()
        emitter.emit("verdict", payload)
    return EXIT_FALSIFIED if emitter.falsified else EXIT_OK


def _scan_job(spec_idx, ring_value: str, max_qnorm: int, precision_bits: int):
    idx, spec = spec_idx
    ring = Ring(ring_value)
    try:
        e, verdicts = scan_one(spec, ring, max_qnorm, precision_bits)
    except PrecisionInsufficient as exc:
        return idx, spec, None, str(exc)
    qp = e.qpair
    rows = []
    for v in verdicts:
        payload = _verdict_payload(idx, v, e.a[v.n])
        payload["qn_norm"] = qp.q(v.n).norm()
        rows.append(payload)
    return idx, spec, rows, None


def cmd_scan(args, emitter: Emitter) -> int:
    ring = Ring(args.ring)
    specs = scan_samples(args.seed, args.samples, ring)
    job = partial(
        _scan_job,
        ring_value=ring.value,
        max_qnorm=args.max_qnorm,
        precision_bits=args.precision_bits,
    )
    jobs = list(enumerate(specs))
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(job, jobs, chunksize=4))
    else:
        results = [job(j) for j in jobs]

    ratios: list[float] = []
    ratios_no_ties: list[float] = []
    min_ratio_low = None
    errors = 0
    for idx, spec, rows, error in results:
        if error is not None:
            errors += 1
            emitter.emit(
                "error",
                {"sample": idx, "error": "PrecisionInsufficient", "message": error},
            )
            continue
        for payload in rows:
            emitter.emit("verdict", payload)
            ratios.append(payload["ratio"])
            if not payload["tie"]:
                ratios_no_ties.append(payload["ratio"])
            low = payload["ratio_low"]
            min_ratio_low = low if min_ratio_low is None else min(min_ratio_low, low)

    hist = [0] * 11
    for r in ratios:
        hist[min(int(r * 10), 10)] += 1
    floor = RATIO_FLOOR[ring]
    summary = {
        "samples": args.samples,
        "verdicts": len(ratios),
        "errors": errors,
        "min_ratio": min(ratios) if ratios else None,
        "min_ratio_low": min_ratio_low,
        "min_ratio_no_ties": min(ratios_no_ties) if ratios_no_ties else None,
        "ratio_floor": floor,
        "histogram": hist,
        "falsified": bool(
            min_ratio_low is not None and min_ratio_low < floor - RATIO_TOL
        ),
    }
    emitter.emit("summary", summary)
    if args.format == "csv":
        _write_scan_csv(args, summary)
    if emitter.falsified:
        return EXIT_FALSIFIED
    if errors and not ratios:
        return EXIT_PRECISION
    return EXIT_OK


def _write_scan_csv(args, summary: dict) -> None:
    path = (args.output or "scan_summary") + ".csv"
    keys = [k for k in summary if k != "histogram"]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(keys) + "\n")
        fh.write(",".join(str(summary[k]) for k in keys) + "\n")


def cmd_classify(args, emitter: Emitter) -> int:
    ring = Ring(args.ring)
    last_exc = None
    for prec in PRECISION_LADDER:
        if prec < args.precision_bits:
            continue
        try:
            z = parse_input(args, ring, prec)
            v = classify_bad_approx(
                z, ring, steps=args.steps, rival_norm_bound=args.max_qnorm
            )
            emitter.emit(
                "classification",
                {
                    "classification": v.classification,
                    "max_partial_quotient": v.max_partial_quotient,
                    "M": v.M,
                    "delta": float(v.delta),
                    "delta_exact": f"{v.delta.numerator}/{v.delta.denominator}",
                    "empirical_inf": v.empirical_inf,
                    "empirical_inf_low": v.empirical_inf_low,
                    "steps_used": v.steps_used,
                    "peak_quotient_norm": v.peak_quotient_norm,
                    "peak_index": v.peak_index,
                    "min_normalized_residual": v.min_normalized_residual,
                    "q_count": v.q_count,
                },
            )
            return EXIT_OK
        except PrecisionInsufficient as exc:
            last_exc = exc
    emitter.emit(
        "error", {"error": "PrecisionInsufficient", "message": str(last_exc)}
    )
    return EXIT_PRECISION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eisencf",
        description="Continued fractions over the Eisenstein and Gaussian integers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        p.add_argument(
            "--ring",
            choices=[r.value for r in Ring],
            default=Ring.EISENSTEIN.value,
        )
        p.add_argument(
            "--precision-bits",
            type=int,
            default=int(os.environ.get(PRECISION_ENV, DEFAULT_PRECISION)),
        )
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
        if with_input:
            p.add_argument("--exact", action="store_true", help="exact ring-rational input")
            p.add_argument("--num", default=None, help="numerator coords x,y")
            p.add_argument("--den", default=None, help="denominator coords x,y")
            p.add_argument("--re", default=None, help="decimal real part")
            p.add_argument("--im", default=None, help="decimal imaginary part")

    p = sub.add_parser("expand", help="emit one record per expansion step")
    common(p)
    p.add_argument("--steps", type=int, default=64)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify-approx", help="rival-denominator verdicts")
    common(p)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--max-qnorm", type=int, default=22500)
    p.add_argument("--index", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="seeded random sample scan")
    common(p, with_input=False)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-qnorm", type=int, default=22500)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("classify", help="badly-approximable probe")
    common(p)
    p.add_argument("--steps", type=int, default=48)
    p.add_argument("--max-qnorm", type=int, default=22500)
    p.set_defaults(func=cmd_classify)

    return parser


def _base_config(args) -> dict:
    cfg = {
        "command": args.command,
        "ring": args.ring,
        "precision_bits": args.precision_bits,
    }
    for key in ("num", "den", "re", "im", "steps", "max_qnorm", "index", "samples", "seed"):
        if hasattr(args, key) and getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and args.command != "scan":
        parser.error("--format csv is only available for scan summaries")
    if args.precision_bits < 64:
        parser.error("--precision-bits must be >= 64")
    cfg = _base_config(args)
    base = {"config": _config_hash(cfg), "seed": getattr(args, "seed", None)}

    stream = open(args.output, "w", newline="\n") if args.output else sys.stdout
    emitter = Emitter(stream, base)
    try:
        return args.func(args, emitter)
    except (ParseError, ZeroDenominator, DomainError, EnumerationTooLarge, ValueError) as exc:
        emitter.emit("error", {"error": type(exc).__name__, "message": str(exc)})
        return EXIT_CONFIG
    except PrecisionInsufficient as exc:
        emitter.emit("error", {"error": "PrecisionInsufficient", "message": str(exc)})
        return EXIT_PRECISION
    finally:
        if args.output:
            stream.close()


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
