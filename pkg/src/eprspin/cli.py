"""Command-line surface: figure data, certificates, verification, tables.

All outputs are flat files or stdout.  CSV and JSON outputs are
byte-identical across runs with the same command line, except for the
timestamp header of JSON reports.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction

import gmpy2

from .numerics import DomainError, PrecisionContext
from .spinbasis import chebyshev_basis, spin
from .distributions import joint_factorized, one_axis
from .wigner import wigner_series, wigner_smoothed_special
from . import protocols as _protocols
from .verification import run_suite

SCHEMA_VERSION = 1

FIGURE_KINDS = ("wigner", "wigner-enlarged", "smoothed-wigner", "one-axis", "h-function")
TABLE_KINDS = ("R", "joint", "spectrum")
SUITE_NAMES = ("basis", "distributions", "wigner", "protocols", "all")


@dataclass
class RunReport:
    """Everything one invocation computed, in a machine-readable shape."""

    command: str
    parameters: dict
    results: dict
    wall_time_s: float

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "header": {
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "wall_time_s": round(self.wall_time_s, 3),
            },
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _decimal_digits(bits: int) -> int:
    return max(17, int(bits * math.log10(2)))


def _fmt(value, digits: int) -> str:
    """Scientific notation at the context's decimal precision."""
    if isinstance(value, float):
        return f"{value:.{min(digits, 17)}e}"
    if value == 0:
        return "0." + "0" * digits + "e+00"
    if not isinstance(value, gmpy2.mpfr().__class__):
        value = gmpy2.mpfr(value, 10 * digits // 3 + 8)
    mant, exp, _prec = gmpy2.digits(value, 10, digits + 1)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    e = exp - 1  # digits() normalizes to 0.mantissa x 10^exp
    return f"{sign}{mant[0]}.{mant[1:]}e{'+' if e >= 0 else '-'}{abs(e):02d}"


def _fmt_real(v, digits: int) -> tuple:
    return _fmt(v.mid, digits), f"{v.radius:.3e}"


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _resolve_cos(args):
    if args.cos_theta is not None and args.theta_deg is not None:
        raise DomainError("give either --cos-theta or --theta-deg, not both")
    if args.theta_deg is not None:
        return Fraction(math.cos(math.radians(args.theta_deg))).limit_denominator(10**15)
    if args.cos_theta is not None:
        return Fraction(args.cos_theta).limit_denominator(10**15)
    return Fraction(0)


def cmd_figure(args) -> int:
    ctx = PrecisionContext(args.bits, args.max_bits)
    digits = _decimal_digits(ctx.bits)
    if args.points < 2:
        raise DomainError("need at least 2 points")
    lo, hi = args.window
    if args.kind == "wigner-enlarged" and args.window == (-1.0, 1.0):
        lo, hi = 0.9, 1.0
    lo_f, hi_f = Fraction(lo).limit_denominator(10**9), Fraction(hi).limit_denominator(10**9)
    if not (-1 <= lo_f < hi_f <= 1):
        raise DomainError("window must satisfy -1 <= lo < hi <= 1")
    xs = [lo_f + (hi_f - lo_f) * Fraction(k, args.points - 1) for k in range(args.points)]

    s = spin(args.two_j)
    basis = None
    m = None
    if args.kind in ("one-axis", "h-function"):
        basis = chebyshev_basis(s.twoJ)
        m = Fraction(args.two_m if args.two_m is not None else s.twoJ, 2)

    lines = ["x,value,radius"]
    for x in xs:
        if args.kind in ("wigner", "wigner-enlarged"):
            v = wigner_series(s, x, None, ctx)
        elif args.kind == "smoothed-wigner":
            v = wigner_smoothed_special(s, x, ctx)
        else:
            v = one_axis(s, m, x, basis, ctx)
        mid, rad = _fmt_real(v, digits)
        lines.append(f"{_fmt(float(x), digits)},{mid},{rad}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_certify(args) -> int:
    t0 = time.time()
    ctx = PrecisionContext(args.bits, args.max_bits)
    lo = args.two_j if args.two_j is not None else 1
    hi = args.two_j_max if args.two_j_max is not None else lo
    if hi < lo:
        raise DomainError("--two-j-max must be at least --two-j")
    certificates = []
    any_negative = False
    any_indeterminate = False
    for twoJ in range(lo, hi + 1):
        R = _protocols.build_protocol(args.protocol, twoJ, ctx)
        cert = _protocols.certify_positivity(R, ctx)
        any_negative = any_negative or cert.verdict == "negative"
        any_indeterminate = any_indeterminate or cert.verdict == "indeterminate"
        certificates.append(
            {
                "two_j": twoJ,
                "verdict": cert.verdict,
                "min_entry_location": [str(v) for v in cert.min_entry_location],
                "min_entry_estimate": cert.min_entry_estimate,
                "radius": cert.radius,
                "bits_used": cert.bits_used,
            }
        )
    report = RunReport(
        command=" ".join(sys.argv[1:]) or "certify",
        parameters={
            "protocol": args.protocol,
            "two_j_range": [lo, hi],
            "bits": args.bits,
            "max_bits": args.max_bits,
        },
        results={
            "certificates": certificates,
            "any_negative": any_negative,
            "any_indeterminate": any_indeterminate,
        },
        wall_time_s=time.time() - t0,
    )
    _write(args.out, report.to_json())
    return 1 if any_negative else 0


def cmd_verify(args) -> int:
    t0 = time.time()
    ctx = PrecisionContext(args.bits, args.max_bits)
    if args.two_j_max < 1:
        raise DomainError("--two-j-max must be at least 1")
    results = run_suite(args.suite, args.two_j_max, ctx)
    violations = [r for r in results if not r.passed]
    report = RunReport(
        command=" ".join(sys.argv[1:]) or "verify",
        parameters={"suite": args.suite, "two_j_max": args.two_j_max, "bits": args.bits},
        results={
            "invariants": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "max_deviation": r.max_deviation,
                    "location": r.location,
                }
                for r in results
            ],
            "violations": len(violations),
        },
        wall_time_s=time.time() - t0,
    )
    if args.format == "json" or args.out not in (None, "-"):
        _write(args.out, report.to_json())
    else:
        _write(args.out, "".join(r.line() + "\n" for r in results))
    return 1 if violations else 0


def cmd_table(args) -> int:
    ctx = PrecisionContext(args.bits, args.max_bits)
    digits = _decimal_digits(ctx.bits)
    s = spin(args.two_j)
    ms = s.m_values()
    lines = []
    if args.what == "R":
        R = _protocols.build_protocol(args.protocol, s.twoJ, ctx)
        lines.append("m,mprime,value,radius")
        for i1, m1 in enumerate(ms):
            for i2, m2 in enumerate(ms):
                mid, rad = _fmt_real(R.entries[i1][i2], digits)
                lines.append(f"{m1},{m2},{mid},{rad}")
    elif args.what == "joint":
        x = _resolve_cos(args)
        basis = chebyshev_basis(s.twoJ)
        dist = joint_factorized(s, x, basis, ctx)
        lines.append("m1,m2,value,radius")
        for i1, m1 in enumerate(ms):
            for i2, m2 in enumerate(ms):
                mid, rad = _fmt_real(dist.p[i1][i2], digits)
                lines.append(f"{m1},{m2},{mid},{rad}")
    else:
        spec = {
            "special": _protocols.spectrum_special,
            "trivial": _protocols.spectrum_trivial,
            "oversufficient": _protocols.spectrum_oversufficient,
        }.get(args.protocol)
        if spec is None:
            raise DomainError("spectrum tables exist only for agnostic protocols")
        values = spec(s.twoJ, ctx).values
        lines.append("l,value,radius")
        for ell, v in enumerate(values):
            mid, rad = _fmt_real(v, digits)
            lines.append(f"{ell},{mid},{rad}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _add_common(p, two_j=False, two_j_max=False):
    if two_j:
        p.add_argument("--two-j", type=int, help="twice the spin (integer)")
    if two_j_max:
        p.add_argument("--two-j-max", type=int, help="upper end of the twice-spin sweep")
    p.add_argument("--bits", type=int, default=256, help="working precision in bits")
    p.add_argument("--max-bits", type=int, default=16384, help="escalation ceiling in bits")
    p.add_argument("--out", default=None, help="output path ('-' or omitted for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eprspin",
        description="Certified spin-j EPR-Bohm distributions, Wigner functions, and detector-error protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="emit (x, value, radius) curve data as CSV")
    p.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    p.add_argument("--window", type=float, nargs=2, default=(-1.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--two-m", type=int, default=None, help="twice the outcome m for one-axis curves")
    _add_common(p, two_j=True)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("certify", help="sweep positivity certificates across spins")
    p.add_argument("--protocol", choices=_protocols.PROTOCOLS, default="special")
    _add_common(p, two_j=True, two_j_max=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="stdout format; files are always JSON reports")
    _add_common(p, two_j_max=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="emit an error matrix, joint distribution, or spectrum as CSV")
    p.add_argument("--what", choices=TABLE_KINDS, required=True)
    p.add_argument("--protocol", choices=_protocols.PROTOCOLS, default="special")
    p.add_argument("--cos-theta", type=float, default=None)
    p.add_argument("--theta-deg", type=float, default=None)
    _add_common(p, two_j=True)
    p.set_defaults(func=cmd_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "two_j", None) is None and args.command in ("figure", "table"):
        parser.error("--two-j is required")
    if args.command == "verify" and args.two_j_max is None:
        args.two_j_max = 4
    if args.command == "certify" and args.two_j is None and args.two_j_max is None:
        parser.error("give --two-j, --two-j-max, or both")
    try:
        return args.func(args)
    except DomainError as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
