"""Certified arbitrary-precision real arithmetic.

Values are balls (midpoint + error radius).  Midpoints are MPFR floats at
the working precision of a :class:`PrecisionContext`; radii are MPFR floats
at a small fixed precision, always rounded *up*, so every arithmetic
operation produces a guaranteed enclosure of the exact result.  Sign
queries either resolve rigorously or report "can't tell", at which point
callers may escalate to a doubled-precision context.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

__all__ = [
    "DomainError",
    "PrecisionContext",
    "CertifiedReal",
    "binomial",
    "legendre",
    "gauss_legendre",
]


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


# Radii carry ~10 decimal digits, which is plenty for an error bound.
_RAD_BITS = 32
_RUP = gmpy2.context(precision=_RAD_BITS, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=_RAD_BITS, round=gmpy2.RoundDown)
_ZERO = mpfr(0)


class CertifiedReal:
    """A real number known to lie within ``[mid - rad, mid + rad]``."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=_ZERO):
        self.mid = mid
        self.rad = rad

    @property
    def estimate(self) -> float:
        return float(self.mid)

    @property
    def radius(self) -> float:
        # Round the float conversion up so the reported radius stays valid.
        r = float(self.rad)
        return r if mpfr(r) >= self.rad else math.nextafter(r, math.inf)

    def lower(self):
        return _RDN.sub(self.mid, self.rad)

    def upper(self):
        return _RUP.add(self.mid, self.rad)

    def is_positive(self) -> bool:
        return _RDN.sub(self.mid, self.rad) > 0

    def is_negative(self) -> bool:
        return _RUP.add(self.mid, self.rad) < 0

    def contains_zero(self) -> bool:
        return not (self.is_positive() or self.is_negative())

    def contains(self, other) -> bool:
        """Whether this ball encloses the ball (or exact value) `other`."""
        if not isinstance(other, CertifiedReal):
            other = CertifiedReal(mpfr(other, precision=2000))
        return (self.lower() <= other.lower()) and (other.upper() <= self.upper())

    def __repr__(self):
        return f"CertifiedReal({self.mid!r} +/- {float(self.rad):.3g})"


class PrecisionContext:
    """Working precision plus an escalation ceiling.

    Immutable; two contexts compare equal iff (bits, max_bits) match, so a
    context can key memoization caches.
    """

    __slots__ = ("bits", "max_bits", "_mid", "_eps", "_hash")

    def __init__(self, bits: int = 64, max_bits: int = 1 << 14):
        if bits < 64:
            raise ValueError("bits must be >= 64")
        if max_bits < bits:
            raise ValueError("max_bits must be >= bits")
        self.bits = bits
        self.max_bits = max_bits
        self._mid = gmpy2.context(precision=bits)
        # One-ulp bound for round-to-nearest at this precision.
        self._eps = _RUP.div(mpfr(1), _RUP.exp2(mpfr(bits - 1)))
        self._hash = hash((bits, max_bits))

    def __eq__(self, other):
        return (
            isinstance(other, PrecisionContext)
            and self.bits == other.bits
            and self.max_bits == other.max_bits
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PrecisionContext(bits={self.bits}, max_bits={self.max_bits})"

    def escalated(self):
        """Context at doubled precision, or None if the ceiling is hit."""
        if self.bits >= self.max_bits:
            return None
        return PrecisionContext(min(2 * self.bits, self.max_bits), self.max_bits)

    # ---- constructors -------------------------------------------------

    def real(self, x) -> CertifiedReal:
        """A certified value from an int, float, Fraction, or mpq/mpfr."""
        if isinstance(x, CertifiedReal):
            return x
        if isinstance(x, float):
            return CertifiedReal(self._mid.add(mpfr(x), _ZERO))
        if isinstance(x, int):
            m = self._mid.add(x, 0)
            rad = _ZERO if m == x else _RUP.mul(_RUP.abs(m), self._eps)
            return CertifiedReal(m, rad)
        if isinstance(x, Fraction):
            x = mpq(x.numerator, x.denominator)
        if isinstance(x, (mpq, type(mpfr(0)))):
            # Round rationals into an mpfr midpoint; exact mpq midpoints
            # would make downstream recurrences grow without bound.
            m = self._mid.add(mpfr(x, precision=self.bits), _ZERO)
            rad = _ZERO if m == x else _RUP.mul(_RUP.abs(m), self._eps)
            return CertifiedReal(m, rad)
        raise TypeError(f"cannot certify {type(x).__name__}")

    def const_pi(self) -> CertifiedReal:
        m = self._mid.const_pi()
        return CertifiedReal(m, _RUP.mul(_RUP.abs(m), self._eps))

    # ---- arithmetic ---------------------------------------------------

    def add(self, a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
        m = self._mid.add(a.mid, b.mid)
        r = _RUP.add(a.rad, b.rad)
        if m:
            r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def sub(self, a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
        m = self._mid.sub(a.mid, b.mid)
        r = _RUP.add(a.rad, b.rad)
        if m:
            r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def neg(self, a: CertifiedReal) -> CertifiedReal:
        return CertifiedReal(self._mid.minus(a.mid), a.rad)

    def abs(self, a: CertifiedReal) -> CertifiedReal:
        return CertifiedReal(self._mid.abs(a.mid), a.rad)

    def mul(self, a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
        m = self._mid.mul(a.mid, b.mid)
        ra, rb = a.rad, b.rad
        if ra or rb:
            # |a|rb + |b|ra + ra*rb, with (|a|+ra) absorbing the cross term.
            r = _RUP.add(
                _RUP.mul(_RUP.add(_RUP.abs(a.mid), ra), rb),
                _RUP.mul(_RUP.abs(b.mid), ra),
            )
        else:
            r = _ZERO
        if m:
            r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def mul_scalar(self, a: CertifiedReal, n) -> CertifiedReal:
        """Multiply by an exactly representable int or float."""
        m = self._mid.mul(a.mid, n)
        r = _RUP.mul(a.rad, _RUP.abs(mpfr(abs(n)))) if a.rad else _ZERO
        if m:
            r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def div(self, a: CertifiedReal, b: CertifiedReal) -> CertifiedReal:
        blo = _RDN.sub(_RDN.abs(b.mid), b.rad)
        if blo <= 0:
            raise DomainError("division by an interval containing zero")
        m = self._mid.div(a.mid, b.mid)
        r = _RUP.div(_RUP.add(a.rad, _RUP.mul(_RUP.abs(m), b.rad)), blo)
        if m:
            r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def sqrt(self, a: CertifiedReal) -> CertifiedReal:
        hi = a.upper()
        if hi < 0:
            raise DomainError("sqrt of a certainly-negative value")
        lo = a.lower()
        if lo <= 0:
            # Interval straddles zero: enclose [0, sqrt(hi)].
            h = _RUP.sqrt(hi)
            half = _RUP.div(h, 2)
            return CertifiedReal(self._mid.add(mpfr(half), _ZERO), _RUP.add(half, self._eps))
        m = self._mid.sqrt(a.mid)
        # |sqrt(x) - sqrt(y)| <= |x - y| / (2 sqrt(min))
        r = _RUP.div(a.rad, _RDN.mul(_RDN.sqrt(lo), 2))
        r = _RUP.add(r, _RUP.mul(_RUP.abs(m), self._eps))
        return CertifiedReal(m, r)

    def powi(self, a: CertifiedReal, n: int) -> CertifiedReal:
        if n < 0:
            return self.div(self.real(1), self.powi(a, -n))
        result = self.real(1)
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def cos(self, a: CertifiedReal) -> CertifiedReal:
        m = self._mid.cos(a.mid)
        r = _RUP.add(a.rad, self._eps)  # |cos'| <= 1, |cos| <= 1
        return CertifiedReal(m, r)

    def sin(self, a: CertifiedReal) -> CertifiedReal:
        m = self._mid.sin(a.mid)
        r = _RUP.add(a.rad, self._eps)
        return CertifiedReal(m, r)

    def sqrt_fraction(self, q) -> CertifiedReal:
        """Certified square root of a nonnegative rational."""
        if q < 0:
            raise DomainError("sqrt of a negative rational")
        if q == 0:
            return CertifiedReal(_ZERO)
        return self.sqrt(self.real(q))

    def sum(self, values) -> CertifiedReal:
        total = self.real(0)
        for v in values:
            total = self.add(total, v)
        return total

    def dot(self, xs, ys) -> CertifiedReal:
        total = self.real(0)
        for x, y in zip(xs, ys):
            total = self.add(total, self.mul(x, y))
        return total


def binomial(n: int, k: int) -> Fraction:
    """Exact binomial coefficient, zero outside 0 <= k <= n."""
    if n < 0:
        raise DomainError("binomial requires n >= 0")
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(math.comb(n, k))


def legendre(ell: int, x, ctx: PrecisionContext) -> CertifiedReal:
    """Legendre polynomial P_ell(x) by the three-term recurrence."""
    if ell < 0:
        raise DomainError("legendre requires ell >= 0")
    xb = ctx.real(x)
    if _RDN.sub(_RDN.abs(xb.mid), xb.rad) > 1:
        raise DomainError("legendre requires |x| <= 1")
    return legendre_ladder(ell, xb, ctx)[ell]


_LADDER_COEFFS: dict = {}


def _ladder_coeffs(lmax: int, ctx: PrecisionContext):
    key = (ctx.bits, lmax)
    cached = _LADDER_COEFFS.get(key)
    if cached is None or len(cached) < lmax:
        # P_{l+1} = a_l x P_l - b_l P_{l-1}
        cached = [
            (
                ctx.real(Fraction(2 * ell + 1, ell + 1)),
                ctx.real(Fraction(ell, ell + 1)),
            )
            for ell in range(1, lmax)
        ]
        _LADDER_COEFFS[key] = cached
    return cached


def legendre_ladder(lmax: int, xb: CertifiedReal, ctx: PrecisionContext):
    """All of P_0(x) .. P_lmax(x) as certified values."""
    out = [ctx.real(1)]
    if lmax == 0:
        return out
    out.append(xb)
    mul, sub = ctx.mul, ctx.sub
    prev, cur = out[0], out[1]
    for a, b in _ladder_coeffs(lmax, ctx):
        prev, cur = cur, sub(mul(mul(a, xb), cur), mul(b, prev))
        out.append(cur)
    return out


def _legendre_pair_mpfr(n: int, x, mid):
    """(P_n(x), P_n'(x)) in plain MPFR under context `mid`."""
    p0, p1 = mpfr(1), x
    for ell in range(1, n):
        p0, p1 = p1, mid.div(
            mid.sub(mid.mul(mid.mul(x, p1), 2 * ell + 1), mid.mul(p0, ell)), ell + 1
        )
    # P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    dp = mid.div(
        mid.mul(mid.sub(mid.mul(x, p1), p0), n),
        mid.sub(mid.mul(x, x), 1),
    )
    return p1, dp


def gauss_legendre(n: int, ctx: PrecisionContext):
    """n-point Gauss-Legendre rule on [-1, 1] with certified nodes/weights.

    Nodes are polished by Newton iteration at working precision; each node's
    radius comes from the residual bound |P_n(x)| / |P_n'(x)| at the polished
    point, doubled for safety.
    """
    if n < 1:
        raise DomainError("gauss_legendre requires n >= 1")
    if n == 1:
        return [(ctx.real(0), ctx.real(2))]
    import numpy as np

    seeds, _ = np.polynomial.legendre.leggauss(n)
    work = gmpy2.context(precision=ctx.bits + 32)
    tol = _RUP.exp2(mpfr(-(ctx.bits + 8)))
    rule = []
    for seed in seeds:
        x = mpfr(seed, precision=ctx.bits + 32)
        for _ in range(80):
            p, dp = _legendre_pair_mpfr(n, x, work)
            step = work.div(p, dp)
            x = work.sub(x, step)
            if abs(step) < tol:
                break
        node = ctx.real(x)
        # Certified residual at the polished point.
        ladder = legendre_ladder(n, node, ctx)
        pn = ladder[n]
        dpn = ctx.div(
            ctx.mul_scalar(ctx.sub(ctx.mul(node, ladder[n]), ladder[n - 1]), n),
            ctx.sub(ctx.mul(node, node), ctx.real(1)),
        )
        dplo = _RDN.sub(_RDN.abs(dpn.mid), dpn.rad)
        if dplo <= 0:
            raise DomainError("Gauss-Legendre Newton polish failed to converge")
        residual = _RUP.add(_RUP.abs(pn.mid), pn.rad)
        node = CertifiedReal(node.mid, _RUP.add(node.rad, _RUP.mul(_RUP.div(residual, dplo), 2)))
        # w = 2 / ((1 - x^2) P_n'(x)^2)
        one_minus = ctx.sub(ctx.real(1), ctx.mul(node, node))
        ladder = legendre_ladder(n, node, ctx)
        dpn = ctx.div(
            ctx.mul_scalar(ctx.sub(ctx.mul(node, ladder[n]), ladder[n - 1]), n),
            ctx.neg(one_minus),
        )
        w = ctx.div(ctx.real(2), ctx.mul(one_minus, ctx.mul(dpn, dpn)))
        rule.append((node, w))
    return rule
