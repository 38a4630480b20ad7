"""Spin-j special functions.

Half-integer spins are handled exactly by storing doubled integers (2j, 2m).
The discrete Chebyshev basis f_l(m) is built from a monic three-term
recurrence with exact rational cores, so products f_l(m) f_l(m') are exact
rationals; only single square roots ever become certified floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .numerics import CertifiedReal, DomainError, PrecisionContext, legendre_ladder

__all__ = [
    "SpinQuantum",
    "CoefficientLadder",
    "ChebyshevBasis",
    "FMatrix",
    "ladder",
    "chebyshev_basis",
    "f_matrix",
    "f_matrix_from_cos",
    "f_matrix_spectral",
]


@dataclass(frozen=True)
class SpinQuantum:
    """A spin quantum number j, stored exactly as 2j."""

    twoJ: int

    def __post_init__(self):
        if self.twoJ < 0:
            raise DomainError("2j must be a nonnegative integer")

    @property
    def d(self) -> int:
        return self.twoJ + 1

    @property
    def j(self) -> Fraction:
        return Fraction(self.twoJ, 2)

    def m_values(self):
        """All half-integer m from -j to j, in increasing order."""
        return [Fraction(2 * i - self.twoJ, 2) for i in range(self.d)]

    def index_of(self, m) -> int:
        """Table index of an outcome m (half-integer)."""
        two_m = Fraction(m) * 2
        if two_m.denominator != 1:
            raise DomainError(f"m={m} is not a half-integer")
        i, rem = divmod(int(two_m) + self.twoJ, 2)
        if rem or not 0 <= i <= self.twoJ:
            raise DomainError(f"m={m} is not in the spin-{self.twoJ}/2 range")
        return i


def spin(two_j) -> SpinQuantum:
    return two_j if isinstance(two_j, SpinQuantum) else SpinQuantum(two_j)


@dataclass(frozen=True)
class CoefficientLadder:
    """The Q/P/Weyl symbol coefficients for all degrees l <= 2j.

    aQ and aP are exact rationals; aW = sqrt(aP * aQ) is kept via the exact
    square aW2, so ratios like (aQ/aW)^2 stay rational.
    """

    twoJ: int
    aQ: tuple
    aP: tuple
    aW2: tuple  # aW[l]^2 = aP[l] * aQ[l], exact

    def aW(self, ell: int, ctx: PrecisionContext) -> CertifiedReal:
        return ctx.sqrt_fraction(self.aW2[ell])


@lru_cache(maxsize=None)
def ladder(two_j) -> CoefficientLadder:
    """Coefficient products aQ_l = prod_k (j + (1-k)/2), aP_l = prod_k (j + (1+k)/2).

    The degree-0 coefficients are all 1 (empty products), so the products
    run over k = 1..l.
    """
    s = spin(two_j)
    j = s.j
    aQ, aP = [Fraction(1)], [Fraction(1)]
    for k in range(1, s.twoJ + 1):
        aQ.append(aQ[-1] * (j + Fraction(1 - k, 2)))
        aP.append(aP[-1] * (j + Fraction(1 + k, 2)))
    aW2 = tuple(q * p for q, p in zip(aQ, aP))
    return CoefficientLadder(s.twoJ, tuple(aQ), tuple(aP), aW2)


class ChebyshevBasis:
    """The orthonormal basis f_l(m) on the grid m = -j..j.

    `core[l][i]` is the monic discrete Chebyshev polynomial p_l at the i-th
    grid point (exact rational); `norm2[l]` is the exact rational with
    f_l(m) = p_l(m) / sqrt(norm2[l]).  The sign convention f_l(j) > 0 holds
    because monic p_l is positive beyond its largest root.
    """

    def __init__(self, two_j):
        s = spin(two_j)
        self.spin = s
        self.twoJ = s.twoJ
        d = s.d
        ms = s.m_values()
        core = [[Fraction(1)] * d]
        if d > 1:
            core.append(list(ms))
        for ell in range(1, self.twoJ):
            b = Fraction(ell * ell * (d * d - ell * ell), 4 * (4 * ell * ell - 1))
            core.append(
                [m * p - b * q for m, p, q in zip(ms, core[ell], core[ell - 1])]
            )
        norm2 = [Fraction(1)]
        for ell in range(1, d):
            b = Fraction(ell * ell * (d * d - ell * ell), 4 * (4 * ell * ell - 1))
            norm2.append(norm2[-1] * b)
        self.core = core
        self.norm2 = norm2
        self._f_cache: dict = {}
        self._g_cache: dict = {}

    def f_product(self, ell: int, i1: int, i2: int) -> Fraction:
        """Exact rational f_l(m_{i1}) * f_l(m_{i2})."""
        return self.core[ell][i1] * self.core[ell][i2] / self.norm2[ell]

    def f_table(self, ctx: PrecisionContext):
        """Certified table f[l][i], cached per working precision."""
        table = self._f_cache.get(ctx.bits)
        if table is None:
            table = []
            for ell in range(self.spin.d):
                inv_norm = ctx.div(ctx.real(1), ctx.sqrt_fraction(self.norm2[ell]))
                table.append([ctx.mul(ctx.real(c), inv_norm) for c in self.core[ell]])
            self._f_cache[ctx.bits] = table
        return table

    def g_table(self, ctx: PrecisionContext):
        """Certified table g[l][i] = sqrt(2l+1) f_l(m_i), used by one-axis sums."""
        table = self._g_cache.get(ctx.bits)
        if table is None:
            table = []
            for ell in range(self.spin.d):
                scale = ctx.sqrt_fraction(Fraction(2 * ell + 1) / self.norm2[ell])
                table.append([ctx.mul(ctx.real(c), scale) for c in self.core[ell]])
            self._g_cache[ctx.bits] = table
        return table

    def f(self, ell: int, m, ctx: PrecisionContext) -> CertifiedReal:
        return self.f_table(ctx)[ell][self.spin.index_of(m)]


@lru_cache(maxsize=None)
def chebyshev_basis(two_j, ctx: PrecisionContext | None = None) -> ChebyshevBasis:
    """Discrete Chebyshev basis for spin two_j/2.

    The construction is exact, so the precision context only seeds the lazy
    certified views; passing none is fine.
    """
    basis = ChebyshevBasis(two_j)
    if ctx is not None:
        basis.f_table(ctx)
    return basis


@dataclass
class FMatrix:
    """F[m][m'] = |d^j_{m m'}(theta)|^2, doubly stochastic and symmetric."""

    twoJ: int
    cos_theta: float | Fraction
    entries: list

    def entry(self, m, mp) -> CertifiedReal:
        s = SpinQuantum(self.twoJ)
        return self.entries[s.index_of(m)][s.index_of(mp)]

    def row_sums(self, ctx: PrecisionContext):
        return [ctx.sum(row) for row in self.entries]

    def col_sums(self, ctx: PrecisionContext):
        d = self.twoJ + 1
        return [ctx.sum(self.entries[i][k] for i in range(d)) for k in range(d)]


@lru_cache(maxsize=None)
def _d_matrix_plan(twoJ: int):
    """Exact data for the single-sum Wigner d formula.

    For each entry (i, i2) ~ (m, m'):  d = sqrt(pref) * sum_k coef_k c^a_k s^b_k
    with pref an exact integer, coef_k exact rationals, and c = cos(theta/2),
    s = sin(theta/2).  F = pref * (sum)^2 needs no square root.
    """
    d = twoJ + 1
    plan = []
    for i in range(d):
        row = []
        for i2 in range(d):
            tm, tmp = 2 * i - twoJ, 2 * i2 - twoJ
            jpm, jmm = (twoJ + tm) // 2, (twoJ - tm) // 2
            jpmp, jmmp = (twoJ + tmp) // 2, (twoJ - tmp) // 2
            pref = (
                math.factorial(jpm)
                * math.factorial(jmm)
                * math.factorial(jpmp)
                * math.factorial(jmmp)
            )
            mm = (tmp - tm) // 2
            terms = []
            for k in range(max(0, -mm), min(jpm, jmmp) + 1):
                coef = Fraction(
                    (-1) ** (mm + k),
                    math.factorial(jpm - k)
                    * math.factorial(k)
                    * math.factorial(mm + k)
                    * math.factorial(jmmp - k),
                )
                terms.append((coef, twoJ - 2 * k - mm, mm + 2 * k))
            row.append((pref, terms))
        plan.append(row)
    return plan


def _f_from_half_angle(twoJ: int, cos_theta, chalf, shalf, ctx: PrecisionContext):
    d = twoJ + 1
    cpow = [ctx.real(1)]
    spow = [ctx.real(1)]
    for _ in range(twoJ):
        cpow.append(ctx.mul(cpow[-1], chalf))
        spow.append(ctx.mul(spow[-1], shalf))
    plan = _d_matrix_plan(twoJ)
    entries = []
    for i in range(d):
        row = []
        for i2 in range(d):
            pref, terms = plan[i][i2]
            acc = ctx.real(0)
            for coef, a, b in terms:
                acc = ctx.add(acc, ctx.mul(ctx.real(coef), ctx.mul(cpow[a], spow[b])))
            row.append(ctx.mul(ctx.real(pref), ctx.mul(acc, acc)))
        entries.append(row)
    return FMatrix(twoJ, cos_theta, entries)


def _exact_permutation(twoJ: int, cos_theta, flip: bool, ctx: PrecisionContext):
    d = twoJ + 1
    one, zero = ctx.real(1), ctx.real(0)
    entries = [
        [one if (i2 == (d - 1 - i if flip else i)) else zero for i2 in range(d)]
        for i in range(d)
    ]
    return FMatrix(twoJ, cos_theta, entries)


def f_matrix(two_j, theta: float, ctx: PrecisionContext) -> FMatrix:
    """F(theta) from Wigner's explicit sum formula for d^j_{mm'}."""
    s = spin(two_j)
    if not 0 <= theta <= math.pi:
        raise DomainError("theta must lie in [0, pi]")
    if theta == 0:
        return _exact_permutation(s.twoJ, Fraction(1), False, ctx)
    if theta == math.pi:
        return _exact_permutation(s.twoJ, Fraction(-1), True, ctx)
    half = ctx.mul_scalar(ctx.real(theta), 0.5)
    return _f_from_half_angle(
        s.twoJ, math.cos(theta), ctx.cos(half), ctx.sin(half), ctx
    )


def f_matrix_from_cos(two_j, cos_theta, ctx: PrecisionContext) -> FMatrix:
    """F at an angle given by its cosine (the natural scalar input)."""
    s = spin(two_j)
    if isinstance(cos_theta, (int, float, Fraction)) and not -1 <= cos_theta <= 1:
        raise DomainError("cos(theta) must lie in [-1, 1]")
    if cos_theta == 1:
        return _exact_permutation(s.twoJ, cos_theta, False, ctx)
    if cos_theta == -1:
        return _exact_permutation(s.twoJ, cos_theta, True, ctx)
    x = ctx.real(cos_theta)
    chalf = ctx.sqrt(ctx.mul_scalar(ctx.add(ctx.real(1), x), 0.5))
    shalf = ctx.sqrt(ctx.mul_scalar(ctx.sub(ctx.real(1), x), 0.5))
    return _f_from_half_angle(s.twoJ, cos_theta, chalf, shalf, ctx)


def f_matrix_spectral(
    two_j, theta: float, basis: ChebyshevBasis, ctx: PrecisionContext
) -> FMatrix:
    """F(theta) from its spectral form over the discrete Chebyshev basis."""
    s = spin(two_j)
    if not 0 <= theta <= math.pi:
        raise DomainError("theta must lie in [0, pi]")
    return f_matrix_spectral_from_cos(s, ctx.cos(ctx.real(theta)), basis, ctx)


def f_matrix_spectral_from_cos(
    two_j, cos_theta, basis: ChebyshevBasis, ctx: PrecisionContext
) -> FMatrix:
    s = spin(two_j)
    d = s.d
    pl = legendre_ladder(s.twoJ, ctx.real(cos_theta), ctx)
    inv_d = ctx.real(Fraction(1, d))
    entries = []
    for i in range(d):
        row = []
        for i2 in range(d):
            acc = ctx.real(0)
            for ell in range(d):
                acc = ctx.add(
                    acc, ctx.mul(ctx.real(basis.f_product(ell, i, i2)), pl[ell])
                )
            row.append(ctx.mul(acc, inv_d))
        entries.append(row)
    return FMatrix(s.twoJ, cos_theta, entries)
