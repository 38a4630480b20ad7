"""The two-spin singlet Wigner function and its smoothed relatives.

Complex spherical harmonics never appear: every m-sum is collapsed through
the addition theorem, so the Wigner function is a Legendre series in the
single scalar x = -n1.n2.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpfr

from .numerics import CertifiedReal, DomainError, PrecisionContext, legendre_ladder
from .numerics import _RUP
from .spinbasis import ChebyshevBasis, spin
from .distributions import JointDistribution, one_axis, _check_cos

__all__ = [
    "WignerProfile",
    "wigner_series",
    "wigner_closed",
    "wigner_smoothed_special",
    "projector_symbol",
    "reconstruct_joint",
]


@lru_cache(maxsize=None)
def _inv_16pi2(ctx: PrecisionContext) -> CertifiedReal:
    pi = ctx.const_pi()
    return ctx.div(ctx.real(1), ctx.mul_scalar(ctx.mul(pi, pi), 16))


class WignerProfile:
    """Profile of the (optionally smoothed) singlet Wigner function.

    The spectrum c[l] defaults to all ones (the unsmoothed singlet); an
    agnostic error protocol replaces it by its eigenvalues.
    """

    def __init__(self, two_j, spectrum=None):
        self.spin = spin(two_j)
        self.twoJ = self.spin.twoJ
        if spectrum is not None and len(spectrum) != self.spin.d:
            raise DomainError("spectrum length must be 2j+1")
        self.spectrum = spectrum

    def value(self, x, ctx: PrecisionContext) -> CertifiedReal:
        return wigner_series(self.spin, x, self.spectrum, ctx)


def wigner_series(two_j, x, c, ctx: PrecisionContext) -> CertifiedReal:
    """W(x) = (4 pi)^-2 sum_l (2l+1) c_l^2 P_l(x); c = None means all ones."""
    s = spin(two_j)
    _check_cos(x)
    if c is not None and len(c) != s.d:
        raise DomainError("spectrum length must be 2j+1")
    pl = legendre_ladder(s.twoJ, ctx.real(x), ctx)
    acc = ctx.real(0)
    for ell in range(s.d):
        term = ctx.mul_scalar(pl[ell], 2 * ell + 1)
        if c is not None:
            cl = ctx.real(c[ell])
            term = ctx.mul(term, ctx.mul(cl, cl))
        acc = ctx.add(acc, term)
    return ctx.mul(acc, _inv_16pi2(ctx))


def wigner_closed(two_j, x, ctx: PrecisionContext) -> CertifiedReal:
    """Christoffel-Darboux closed form d_j [P_2j(x) - P_{2j+1}(x)] / (1-x) / (4 pi)^2.

    Near x = 1 the quotient is evaluated by its limit: the derivative
    identity P'_{2j+1}(1) - P'_{2j}(1) = 2j+1 gives W -> d_j^2/(4 pi)^2.
    The switchover adds an explicit Lipschitz error term, so the result is
    still a certified enclosure.
    """
    s = spin(two_j)
    _check_cos(x)
    xb = ctx.real(x)
    threshold = 2.0 ** (-(ctx.bits // 2))
    one_minus = ctx.sub(ctx.real(1), xb)
    if float(one_minus.upper()) < threshold:
        # |W(x) - W(1)| <= |1-x| * max|W'|; |P_l'| <= l(l+1)/2 on [-1,1].
        lip = sum((2 * ell + 1) * ell * (ell + 1) // 2 for ell in range(s.d))
        limit = ctx.mul(ctx.real(s.d * s.d), _inv_16pi2(ctx))
        slack = _RUP.mul(one_minus.upper(), _RUP.add(mpfr(0), lip))
        return CertifiedReal(limit.mid, _RUP.add(limit.rad, slack))
    pl = legendre_ladder(s.twoJ + 1, xb, ctx)
    diff = ctx.sub(pl[s.twoJ], pl[s.twoJ + 1])
    val = ctx.mul_scalar(ctx.div(diff, one_minus), s.d)
    return ctx.mul(val, _inv_16pi2(ctx))


def wigner_smoothed_special(two_j, x, ctx: PrecisionContext) -> CertifiedReal:
    """The special-protocol smoothed Wigner function d_j ((1+x)/2)^{2j} / (4 pi)^2."""
    s = spin(two_j)
    _check_cos(x)
    base = ctx.mul_scalar(ctx.add(ctx.real(1), ctx.real(x)), 0.5)
    val = ctx.mul_scalar(ctx.powi(base, s.twoJ), s.d)
    return ctx.mul(val, _inv_16pi2(ctx))


def projector_symbol(two_j, m, cos_alpha, basis: ChebyshevBasis, ctx: PrecisionContext) -> CertifiedReal:
    """Weyl symbol of the projector |m><m| along an axis.

    Identical to the one-axis function; this alias records the phase-space
    reading of the same quantity.
    """
    return one_axis(two_j, m, cos_alpha, basis, ctx)


def reconstruct_joint(
    two_j, cos_theta12, c, basis: ChebyshevBasis, ctx: PrecisionContext
) -> JointDistribution:
    """Joint distribution from the phase-space double integral.

    Legendre orthogonality reduces it to
    p[m1][m2] = d_j^{-2} sum_l c_l^2 f_l(m1) f_l(m2) P_l(-cos theta12);
    a None spectrum (all ones) must reproduce the quantum distribution.
    """
    s = spin(two_j)
    _check_cos(cos_theta12)
    if c is not None and len(c) != s.d:
        raise DomainError("spectrum length must be 2j+1")
    pl = legendre_ladder(s.twoJ, ctx.real(-cos_theta12), ctx)
    csq = None
    if c is not None:
        csq = []
        for cl in c:
            clb = ctx.real(cl)
            csq.append(ctx.mul(clb, clb))
    inv_d2 = Fraction(1, s.d * s.d)
    p = []
    for i1 in range(s.d):
        row = []
        for i2 in range(s.d):
            acc = ctx.real(0)
            for ell in range(s.d):
                term = ctx.mul(ctx.real(basis.f_product(ell, i1, i2) * inv_d2), pl[ell])
                if csq is not None:
                    term = ctx.mul(term, csq[ell])
                acc = ctx.add(acc, term)
            row.append(acc)
        p.append(row)
    return JointDistribution(s.twoJ, cos_theta12, p)
