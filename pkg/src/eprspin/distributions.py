"""The EPR-Bohm joint outcome distribution and its factorized forms.

All directional dependence is reduced to inner products before any
numerics: cos(alpha) = a.n for the one-axis functions, cos(theta12) = a1.a2
for the joint distribution.  Three independent routes to the joint
distribution (direct quantum, analytic factorized, sphere quadrature) act
as oracles for one another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .numerics import CertifiedReal, DomainError, PrecisionContext, gauss_legendre, legendre_ladder
from .spinbasis import ChebyshevBasis, chebyshev_basis, f_matrix_from_cos, spin

__all__ = [
    "AxisPair",
    "JointDistribution",
    "QuadratureUnderResolved",
    "one_axis",
    "joint_direct",
    "joint_factorized",
    "joint_quadrature",
    "correlation",
]


class QuadratureUnderResolved(RuntimeError):
    """Sphere quadrature disagrees with the analytic form beyond tolerance."""


@dataclass(frozen=True)
class AxisPair:
    """Two detector axes, reduced to their inner product."""

    cos_theta12: float

    def __post_init__(self):
        if not -1 <= self.cos_theta12 <= 1:
            raise DomainError("cos(theta12) must lie in [-1, 1]")


@dataclass
class JointDistribution:
    """p[m1][m2] for the two-detector outcomes of the singlet."""

    twoJ: int
    cos_theta12: float
    p: list

    def entry(self, m1, m2) -> CertifiedReal:
        s = spin(self.twoJ)
        return self.p[s.index_of(m1)][s.index_of(m2)]

    def total(self, ctx: PrecisionContext) -> CertifiedReal:
        return ctx.sum(v for row in self.p for v in row)

    def marginal(self, i1: int, ctx: PrecisionContext) -> CertifiedReal:
        return ctx.sum(self.p[i1])


def _check_cos(x):
    if isinstance(x, CertifiedReal):
        return
    if not -1 <= x <= 1:
        raise DomainError("cosine argument must lie in [-1, 1]")


def one_axis(two_j, m, cos_alpha, basis: ChebyshevBasis, ctx: PrecisionContext) -> CertifiedReal:
    """The Mermin-Schwarz one-axis function p_a(m | n).

    May be negative; that negativity is what detector smoothing must cure.
    """
    s = spin(two_j)
    _check_cos(cos_alpha)
    i = s.index_of(m)
    g = basis.g_table(ctx)
    pl = legendre_ladder(s.twoJ, ctx.real(cos_alpha), ctx)
    acc = ctx.real(0)
    for ell in range(s.d):
        acc = ctx.add(acc, ctx.mul(g[ell][i], pl[ell]))
    return ctx.mul(acc, ctx.real(Fraction(1, s.d)))


def one_axis_all(two_j, cos_alpha, basis: ChebyshevBasis, ctx: PrecisionContext):
    """One-axis values for every m at once (shared Legendre ladder)."""
    s = spin(two_j)
    g = basis.g_table(ctx)
    pl = legendre_ladder(s.twoJ, ctx.real(cos_alpha), ctx)
    inv_d = ctx.real(Fraction(1, s.d))
    out = []
    for i in range(s.d):
        acc = ctx.real(0)
        for ell in range(s.d):
            acc = ctx.add(acc, ctx.mul(g[ell][i], pl[ell]))
        out.append(ctx.mul(acc, inv_d))
    return out


def joint_direct(two_j, cos_theta12, ctx: PrecisionContext) -> JointDistribution:
    """p(m1, m2) = |<phi| m1 m2>|^2 computed through the F-matrix.

    The singlet's Schmidt form in the a1 basis gives
    p[m1][m2] = F_{-m1, m2}(theta12) / d_j.
    """
    s = spin(two_j)
    _check_cos(cos_theta12)
    F = f_matrix_from_cos(s, cos_theta12, ctx)
    inv_d = ctx.real(Fraction(1, s.d))
    p = [
        [ctx.mul(F.entries[s.d - 1 - i1][i2], inv_d) for i2 in range(s.d)]
        for i1 in range(s.d)
    ]
    return JointDistribution(s.twoJ, cos_theta12, p)


def joint_factorized(
    two_j, cos_theta12, basis: ChebyshevBasis, ctx: PrecisionContext
) -> JointDistribution:
    """The Mermin-Schwarz sphere integral, reduced by Legendre orthogonality.

    p[m1][m2] = d_j^{-2} sum_l f_l(m1) f_l(m2) P_l(-cos theta12), where the
    basis products are exact rationals.
    """
    s = spin(two_j)
    _check_cos(cos_theta12)
    if isinstance(cos_theta12, CertifiedReal):
        minus_x = ctx.neg(cos_theta12)
    else:
        minus_x = ctx.real(-cos_theta12)
    pl = legendre_ladder(s.twoJ, minus_x, ctx)
    inv_d2 = Fraction(1, s.d * s.d)
    p = []
    for i1 in range(s.d):
        row = []
        for i2 in range(s.d):
            acc = ctx.real(0)
            for ell in range(s.d):
                acc = ctx.add(
                    acc,
                    ctx.mul(ctx.real(basis.f_product(ell, i1, i2) * inv_d2), pl[ell]),
                )
            row.append(acc)
        p.append(row)
    return JointDistribution(s.twoJ, cos_theta12, p)


@lru_cache(maxsize=None)
def _azimuth_cosines(K: int, ctx: PrecisionContext):
    """cos(2 pi k / K) for k = 0..K//2, certified."""
    two_pi = ctx.mul_scalar(ctx.const_pi(), 2)
    return [
        ctx.cos(ctx.mul(two_pi, ctx.real(Fraction(k, K))))
        for k in range(K // 2 + 1)
    ]


def joint_quadrature(
    two_j,
    cos_theta12,
    basis: ChebyshevBasis,
    n_nodes: int,
    ctx: PrecisionContext,
    check: bool = True,
) -> JointDistribution:
    """Numeric evaluation of the hidden-variable sphere integral.

    Gauss-Legendre in the polar cosine with a1 on the pole; uniform
    azimuthal rule with 2 d_j points (exact for the degree-2j integrand).
    With `check`, the result is compared against the analytic factorized
    form and a disagreement beyond combined radii raises
    QuadratureUnderResolved.
    """
    s = spin(two_j)
    _check_cos(cos_theta12)
    d = s.d
    x12 = ctx.real(cos_theta12)
    s12 = ctx.sqrt(ctx.sub(ctx.real(1), ctx.mul(x12, x12)))
    rule = gauss_legendre(n_nodes, ctx)
    K = 2 * d
    cos_phi = _azimuth_cosines(K, ctx)
    g = basis.g_table(ctx)
    inv_d = ctx.real(Fraction(1, d))

    # One-axis table for detector 1 at the polar nodes.
    p1 = []  # [i_node][m1]
    sums = []  # azimuthal sums S_l per polar node
    for u, _w in rule:
        pl = legendre_ladder(s.twoJ, u, ctx)
        p1.append(
            [
                ctx.mul(ctx.sum(ctx.mul(g[ell][i], pl[ell]) for ell in range(d)), inv_d)
                for i in range(d)
            ]
        )
        # v(phi) = -(s12 * sin(theta_n) * cos(phi) + x12 * u)
        su = ctx.sqrt(ctx.sub(ctx.real(1), ctx.mul(u, u)))
        b = ctx.neg(ctx.mul(s12, su))
        c = ctx.neg(ctx.mul(x12, u))
        S = [ctx.real(0)] * d
        for k, cp in enumerate(cos_phi):
            v = ctx.add(c, ctx.mul(b, cp))
            plv = legendre_ladder(s.twoJ, v, ctx)
            weight = 1 if (k == 0 or 2 * k == K) else 2
            for ell in range(d):
                S[ell] = ctx.add(
                    S[ell], plv[ell] if weight == 1 else ctx.mul_scalar(plv[ell], 2)
                )
        sums.append(S)

    # q[m2] at each polar node: azimuth-averaged one-axis value.
    inv_dK = ctx.real(Fraction(1, d * K))
    q = [
        [
            ctx.mul(ctx.sum(ctx.mul(g[ell][i2], S[ell]) for ell in range(d)), inv_dK)
            for i2 in range(d)
        ]
        for S in sums
    ]

    half = ctx.real(Fraction(1, 2))
    p = []
    for i1 in range(d):
        row = []
        for i2 in range(d):
            acc = ctx.real(0)
            for (u, w), p1n, qn in zip(rule, p1, q):
                acc = ctx.add(acc, ctx.mul(w, ctx.mul(p1n[i1], qn[i2])))
            row.append(ctx.mul(acc, half))
        p.append(row)
    dist = JointDistribution(s.twoJ, cos_theta12, p)

    if check:
        ref = joint_factorized(s, cos_theta12, basis, ctx)
        for i1 in range(d):
            for i2 in range(d):
                a, b2 = dist.p[i1][i2], ref.p[i1][i2]
                gap = ctx.sub(a, b2)
                if not gap.contains_zero():
                    raise QuadratureUnderResolved(
                        f"quadrature with {n_nodes} polar nodes disagrees with the "
                        f"analytic form at (i1={i1}, i2={i2}) by {float(gap.mid):.3g}"
                    )
    return dist


def correlation(two_j, cos_theta_ab, R=None, ctx: PrecisionContext | None = None) -> CertifiedReal:
    """<(J1.a)(J2.b)> for the singlet, optionally smoothed by an error matrix.

    With an error matrix, R is applied at both detectors.  Unsmoothed the
    value is -j(j+1) cos(theta_ab) / 3; an agnostic protocol rescales it by
    the square of its degree-1 eigenvalue.
    """
    if ctx is None:
        ctx = PrecisionContext(256)
    s = spin(two_j)
    _check_cos(cos_theta_ab)
    basis = chebyshev_basis(s.twoJ)
    dist = joint_factorized(s, cos_theta_ab, basis, ctx)
    p = dist.p
    if R is not None:
        entries = R.entries
        d = s.d
        # p_bar = R p R^T
        tmp = [
            [ctx.sum(ctx.mul(entries[i1][k], p[k][i2]) for k in range(d)) for i2 in range(d)]
            for i1 in range(d)
        ]
        p = [
            [ctx.sum(ctx.mul(tmp[i1][k], entries[i2][k]) for k in range(d)) for i2 in range(d)]
            for i1 in range(d)
        ]
    ms = s.m_values()
    acc = ctx.real(0)
    for i1, m1 in enumerate(ms):
        for i2, m2 in enumerate(ms):
            acc = ctx.add(acc, ctx.mul(ctx.real(m1 * m2), p[i1][i2]))
    return acc
