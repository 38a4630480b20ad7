"""Invariant suites: every formula the theory states without numbers.

Each suite re-derives a family of identities and checks them either
exactly (rational paths) or within certified radii (ball paths).  The
suites back the `verify` subcommand and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .numerics import PrecisionContext, gauss_legendre
from .spinbasis import (
    chebyshev_basis,
    f_matrix,
    f_matrix_spectral,
    ladder,
    spin,
)
from .distributions import joint_direct, joint_factorized, joint_quadrature
from .wigner import wigner_closed, wigner_series, wigner_smoothed_special
from . import protocols as _protocols

__all__ = [
    "InvariantResult",
    "suite_basis",
    "suite_distributions",
    "suite_wigner",
    "suite_protocols",
    "run_suite",
    "SUITES",
]


@dataclass
class InvariantResult:
    """One checked identity: did it hold, and how close did it come?"""

    name: str
    passed: bool
    max_deviation: float
    location: str = ""

    def line(self) -> str:
        tag = "ok " if self.passed else "FAIL"
        loc = f"  [{self.location}]" if self.location else ""
        return f"{tag}  {self.name}  max|dev| = {self.max_deviation:.3e}{loc}"


def _track(worst, dev, loc, here):
    if dev > worst[0]:
        worst[0], worst[1] = dev, f"{loc} {here}"


def suite_basis(two_j_max: int, ctx: PrecisionContext) -> list:
    """Orthonormality, completeness, the f_l(j) identity, and the spectral F form."""
    results = []

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        for l1 in range(s.d):
            for l2 in range(l1, s.d):
                total = sum(
                    basis.core[l1][i] * basis.core[l2][i] for i in range(s.d)
                )
                if l1 == l2:
                    gap = total / basis.norm2[l1] - s.d
                else:
                    gap = total
                if gap != 0:
                    ok = False
                    _track(worst, abs(float(gap)), f"twoJ={twoJ}", f"l=({l1},{l2})")
    results.append(InvariantResult("orthonormality (exact)", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        for i1 in range(s.d):
            for i2 in range(i1, s.d):
                total = sum(basis.f_product(ell, i1, i2) for ell in range(s.d))
                expect = s.d if i1 == i2 else 0
                if total != expect:
                    ok = False
                    _track(worst, abs(float(total - expect)), f"twoJ={twoJ}", f"m-idx=({i1},{i2})")
    results.append(InvariantResult("completeness (exact)", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        lad = ladder(twoJ)
        for ell in range(s.d):
            lhs = basis.f(ell, s.m_values()[-1], ctx)
            rhs = ctx.div(
                ctx.mul(ctx.sqrt_fraction(Fraction(2 * ell + 1)), ctx.real(lad.aQ[ell])),
                lad.aW(ell, ctx),
            )
            gap = ctx.sub(lhs, rhs)
            dev = abs(float(gap.mid))
            if not gap.contains_zero():
                ok = False
            _track(worst, dev, f"twoJ={twoJ}", f"l={ell}")
    results.append(InvariantResult("f_l(j) product identity", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    angles = (0.3, 1.1, 2.7)
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        theta = angles[twoJ % len(angles)]
        basis = chebyshev_basis(twoJ)
        Fa = f_matrix(twoJ, theta, ctx)
        Fb = f_matrix_spectral(twoJ, theta, basis, ctx)
        for i1 in range(s.d):
            for i2 in range(s.d):
                gap = ctx.sub(Fa.entries[i1][i2], Fb.entries[i1][i2])
                if not gap.contains_zero():
                    ok = False
                _track(worst, abs(float(gap.mid)), f"twoJ={twoJ}", f"entry=({i1},{i2})")
    results.append(InvariantResult("spectral F-matrix form", ok, worst[0], worst[1]))
    return results


def suite_distributions(two_j_max: int, ctx: PrecisionContext) -> list:
    """Three-way joint-distribution agreement plus normalization and marginals."""
    results = []
    angles = (-0.83, -0.25, 0.5, 0.99)

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        for x in angles:
            a = joint_direct(twoJ, x, ctx)
            b = joint_factorized(twoJ, x, basis, ctx)
            for i1 in range(s.d):
                for i2 in range(s.d):
                    gap = ctx.sub(a.p[i1][i2], b.p[i1][i2])
                    if not gap.contains_zero():
                        ok = False
                    _track(worst, abs(float(gap.mid)), f"twoJ={twoJ} x={x}", f"({i1},{i2})")
    results.append(InvariantResult("direct vs factorized joint", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    quad_max = min(two_j_max, 12)
    for twoJ in range(1, quad_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        x = angles[twoJ % len(angles)]
        a = joint_quadrature(twoJ, x, basis, s.d + 2, ctx, check=False)
        b = joint_factorized(twoJ, x, basis, ctx)
        for i1 in range(s.d):
            for i2 in range(s.d):
                gap = ctx.sub(a.p[i1][i2], b.p[i1][i2])
                if not gap.contains_zero():
                    ok = False
                _track(worst, abs(float(gap.mid)), f"twoJ={twoJ} x={x}", f"({i1},{i2})")
    results.append(InvariantResult("quadrature vs factorized joint", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        basis = chebyshev_basis(twoJ)
        dist = joint_factorized(twoJ, Fraction(1, 3), basis, ctx)
        total = ctx.sub(dist.total(ctx), ctx.real(1))
        if not total.contains_zero():
            ok = False
        _track(worst, abs(float(total.mid)), f"twoJ={twoJ}", "total")
        for i1 in range(s.d):
            marg = ctx.sub(dist.marginal(i1, ctx), ctx.real(Fraction(1, s.d)))
            if not marg.contains_zero():
                ok = False
            _track(worst, abs(float(marg.mid)), f"twoJ={twoJ}", f"marginal i={i1}")
    results.append(InvariantResult("normalization and uniform marginals", ok, worst[0], worst[1]))
    return results


def suite_wigner(two_j_max: int, ctx: PrecisionContext) -> list:
    """Closed form vs series, the x=1 value, smoothing, and normalization."""
    results = []
    grid = [Fraction(k, 16) for k in range(-16, 17)]

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        for x in grid:
            gap = ctx.sub(wigner_closed(twoJ, x, ctx), wigner_series(twoJ, x, None, ctx))
            if not gap.contains_zero():
                ok = False
            _track(worst, abs(float(gap.mid)), f"twoJ={twoJ}", f"x={x}")
    results.append(InvariantResult("closed form vs series", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        s = spin(twoJ)
        peak = ctx.div(
            ctx.real(s.d * s.d),
            ctx.mul_scalar(ctx.mul(ctx.const_pi(), ctx.const_pi()), 16),
        )
        gap = ctx.sub(wigner_series(twoJ, 1, None, ctx), peak)
        if not gap.contains_zero():
            ok = False
        _track(worst, abs(float(gap.mid)), f"twoJ={twoJ}", "x=1")
    results.append(InvariantResult("peak value d^2/(4 pi)^2 at x=1", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, min(two_j_max, 20) + 1):
        c = _protocols.spectrum_special(twoJ, ctx).values
        for x in grid[::4]:
            gap = ctx.sub(
                wigner_series(twoJ, x, c, ctx), wigner_smoothed_special(twoJ, x, ctx)
            )
            if not gap.contains_zero():
                ok = False
            _track(worst, abs(float(gap.mid)), f"twoJ={twoJ}", f"x={x}")
    results.append(InvariantResult("special smoothing closed form", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in (1, min(two_j_max, 9)):
        s = spin(twoJ)
        rule = gauss_legendre(s.d + 1, ctx)
        acc = ctx.real(0)
        for u, w in rule:
            acc = ctx.add(acc, ctx.mul(w, wigner_series(twoJ, u, None, ctx)))
        pi = ctx.const_pi()
        gap = ctx.sub(ctx.mul(acc, ctx.mul_scalar(ctx.mul(pi, pi), 8)), ctx.real(1))
        if not gap.contains_zero():
            ok = False
        _track(worst, abs(float(gap.mid)), f"twoJ={twoJ}", "normalization")
    results.append(InvariantResult("8 pi^2 integral W dx = 1", ok, worst[0], worst[1]))
    return results


def suite_protocols(two_j_max: int, ctx: PrecisionContext) -> list:
    """Stochasticity, positivity, the agnostic taxonomy, and binned insufficiency."""
    results = []

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        for name in _protocols.PROTOCOLS:
            R = _protocols.build_protocol(name, twoJ, ctx)
            for which, sums in (("row", R.row_sums(ctx)), ("col", R.col_sums(ctx))):
                for k, v in enumerate(sums):
                    gap = ctx.sub(v, ctx.real(1))
                    if not gap.contains_zero():
                        ok = False
                    _track(worst, abs(float(gap.mid)), f"twoJ={twoJ} {name}", f"{which} {k}")
    results.append(InvariantResult("double stochasticity", ok, worst[0], worst[1]))

    worst = [0.0, ""]
    ok = True
    for twoJ in range(1, two_j_max + 1):
        for name in _protocols.PROTOCOLS:
            cert = _protocols.certify_positivity(
                _protocols.build_protocol(name, twoJ, ctx), ctx
            )
            if cert.verdict != "positive":
                ok = False
                _track(worst, abs(cert.min_entry_estimate), f"twoJ={twoJ} {name}", str(cert.min_entry_location))
    results.append(InvariantResult("entrywise positivity", ok, worst[0], worst[1]))

    ok = True
    loc = ""
    taxonomy_j = min(two_j_max, 4)
    basis = chebyshev_basis(taxonomy_j)
    tol = 2.0 ** (-(ctx.bits // 2))
    for name, expect in (
        ("special", True),
        ("trivial", True),
        ("oversufficient", True),
        ("binned", taxonomy_j <= 2),
    ):
        agnostic, _spec = _protocols.check_agnostic(
            _protocols.build_protocol(name, taxonomy_j, ctx, basis), basis, tol, ctx
        )
        if agnostic != expect:
            ok = False
            loc = f"{name} at twoJ={taxonomy_j}"
    results.append(InvariantResult("agnostic taxonomy", ok, 0.0, loc))

    ok = True
    loc = ""
    scan_j = min(two_j_max, 3) if two_j_max >= 2 else None
    if scan_j is not None and scan_j >= 2:
        basis = chebyshev_basis(scan_j)
        rep = _protocols.sufficiency_scan(
            _protocols.build_R_binned(scan_j, ctx), scan_j, basis, 200, ctx
        )
        if rep.verdict != "insufficient":
            ok = False
            loc = f"binned twoJ={scan_j}: {rep.verdict}"
        rep2 = _protocols.sufficiency_scan(
            _protocols.build_protocol("special", scan_j, ctx, basis), scan_j, basis, 200, ctx
        )
        if rep2.verdict != "minimally-sufficient":
            ok = False
            loc = f"special twoJ={scan_j}: {rep2.verdict}"
    results.append(InvariantResult("binned insufficient, special minimally sufficient", ok, 0.0, loc))
    return results


SUITES = {
    "basis": suite_basis,
    "distributions": suite_distributions,
    "wigner": suite_wigner,
    "protocols": suite_protocols,
}


def run_suite(name: str, two_j_max: int, ctx: PrecisionContext) -> list:
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(SUITES[key](two_j_max, ctx))
        return out
    return SUITES[name](two_j_max, ctx)
