"""Detector-error (coarse-graining) matrices and their three verdicts.

The four protocols from the literature are built here: the special
(agnostic and minimal) spectrum, the trivial and oversufficient agnostic
spectra, and the gnostic binned protocol.  Positivity is certified with
escalating precision; sufficiency is scanned over the one-axis argument;
agnosticism is tested as an eigenoperator property of the discrete
Chebyshev basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numerics import CertifiedReal, DomainError, PrecisionContext, binomial
from .spinbasis import ChebyshevBasis, chebyshev_basis, spin
from .distributions import one_axis, one_axis_all

__all__ = [
    "Spectrum",
    "ErrorMatrix",
    "PositivityCertificate",
    "SufficiencyReport",
    "spectrum_special",
    "spectrum_trivial",
    "spectrum_oversufficient",
    "build_R",
    "build_R_binned",
    "build_protocol",
    "mix_with_trivial",
    "certify_positivity",
    "smoothed_one_axis",
    "special_smoothed_closed",
    "sufficiency_scan",
    "check_agnostic",
    "gaussian_approx",
    "h_function",
    "repair_binned",
]

PROTOCOLS = ("special", "trivial", "oversufficient", "binned")


@dataclass
class Spectrum:
    """Eigenvalues c_l of an agnostic error matrix on the f_l basis.

    `exact` holds the c_l as rationals when they are rational; `sq_exact`
    holds the exact rational squares c_l^2 (always available for the
    special protocol, whose c_l themselves are irrational).
    """

    twoJ: int
    values: list  # CertifiedReal per degree
    tag: str = "custom"
    exact: list | None = None
    sq_exact: list | None = None

    def rebuilt(self, ctx: PrecisionContext) -> "Spectrum":
        if self.exact is not None:
            values = [ctx.real(c) for c in self.exact]
        elif self.sq_exact is not None:
            values = [ctx.sqrt_fraction(q) for q in self.sq_exact]
        else:
            values = [ctx.real(v.mid) for v in self.values]
        return Spectrum(self.twoJ, values, self.tag, self.exact, self.sq_exact)


def spectrum_special(two_j, ctx: PrecisionContext) -> Spectrum:
    """c_l = prod_{k=0..l} sqrt((2j+1-k)/(2j+1+k)), kept exact as squares."""
    s = spin(two_j)
    sq = [Fraction(1)]
    for k in range(1, s.d):
        sq.append(sq[-1] * Fraction(s.d - k, s.d + k))
    values = [ctx.sqrt_fraction(q) for q in sq]
    return Spectrum(s.twoJ, values, "special", None, sq)


def spectrum_trivial(two_j, ctx: PrecisionContext | None = None) -> Spectrum:
    """c_l = delta_{l0}: total coarse-graining, R = 1/d_j everywhere."""
    s = spin(two_j)
    if ctx is None:
        ctx = PrecisionContext(64)
    exact = [Fraction(1)] + [Fraction(0)] * s.twoJ
    return Spectrum(s.twoJ, [ctx.real(c) for c in exact], "trivial", exact, [c * c for c in exact])


def spectrum_oversufficient(two_j, ctx: PrecisionContext) -> Spectrum:
    """c_l = (aQ/aW)^2: the square of the special spectrum, exactly rational."""
    s = spin(two_j)
    exact = spectrum_special(s, ctx).sq_exact
    return Spectrum(s.twoJ, [ctx.real(c) for c in exact], "oversufficient", list(exact), [c * c for c in exact])


@dataclass
class PositivityCertificate:
    """Machine-checked verdict on entrywise positivity of an error matrix."""

    verdict: str  # "positive" | "negative" | "indeterminate"
    min_entry_location: tuple
    min_entry_estimate: float
    radius: float
    bits_used: int


@dataclass
class SufficiencyReport:
    """Result of scanning the smoothed one-axis functions for negativity."""

    verdict: str  # "sufficient" | "minimally-sufficient" | "insufficient" | "indeterminate"
    min_value: float
    min_radius: float
    location: tuple  # (m, cos_alpha)
    grid_n: int


class ErrorMatrix:
    """A doubly stochastic detector-error matrix with provenance.

    `exact_entries` is set when every entry is an exact rational (trivial,
    oversufficient, binned, and convex mixtures thereof); `spectrum` is set
    when the matrix is agnostic by construction.
    """

    def __init__(self, two_j, entries, protocol="custom", spectrum=None, exact_entries=None):
        self.spin = spin(two_j)
        self.twoJ = self.spin.twoJ
        self.entries = entries
        self.protocol = protocol
        self.spectrum = spectrum
        self.exact_entries = exact_entries

    def entry(self, m, mp) -> CertifiedReal:
        return self.entries[self.spin.index_of(m)][self.spin.index_of(mp)]

    def row_sums(self, ctx: PrecisionContext):
        return [ctx.sum(row) for row in self.entries]

    def col_sums(self, ctx: PrecisionContext):
        d = self.spin.d
        return [ctx.sum(self.entries[i][k] for i in range(d)) for k in range(d)]

    def rebuilt(self, ctx: PrecisionContext) -> "ErrorMatrix":
        """The same matrix re-evaluated at another working precision."""
        if self.exact_entries is not None:
            entries = [[ctx.real(q) for q in row] for row in self.exact_entries]
            return ErrorMatrix(self.spin, entries, self.protocol, self.spectrum, self.exact_entries)
        if self.spectrum is not None:
            return build_R(self.spectrum.rebuilt(ctx), chebyshev_basis(self.twoJ), ctx)
        raise DomainError("matrix has no exact provenance to rebuild from")


def build_R(spectrum: Spectrum, basis: ChebyshevBasis, ctx: PrecisionContext) -> ErrorMatrix:
    """R[m][m'] = d_j^{-1} sum_l c_l f_l(m) f_l(m') from an agnostic spectrum.

    The basis products are exact rationals, so each entry is a short sum of
    rationals times single certified square roots.
    """
    s = spin(spectrum.twoJ)
    d = s.d
    c0 = spectrum.values[0]
    exact0 = spectrum.exact[0] if spectrum.exact is not None else None
    if exact0 is not None:
        if exact0 != 1:
            raise DomainError("spectrum must have c_0 = 1 for a stochastic matrix")
    elif spectrum.sq_exact is not None:
        if spectrum.sq_exact[0] != 1:
            raise DomainError("spectrum must have c_0 = 1 for a stochastic matrix")
    elif not c0.contains(1):
        raise DomainError("spectrum must have c_0 = 1 for a stochastic matrix")

    if spectrum.exact is not None:
        exact = []
        for i1 in range(d):
            row = []
            for i2 in range(d):
                total = sum(
                    cl * basis.f_product(ell, i1, i2)
                    for ell, cl in enumerate(spectrum.exact)
                    if cl
                ) / d
                row.append(total)
            exact.append(row)
        entries = [[ctx.real(q) for q in row] for row in exact]
        return ErrorMatrix(s, entries, spectrum.tag, spectrum, exact)

    inv_d = Fraction(1, d)
    entries = []
    for i1 in range(d):
        row = []
        for i2 in range(d):
            acc = ctx.real(0)
            for ell in range(d):
                coeff = basis.f_product(ell, i1, i2) * inv_d
                if coeff:
                    acc = ctx.add(acc, ctx.mul(ctx.real(coeff), spectrum.values[ell]))
            row.append(acc)
        entries.append(row)
    return ErrorMatrix(s, entries, spectrum.tag, spectrum, None)


def build_R_binned(two_j, ctx: PrecisionContext) -> ErrorMatrix:
    """The binned protocol: R[m][m'] = (d_j/2) * integral of F_{jm'} over bin m.

    Bins are x in [(2m-1)/d_j, (2m+1)/d_j]; the integrand is the binomial
    polynomial in x = cos(theta), integrated exactly in rationals.
    """
    s = spin(two_j)
    d = s.d
    exact = [[Fraction(0)] * d for _ in range(d)]
    for i2 in range(d):
        # Expand C(2j, j-m') ((1+x)/2)^{i2} ((1-x)/2)^{2j-i2} in powers of x.
        pos = [Fraction(0)] * (s.twoJ + 1)
        pos[0] = Fraction(1)
        dp, dm = i2, s.twoJ - i2
        for _ in range(dp):  # multiply by (1+x)
            nxt = [Fraction(0)] * (s.twoJ + 1)
            for k, cval in enumerate(pos):
                if cval:
                    nxt[k] += cval
                    if k + 1 <= s.twoJ:
                        nxt[k + 1] += cval
            pos = nxt
        for _ in range(dm):  # multiply by (1-x)
            nxt = [Fraction(0)] * (s.twoJ + 1)
            for k, cval in enumerate(pos):
                if cval:
                    nxt[k] += cval
                    if k + 1 <= s.twoJ:
                        nxt[k + 1] -= cval
            pos = nxt
        scale = binomial(s.twoJ, dm) * Fraction(1, 2**s.twoJ)
        coeffs = [scale * cval for cval in pos]

        def antideriv(x: Fraction) -> Fraction:
            return sum(cv * x ** (k + 1) / (k + 1) for k, cv in enumerate(coeffs))

        for i1 in range(d):
            tm = 2 * i1 - s.twoJ
            lo, hi = Fraction(tm - 1, d), Fraction(tm + 1, d)
            exact[i1][i2] = Fraction(d, 2) * (antideriv(hi) - antideriv(lo))
    entries = [[ctx.real(q) for q in row] for row in exact]
    return ErrorMatrix(s, entries, "binned", None, exact)


def build_protocol(name: str, two_j, ctx: PrecisionContext, basis: ChebyshevBasis | None = None) -> ErrorMatrix:
    """Build one of the four named protocols."""
    s = spin(two_j)
    if basis is None:
        basis = chebyshev_basis(s.twoJ)
    if name == "special":
        return build_R(spectrum_special(s, ctx), basis, ctx)
    if name == "trivial":
        return build_R(spectrum_trivial(s, ctx), basis, ctx)
    if name == "oversufficient":
        return build_R(spectrum_oversufficient(s, ctx), basis, ctx)
    if name == "binned":
        return build_R_binned(s, ctx)
    raise DomainError(f"unknown protocol {name!r}")


def mix_with_trivial(R: ErrorMatrix, lam: Fraction, ctx: PrecisionContext) -> ErrorMatrix:
    """Convex combination (1-lam) R + lam R_trivial, exact when R is exact."""
    if not 0 <= lam <= 1:
        raise DomainError("mixing weight must lie in [0, 1]")
    s = R.spin
    uniform = Fraction(1, s.d)
    if R.exact_entries is not None:
        lam = Fraction(lam)
        exact = [
            [(1 - lam) * q + lam * uniform for q in row] for row in R.exact_entries
        ]
        entries = [[ctx.real(q) for q in row] for row in exact]
        return ErrorMatrix(s, entries, f"{R.protocol}+trivial", None, exact)
    lamb = ctx.real(Fraction(lam))
    one_minus = ctx.sub(ctx.real(1), lamb)
    u = ctx.real(uniform)
    entries = [
        [ctx.add(ctx.mul(one_minus, q), ctx.mul(lamb, u)) for q in row]
        for row in R.entries
    ]
    return ErrorMatrix(s, entries, f"{R.protocol}+trivial", None, None)


def certify_positivity(R: ErrorMatrix, ctx: PrecisionContext) -> PositivityCertificate:
    """Resolve the sign of every entry, escalating precision on demand.

    The verdict is "indeterminate" only if some entry's sign is still
    unresolved at the context's max_bits; nothing is ever thresholded.
    """
    s = R.spin
    ms = s.m_values()
    cur, cur_ctx = R, ctx
    while True:
        undecided = None
        negative = None
        min_lower, min_loc, min_est, min_rad = None, None, None, None
        for i1 in range(s.d):
            for i2 in range(s.d):
                e = cur.entries[i1][i2]
                lo = e.lower()
                if min_lower is None or lo < min_lower:
                    min_lower = lo
                    min_loc = (ms[i1], ms[i2])
                    min_est, min_rad = e.estimate, e.radius
                if e.is_negative():
                    negative = ((ms[i1], ms[i2]), e)
                elif not e.is_positive():
                    undecided = (i1, i2)
        if negative is not None:
            loc, e = negative
            return PositivityCertificate("negative", loc, e.estimate, e.radius, cur_ctx.bits)
        if undecided is None:
            return PositivityCertificate("positive", min_loc, min_est, min_rad, cur_ctx.bits)
        nxt = cur_ctx.escalated()
        if nxt is None:
            e = cur.entries[undecided[0]][undecided[1]]
            loc = (ms[undecided[0]], ms[undecided[1]])
            return PositivityCertificate("indeterminate", loc, e.estimate, e.radius, cur_ctx.bits)
        cur_ctx = nxt
        cur = cur.rebuilt(cur_ctx)


def smoothed_one_axis(R: ErrorMatrix, two_j, m, cos_alpha, basis: ChebyshevBasis, ctx: PrecisionContext) -> CertifiedReal:
    """p_bar(m | n) = sum_m' R[m][m'] p(m' | n)."""
    s = spin(two_j)
    i = s.index_of(m)
    p = one_axis_all(s, cos_alpha, basis, ctx)
    return ctx.sum(ctx.mul(R.entries[i][k], p[k]) for k in range(s.d))


def special_smoothed_closed(two_j, m, cos_alpha):
    """Binomial closed form of the special protocol's smoothed one-axis function.

    Exact (a Fraction) whenever cos_alpha is rational; manifestly
    nonnegative, vanishing at cos_alpha = 1 for m < j and at -1 for m > -j.
    """
    s = spin(two_j)
    i = s.index_of(m)
    x = Fraction(cos_alpha) if not isinstance(cos_alpha, Fraction) else cos_alpha
    if not -1 <= x <= 1:
        raise DomainError("cos(alpha) must lie in [-1, 1]")
    up = (1 + x) / 2
    dn = (1 - x) / 2
    return binomial(s.twoJ, s.twoJ - i) * up**i * dn ** (s.twoJ - i)


def sufficiency_scan(R: ErrorMatrix, two_j, basis: ChebyshevBasis, grid_n: int, ctx: PrecisionContext) -> SufficiencyReport:
    """Scan the smoothed one-axis functions over m and a cos(alpha) grid.

    The special protocol is scanned through its exact closed form at
    rational grid points (its known zeros sit exactly at the endpoints);
    other protocols are scanned in ball arithmetic with a golden-section
    refinement around the lowest grid points.  An "insufficient" verdict
    requires a certified negative value.
    """
    if grid_n < 100:
        raise DomainError("grid_n must be at least 100")
    s = spin(two_j)
    ms = s.m_values()

    if R.protocol == "special":
        # Exact integer path: on the grid x = 2k/(N-1) - 1 the closed form is
        # C(2j, j+m) k^{j+m} (N-1-k)^{j-m} / (N-1)^{2j}, a nonnegative integer
        # numerator over a shared denominator.
        N1 = grid_n - 1
        combs = [int(binomial(s.twoJ, i)) for i in range(s.d)]
        min_num, min_loc = None, None
        for k in range(grid_n):
            a, b = k, N1 - k
            apow = [1]
            bpow = [1]
            for _ in range(s.twoJ):
                apow.append(apow[-1] * a)
                bpow.append(bpow[-1] * b)
            for i, m in enumerate(ms):
                num = combs[i] * apow[i] * bpow[s.twoJ - i]
                if min_num is None or num < min_num:
                    min_num = num
                    min_loc = (m, Fraction(2 * k, N1) - 1)
                    if num == 0:
                        break
            if min_num == 0:
                break
        verdict = "minimally-sufficient" if min_num == 0 else "sufficient"
        min_val = Fraction(min_num, N1**s.twoJ)
        return SufficiencyReport(verdict, float(min_val), 0.0, min_loc, grid_n)

    xs = [-1.0 + 2.0 * k / (grid_n - 1) for k in range(grid_n)]
    xs[-1] = 1.0
    evaluations = []  # (lower_bound, value, m, x)
    certified_negative = None
    d = s.d

    def evaluate(x):
        nonlocal certified_negative
        p = one_axis_all(s, x, basis, ctx)
        out = []
        for i in range(d):
            v = ctx.sum(ctx.mul(R.entries[i][k], p[k]) for k in range(d))
            out.append((v.lower(), v, ms[i], x))
            if v.is_negative() and certified_negative is None:
                certified_negative = (v, ms[i], x)
        return out

    for x in xs:
        evaluations.extend(evaluate(x))

    # Golden-section style refinement around the three lowest grid points.
    evaluations.sort(key=lambda t: t[0])
    phi = (math.sqrt(5) - 1) / 2
    step = 2.0 / (grid_n - 1)
    for _, _, m, x0 in evaluations[:3]:
        lo, hi = max(-1.0, x0 - step), min(1.0, x0 + step)
        for _ in range(40):
            x1 = hi - phi * (hi - lo)
            x2 = lo + phi * (hi - lo)
            p1 = smoothed_one_axis(R, s, m, x1, basis, ctx)
            p2 = smoothed_one_axis(R, s, m, x2, basis, ctx)
            evaluations.append((p1.lower(), p1, m, x1))
            evaluations.append((p2.lower(), p2, m, x2))
            if certified_negative is None and p1.is_negative():
                certified_negative = (p1, m, x1)
            if certified_negative is None and p2.is_negative():
                certified_negative = (p2, m, x2)
            if p1.mid < p2.mid:
                hi = x2
            else:
                lo = x1
            if hi - lo < 1e-12:
                break

    evaluations.sort(key=lambda t: t[0])
    _, vmin, m_min, x_min = evaluations[0]
    if certified_negative is not None:
        v, m, x = certified_negative
        return SufficiencyReport("insufficient", v.estimate, v.radius, (m, x), grid_n)
    if vmin.is_positive():
        return SufficiencyReport("sufficient", vmin.estimate, vmin.radius, (m_min, x_min), grid_n)
    # Minimum is within radius of zero and nothing is certified negative.
    return SufficiencyReport("minimally-sufficient", vmin.estimate, vmin.radius, (m_min, x_min), grid_n)


def check_agnostic(R: ErrorMatrix, basis: ChebyshevBasis, tol: float, ctx: PrecisionContext):
    """Eigenoperator test: is R f_l = c_l f_l for every degree l?

    Returns (verdict, estimated spectrum); the spectrum entries are
    Rayleigh quotients d_j^{-1} sum_m f_l(m) (R f_l)(m).
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    s = R.spin
    d = s.d
    f = basis.f_table(ctx)
    inv_d = ctx.real(Fraction(1, d))
    estimates = []
    agnostic = True
    for ell in range(d):
        y = [ctx.sum(ctx.mul(R.entries[i][k], f[ell][k]) for k in range(d)) for i in range(d)]
        c = ctx.mul(ctx.sum(ctx.mul(f[ell][i], y[i]) for i in range(d)), inv_d)
        resid_sq = ctx.real(0)
        for i in range(d):
            gap = ctx.sub(y[i], ctx.mul(c, f[ell][i]))
            resid_sq = ctx.add(resid_sq, ctx.mul(gap, gap))
        resid = ctx.sqrt(resid_sq)
        if float(resid.upper()) >= tol:
            agnostic = False
        estimates.append(c)
    return agnostic, Spectrum(s.twoJ, estimates, "estimated")


def gaussian_approx(two_j, m, mp, reading: str = "variance") -> float:
    """Large-j Gaussian picture of the special protocol's error matrix.

    `reading` selects the width formula: "variance" uses
    sigma_x^2 = (1 - x_{m'}^2) / (2j) (the binomial variance of the smoothed
    one-axis function); "printed" uses sigma_x^2 = 1 - x_{m'}^2 / (2j), the
    formula as it appears in print, which does not shrink with j.
    """
    s = spin(two_j)
    j = float(s.twoJ) / 2
    if j == 0:
        raise DomainError("gaussian approximation needs j > 0")
    xm = float(Fraction(m)) / j
    xmp = float(Fraction(mp)) / j
    if reading == "variance":
        sigma_sq = (1 - xmp * xmp) / (2 * j)
    elif reading == "printed":
        sigma_sq = 1 - xmp * xmp / (2 * j)
    else:
        raise DomainError("reading must be 'variance' or 'printed'")
    if sigma_sq <= 0:
        raise DomainError("width formula degenerates this close to |m'| = j")
    return math.exp(-((xm - xmp) ** 2) / (2 * sigma_sq)) / (j * math.sqrt(2 * math.pi * sigma_sq))


def h_function(two_j, m, x, basis: ChebyshevBasis, ctx: PrecisionContext) -> CertifiedReal:
    """h_m(x) = d_j^{-1} sum_l sqrt(2l+1) f_l(m) P_l(x) - the one-axis kernel."""
    return one_axis(two_j, m, x, basis, ctx)


def repair_binned(two_j, basis: ChebyshevBasis, ctx: PrecisionContext, grid_n: int = 256, iterations: int = 16) -> tuple:
    """Smallest trivial-protocol admixture that makes the binned protocol sufficient.

    Bisects on the mixing weight; "sufficient" means the scan certifies no
    negative smoothed one-axis value.  Returns (lambda, mixed matrix).
    """
    s = spin(two_j)
    R = build_R_binned(s, ctx)

    def sufficient(lam: Fraction) -> bool:
        mixed = mix_with_trivial(R, lam, ctx)
        report = sufficiency_scan(mixed, s, basis, max(grid_n, 100), ctx)
        return report.verdict in ("sufficient", "minimally-sufficient")

    lo, hi = Fraction(0), Fraction(1)
    if sufficient(lo):
        return lo, R
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if sufficient(mid):
            hi = mid
        else:
            lo = mid
    return hi, mix_with_trivial(R, hi, ctx)
