"""Detector-error protocols: positivity, sufficiency, agnosticism."""

import math
from fractions import Fraction

import pytest

from eprspin.numerics import DomainError, PrecisionContext
from eprspin.spinbasis import chebyshev_basis
from eprspin.distributions import one_axis
from eprspin.protocols import (
    build_R,
    build_R_binned,
    build_protocol,
    certify_positivity,
    check_agnostic,
    gaussian_approx,
    h_function,
    mix_with_trivial,
    repair_binned,
    smoothed_one_axis,
    special_smoothed_closed,
    spectrum_oversufficient,
    spectrum_special,
    spectrum_trivial,
    sufficiency_scan,
)

CTX = PrecisionContext(128)


class TestSpectra:
    def test_special_squares(self):
        # c_l^2 = prod_{k=1..l} (d-k)/(d+k); also equals aQ_l / aP_l.
        spec = spectrum_special(2, CTX)  # j = 1, d = 3
        assert spec.sq_exact == [Fraction(1), Fraction(1, 2), Fraction(1, 10)]
        from eprspin.spinbasis import ladder

        lad = ladder(2)
        assert spec.sq_exact == [lad.aQ[ell] / lad.aP[ell] for ell in range(3)]

    def test_special_c1_squared_is_j_over_jplus1(self):
        for twoJ in (1, 2, 5, 12):
            spec = spectrum_special(twoJ, CTX)
            j = Fraction(twoJ, 2)
            assert spec.sq_exact[1] == j / (j + 1)

    def test_trivial(self):
        spec = spectrum_trivial(4, CTX)
        assert spec.exact == [1, 0, 0, 0, 0]

    def test_oversufficient_is_square_of_special(self):
        so = spectrum_oversufficient(3, CTX)
        ss = spectrum_special(3, CTX)
        assert so.exact == ss.sq_exact

    def test_spectra_decrease_from_one(self):
        spec = spectrum_special(8, CTX)
        sq = spec.sq_exact
        assert sq[0] == 1
        assert all(sq[k] > sq[k + 1] > 0 for k in range(len(sq) - 1))


class TestBuildR:
    def test_trivial_is_uniform(self):
        R = build_protocol("trivial", 3, CTX)
        assert all(q == Fraction(1, 4) for row in R.exact_entries for q in row)

    def test_spin_half_special_off_diagonal(self):
        # The widely quoted 21.1% error rate: (1 - sqrt(1/3)) / 2.
        R = build_protocol("special", 1, CTX)
        v = R.entry(Fraction(1, 2), Fraction(-1, 2))
        expect = (1 - math.sqrt(1 / 3)) / 2
        assert abs(v.estimate - expect) < 1e-15
        # Full-precision check: (1 - 2v)^2 = 1/3 exactly.
        square = CTX.powi(CTX.sub(CTX.real(1), CTX.mul_scalar(v, 2)), 2)
        gap = CTX.sub(square, CTX.real(Fraction(1, 3)))
        assert gap.contains_zero()
        assert abs(float(gap.mid)) < 1e-35
        assert abs(v.estimate * 100 - 21.1) < 0.05

    def test_binned_spin_half(self):
        R = build_R_binned(1, CTX)
        assert R.exact_entries == [
            [Fraction(3, 4), Fraction(1, 4)],
            [Fraction(1, 4), Fraction(3, 4)],
        ]

    def test_binned_rows_and_columns_sum_to_one_exactly(self):
        for twoJ in (1, 2, 5, 9):
            R = build_R_binned(twoJ, CTX)
            d = twoJ + 1
            for row in R.exact_entries:
                assert sum(row) == 1
            for k in range(d):
                assert sum(R.exact_entries[i][k] for i in range(d)) == 1

    @pytest.mark.parametrize("name", ["special", "trivial", "oversufficient", "binned"])
    def test_doubly_stochastic(self, name):
        R = build_protocol(name, 6, CTX)
        for total in R.row_sums(CTX) + R.col_sums(CTX):
            gap = CTX.sub(total, CTX.real(1))
            assert gap.contains_zero()

    def test_c0_constraint_enforced(self):
        spec = spectrum_trivial(2, CTX)
        spec.exact[0] = Fraction(1, 2)
        with pytest.raises(DomainError):
            build_R(spec, chebyshev_basis(2), CTX)

    def test_rebuild_preserves_value(self):
        R = build_protocol("special", 4, CTX)
        R2 = R.rebuilt(PrecisionContext(256))
        for i1 in range(5):
            for i2 in range(5):
                gap = CTX.sub(R.entries[i1][i2], R2.entries[i1][i2])
                assert gap.contains_zero()
                assert R2.entries[i1][i2].radius < R.entries[i1][i2].radius


class TestPositivity:
    @pytest.mark.parametrize("twoJ", [1, 2, 5, 12, 20])
    def test_special_certified_positive(self, twoJ):
        cert = certify_positivity(build_protocol("special", twoJ, CTX), CTX)
        assert cert.verdict == "positive"
        assert cert.min_entry_estimate > 0
        assert cert.bits_used >= 128

    def test_trivial_and_binned_positive(self):
        for name in ("trivial", "binned"):
            cert = certify_positivity(build_protocol(name, 7, CTX), CTX)
            assert cert.verdict == "positive"

    def test_minimum_location_is_a_corner(self):
        # The smallest special-protocol entry sits at maximal |m - m'|.
        cert = certify_positivity(build_protocol("special", 10, CTX), CTX)
        m, mp = cert.min_entry_location
        assert abs(m - mp) == 10

    def test_escalation_resolves_tiny_entries(self):
        # At 2j = 30 the smallest entry is ~1e-27, below double precision
        # noise but far above the 128-bit radius; no escalation needed.
        ctx = PrecisionContext(128, max_bits=1024)
        cert = certify_positivity(build_protocol("special", 30, ctx), ctx)
        assert cert.verdict == "positive"
        assert cert.min_entry_estimate < 1e-20

    def test_negative_matrix_detected(self):
        from eprspin.protocols import ErrorMatrix

        entries = [[CTX.real(Fraction(3, 2)), CTX.real(Fraction(-1, 2))],
                   [CTX.real(Fraction(-1, 2)), CTX.real(Fraction(3, 2))]]
        exact = [[Fraction(3, 2), Fraction(-1, 2)], [Fraction(-1, 2), Fraction(3, 2)]]
        R = ErrorMatrix(1, entries, "custom", None, exact)
        cert = certify_positivity(R, CTX)
        assert cert.verdict == "negative"


class TestSmoothing:
    @pytest.mark.parametrize("twoJ", [1, 2, 5])
    def test_special_matches_binomial_closed_form(self, twoJ):
        basis = chebyshev_basis(twoJ)
        R = build_protocol("special", twoJ, CTX)
        ms = [Fraction(2 * i - twoJ, 2) for i in range(twoJ + 1)]
        for m in ms:
            for x in (Fraction(-1), Fraction(-1, 3), Fraction(0), Fraction(4, 5), Fraction(1)):
                a = smoothed_one_axis(R, twoJ, m, x, basis, CTX)
                b = special_smoothed_closed(twoJ, m, x)
                gap = CTX.sub(a, CTX.real(b))
                assert gap.contains_zero()

    def test_closed_form_zeros_at_endpoints(self):
        # Exact zeros: at cos a = 1 for every m < j, at -1 for every m > -j.
        twoJ = 6
        ms = [Fraction(2 * i - twoJ, 2) for i in range(twoJ + 1)]
        for m in ms[:-1]:
            assert special_smoothed_closed(twoJ, m, Fraction(1)) == 0
        for m in ms[1:]:
            assert special_smoothed_closed(twoJ, m, Fraction(-1)) == 0
        assert special_smoothed_closed(twoJ, ms[-1], Fraction(1)) == 1

    def test_closed_form_domain(self):
        with pytest.raises(DomainError):
            special_smoothed_closed(2, 1, Fraction(3, 2))

    def test_h_function_is_one_axis(self):
        basis = chebyshev_basis(3)
        a = h_function(3, Fraction(1, 2), 0.4, basis, CTX)
        b = one_axis(3, Fraction(1, 2), 0.4, basis, CTX)
        assert a.estimate == b.estimate


class TestSufficiency:
    def test_special_is_minimally_sufficient(self):
        twoJ = 5
        rep = sufficiency_scan(
            build_protocol("special", twoJ, CTX), twoJ, chebyshev_basis(twoJ), 256, CTX
        )
        assert rep.verdict == "minimally-sufficient"
        assert rep.min_value == 0
        assert abs(rep.location[1]) == 1

    def test_trivial_is_sufficient(self):
        rep = sufficiency_scan(
            build_protocol("trivial", 4, CTX), 4, chebyshev_basis(4), 128, CTX
        )
        assert rep.verdict == "sufficient"
        assert rep.min_value > 0

    def test_oversufficient_has_positive_minimum(self):
        rep = sufficiency_scan(
            build_protocol("oversufficient", 4, CTX), 4, chebyshev_basis(4), 128, CTX
        )
        assert rep.verdict == "sufficient"
        assert rep.min_value > rep.min_radius

    @pytest.mark.parametrize("twoJ", [2, 3, 5])
    def test_binned_is_insufficient(self, twoJ):
        rep = sufficiency_scan(
            build_R_binned(twoJ, CTX), twoJ, chebyshev_basis(twoJ), 128, CTX
        )
        assert rep.verdict == "insufficient"
        assert rep.min_value < -rep.min_radius

    def test_grid_floor(self):
        with pytest.raises(DomainError):
            sufficiency_scan(build_protocol("trivial", 2, CTX), 2, chebyshev_basis(2), 10, CTX)


class TestAgnostic:
    @pytest.mark.parametrize("name", ["special", "trivial", "oversufficient"])
    def test_agnostic_protocols(self, name):
        twoJ = 4
        basis = chebyshev_basis(twoJ)
        ok, spec = check_agnostic(build_protocol(name, twoJ, CTX), basis, 1e-25, CTX)
        assert ok
        gap = CTX.sub(spec.values[0], CTX.real(1))
        assert gap.contains_zero()

    def test_binned_is_gnostic_beyond_spin_one(self):
        for twoJ in (3, 4, 5):
            basis = chebyshev_basis(twoJ)
            ok, _ = check_agnostic(build_R_binned(twoJ, CTX), basis, 1e-25, CTX)
            assert not ok

    def test_binned_accidentally_agnostic_at_tiny_spin(self):
        # With d <= 3 the binned matrix happens to commute with the basis.
        for twoJ in (1, 2):
            basis = chebyshev_basis(twoJ)
            ok, _ = check_agnostic(build_R_binned(twoJ, CTX), basis, 1e-25, CTX)
            assert ok

    def test_estimated_spectrum_roundtrips(self):
        twoJ = 3
        basis = chebyshev_basis(twoJ)
        R = build_protocol("special", twoJ, CTX)
        _, est = check_agnostic(R, basis, 1e-25, CTX)
        R2 = build_R(est, basis, CTX)
        for i1 in range(twoJ + 1):
            for i2 in range(twoJ + 1):
                gap = CTX.sub(R.entries[i1][i2], R2.entries[i1][i2])
                assert gap.contains_zero()

    def test_tolerance_must_be_positive(self):
        with pytest.raises(DomainError):
            check_agnostic(build_protocol("trivial", 2, CTX), chebyshev_basis(2), 0, CTX)


class TestGaussianPicture:
    def test_peaks_on_the_diagonal(self):
        for mp in (0, 1, 2):
            on = gaussian_approx(20, mp, mp)
            off = gaussian_approx(20, mp + 3, mp)
            assert on > off

    def test_width_shrinks_with_j_in_variance_reading(self):
        narrow = gaussian_approx(80, 4, 0) / gaussian_approx(80, 0, 0)
        wide = gaussian_approx(20, 1, 0) / gaussian_approx(20, 0, 0)
        assert narrow < wide

    def test_printed_reading_differs(self):
        assert gaussian_approx(20, 2, 3) != gaussian_approx(20, 2, 3, "printed")

    def test_tracks_true_matrix_shape(self):
        # Within |m|, |m'| <= j/2 the Gaussian ranks entries like the
        # exact special matrix does.
        twoJ = 40
        R = build_protocol("special", twoJ, CTX)
        g_near = gaussian_approx(twoJ, 1, 0)
        g_far = gaussian_approx(twoJ, 8, 0)
        e_near = R.entry(1, 0).estimate
        e_far = R.entry(8, 0).estimate
        assert g_near > g_far and e_near > e_far

    def test_domain(self):
        with pytest.raises(DomainError):
            gaussian_approx(4, 0, 2)  # width degenerates at m' = j
        with pytest.raises(DomainError):
            gaussian_approx(4, 0, 0, "nonsense")


class TestRepair:
    def test_mix_weights_checked(self):
        R = build_R_binned(2, CTX)
        with pytest.raises(DomainError):
            mix_with_trivial(R, Fraction(3, 2), CTX)

    def test_full_mix_is_trivial(self):
        R = mix_with_trivial(build_R_binned(2, CTX), Fraction(1), CTX)
        assert all(q == Fraction(1, 3) for row in R.exact_entries for q in row)

    def test_repair_finds_small_admixture(self):
        twoJ = 2
        basis = chebyshev_basis(twoJ)
        lam, mixed = repair_binned(twoJ, basis, CTX, grid_n=120, iterations=10)
        assert 0 < lam < Fraction(1, 4)
        rep = sufficiency_scan(mixed, twoJ, basis, 120, CTX)
        assert rep.verdict in ("sufficient", "minimally-sufficient")
        # One bisection step below the answer must still be insufficient.
        under = mix_with_trivial(build_R_binned(twoJ, CTX), lam / 2, CTX)
        rep_under = sufficiency_scan(under, twoJ, basis, 120, CTX)
        assert rep_under.verdict == "insufficient"
