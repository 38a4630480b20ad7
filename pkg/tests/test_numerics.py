"""Ball arithmetic: every enclosure must actually enclose."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eprspin.numerics import (
    CertifiedReal,
    DomainError,
    PrecisionContext,
    binomial,
    gauss_legendre,
    legendre,
    legendre_ladder,
)

CTX = PrecisionContext(64)
CTX256 = PrecisionContext(256)


def enclosed(ball: CertifiedReal, exact: Fraction) -> bool:
    return ball.contains(CTX256.real(exact))


class TestCertifiedReal:
    def test_exact_small_integer(self):
        v = CTX.real(3)
        assert v.estimate == 3.0
        assert v.radius == 0.0
        assert v.is_positive() and not v.is_negative()

    def test_fraction_roundoff_is_bounded(self):
        v = CTX.real(Fraction(1, 3))
        assert v.radius > 0
        assert v.radius < 1e-18
        assert enclosed(v, Fraction(1, 3))

    def test_sign_queries_straddle(self):
        v = CTX.sub(CTX.real(Fraction(1, 3)), CTX.real(Fraction(1, 3)))
        assert v.contains_zero()
        assert not v.is_positive() and not v.is_negative()

    def test_division_by_straddling_interval_raises(self):
        tiny = CTX.sub(CTX.real(Fraction(1, 3)), CTX.real(Fraction(1, 3)))
        with pytest.raises(DomainError):
            CTX.div(CTX.real(1), tiny)

    def test_sqrt_of_negative_raises(self):
        with pytest.raises(DomainError):
            CTX.sqrt(CTX.real(-2))

    def test_sqrt_enclosure(self):
        v = CTX.sqrt(CTX.real(2))
        lo, hi = float(v.lower()), float(v.upper())
        assert lo <= math.sqrt(2) <= hi

    def test_pi(self):
        v = CTX.const_pi()
        assert abs(v.estimate - math.pi) < 1e-15
        assert v.radius < 1e-17


class TestPrecisionContext:
    def test_minimum_bits(self):
        with pytest.raises(ValueError):
            PrecisionContext(32)

    def test_escalation_doubles_and_stops(self):
        ctx = PrecisionContext(64, max_bits=256)
        ctx2 = ctx.escalated()
        assert ctx2.bits == 128
        assert ctx2.escalated().bits == 256
        assert ctx2.escalated().escalated() is None

    def test_hashable_and_equal(self):
        assert PrecisionContext(64) == PrecisionContext(64)
        assert hash(PrecisionContext(128)) == hash(PrecisionContext(128))
        assert PrecisionContext(64) != PrecisionContext(128)


def _random_expression(rng, depth):
    """(ball at 64 bits, exact Fraction) pairs built by the same random ops."""
    if depth == 0:
        q = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        return CTX.real(q), q
    a, qa = _random_expression(rng, depth - 1)
    b, qb = _random_expression(rng, depth - 1)
    op = rng.randrange(4)
    if op == 0:
        return CTX.add(a, b), qa + qb
    if op == 1:
        return CTX.sub(a, b), qa - qb
    if op == 2:
        return CTX.mul(a, b), qa * qb
    if qb == 0 or CertifiedReal(b.mid, b.rad).contains_zero():
        return CTX.add(a, b), qa + qb
    return CTX.div(a, b), qa / qb


def test_interval_soundness_random_expressions():
    rng = random.Random(20240817)
    for _ in range(1000):
        ball, exact = _random_expression(rng, rng.randint(1, 5))
        assert enclosed(ball, exact), f"{ball!r} does not contain {exact}"


@settings(max_examples=200, deadline=None)
@given(
    st.fractions(min_value=-100, max_value=100, max_denominator=1000),
    st.fractions(min_value=-100, max_value=100, max_denominator=1000),
)
def test_product_enclosure(qa, qb):
    ball = CTX.mul(CTX.real(qa), CTX.real(qb))
    assert enclosed(ball, qa * qb)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=10000, max_denominator=997))
def test_sqrt_square_roundtrip(q):
    root = CTX.sqrt(CTX.real(q))
    assert enclosed(CTX.mul(root, root), q)


class TestBinomial:
    def test_values(self):
        assert binomial(4, 2) == 6
        assert binomial(0, 0) == 1
        assert binomial(10, 3) == 120

    def test_out_of_range_is_zero(self):
        assert binomial(4, 5) == 0
        assert binomial(4, -1) == 0

    def test_negative_n_raises(self):
        with pytest.raises(DomainError):
            binomial(-1, 0)


# P_0 .. P_6 as explicit coefficient lists (constant term first).
LEGENDRE_COEFFS = [
    [Fraction(1)],
    [0, Fraction(1)],
    [Fraction(-1, 2), 0, Fraction(3, 2)],
    [0, Fraction(-3, 2), 0, Fraction(5, 2)],
    [Fraction(3, 8), 0, Fraction(-30, 8), 0, Fraction(35, 8)],
    [0, Fraction(15, 8), 0, Fraction(-70, 8), 0, Fraction(63, 8)],
    [Fraction(-5, 16), 0, Fraction(105, 16), 0, Fraction(-315, 16), 0, Fraction(231, 16)],
]


@pytest.mark.parametrize("ell", range(7))
def test_legendre_matches_explicit_polynomial(ell):
    for x in (Fraction(-1), Fraction(-3, 7), Fraction(0), Fraction(2, 5), Fraction(1)):
        exact = sum(c * x**k for k, c in enumerate(LEGENDRE_COEFFS[ell]))
        assert enclosed(legendre(ell, x, CTX), exact)


def test_legendre_ladder_consistent_with_single():
    xb = CTX.real(Fraction(1, 3))
    lad = legendre_ladder(10, xb, CTX)
    for ell in (0, 3, 7, 10):
        single = legendre(ell, Fraction(1, 3), CTX)
        gap = CTX.sub(lad[ell], single)
        assert gap.contains_zero()


def test_legendre_domain():
    with pytest.raises(DomainError):
        legendre(2, 1.5, CTX)
    with pytest.raises(DomainError):
        legendre(-1, 0.5, CTX)


class TestGaussLegendre:
    def test_one_point(self):
        rule = gauss_legendre(1, CTX)
        assert len(rule) == 1
        assert rule[0][0].estimate == 0.0
        assert rule[0][1].estimate == 2.0

    def test_two_point_nodes(self):
        rule = gauss_legendre(2, CTX)
        xs = sorted(node.estimate for node, _ in rule)
        assert abs(xs[0] + 1 / math.sqrt(3)) < 1e-15
        assert abs(xs[1] - 1 / math.sqrt(3)) < 1e-15

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 20])
    def test_weights_sum_to_two(self, n):
        rule = gauss_legendre(n, CTX256)
        total = CTX256.sum(w for _, w in rule)
        gap = CTX256.sub(total, CTX256.real(2))
        assert gap.contains_zero()
        assert gap.radius < 1e-60

    @pytest.mark.parametrize("n", [2, 4, 7, 12, 20])
    def test_exact_for_low_degree_monomials(self, n):
        rule = gauss_legendre(n, CTX256)
        for k in range(0, 2 * n, 3):
            total = CTX256.sum(
                CTX256.mul(w, CTX256.powi(x, k)) for x, w in rule
            )
            exact = Fraction(2, k + 1) if k % 2 == 0 else Fraction(0)
            gap = CTX256.sub(total, CTX256.real(exact))
            assert gap.contains_zero(), f"n={n}, k={k}"

    def test_node_radii_are_honest(self):
        # The certified node balls must contain the true roots of P_n.
        rule = gauss_legendre(5, CTX)
        hi = PrecisionContext(512)
        for node, _ in rule:
            tight = gauss_legendre(5, hi)
            best = min(
                abs(float(t.mid) - float(node.mid)) for t, _ in tight
            )
            assert best <= node.radius + 1e-15
