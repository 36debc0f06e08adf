"""Special-function kernel tests against independent oracles."""

import math
from fractions import Fraction

import mpmath
import pytest
from scipy import integrate

from cvoodg import specfun


def halley_w_oracle(x: float, dps: int = 30) -> float:
    """Independent Lambert W oracle: Halley iteration at 30-digit precision."""
    with mpmath.workdps(dps):
        xm = mpmath.mpf(x)
        w = mpmath.mpf(0.5) if x < 10 else mpmath.log(xm)
        for _ in range(200):
            ew = mpmath.exp(w)
            f = w * ew - xm
            step = f / (ew * (w + 1) - (w + 2) * f / (2 * w + 2))
            w -= step
            if abs(step) < mpmath.mpf(10) ** (-dps + 2):
                break
        return float(w)


class TestLambertW:
    def test_zero(self):
        assert specfun.lambert_w0(0.0) == 0.0

    def test_at_e(self):
        assert specfun.lambert_w0(math.e) == pytest.approx(1.0, rel=1e-14)

    def test_omega_constant(self):
        # W(1) against the 30-digit Halley oracle.
        assert specfun.lambert_w0(1.0) == pytest.approx(halley_w_oracle(1.0), rel=1e-13)

    @pytest.mark.parametrize("exponent", range(-6, 7))
    def test_round_trip_log_grid(self, exponent):
        x = 10.0**exponent
        w = specfun.lambert_w0(x)
        assert abs(w * math.exp(w) - x) / x <= 1e-10

    def test_near_branch_point(self):
        x = -math.exp(-1.0) + 1e-9
        w = specfun.lambert_w0(x)
        assert w >= -1.0
        assert w * math.exp(w) == pytest.approx(x, abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(specfun.DomainError):
            specfun.lambert_w0(-1.0)

    def test_from_log_matches_direct(self):
        ln_x = 5.0
        assert specfun.lambert_w0_from_log(ln_x) == pytest.approx(
            specfun.lambert_w0(math.exp(ln_x)), rel=1e-13
        )

    def test_from_log_huge_argument(self):
        # w + log(w) must reproduce ln_x even where exp(ln_x) overflows.
        ln_x = 5000.0
        w = specfun.lambert_w0_from_log(ln_x)
        assert w + math.log(w) == pytest.approx(ln_x, rel=1e-14)


def laguerre_coefficient_oracle(n: int, a: int, x: Fraction) -> Fraction:
    """Explicit-coefficient evaluation in exact rational arithmetic."""
    total = Fraction(0)
    for k in range(n + 1):
        binom = Fraction(math.comb(n + a, n - k))
        total += (-1) ** k * binom * x**k / Fraction(math.factorial(k))
    return total


class TestLaguerre:
    def test_degree_zero(self):
        assert specfun.laguerre(0, 3.7, 11.0) == 1.0

    def test_degree_one(self):
        assert specfun.laguerre(1, 0.0, 0.25) == pytest.approx(0.75, rel=1e-15)

    def test_explicit_quadratic(self):
        # L_2(1) = 1 - 2 + 1/2 = -1/2.
        assert specfun.laguerre(2, 0.0, 1.0) == pytest.approx(-0.5, rel=1e-14)

    @pytest.mark.parametrize("n", range(11))
    @pytest.mark.parametrize("a", [0, 1, 3])
    def test_recurrence_matches_coefficients(self, n, a):
        for x in (Fraction(1, 4), Fraction(3, 2), Fraction(7), Fraction(25, 2)):
            exact = laguerre_coefficient_oracle(n, a, x)
            got = specfun.laguerre(n, float(a), float(x))
            if exact == 0:
                assert abs(got) < 1e-10
            else:
                assert abs(got - float(exact)) / abs(float(exact)) <= 1e-10

    def test_negative_degree_rejected(self):
        with pytest.raises(specfun.DomainError):
            specfun.laguerre(-1, 0.0, 1.0)


def hyp2f1_rational_oracle(a: int, b: int, c: int, z: Fraction) -> Fraction:
    total = Fraction(0)
    for k in range(-a + 1):
        num = Fraction(1)
        for i in range(k):
            num *= (a + i) * (b + i)
            num /= (c + i) * (i + 1)
        total += num * z**k
    return total


class TestHyp2F1Terminating:
    def test_a_zero(self):
        assert specfun.hyp2f1_terminating(0, 2.5, 0.5, 3.0) == 1.0

    def test_two_terms(self):
        for z in (-2.0, 0.0, 0.7, 5.0):
            assert specfun.hyp2f1_terminating(-1, -1.0, 1.0, z) == pytest.approx(
                1.0 + z, rel=1e-14, abs=1e-14
            )

    def test_brute_force_sum(self):
        # 1 + 4 + 1 term by term.
        assert specfun.hyp2f1_terminating(-2, -2.0, 1.0, 1.0) == pytest.approx(6.0, rel=1e-13)

    @pytest.mark.parametrize("a", range(-8, 0))
    @pytest.mark.parametrize("z_num", [-10, -3, 1, 7, 10])
    def test_rational_arithmetic_agreement(self, a, z_num):
        b, c = -5, 3
        z = Fraction(z_num)
        exact = hyp2f1_rational_oracle(a, b, c, z)
        got = specfun.hyp2f1_terminating(a, float(b), float(c), float(z))
        if exact == 0:
            assert abs(got) <= 1e-12
        else:
            assert abs(got - float(exact)) / abs(float(exact)) <= 1e-12

    def test_denominator_pochhammer_vanishes(self):
        with pytest.raises(specfun.DomainError):
            specfun.hyp2f1_terminating(-5, 1.0, -3.0, 0.5)

    def test_smaller_c_is_fine(self):
        # c below a: the numerator terminates first.
        value = specfun.hyp2f1_terminating(-2, 1.0, -7.0, 0.5)
        assert math.isfinite(value)


class TestIncompleteGamma:
    def test_gamma_one_zero(self):
        assert specfun.gamma_upper(1.0, 0.0) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("x", [0.1, 1.0, 4.0, 20.0])
    def test_gamma_one_closed_form(self, x):
        assert specfun.gamma_upper(1.0, x) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_quadrature_oracle(self):
        # Gamma(2, 1) = 2/e by adaptive quadrature.
        oracle, _ = integrate.quad(lambda t: t * math.exp(-t), 1.0, math.inf)
        assert specfun.gamma_upper(2.0, 1.0) == pytest.approx(oracle, rel=1e-10)
        assert specfun.gamma_upper(2.0, 1.0) == pytest.approx(2.0 / math.e, rel=1e-13)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 7.0, 20.0])
    @pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 9.0, 40.0])
    def test_upper_plus_lower_is_gamma(self, a, x):
        upper = specfun.gamma_upper(a, x)
        lower = specfun.gamma_lower_regularized(a, x) * math.exp(math.lgamma(a))
        assert upper + lower == pytest.approx(math.exp(math.lgamma(a)), rel=1e-10)

    def test_log_version_matches(self):
        for a, x in ((3.0, 1.0), (40.0, 10.0), (2.0, 60.0)):
            assert specfun.gamma_upper_log(a, x) == pytest.approx(
                math.log(specfun.gamma_upper(a, x)), rel=1e-12
            )

    def test_log_version_beyond_overflow(self):
        # Gamma(300, 10) overflows a double; its log must not.
        val = specfun.gamma_upper_log(300.0, 10.0)
        assert val == pytest.approx(math.lgamma(300.0), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(specfun.DomainError):
            specfun.gamma_upper(-1.0, 1.0)
        with pytest.raises(specfun.DomainError):
            specfun.gamma_upper(1.0, -0.5)


class TestIncompleteBeta:
    def test_empty_integral(self):
        assert specfun.beta_incomplete(0.0, 2.0, 3.0) == 0.0

    def test_uniform_density(self):
        assert specfun.beta_incomplete(1.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_analytic_antiderivative(self):
        # integral_0^x t dt = x^2 / 2.
        assert specfun.beta_incomplete(0.5, 2.0, 1.0) == pytest.approx(0.125, rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0.7, 1.3), (2.0, 3.0), (5.5, 0.4), (9.0, 9.0)])
    @pytest.mark.parametrize("x", [0.05, 0.35, 0.65, 0.95])
    def test_quadrature_oracle(self, a, b, x):
        oracle, err = integrate.quad(
            lambda t: t ** (a - 1.0) * (1.0 - t) ** (b - 1.0), 0.0, x, limit=200
        )
        assert specfun.beta_incomplete(x, a, b) == pytest.approx(oracle, rel=1e-9, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(specfun.DomainError):
            specfun.beta_incomplete(1.5, 1.0, 1.0)
        with pytest.raises(specfun.DomainError):
            specfun.beta_incomplete(0.5, -1.0, 1.0)


class TestLogFactorialPochhammer:
    @pytest.mark.parametrize("n", range(21))
    def test_exact_against_integers(self, n):
        assert specfun.log_factorial(n) == pytest.approx(
            math.log(math.factorial(n)) if n else 0.0, rel=1e-13, abs=1e-13
        )

    def test_monotone(self):
        values = [specfun.log_factorial(n) for n in range(40)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n", range(11))
    def test_pochhammer_of_one_is_factorial(self, n):
        sign, logmag = specfun.pochhammer_log(1.0, n)
        assert sign == 1
        assert logmag == pytest.approx(specfun.log_factorial(n), rel=1e-13, abs=1e-13)

    def test_negative_base_sign_tracking(self):
        # (-2.5)_3 = (-2.5)(-1.5)(-0.5) < 0.
        sign, logmag = specfun.pochhammer_log(-2.5, 3)
        assert sign == -1
        assert math.exp(logmag) == pytest.approx(2.5 * 1.5 * 0.5, rel=1e-13)

    def test_vanishing_product(self):
        sign, logmag = specfun.pochhammer_log(-2.0, 4)
        assert sign == 0 and logmag == -math.inf

    def test_signed_exp_sum(self):
        terms = [(1, math.log(5.0)), (-1, math.log(3.0)), (1, -math.inf), (0, 2.0)]
        assert specfun.signed_exp_sum(terms) == pytest.approx(2.0, rel=1e-14)
