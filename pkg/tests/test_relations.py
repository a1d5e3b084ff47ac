"""Triangle table, auxiliary double-factorial series, closures, and ODE checks."""

from fractions import Fraction

import pytest

from nrooted.errors import ConsistencyError
from nrooted.qft import m0_series, m_series, z_series
from nrooted.relations import (
    LaurentPoly,
    M1Polynomial,
    VerificationReport,
    b_table,
    mn_in_m1,
    r_series,
    report_from_residual,
    verify_ode_m0,
    verify_ode_m1,
    verify_ode_z0,
    zj_over_z0_in_m1,
)
from nrooted.series import Series


def odd_double_factorial(m: int) -> int:
    assert m >= -1 and m % 2 == 1
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


class TestBTable:
    def test_first_rows_frozen(self):
        assert b_table(3).rows == ((1,), (1, 1), (2, 5, 1), (6, 27, 12, 1))

    def test_specific_values(self):
        t = b_table(4)
        assert t.value(2, 1) == 5
        assert t.value(3, 0) == 6
        assert t.value(3, 2) == 12

    def test_closed_form_leftmost_is_factorial(self):
        t = b_table(12)
        fact = 1
        for n in range(13):
            if n:
                fact *= n
            assert t.value(n, 0) == fact

    def test_closed_form_rightmost_is_one(self):
        t = b_table(12)
        for n in range(13):
            assert t.value(n, n) == 1

    def test_closed_form_subleading(self):
        t = b_table(12)
        for n in range(1, 13):
            assert t.value(n, n - 1) == (3 * n - 1) * n // 2

    def test_recursion_holds_on_interior(self):
        t = b_table(10)
        for n in range(10):
            for k in range(1, n + 1):
                assert t.value(n + 1, k) == t.value(n, k - 1) + (2 * k + n + 1) * t.value(n, k)

    def test_out_of_triangle_rejected(self):
        t = b_table(4)
        with pytest.raises(ValueError):
            t.value(2, 3)
        with pytest.raises(ValueError):
            t.value(2, -1)
        with pytest.raises(ValueError):
            t.value(5, 0)

    def test_size_must_be_positive(self):
        with pytest.raises(ValueError):
            b_table(0)

    def test_n_max(self):
        assert b_table(7).n_max == 7


class TestRSeries:
    def test_base_case_equals_partition_function(self):
        assert r_series(-1, 6) == z_series(0, 6)

    def test_index_one(self):
        assert r_series(1, 4) == Series([Fraction(c) for c in (1, 0, 3, 0, 15)])

    @pytest.mark.parametrize("i", [-1, 1, 3, 5, 7])
    def test_coefficients_are_shifted_double_factorials(self, i):
        s = r_series(i, 10)
        for k in range(6):
            assert s.coefficient(2 * k) == odd_double_factorial(2 * k + i)
            if 2 * k + 1 <= 10:
                assert s.coefficient(2 * k + 1) == 0

    @pytest.mark.parametrize("k", [-1, 1, 3])
    def test_derivative_recurrence(self, k):
        # λ d/dλ R_k = R_{k+2} - (k+2) R_k
        order = 10
        lhs = r_series(k, order).x_derivative()
        rhs = r_series(k + 2, order) + Series.monomial(-(k + 2), 0, order) * r_series(
            k, order
        )
        assert lhs == rhs

    def test_even_index_rejected(self):
        with pytest.raises(ValueError):
            r_series(2, 6)

    def test_too_negative_index_rejected(self):
        with pytest.raises(ValueError):
            r_series(-3, 6)


class TestDerivativeBasis:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_scaled_nth_derivative_expands_in_auxiliary_series(self, n):
        # λ^n d^n/dλ^n of the partition function = alternating triangle-table
        # combination of the auxiliary series
        order = 10
        z0 = z_series(0, order + n)
        d = z0
        for _ in range(n):
            d = d.derivative()
        lhs = d.shifted(n).truncate(order)
        table = b_table(n)
        rhs = Series.zero(order)
        for k in range(n + 1):
            sign = (-1) ** (n - k)
            rhs = rhs + Series.monomial(sign * table.value(n, k), 0, order) * r_series(
                2 * k - 1, order
            )
        assert lhs == rhs


class TestFirstMomentIdentities:
    def test_partition_function_minus_one(self):
        # Z0 - 1 = λ² M1 Z0
        order = 12
        z0 = z_series(0, order)
        m1 = m_series(1, order)
        lhs = z0 + Series.monomial(-1, 0, order)
        rhs = Series.monomial(1, 2, order) * (m1 * z0)
        assert lhs == rhs

    def test_reciprocal_partition_function(self):
        # 1/Z0 = 1 - λ² M1
        order = 12
        lhs = z_series(0, order).invert()
        rhs = Series.one(order) + Series.monomial(-1, 2, order) * m_series(1, order)
        assert lhs == rhs


class TestLaurentPoly:
    def test_monomial_and_items(self):
        p = LaurentPoly.monomial(Fraction(3, 2), -2)
        assert p.items() == [(-2, Fraction(3, 2))]
        assert p.min_power == -2 and p.max_power == -2

    def test_zero_coefficients_dropped(self):
        p = LaurentPoly({1: Fraction(0)})
        assert p.is_zero
        assert p.items() == []

    def test_arithmetic(self):
        a = LaurentPoly.monomial(1, -2)
        b = LaurentPoly.constant(2)
        assert (a + b).items() == [(-2, Fraction(1)), (0, Fraction(2))]
        assert (a * b).items() == [(-2, Fraction(2))]
        assert (a - a).is_zero

    def test_scalar_multiplication(self):
        p = Fraction(1, 2) * LaurentPoly.monomial(4, 3)
        assert p == LaurentPoly.monomial(2, 3)

    def test_equality_and_hash(self):
        assert LaurentPoly.constant(1) == LaurentPoly({0: Fraction(1)})
        assert hash(LaurentPoly.constant(1)) == hash(LaurentPoly({0: Fraction(1)}))


class TestM1Polynomial:
    def test_trailing_zero_coefficients_trimmed(self):
        p = M1Polynomial([LaurentPoly.constant(1), LaurentPoly({})])
        assert p.degree == 0

    def test_multiplication_degree(self):
        x = M1Polynomial([LaurentPoly({}), LaurentPoly.constant(1)])
        assert (x * x).degree == 2

    def test_evaluate_requires_padded_input(self):
        p = mn_in_m1(2, 8)
        with pytest.raises(ValueError):
            p.evaluate(m_series(1, 8), 8)  # needs order 8 + 2

    def test_evaluate_detects_noncancelling_negative_powers(self):
        p = mn_in_m1(2, 8)
        wrong = Series.monomial(2, 0, 10)  # constant 2 leaves a λ^-2 remnant
        with pytest.raises(ConsistencyError):
            p.evaluate(wrong, 8)


class TestRatioPolynomials:
    def test_index_zero_is_unity(self):
        p = zj_over_z0_in_m1(0, 10)
        assert p.degree == 0
        assert p.coefficient(0) == LaurentPoly.constant(1)

    def test_index_one_is_the_series_itself(self):
        p = zj_over_z0_in_m1(1, 10)
        assert p.degree == 1
        assert p.coefficient(0) == LaurentPoly({})
        assert p.coefficient(1) == LaurentPoly.constant(1)

    def test_index_two_shape(self):
        # Z2/Z0 = (M1 - 1)/λ²
        p = zj_over_z0_in_m1(2, 10)
        assert p.degree == 1
        assert p.coefficient(0) == LaurentPoly.monomial(-1, -2)
        assert p.coefficient(1) == LaurentPoly.monomial(1, -2)

    @pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
    def test_substitution_recovers_ratio(self, j):
        order = 10
        p = zj_over_z0_in_m1(j, order)
        shift = max(0, -p.min_lambda_power())
        value = p.evaluate(m_series(1, order + shift), order)
        assert value == z_series(j, order) / z_series(0, order)

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            zj_over_z0_in_m1(-1, 8)


class TestHigherMomentsInFirstMoment:
    def test_two_root_polynomial(self):
        # M2 = (M1 - 1)/(2λ²) - M1²
        p = mn_in_m1(2, 10)
        assert p.degree == 2
        assert p.coefficient(0) == LaurentPoly.monomial(Fraction(-1, 2), -2)
        assert p.coefficient(1) == LaurentPoly.monomial(Fraction(1, 2), -2)
        assert p.coefficient(2) == LaurentPoly.constant(-1)

    def test_three_root_polynomial(self):
        p = mn_in_m1(3, 10)
        assert p.degree == 3
        assert p.coefficient(3) == LaurentPoly.constant(2)
        assert p.coefficient(2) == LaurentPoly.monomial(Fraction(-3, 2), -2)
        assert p.coefficient(1) == LaurentPoly(
            {-4: Fraction(1, 6), -2: Fraction(7, 6)}
        )
        assert p.coefficient(0) == LaurentPoly.monomial(Fraction(-1, 6), -4)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_top_coefficient_is_signed_factorial(self, n):
        p = mn_in_m1(n, 12)
        assert p.degree == n
        fact = 1
        for i in range(1, n):
            fact *= i
        assert p.coefficient(n) == LaurentPoly.constant((-1) ** (n - 1) * fact)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_substitution_recovers_map_series(self, n):
        order = 12
        p = mn_in_m1(n, order)
        shift = max(0, -p.min_lambda_power())
        value = p.evaluate(m_series(1, order + shift), order)
        assert value == m_series(n, order)

    def test_single_root_passthrough(self):
        p = mn_in_m1(1, 8)
        assert p.degree == 1
        assert p.coefficient(1) == LaurentPoly.constant(1)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            mn_in_m1(0, 8)


class TestReports:
    def test_zero_residual_passes(self):
        rep = report_from_residual("demo", Series.zero(7))
        assert rep.passed and rep.first_failure_power is None
        assert rep.order_checked == 7

    def test_nonzero_residual_locates_first_failure(self):
        rep = report_from_residual("demo", Series.monomial(1, 3, 7))
        assert not rep.passed
        assert rep.first_failure_power == 3

    def test_json_shape_is_exact(self):
        rep = report_from_residual("demo", Series.zero(5))
        assert rep.to_json_dict() == {
            "identity": "demo",
            "order_checked": 5,
            "pass": True,
            "first_failure_power": None,
        }

    def test_dataclass_detail_not_serialized(self):
        rep = VerificationReport("x", 3, False, 1, detail="why")
        assert "detail" not in rep.to_json_dict()


class TestOdeVerification:
    def test_first_moment_ode(self):
        rep = verify_ode_m1(12)
        assert rep.passed
        assert rep.identity == "m1-ode"
        assert rep.order_checked == 11

    def test_log_partition_ode(self):
        rep = verify_ode_m0(12)
        assert rep.passed
        assert rep.identity == "m0-ode"
        assert rep.order_checked == 10

    def test_partition_function_ode(self):
        rep = verify_ode_z0(12)
        assert rep.passed
        assert rep.identity == "z0-ode"
        assert rep.order_checked == 10

    def test_minimal_order(self):
        assert verify_ode_m1(4).passed
        assert verify_ode_m0(4).passed
        assert verify_ode_z0(4).passed

    def test_order_below_minimum_rejected(self):
        for fn in (verify_ode_m1, verify_ode_m0, verify_ode_z0):
            with pytest.raises(ValueError):
                fn(3)

    def test_negative_control_first_moment(self):
        # bump the two-edge count from 10 to 11: failure must surface at λ⁴
        bad = m_series(1, 12) + Series.monomial(1, 4, 12)
        rep = verify_ode_m1(12, bad)
        assert not rep.passed
        assert rep.first_failure_power == 4

    def test_negative_control_log_partition(self):
        bad = m0_series(12) + Series.monomial(1, 4, 12)
        rep = verify_ode_m0(12, bad)
        assert not rep.passed

    def test_negative_control_partition_function(self):
        bad = z_series(0, 12) + Series.monomial(1, 2, 12)
        rep = verify_ode_z0(12, bad)
        assert not rep.passed
