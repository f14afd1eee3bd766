import cmath
from fractions import Fraction

import numpy as np
import pytest

from app.exactnum.cyclotomic import CyclotomicField
from app.exactnum.linalg import Eliminator, invert, nullspace, rank, solve
from app.exactnum.qseries import QSeries, ValuationBound
from app.exactnum.ratfunc import RatFunc
from app.exactnum.series import LaurentSeries
from app.utils.errors import ArithmeticDomainError, PoleProximityError, TruncationError


class TestCyclotomicField:
    """Arithmetic in Q(eps_N) reduced modulo the cyclotomic polynomial."""

    def test_fields_are_cached(self):
        assert CyclotomicField.get(5) is CyclotomicField.get(5)

    def test_roots_of_unity(self, field3):
        eps = field3.eps(1)
        assert eps ** 3 == 1
        assert 1 + eps + eps ** 2 == 0
        assert CyclotomicField.get(4).eps(2) == -1
        assert CyclotomicField.get(2).eps(1) == -1

    def test_inverse(self, field3):
        x = field3.from_coeffs([Fraction(1, 2), 3])
        assert x * x.inverse() == 1
        assert (x / x) == field3.one
        assert x ** -2 * x ** 2 == 1

    def test_division_by_zero(self, field3):
        with pytest.raises(ArithmeticDomainError):
            field3.zero.inverse()
        with pytest.raises(ZeroDivisionError):
            field3.one / 0

    def test_to_complex(self, field3):
        assert abs(field3.eps(1).to_complex() - cmath.exp(2j * cmath.pi / 3)) < 1e-14

    def test_mod_image_is_a_ring_map(self, field3):
        p = 7
        omega = field3.primitive_root_mod(p)
        assert omega != 1 and pow(omega, 3, p) == 1
        x = field3.from_coeffs([Fraction(1, 2), 1])
        y = field3.from_coeffs([3, -1])
        assert (x * y).mod_image(p, omega) == x.mod_image(p, omega) * y.mod_image(p, omega) % p
        assert (x + y).mod_image(p, omega) == (x.mod_image(p, omega) + y.mod_image(p, omega)) % p

    def test_prime_not_one_mod_n(self, field3):
        with pytest.raises(ArithmeticDomainError):
            field3.primitive_root_mod(5)


class TestLaurentSeries:
    """Truncated series with precision tracking."""

    def test_binomial(self, field2):
        s = LaurentSeries.binomial(field2, -1, 5)
        assert [s.coeff(k) for k in range(5)] == [1, -1, 1, -1, 1]

    def test_inverse(self, field3):
        s = LaurentSeries(field3, {0: field3.one, 1: field3.eps(1)}, 6)
        product = s * s.inverse()
        assert product.coeff(0) == 1
        assert all(product.coeff(k) == 0 for k in range(1, product.prec))

    def test_coefficient_beyond_precision(self, field2):
        s = LaurentSeries.monomial(field2, 1, 0, 3)
        with pytest.raises(TruncationError):
            s.coeff(3)

    def test_zero_series_has_no_inverse(self, field2):
        with pytest.raises(ArithmeticDomainError):
            LaurentSeries.zero(field2, 4).inverse()


class TestRatFunc:
    """Rational functions with denominators prod (u^N - c)^m."""

    def test_linear_pole_evaluation(self, field2):
        f = RatFunc.linear_pole(field2, field2.from_rational(2))
        assert f.eval_exact(3) == 1
        assert f.residue(field2.from_rational(2)) == 1

    def test_derivative_of_monomial(self, field3):
        assert RatFunc.monomial(field3, 1, 3).derivative() == RatFunc.monomial(field3, 3, 3)

    def test_scale_var_round_trip(self, field3):
        f = RatFunc.linear_pole(field3, field3.from_rational(3), 2) + RatFunc.monomial(field3, field3.eps(1), -1)
        two = field3.from_rational(2)
        assert f.scale_var(two).scale_var(two.inverse()) == f

    def test_invert_var(self, field2):
        f = RatFunc.linear_pole(field2, field2.from_rational(2))
        g = f.invert_var()
        assert g.eval_exact(Fraction(1, 3)) == f.eval_exact(3)

    def test_expansion_at_zero(self, field2):
        # 1/(u - 2) = -1/2 - u/4 - ...
        f = RatFunc.linear_pole(field2, field2.from_rational(2))
        s = f.expand_at("0", 3)
        assert [s.coeff(k) for k in range(3)] == [Fraction(-1, 2), Fraction(-1, 4), Fraction(-1, 8)]

    def test_pole_order(self, field2):
        f = RatFunc.linear_pole(field2, field2.from_rational(2), 3)
        assert f.pole_order_at(field2.from_rational(2)) == 3
        assert f.pole_order_at("0") == 0

    def test_complex_evaluation_near_pole(self, field2):
        f = RatFunc.linear_pole(field2, field2.one)
        with pytest.raises(PoleProximityError):
            f.eval_complex(1 + 1e-14)


class TestLinearAlgebra:
    """Sparse exact elimination."""

    def test_rank_solve_nullspace(self, field3):
        c = field3.coerce
        rows = [{0: c(1), 1: c(2)}, {0: c(2), 1: c(4)}, {2: field3.eps(1)}]
        assert rank(field3, rows) == 2
        x = solve(field3, rows, [c(3), c(6), field3.eps(1)], 3)
        assert x is not None
        assert x[0] + 2 * x[1] == 3 and x[2] == 1
        assert solve(field3, rows, [c(3), c(5), c(0)], 3) is None
        kernel = nullspace(field3, rows, 3)
        assert len(kernel) == 1
        v = kernel[0]
        assert v[0] + 2 * v[1] == 0 and v[2] == 0

    def test_invert(self, field3):
        eps = field3.eps(1)
        m = [[field3.one, eps], [eps, field3.from_rational(2)]]
        inv = invert(field3, m)
        for i in range(2):
            for j in range(2):
                assert sum((m[i][k] * inv[k][j] for k in range(2)), field3.zero) == (1 if i == j else 0)

    def test_singular_matrix(self, field2):
        with pytest.raises(ArithmeticDomainError):
            invert(field2, [[field2.one, field2.one], [field2.one, field2.one]])

    def test_eliminator(self, field3):
        elim = Eliminator(field3)
        assert elim.add({0: field3.one, 2: field3.eps(1)})
        assert not elim.add({0: field3.eps(2), 2: field3.one})
        assert elim.add({1: field3.one})
        assert elim.rank == 2


def _random_cyc(field, rng):
    return field.from_coeffs([Fraction(int(p), int(q)) for p, q in
                              zip(rng.integers(-9, 10, field.n - 1), rng.integers(1, 7, field.n - 1))])


class TestFieldAxioms:
    """Q(eps_5) is a field and to_complex is a ring map."""

    def test_axioms_on_random_elements(self):
        field = CyclotomicField.get(5)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x, y, z = (_random_cyc(field, rng) for _ in range(3))
            assert (x + y) + z == x + (y + z)
            assert (x * y) * z == x * (y * z)
            assert x * y == y * x
            assert x * (y + z) == x * y + x * z
            assert x + (-x) == field.zero
            assert x * field.one == x
            if x:
                assert x * x.inverse() == field.one

    def test_to_complex_is_a_ring_map(self):
        field = CyclotomicField.get(5)
        rng = np.random.default_rng(4)
        for _ in range(20):
            x, y = _random_cyc(field, rng), _random_cyc(field, rng)
            scale = max(1.0, abs(x.to_complex()) * abs(y.to_complex()))
            assert abs((x * y).to_complex() - x.to_complex() * y.to_complex()) < 1e-12 * scale
            assert abs((x + y).to_complex() - x.to_complex() - y.to_complex()) < 1e-12 * scale

    def test_ratfunc_complex_evaluation_is_a_ring_map(self, field3):
        f = RatFunc.linear_pole(field3, field3.from_rational(2)) + RatFunc.monomial(field3, field3.eps(1), -1)
        g = RatFunc.linear_pole(field3, field3.eps(1) * 3, 2)
        for u in (0.7 + 0.2j, -1.1 + 0.5j, 1.9j):
            fu, gu = f.eval_complex(u), g.eval_complex(u)
            assert abs((f * g).eval_complex(u) - fu * gu) < 1e-12 * max(1.0, abs(fu * gu))
            assert abs((f + g).eval_complex(u) - fu - gu) < 1e-12 * max(1.0, abs(fu) + abs(gu))
        x = Fraction(5, 3)
        assert abs(f.eval_exact(x).to_complex() - f.eval_complex(complex(x))) < 1e-12


class TestRatFuncNormalization:
    def test_common_factors_cancel(self, field2):
        # (u^3 - 4u) / (u^2 - 4) = u
        f = RatFunc(field2, {3: field2.one, 1: field2.from_rational(-4)}, {field2.from_rational(4): 1})
        assert f.den == {}
        assert f == RatFunc.monomial(field2, 1, 1)

    def test_normalize_is_idempotent(self, field3):
        f = RatFunc.linear_pole(field3, field3.from_rational(2), 2) * RatFunc.monomial(field3, field3.eps(1), 3)
        f = f + RatFunc.linear_pole(field3, field3.from_rational(5))
        again = RatFunc(field3, f.num, f.den)
        assert again.num == f.num and again.den == f.den


class TestQSeries:
    """q-series with rational coefficients and the u -> q u substitution."""

    def test_constant_series_substitution(self, field2):
        s = QSeries.constant(field2, RatFunc.monomial(field2, 1, 1), 4)
        shifted = s.subst_q()
        assert shifted.order >= 4
        assert shifted.coefficient(0).is_zero()
        assert shifted.coefficient(1) == RatFunc.monomial(field2, 1, 1)

    def test_geometric_denominator(self, field2):
        # 1/(q^2 u^2 - 4) = -1/4 - q^2 u^2 / 16 - ...
        s = QSeries.constant(field2, RatFunc(field2, {0: field2.one}, {field2.from_rational(4): 1}), 4)
        shifted = s.subst_q()
        assert shifted.coefficient(0) == RatFunc.constant(field2, Fraction(-1, 4))
        assert shifted.coefficient(1).is_zero()
        assert shifted.coefficient(2) == RatFunc.monomial(field2, Fraction(-1, 16), 2)

    def test_substitution_needs_a_bound(self, field2):
        s = QSeries(field2, {0: RatFunc.monomial(field2, 1, 1), 1: RatFunc.monomial(field2, 1, -1)}, 3)
        assert s.bound is None
        with pytest.raises(TruncationError):
            s.subst_q()
        assert s.subst_q(u_degree_floor=0).order == 3
        assert s.subst_q(u_degree_floor=-2).order == 1

    def test_slope_one_determines_nothing(self, field2):
        s = QSeries(field2, {0: RatFunc.monomial(field2, 1, 0)}, 6, ValuationBound(0, 1))
        with pytest.raises(TruncationError):
            s.subst_q()

    def test_order_follows_the_bound(self, field2):
        s = QSeries(field2, {0: RatFunc.monomial(field2, 1, 0)}, 5, ValuationBound(-1, Fraction(1, 2)))
        # omitted terms start at q^6 and land no lower than q^(6/2 - 1)
        assert s.subst_q_order() == 1

    def test_bounds_propagate(self, field2):
        x = QSeries(field2, {0: RatFunc.monomial(field2, 1, 2)}, 4, ValuationBound(2, Fraction(1, 2)))
        y = QSeries(field2, {1: RatFunc.monomial(field2, 1, -1)}, 4, ValuationBound(-1, Fraction(1, 3)))
        assert (x + y).bound == ValuationBound(-1, Fraction(1, 2))
        assert (x * y).bound == ValuationBound(1, Fraction(1, 2))
        assert (x * RatFunc.monomial(field2, 1, -3)).bound == ValuationBound(-1, Fraction(1, 2))
        assert x.subst_eps(1).bound == x.bound

    def test_negative_slope_is_rejected(self):
        with pytest.raises(ValueError):
            ValuationBound(0, -1)
