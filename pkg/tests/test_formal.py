from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gaussq, series
from starflux.errors import ConfigurationError, DomainError, RepresentationError
from starflux.formal import FormalScalar, GaussQ, TimeFun, gq, series_exp, series_mul, time_integrate


@given(gaussq(), gaussq(), gaussq())
def test_gaussian_rationals_form_a_field(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


def test_imaginary_unit_squares_to_minus_one():
    i = GaussQ(0, 1)
    assert i * i == GaussQ(-1)
    assert (GaussQ(1, 2) * GaussQ(3, -1)) == GaussQ(5, 5)


def test_floats_are_rejected():
    with pytest.raises(RepresentationError):
        gq(0.5)
    with pytest.raises(RepresentationError):
        FormalScalar([0.1], 2)


@given(series(), series(), series())
def test_series_ring_laws(a, b, c):
    assert series_mul(a, b) == series_mul(b, a)
    assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
    assert series_mul(a, b + c) == series_mul(a, b) + series_mul(a, c)


@given(series(constant=Fraction(3, 2)))
def test_inverse(a):
    assert a * a.inverse() == FormalScalar.one(a.K)


def test_inverse_needs_unit():
    with pytest.raises(DomainError):
        FormalScalar.nu(3).inverse()


@given(series(constant=0), series(constant=0))
def test_exponential_is_a_homomorphism(a, b):
    assert series_exp(a + b) == series_exp(a) * series_exp(b)


def test_exponential_of_nu():
    K = 4
    e = series_exp(FormalScalar.nu(K))
    assert e.c == tuple(GaussQ(Fraction(1, f)) for f in (1, 1, 2, 6, 24))


def test_truncation_and_shift():
    a = FormalScalar([1, 2, 3, 4], 3)
    assert a.shift(1) == FormalScalar([0, 1, 2, 3], 3)
    assert FormalScalar([0, 0, 5], 3).shift(-2) == FormalScalar([5], 3)
    with pytest.raises(DomainError):
        a.shift(-1)
    assert a.valuation() == 0 and FormalScalar.zero(3).valuation() is None
    with pytest.raises(ConfigurationError):
        a + FormalScalar([1], 4)


def test_json_round_trip():
    a = FormalScalar([GaussQ(Fraction(1, 3), -2), 0, 7], 2)
    assert FormalScalar.from_json(a.to_json(), 2) == a
    assert a.to_json()[0] == {"re": [1, 3], "im": [-2, 1]}


@given(st.integers(0, 6))
def test_time_integrals_of_monomials(j):
    assert time_integrate(TimeFun.monomial(j, 2)) == FormalScalar([Fraction(1, j + 1)], 2)


@given(st.integers(-5, 5).filter(bool))
def test_full_periods_integrate_to_zero(k):
    f = TimeFun.wave(k, 2) + TimeFun.constant(3, 2)
    assert time_integrate(f) == FormalScalar([3], 2)


def test_waves_multiply_by_adding_frequencies():
    K = 2
    prod = TimeFun.wave(2, K) * TimeFun.wave(-2, K)
    assert prod == TimeFun.constant(1, K)


def test_polynomial_times_wave_leaves_the_exact_ring():
    with pytest.raises(RepresentationError):
        TimeFun.monomial(1, 2) * TimeFun.wave(1, 2)
