"""Flux of rotation loops and of automorphism paths."""
from fractions import Fraction

import pytest

from starflux.acceptance import test_connection as nonflat_connection
from starflux.dynamics import AutPath
from starflux.errors import DomainError
from starflux.fedosov import FedosovData, FedosovProduct
from starflux.flux import (
    LoopDescriptor,
    classical_flux,
    flux_def_closed_form,
    flux_def_generic,
    flux_def_of_loop,
    flux_of_path,
    flux_order1,
    gamma_generators,
    loop_lift,
    order1_form,
)
from starflux.formal import FormalScalar
from starflux.star import MoyalProduct
from starflux.torus import H1Class, TorusForm, TorusFun, dfun

K = 3
ZERO = FormalScalar.zero(K)


def deformed(C1, C2):
    return FormalScalar([1, -C1, -C2], K)


def test_classical_flux_of_coordinate_loops():
    assert classical_flux((1, 0), K) == H1Class((ZERO, FormalScalar.one(K)))
    assert classical_flux((0, 1), K) == H1Class((-FormalScalar.one(K), ZERO))


@pytest.mark.parametrize("C", [(1, 0), (2, 5), (-1, 3)])
def test_first_coordinate_loop_golden_value(C):
    data = FedosovData(None, C, K=K)
    assert flux_def_of_loop((1, 0), data) == H1Class((ZERO, deformed(*C)))


@pytest.mark.parametrize("C", [(1, 0), (2, 5), (-1, 3)])
def test_second_coordinate_loop_is_sign_consistent(C):
    # i(d/dtheta2)(dtheta1 ^ dtheta2) = -dtheta1
    data = FedosovData(None, C, K=K)
    assert flux_def_of_loop((0, 1), data) == H1Class((-deformed(*C), ZERO))


@pytest.mark.parametrize("v", [(1, 0), (0, 1), (2, -1)])
def test_three_routes_agree_for_nonflat_connection(v):
    data = FedosovData(nonflat_connection(), (1, 2), K=K)
    full = flux_def_of_loop(v, data)
    assert full == flux_def_closed_form(v, data)
    P = FedosovProduct(2, K, nonflat_connection(), (1, 2))
    assert flux_def_generic(v, P) == full


def test_lift_differential_is_central():
    lift = loop_lift((1, 0), FedosovData(None, (Fraction(1, 2), -1), K=K))
    assert lift.Du.is_closed()
    assert lift.flux == H1Class((ZERO, FormalScalar([1, Fraction(-1, 2), 1], K)))


def test_moyal_loops_keep_classical_flux():
    assert flux_def_generic((1, 0), MoyalProduct(2, K)) == classical_flux((1, 0), K)


def test_loops_must_be_integral():
    with pytest.raises(DomainError):
        LoopDescriptor((Fraction(1, 2), 0))


def test_non_invariant_data_is_rejected():
    Omega = TorusForm({(0, 1): TorusFun.mode((1, 0), FormalScalar([0, 1], K), K)}, 2, 2, K)
    with pytest.raises(DomainError):
        flux_def_of_loop((1, 0), FedosovData(None, Omega, K=K))


@pytest.mark.parametrize("C1", [3, Fraction(-2, 3)])
def test_order_one_formula(C1):
    P = FedosovProduct(2, 2, Omega=(C1, 7))
    assert order1_form(P) == C1
    for v in ((1, 0), (0, 1)):
        assert flux_order1(v, P) == flux_def_of_loop(v, P).truncate(1)


def test_flux_of_operator_family_matches_generator():
    P = MoyalProduct(2, K)
    nu = FormalScalar.nu(K)
    H = TorusFun({(1, 1): 1}, 2, K).scale(nu)
    path = AutPath({0: dfun(H) + TorusForm.one_form([nu, nu * 2], K)}, P)
    assert flux_of_path((path.family(), P)) == flux_of_path(path) == H1Class((nu, nu * 2))


def test_generators_separate_first_order_data():
    g1 = gamma_generators(FedosovData(None, (1, 0), K=K))
    g2 = gamma_generators(FedosovData(None, (2, 0), K=K))
    assert g1 != g2
    assert g1 == gamma_generators(FedosovData(None, (1, 0), K=K))
