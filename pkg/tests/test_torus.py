from fractions import Fraction

import pytest
from hypothesis import given

from conftest import torus_funs
from starflux.errors import DomainError
from starflux.formal import FormalScalar, GaussQ
from starflux.torus import (
    H1Class,
    TorusField,
    TorusForm,
    TorusFun,
    dfun,
    form_from_field,
    h1_class,
    ham_field,
    lambda_matrix,
    omega_matrix,
    poisson,
    primitive,
    symplectic_form,
)

K = 3


def e(m):
    return TorusFun.mode(m, 1, K)


def test_symplectic_matrices():
    assert omega_matrix(2) == ((0, 1), (-1, 0))
    assert lambda_matrix(2) == ((0, -1), (1, 0))
    assert omega_matrix(4)[2][3] == 1


def test_basic_bracket():
    assert poisson(e((1, 0)), e((0, 1))) == e((1, 1))


def test_hamiltonian_field_contracts_to_differential():
    F = e((1, 2)) + e((0, -1)).scale(3)
    assert form_from_field(ham_field(F)) == dfun(F)
    assert ham_field(e((1, 0))).comps[1] == e((1, 0)).scale(GaussQ(0, -1))


@given(torus_funs(), torus_funs())
def test_bracket_is_antisymmetric(F, G):
    assert poisson(F, G) == -poisson(G, F)


@given(torus_funs(max_modes=2), torus_funs(max_modes=2), torus_funs(max_modes=2))
def test_jacobi_and_leibniz(F, G, H):
    jac = poisson(F, poisson(G, H)) + poisson(G, poisson(H, F)) + poisson(H, poisson(F, G))
    assert not jac
    assert poisson(F, G * H) == poisson(F, G) * H + G * poisson(F, H)


@given(torus_funs())
def test_exact_forms(F):
    beta = dfun(F)
    assert not beta.d()
    assert h1_class(beta).is_zero()
    mean = TorusFun.const(F.mode0(), 2, K)
    assert primitive(beta) == F - mean


def test_harmonic_forms_have_periods():
    nu = FormalScalar.nu(K)
    beta = TorusForm.one_form([FormalScalar([2], K), nu * 3], K)
    assert h1_class(beta) == H1Class((FormalScalar([2], K), nu * 3))
    with pytest.raises(DomainError):
        primitive(beta)


def test_rotation_contraction():
    # i(d/dtheta1) omega = dtheta2
    X = TorusField.constant((1, 0), K)
    assert h1_class(form_from_field(X)) == H1Class.of([0, 1], K)
    assert symplectic_form(2, K).contract(X) == form_from_field(X)


def test_non_closed_form_has_no_class():
    beta = TorusForm.one_form([e((0, 1)), TorusFun.zero(2, K)], K)
    with pytest.raises(DomainError):
        h1_class(beta)


def test_json_round_trip():
    F = e((1, -2)).scale(GaussQ(Fraction(1, 2), 3)) + e((0, 0)).scale(FormalScalar([0, 1], K))
    assert TorusFun.from_json(F.to_json()) == F
