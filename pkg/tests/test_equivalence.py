"""Equivalence operators and transported products."""
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starflux.acceptance import random_fun
from starflux.dynamics import Automorphism, Derivation
from starflux.equivalence import (
    EquivalenceOperator,
    check_flux_invariance,
    conjugate_automorphism,
    transport,
)
from starflux.errors import DomainError
from starflux.fedosov import FedosovData, FedosovProduct
from starflux.flux import flux_def_generic, flux_def_of_loop
from starflux.formal import FormalScalar, GaussQ
from starflux.star import MoyalProduct, axiom_residuals, check_associativity, extract_cochain
from starflux.torus import TorusForm, TorusFun, poisson

K = 3


@st.composite
def operators(draw):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        r = draw(st.integers(1, K))
        mu = (draw(st.integers(0, 2)), draw(st.integers(0, 2)))
        if sum(mu) == 0:
            continue
        terms[(r, mu)] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3)))
    return EquivalenceOperator(terms, 2, K)


@given(operators(), st.integers(0, 10 ** 6))
def test_inverse(T, seed):
    F = random_fun(random.Random(seed), 2, K, 2, 3, nu_terms=True)
    assert T.inverse()(T(F)) == F
    assert T(T.inverse()(F)) == F


@given(operators(), operators(), st.integers(0, 10 ** 6))
def test_composition(S, T, seed):
    F = random_fun(random.Random(seed), 2, K, 2, 3)
    assert S.compose(T)(F) == S(T(F))


def test_nonconstant_coefficients_compose():
    f = TorusFun({(1, 0): 1}, 2, K)
    S = EquivalenceOperator({(1, (1, 0)): f}, 2, K)
    T = EquivalenceOperator({(1, (0, 1)): f, (2, (2, 0)): 3}, 2, K)
    F = TorusFun({(1, 2): 1, (-1, 1): 2}, 2, K)
    assert S.compose(T)(F) == S(T(F))
    assert S.inverse()(S(F)) == F


def test_operator_must_kill_constants():
    with pytest.raises(DomainError):
        EquivalenceOperator({(1, (0, 0)): 1}, 2, K)
    with pytest.raises(DomainError):
        EquivalenceOperator({(0, (1, 0)): 1}, 2, K)


def test_json_round_trip():
    T = EquivalenceOperator({(1, (1, 1)): TorusFun({(0, 1): GaussQ(1, 2)}, 2, K), (2, (2, 0)): 3}, 2, K)
    assert EquivalenceOperator.from_json(json.dumps(T.to_json())) == T


@pytest.fixture(scope="module")
def transported():
    T = EquivalenceOperator({(1, (2, 0)): 1, (1, (1, 1)): 2, (2, (0, 3)): Fraction(1, 2)}, 2, K)
    return T, transport(MoyalProduct(2, K), T)


def test_transported_product_is_a_star_product(transported):
    T, P2 = transported
    rng = random.Random(2)
    for _ in range(3):
        F, G, H = (random_fun(rng, 2, K, 1, 2) for _ in range(3))
        assert not check_associativity(P2, F, G, H)
        for name, res in axiom_residuals(P2, F, G).items():
            assert not res, name


def test_transport_intertwines(transported):
    T, P2 = transported
    P = MoyalProduct(2, K)
    F = TorusFun({(1, 0): 1, (0, 2): 3}, 2, K)
    G = TorusFun({(-1, 1): 2}, 2, K)
    assert T(P.star(F, G)) == P2.star(T(F), T(G))


def test_second_order_antisymmetric_part_shifts_by_t1():
    # C2'(F,G) - C2'(G,F) = C2(F,G) - C2(G,F) + T1{F,G} - {T1 F, G} - {F, T1 G}
    base = FedosovProduct(2, 2, Omega=(2, 1))
    T = EquivalenceOperator({(1, (1, 1)): 1, (1, (2, 0)): 3}, 2, 2)
    P2 = transport(base, T)
    T1 = T.order_one()
    C2, C2t = extract_cochain(base, 2), extract_cochain(P2, 2)
    for m, n in [((1, 0), (0, 1)), ((2, -1), (1, 1)), ((1, 2), (-1, 0))]:
        F, G = TorusFun.mode(m, 1, 2), TorusFun.mode(n, 1, 2)
        lhs = C2t(F, G) - C2t(G, F)
        rhs = C2(F, G) - C2(G, F) + T1(poisson(F, G)) - poisson(T1(F), G) - poisson(F, T1(G))
        assert lhs == rhs


@pytest.mark.parametrize("v", [(1, 0), (0, 1)])
def test_flux_is_invariant(v, transported):
    T, _ = transported
    base = FedosovProduct(2, K, Omega=(2, 5))
    before, after = check_flux_invariance(v, base, T)
    assert before == after == flux_def_of_loop(v, FedosovData(None, (2, 5), K=K))


def test_conjugated_automorphism(transported):
    T, P2 = transported
    P = MoyalProduct(2, K)
    nu = FormalScalar.nu(K)
    D = Derivation(TorusForm.one_form([nu, -nu], K), P)
    A = Automorphism.exp_derivation(D)
    B = conjugate_automorphism(A, T, P2)
    assert not any(B.multiplicativity_residuals(1))


def test_nonconstant_transport_leaves_translation_scope():
    T = EquivalenceOperator({(1, (1, 0)): TorusFun({(0, 1): 1}, 2, K)}, 2, K)
    P2 = transport(MoyalProduct(2, K), T)
    with pytest.raises(DomainError):
        flux_def_generic((1, 0), P2)
