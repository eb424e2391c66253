"""Weyl algebra bundle: fibrewise product, delta operators, connection pieces."""
import random

from hypothesis import given
from hypothesis import strategies as st

from starflux.acceptance import random_section, test_connection as nonflat_connection
from starflux.formal import FormalScalar, GaussQ
from starflux.torus import TorusForm, TorusFun, symplectic_form
from starflux.weyl import (
    SymplecticConnection,
    WeylSection,
    circ,
    connection,
    delta,
    delta_inv,
    exterior_d,
    graded_commutator,
    integrate_rotation,
    lie_derivative,
    scaled_commutator,
)

K, D = 3, 8


def y(i, coeff=1):
    return WeylSection.y(i, 2, K, D, coeff)


def sections(seed, n=3):
    rng = random.Random(seed)
    return [random_section(rng, 2, K, D) for _ in range(n)]


def test_generators_commutator():
    assert scaled_commutator(y(0), y(1)) == WeylSection.monomial((0, 0), (), None, 0, -1, 2, K, D)


def test_product_of_generators():
    # y1 o y2 = y1 y2 - nu/2
    expected = WeylSection.monomial((1, 1), (), None, 0, 1, 2, K, D) + \
        WeylSection.monomial((0, 0), (), None, 1, GaussQ(-1, 0) / 2, 2, K, D)
    assert circ(y(0), y(1)) == expected


def test_delta_inverse_of_area_form():
    area = WeylSection.from_form(symplectic_form(2, K), D)
    expected = WeylSection({(0, (0, 0), (1, 0), (1,)): GaussQ(1) / 2,
                            (0, (0, 0), (0, 1), (0,)): -GaussQ(1) / 2}, 2, K, D)
    assert delta_inv(area) == expected


@given(st.integers(0, 10 ** 6))
def test_hodge_decomposition(seed):
    for a in sections(seed):
        a00 = a.filter(lambda k, m, al, J: not any(al) and not J)
        assert delta(delta_inv(a)) + delta_inv(delta(a)) == a - a00


@given(st.integers(0, 10 ** 6))
def test_delta_squares_to_zero(seed):
    for a in sections(seed):
        assert not delta(delta(a))
        assert not delta_inv(delta_inv(a))
        assert not exterior_d(exterior_d(a))


@given(st.integers(0, 10 ** 6))
def test_fibrewise_product_is_associative(seed):
    a, b, c = (s.degree_part(0, 3).form_part(0) for s in sections(seed))
    lhs = circ(circ(a, b), c).degree_part(0, D - 2)
    rhs = circ(a, circ(b, c)).degree_part(0, D - 2)
    assert lhs == rhs


def test_delta_is_inner():
    # (1/nu)[omega_ij y^i dtheta^j, a] = -delta a
    a = sections(11)[0].degree_part(0, D - 1)
    form = WeylSection({(0, (0, 0), (1, 0), (1,)): 1, (0, (0, 0), (0, 1), (0,)): -1}, 2, K, D)
    assert scaled_commutator(form, a).degree_part(0, D - 2) == (-delta(a)).degree_part(0, D - 2)


def test_graded_commutator_signs():
    a = WeylSection({(0, (1, 0), (1, 0), (0,)): 1}, 2, K, D)
    b = WeylSection({(0, (0, 1), (0, 1), (1,)): 1}, 2, K, D)
    assert graded_commutator(a, b) == graded_commutator(b, a)


def test_connection_symmetries():
    conn = nonflat_connection()
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert conn.gamma(k, i, j) == conn.gamma(k, j, i)
                assert conn.lowered(k, i, j) == conn.lowered(i, j, k)
    assert SymplecticConnection.flat().is_flat_coordinates()


def test_connection_on_functions_is_d():
    F = TorusFun({(1, 2): 1, (0, -1): 3}, 2, K)
    a = WeylSection.from_fun(F, D_max=D)
    got = connection(a, nonflat_connection())
    assert got.to_scalar_form(1) == TorusForm({(0,): F.deriv(0), (1,): F.deriv(1)}, 1, 2, K)


def test_rotation_average_kills_moving_modes():
    a = WeylSection({(0, (1, 0), (1, 0), ()): 1, (0, (0, 1), (0, 1), ()): 2}, 2, K, D)
    avg = integrate_rotation((1, 0), a)
    assert avg == WeylSection({(0, (0, 1), (0, 1), ()): 2}, 2, K, D)


def test_lie_derivative_along_constant_field():
    a = WeylSection({(0, (2, -1), (1, 0), ()): 1}, 2, K, D)
    assert lie_derivative((1, 0), a) == a.scale(GaussQ(0, 2))
