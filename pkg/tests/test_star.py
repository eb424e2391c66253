"""Star products: Moyal against an independent symbolic oracle, axioms, associativity."""
from fractions import Fraction
from itertools import product

import pytest
import sympy as sp
from hypothesis import given

from conftest import torus_funs
from starflux.errors import DomainError
from starflux.fedosov import FedosovProduct
from starflux.formal import FormalScalar, GaussQ, series_exp
from starflux.star import MoyalProduct, axiom_residuals, check_associativity, extract_cochain, moyal_phase
from starflux.torus import TorusFun, lambda_matrix, poisson

K = 3
X, Y, NU = sp.symbols("X Y nu")


def to_sympy(F):
    def num(a):
        return (sp.Rational(int(a.re.numerator), int(a.re.denominator))
                + sp.I * sp.Rational(int(a.im.numerator), int(a.im.denominator)))
    return sum(sum(num(a) * NU ** k for k, a in enumerate(s.c)) * X ** m[0] * Y ** m[1]
               for m, s in F.modes.items())


def from_sympy(expr, bound=12):
    """Laurent polynomial in X, Y with coefficients polynomial in nu back to TorusFun."""
    expr = sp.expand(expr * X ** bound * Y ** bound)
    poly = sp.Poly(expr, X, Y, NU)
    modes = {}
    for (a, b, k), c in poly.terms():
        m = (a - bound, b - bound)
        re, im = sp.re(c), sp.im(c)
        coeffs = modes.setdefault(m, [0] * (K + 1))
        coeffs[k] = GaussQ(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return TorusFun({m: FormalScalar(c, K) for m, c in modes.items()}, 2, K)


def partial(f, i):
    # d/dtheta on e^{i theta}: multiplies by i times the exponent
    v = X if i == 0 else Y
    return sp.expand(sp.I * v * sp.diff(f, v))


def symbolic_moyal(F, G):
    """sum_r (nu/2)^r / r! Lambda^{i1 j1}...Lambda^{ir jr} d_I F d_J G, truncated at nu^K."""
    lam = lambda_matrix(2)
    f, g = to_sympy(F), to_sympy(G)
    total = 0
    for r in range(K + 1):
        acc = 0
        for idx in product(range(2), repeat=2 * r):
            I, J = idx[:r], idx[r:]
            c = 1
            for i, j in zip(I, J):
                c *= lam[i][j]
            if not c:
                continue
            df, dg = f, g
            for i in I:
                df = partial(df, i)
            for j in J:
                dg = partial(dg, j)
            acc += c * df * dg
        total += (NU / 2) ** r / sp.factorial(r) * acc
    total = sp.expand(total)
    return from_sympy(sum(total.coeff(NU, k) * NU ** k for k in range(K + 1)))


@given(torus_funs(max_modes=2, bound=1), torus_funs(max_modes=2, bound=1))
def test_moyal_matches_bidifferential_formula(F, G):
    assert MoyalProduct(2, K).star(F, G) == symbolic_moyal(F, G)


def test_mode_pair_value():
    P = MoyalProduct(2, K)
    expected = series_exp(FormalScalar([0, Fraction(1, 2)], K))
    assert P.pair((1, 0), (0, 1)).with_order(K) == TorusFun.mode((1, 1), expected, K)
    assert moyal_phase((1, 0), (0, 1)) == 1


def test_phase_sign_is_pinned_by_first_order_bracket():
    # C1(F,G) - C1(G,F) must equal {F,G}; a global sign flip of lambda breaks this
    P = MoyalProduct(2, K)
    C1 = extract_cochain(P, 1)
    F, G = TorusFun.mode((1, 0), 1, K), TorusFun.mode((0, 1), 1, K)
    assert C1(F, G) - C1(G, F) == poisson(F, G)


@pytest.mark.parametrize("make", [lambda: MoyalProduct(2, K), lambda: FedosovProduct(2, 2, Omega=(1, 2))])
def test_axioms(make):
    P = make()
    F = TorusFun({(1, 0): 1, (-1, 2): GaussQ(2, -1)}, 2, P.K)
    G = TorusFun({(0, 1): Fraction(1, 3), (2, -1): 1}, 2, P.K)
    for name, res in axiom_residuals(P, F, G).items():
        assert not res, name


@given(torus_funs(max_modes=2, classical=False), torus_funs(max_modes=2, classical=False),
       torus_funs(max_modes=2, classical=False))
def test_moyal_associative(F, G, H):
    assert not check_associativity(MoyalProduct(2, K), F, G, H)


def test_scaled_commutator_of_modes():
    # (1/nu)[e_m, e_n] = (2/nu) sinh(nu lambda / 2) e_{m+n}
    P = MoyalProduct(2, K)
    lam = moyal_phase((2, 1), (1, -1))
    x = FormalScalar([0, Fraction(lam, 2)], K + 1)
    s = (series_exp(x) - series_exp(-x)).shift(-1).with_order(K)
    got = P.scaled_commutator(TorusFun.mode((2, 1), 1, K), TorusFun.mode((1, -1), 1, K))
    assert got == TorusFun.mode((3, 0), s, K)


def test_cochain_bounds():
    with pytest.raises(DomainError):
        extract_cochain(MoyalProduct(2, 2), 3)
