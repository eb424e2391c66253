"""Derivations, automorphisms and paths of automorphisms."""
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import torus_funs
from starflux.acceptance import random_fun
from starflux.dynamics import (
    AutPath,
    Automorphism,
    Derivation,
    ModeOperator,
    bch,
    derivation_class,
    hamiltonianize,
    log_vertical,
    probe_modes,
    quasi_inner,
    translation_phase,
)
from starflux.errors import DomainError, RepresentationError, UnsupportedPathError
from starflux.fedosov import FedosovProduct
from starflux.formal import FormalScalar, GaussQ
from starflux.star import MoyalProduct
from starflux.torus import H1Class, TorusForm, TorusFun, dfun

K = 3
NU = FormalScalar.nu(K)
MOYAL = MoyalProduct(2, K)


def harmonic(a, b):
    return TorusForm.one_form([NU * a, NU * b], K)


@given(torus_funs(max_modes=2), torus_funs(max_modes=2), st.integers(-2, 2), st.integers(-2, 2))
def test_derivations_satisfy_leibniz(F, G, a, b):
    H = TorusFun({(1, -1): 1, (0, 2): GaussQ(0, 1)}, 2, K)
    D = Derivation(dfun(H) + harmonic(a, b), MOYAL)
    P = MOYAL
    assert D(P.star(F, G)) == P.star(D(F), G) + P.star(F, D(G))


def test_quasi_inner_is_scaled_commutator():
    H = TorusFun({(1, 0): 2, (-1, 1): GaussQ(1, 1)}, 2, K)
    D = quasi_inner(H, MOYAL)
    assert D.is_quasi_inner()
    for m in probe_modes(2, 2):
        e = TorusFun.mode(m, 1, K)
        assert D(e) == MOYAL.scaled_commutator(H, e)


def test_coordinate_derivation_is_rotation_generator():
    # (1/nu)[theta_1, e_m] = Lambda^{1b} d_b e_m
    assert MOYAL.lin_commutator(0, TorusFun.mode((2, 3), 1, K)) == TorusFun.mode((2, 3), GaussQ(0, -3), K)


@given(st.integers(0, 10 ** 6))
def test_derivation_class_round_trip(seed):
    rng = random.Random(seed)
    H = random_fun(rng, 2, K, 2, 2, nu_terms=True)
    beta = (dfun(H) + harmonic(rng.randint(-2, 2), rng.randint(-2, 2))).with_order(K)
    D = Derivation(beta, MOYAL)
    got = derivation_class(D, MOYAL)
    assert got == beta - dfun(TorusFun.const(H.mode0(), 2, K))


def test_non_derivation_is_rejected():
    with pytest.raises(DomainError):
        derivation_class(lambda F: F * F, MOYAL)


def test_translation_phases():
    assert translation_phase((1, 0), (Fraction(1, 4), 0)) == GaussQ(0, 1)
    assert translation_phase((2, 1), (Fraction(1, 2), 0)) == GaussQ(1)
    with pytest.raises(RepresentationError):
        translation_phase((1, 0), (Fraction(1, 3), 0))


def test_translations_are_automorphisms():
    T = Automorphism.translation((Fraction(1, 4), Fraction(1, 2)), MOYAL)
    assert not any(T.multiplicativity_residuals(1))
    assert T.compose(T.inverse()).is_identity_on_probes(2)


def test_exponentials_are_automorphisms_and_log_inverts():
    H = TorusFun({(1, 0): 1, (0, -1): 2}, 2, K).scale(NU)
    D = Derivation(dfun(H) + harmonic(1, -1), MOYAL)
    A = Automorphism.exp_derivation(D)
    assert not any(A.multiplicativity_residuals(1))
    assert A.log() == D
    assert A.compose(A.inverse()).is_identity_on_probes(2)


def test_classical_generators_are_unsupported():
    with pytest.raises(UnsupportedPathError):
        AutPath(TorusForm.one_form([1, 0], K), MOYAL)


@pytest.fixture(scope="module")
def fedosov():
    return FedosovProduct(2, K, Omega=(1, 2))


def test_picard_and_closed_form_routes_agree(fedosov):
    H = TorusFun({(1, 1): 1, (0, 1): GaussQ(0, 2)}, 2, K).scale(NU)
    path = AutPath(dfun(H) + harmonic(2, 1), fedosov)
    a = path.endpoint("picard")
    b = path.endpoint("fedosov")
    assert a.equals_on_probes(b, 2)


def test_fedosov_route_needs_autonomous_generator(fedosov):
    path = AutPath({0: harmonic(1, 0), 1: harmonic(0, 1)}, fedosov)
    with pytest.raises(UnsupportedPathError):
        path.endpoint("fedosov")


def test_section_composition_uses_bch(fedosov):
    H1 = TorusFun({(1, 0): 1}, 2, K).scale(NU)
    H2 = TorusFun({(0, 1): 1}, 2, K).scale(NU)
    A = AutPath(dfun(H1), fedosov).endpoint("fedosov")
    B = AutPath(dfun(H2), fedosov).endpoint("fedosov")
    AB = A.compose(B)
    assert AB.section == bch(A.section, B.section)
    assert AB.equals_on_probes(Automorphism.from_section(AB.section, fedosov), 2)
    assert log_vertical(A) == A.section


def test_flux_of_paths():
    const = AutPath(harmonic(2, -1), MOYAL)
    assert const.flux() == H1Class((NU * 2, NU * -1))
    ramp = AutPath({1: harmonic(2, 0)}, MOYAL)
    assert ramp.flux() == H1Class((NU * 1, FormalScalar.zero(K)))


def test_hamiltonian_paths_have_zero_flux():
    H = TorusFun({(1, 2): 1}, 2, K).scale(NU)
    assert AutPath.hamiltonian({0: H, 1: H.scale(3)}, MOYAL).flux().is_zero()


def test_hamiltonianize_requires_zero_flux():
    with pytest.raises(DomainError):
        hamiltonianize(AutPath(harmonic(1, 0), MOYAL))


def test_hamiltonianize_keeps_endpoint():
    H0 = TorusFun({(1, 0): 1}, 2, K).scale(NU)
    path = AutPath({0: dfun(H0) + harmonic(1, 0), 1: harmonic(-2, 0)}, MOYAL)
    Hs = hamiltonianize(path, probe_bound=1)
    for H in Hs.values():
        assert not H.mode0()
    end = AutPath.hamiltonian(Hs, MOYAL).endpoint()
    assert end.equals_on_probes(path.endpoint(), 2)


def test_mode_operator_exp_log():
    D = Derivation(harmonic(1, 1), MOYAL)
    E = ModeOperator.exp_of(D, 2, K)
    L = E.unipotent_log()
    for m in probe_modes(2, 2):
        e = TorusFun.mode(m, 1, K)
        assert L(e) == D(e)
