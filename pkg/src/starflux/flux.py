"""Formal flux of automorphism paths and deformed flux of rotation loops.

Loops are the torus rotations ``phi_t(theta) = theta + 2 pi t v`` with
integral ``v``.  Every quantity attached to such a loop is linear in its
velocity ``2 pi v``, so fluxes are reported in units of ``2 pi``: the loop
along ``d/dtheta_1`` has classical flux ``(0, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .dynamics import (
    AutPath,
    Derivation,
    ModeOperator,
    PathOperator,
    derivation_class,
)
from .errors import DomainError, RepresentationError
from .fedosov import FedosovData, FedosovProduct
from .formal import FormalScalar, GaussQ, gq
from .star import StarProduct, extract_cochain
from .torus import (
    H1Class,
    TorusField,
    TorusForm,
    TorusFun,
    form_from_field,
    h1_class,
    ham_field,
)
from .weyl import WeylSection, _check_loop, contract, integrate_rotation

__all__ = [
    "LoopDescriptor",
    "LoopLift",
    "classical_flux",
    "flux_of_path",
    "flux_def_of_loop",
    "loop_lift",
    "flux_def_closed_form",
    "flux_def_generic",
    "flux_order1",
    "order1_form",
    "gamma_generators",
]


@dataclass(frozen=True)
class LoopDescriptor:
    """Rotation loop ``theta -> theta + 2 pi t v`` with integral ``v``."""

    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", _check_loop(self.v))

    @property
    def dim(self) -> int:
        return len(self.v)

    def field(self, K: int) -> TorusField:
        return TorusField.constant(self.v, K)

    def contraction(self, K: int) -> TorusForm:
        """``i(v) omega``."""
        return form_from_field(self.field(K))


def _as_loop(loop) -> LoopDescriptor:
    return loop if isinstance(loop, LoopDescriptor) else LoopDescriptor(tuple(loop))


def classical_flux(loop, K: int) -> H1Class:
    """``[i(v) omega]``."""
    return h1_class(_as_loop(loop).contraction(K))


def flux_of_path(path) -> H1Class:
    """``int_0^1 [i(p(D_t)) omega] dt`` for an :class:`AutPath` or a :class:`PathOperator`.

    A :class:`PathOperator` is first reduced to its generator, extracted
    coefficientwise in ``t`` (requires the product via ``path.P``).
    """
    if isinstance(path, AutPath):
        return path.flux()
    if isinstance(path, tuple) and len(path) == 2 and isinstance(path[0], PathOperator):
        op, P = path
        total = H1Class.zero(P.dim, P.K)
        for j, beta in op.generator_forms(P).items():
            total = total + h1_class(beta).scale(FormalScalar.const(GaussQ(1) / (j + 1), P.K))
        return total
    raise TypeError("flux_of_path expects an AutPath or a (PathOperator, product) pair")


# ----------------------------------------------------------------------
# Fedosov lift
# ----------------------------------------------------------------------

@dataclass
class LoopLift:
    """Data of the lifted loop in the Weyl algebra (units of ``2 pi``).

    ``u`` is the exponent with ``B_1 = exp((1/nu) ad u)``, ``Du`` its image
    under the Fedosov connection (a central 1-form), ``flux`` the deformed flux.
    """

    loop: LoopDescriptor
    u: WeylSection
    Du: TorusForm
    flux: H1Class


def _data_of(obj) -> tuple:
    if isinstance(obj, FedosovProduct):
        return obj.data, obj.K
    if isinstance(obj, FedosovData):
        return obj, obj.K
    raise DomainError("the Fedosov lift needs Fedosov data or a Fedosov product")


def _check_invariant(data: FedosovData):
    if not data.is_translation_invariant():
        raise DomainError("rotations must preserve the connection and Omega "
                          "(constant Christoffel symbols and constant Omega)")


def loop_lift(loop, data) -> LoopLift:
    """Lift of a rotation loop to the Weyl algebra.

    ``u = int_0^1 phi_{s*}((Q H)^{>=3} + i(v) r) ds`` where ``(Q H)^{>=3}`` is
    the part of ``q_tail(i(v) omega)`` of Weyl degree at least 3.  The
    degree-1 and 2 parts are checked against ``omega_ij v^i y^j`` and
    ``1/2 (nabla_i v)_j y^i y^j``.
    """
    loop = _as_loop(loop)
    data, K = _data_of(data)
    _check_invariant(data)
    if loop.dim != data.dim:
        raise DomainError("loop and data live on tori of different dimension")
    beta = loop.contraction(data.K)
    tail = data.q_tail(beta)
    lin, quad = data.low_degree_parts(loop.v)
    if tail.degree_part(0, 2) != lin + quad:
        raise DomainError("low-degree part of the flat section does not match the connection data")
    w = tail.degree_part(3) + contract(loop.v, data.r)
    u = integrate_rotation(loop.v, w)
    Du = data.D(u).degree_part(0, data.D_max - 1)
    if Du.filter(lambda k, m, al, J: any(al) or len(J) != 1):
        raise DomainError("D u is not a central 1-form: the loop does not preserve the data")
    form = Du.to_scalar_form(1)
    harm = h1_class(form)
    flux = (classical_flux(loop, data.K) + harm).with_order(K)
    return LoopLift(loop, u, form, flux)


def flux_def_of_loop(loop, data) -> H1Class:
    """Deformed flux ``[i(v) omega] - [i(p(D)) omega]`` through the Fedosov lift."""
    return loop_lift(loop, data).flux


def flux_def_closed_form(loop, data) -> H1Class:
    """``[i(v) omega] - [int_0^1 phi_t^* i(v) Omega dt]`` evaluated directly."""
    loop = _as_loop(loop)
    data, K = _data_of(data)
    _check_invariant(data)
    iO = data.Omega.contract(loop.field(data.K))
    sec = WeylSection.from_form(iO, data.D_max)
    avg = integrate_rotation(loop.v, sec).to_scalar_form(1)
    return (classical_flux(loop, data.K) - h1_class(avg)).with_order(K)


# ----------------------------------------------------------------------
# generic lift
# ----------------------------------------------------------------------

def _translation_generator(v, P) -> ModeOperator:
    """``L_v``: ``e_m -> i (m . v) e_m``."""
    K = P.K

    def fn(m):
        c = sum(mi * vi for mi, vi in zip(m, v))
        return TorusFun.mode(m, GaussQ(0, c), K)
    return ModeOperator(fn, P.dim, K)


def flux_def_generic(loop, P: StarProduct, probe_bound: int = 2) -> H1Class:
    """Deformed flux of a rotation loop for any translation-invariant product.

    The lift satisfies ``B_1^{-1} = exp(L_v - p^{-1}(v))`` because all
    operators involved commute with translations.  The exponential is
    formed, inverted and its logarithm extracted as a derivation ``D``
    (``B_1 = exp(D)``); the flux is ``[i(v) omega] - [i(p(D)) omega]``.
    """
    loop = _as_loop(loop)
    if not P.is_translation_invariant():
        raise DomainError("the generic lift needs a translation-invariant product")
    K = P.K
    beta = loop.contraction(K)
    pinv = Derivation(beta, P)
    L = _translation_generator(loop.v, P)

    def Dtilde(F):
        return L(F) - pinv(F)

    B_inv = ModeOperator.exp_of(Dtilde, P.dim, K)
    for m in ((1,) + (0,) * (P.dim - 1), (0,) * P.dim):
        e = TorusFun.mode(m, 1, K)
        diff = B_inv(e) - e
        if any(s.c[0] for s in diff.modes.values()):
            raise DomainError("lift generator has a classical part: p^{-1}(v) does not lift v")
    B = B_inv.unipotent_inverse()
    logB = B.unipotent_log()
    pD = derivation_class(logB, P, probe_bound)
    return classical_flux(loop, K) - h1_class(pD)


# ----------------------------------------------------------------------
# order one
# ----------------------------------------------------------------------

def order1_form(P: StarProduct, probe_bound: int = 1) -> GaussQ:
    """Constant ``c`` with ``C_2(F,G) - C_2(G,F) = -Omega_1(X_F, X_G)``, ``Omega_1 = c omega``.

    Requires ``dim == 2``; the relation is verified on probe pairs.
    """
    if P.dim != 2:
        raise DomainError("order1_form is implemented for the 2-torus")
    if P.K < 2:
        raise DomainError("order1_form needs K >= 2")
    K = P.K
    C2 = extract_cochain(P, 2)
    e10, e01 = TorusFun.mode((1, 0), 1, K), TorusFun.mode((0, 1), 1, K)
    anti = C2(e10, e01) - C2(e01, e10)
    c = anti.coeff((1, 1))[0]
    modes = [(a, b) for a in range(-probe_bound, probe_bound + 1)
             for b in range(-probe_bound, probe_bound + 1)]
    for m in modes:
        for n in modes:
            F, G = TorusFun.mode(m, 1, K), TorusFun.mode(n, 1, K)
            lhs = C2(F, G) - C2(G, F)
            XF, XG = ham_field(F), ham_field(G)
            wedge = XF.comps[0] * XG.comps[1] - XF.comps[1] * XG.comps[0]
            if lhs != wedge.scale(-c).nu_coeff(0):
                raise DomainError("C_2 antisymmetrisation is not of the form -Omega_1(X_F, X_G) "
                                  "with constant Omega_1")
    return c


def flux_order1(loop, P: StarProduct, C1=None) -> H1Class:
    """``[i(v) omega] - nu [i(v) Omega_1]`` truncated at ``nu^1``.

    ``Omega_1`` is read off the product (see :func:`order1_form`) unless its
    constant ``C1`` is given.
    """
    loop = _as_loop(loop)
    K = P.K
    c = gq(C1) if C1 is not None else order1_form(P)
    cl = classical_flux(loop, K)
    corr = cl.scale(FormalScalar([0, c], K))
    return (cl - corr).truncate(1)


def gamma_generators(data, dim: int = 2) -> list:
    """Deformed fluxes of the coordinate rotation loops (generators of the flux group)."""
    if isinstance(data, (FedosovData, FedosovProduct)):
        dim = data.dim
        f = flux_def_of_loop
    else:
        f = flux_def_generic
    out = []
    for k in range(dim):
        v = [0] * dim
        v[k] = 1
        out.append(f(tuple(v), data))
    return out
