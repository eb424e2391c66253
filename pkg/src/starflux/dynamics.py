"""Derivations, automorphisms and Heisenberg flows of a star product.

A derivation ``D`` is stored through the closed 1-form ``beta = i(p(D)) omega``
and realised as ``sum_j c_j (1/nu)[theta_j, .] + (1/nu)[F, .]`` where ``c_j``
are the harmonic coefficients of ``beta`` and ``F`` is the primitive of its
exact part.  Automorphisms are linear maps defined mode by mode.  Paths are
generated by derivations depending polynomially on ``t``; their flows are
integrated exactly by Picard iteration in the polynomial time ring.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .errors import ConfigurationError, DomainError, RepresentationError, UnsupportedPathError
from .formal import FormalScalar, GaussQ, I, gq
from .star import StarProduct
from .torus import (
    H1Class,
    TorusField,
    TorusForm,
    TorusFun,
    dfun,
    field_from_form,
    form_from_field,
    h1_class,
    primitive,
)

__all__ = [
    "Derivation",
    "quasi_inner",
    "derivation_class",
    "ModeOperator",
    "Automorphism",
    "TPoly",
    "PathOperator",
    "AutPath",
    "heisenberg_flow",
    "bch",
    "log_vertical",
    "hamiltonianize",
    "probe_modes",
]


def probe_modes(dim: int = 2, bound: int = 3) -> list:
    """All modes with ``|m|_inf <= bound``."""
    return list(itertools.product(range(-bound, bound + 1), repeat=dim))


def _unit(m, K) -> TorusFun:
    return TorusFun.mode(m, 1, K)


def _nu_valuation(beta: TorusForm) -> int | None:
    vals = [s.valuation() for f in beta.comps.values() for s in f.modes.values()]
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


# ----------------------------------------------------------------------
# derivations
# ----------------------------------------------------------------------

class Derivation:
    """Derivation of ``P`` with ``i(p(D)) omega = beta``.

    Parameters
    ----------
    beta : TorusForm
        Closed 1-form at the truncation order of ``P``.
    P : StarProduct
    """

    def __init__(self, beta: TorusForm, P: StarProduct):
        if beta.degree != 1 or beta.dim != P.dim:
            raise ConfigurationError("derivation data must be a 1-form on the torus of the product")
        if beta.K != P.K:
            raise ConfigurationError(f"truncation orders differ: K={beta.K} vs product K={P.K}")
        if not beta.is_closed():
            raise DomainError("derivation 1-form is not closed")
        self.beta = beta
        self.P = P
        self.harmonic = tuple(beta.component((j,)).mode0() for j in range(P.dim))
        self.potential = primitive(beta - beta.harmonic_part())

    @property
    def dim(self):
        return self.P.dim

    @property
    def K(self):
        return self.P.K

    def __call__(self, F: TorusFun) -> TorusFun:
        out = TorusFun.zero(self.dim, self.K)
        for j, c in enumerate(self.harmonic):
            if c:
                out = out + self.P.lin_commutator(j, F).scale(c)
        if self.potential:
            out = out + self.P.scaled_commutator(self.potential, F)
        return out

    apply = __call__

    def h1(self) -> H1Class:
        return h1_class(self.beta)

    def is_quasi_inner(self) -> bool:
        return self.h1().is_zero()

    def valuation(self) -> int | None:
        return _nu_valuation(self.beta)

    def classical_field(self) -> TorusField:
        """The order-zero vector field ``p(D)_0``."""
        return field_from_form(self.beta.map_components(lambda f: f.nu_coeff(0)))

    def p(self) -> TorusField:
        """The formal symplectic field ``p(D)``."""
        return field_from_form(self.beta)

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.beta + other.beta, self.P)

    def __neg__(self):
        return Derivation(-self.beta, self.P)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "Derivation":
        return Derivation(self.beta.scale(s), self.P)

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.beta == other.beta

    def bracket(self, other: "Derivation", probe_bound: int = 2) -> "Derivation":
        """``[D, D']`` extracted from the operator commutator."""
        return Derivation(derivation_class(lambda F: self(other(F)) - other(self(F)), self.P,
                                           probe_bound), self.P)

    def __repr__(self):
        return f"Derivation({self.beta!r})"


def quasi_inner(H: TorusFun, P: StarProduct) -> Derivation:
    """``D_H = (1/nu)[H, .]``; its 1-form is ``dH``."""
    return Derivation(dfun(H.with_order(P.K)), P)


def derivation_class(op: Callable[[TorusFun], TorusFun], P: StarProduct,
                     probe_bound: int = 2) -> TorusForm:
    """The closed form ``beta`` with ``op = D_beta``, found order by order.

    At each order the residual ``op - D_{beta_<k}`` starts at ``nu^k`` with a
    vector field ``Y_k``, read off from ``Y_k(e_{delta_j}) = i Y_k^j e_{delta_j}``.
    The result is verified on all probe modes ``|m|_inf <= probe_bound``.
    """
    dim, K = P.dim, P.K
    beta = TorusForm.zero(1, dim, K)
    units = []
    for j in range(dim):
        m = [0] * dim
        m[j] = 1
        units.append((tuple(m), tuple(-x for x in m)))
    for k in range(K + 1):
        D = Derivation(beta, P)
        comps = []
        for j, (m, mneg) in enumerate(units):
            R = op(_unit(m, K)) - D(_unit(m, K))
            for s in R.modes.values():
                v = s.valuation()
                if v is not None and v < k:
                    raise DomainError("operator is not a derivation of the product")
            Yj = (R.nu_coeff(k) * _unit(mneg, K)).scale(-I)
            comps.append(Yj)
        Y = TorusField(comps, dim, K)
        bk = form_from_field(Y)
        if not bk.is_closed():
            raise DomainError("operator is not a derivation: its vector field is not symplectic")
        beta = beta + bk.map_components(lambda f: f.shift_nu(k))
    D = Derivation(beta, P)
    for m in probe_modes(dim, probe_bound):
        e = _unit(m, K)
        if op(e) != D(e):
            raise DomainError(f"operator is not a derivation of the product (probe {m})")
    return beta


# ----------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------

class ModeOperator:
    """Linear map on :class:`TorusFun` given by its (cached) values on modes."""

    def __init__(self, fn: Callable[[tuple], TorusFun], dim: int, K: int):
        self._fn = fn
        self.dim = dim
        self.K = K
        self._cache: dict = {}

    def on_mode(self, m) -> TorusFun:
        m = tuple(m)
        v = self._cache.get(m)
        if v is None:
            v = self._fn(m)
            self._cache[m] = v
        return v

    def __call__(self, F: TorusFun) -> TorusFun:
        out = TorusFun.zero(self.dim, self.K)
        for m, c in F.modes.items():
            out = out + self.on_mode(m).scale(c)
        return out

    @classmethod
    def identity(cls, dim, K) -> "ModeOperator":
        return cls(lambda m: _unit(m, K), dim, K)

    @classmethod
    def of(cls, f: Callable[[TorusFun], TorusFun], dim, K) -> "ModeOperator":
        return cls(lambda m: f(_unit(m, K)), dim, K)

    def compose(self, other: "ModeOperator") -> "ModeOperator":
        """``self o other`` (apply ``other`` first)."""
        return ModeOperator(lambda m: self(other.on_mode(m)), self.dim, self.K)

    def __add__(self, other):
        return ModeOperator(lambda m: self.on_mode(m) + other.on_mode(m), self.dim, self.K)

    def __sub__(self, other):
        return ModeOperator(lambda m: self.on_mode(m) - other.on_mode(m), self.dim, self.K)

    def scale(self, s):
        return ModeOperator(lambda m: self.on_mode(m).scale(s), self.dim, self.K)

    @staticmethod
    def exp_of(N: Callable[[TorusFun], TorusFun], dim, K) -> "ModeOperator":
        """``sum N^k / k!`` for an operator raising the nu-valuation."""
        def fn(m):
            term = acc = _unit(m, K)
            for k in range(1, K + 1):
                term = N(term).scale(mpq(1, k))
                if not term:
                    break
                acc = acc + term
            return acc
        return ModeOperator(fn, dim, K)

    def unipotent_inverse(self) -> "ModeOperator":
        """Neumann series for ``Id + N`` with ``N`` raising the nu-valuation."""
        def fn(m):
            term = acc = _unit(m, self.K)
            for _ in range(self.K):
                term = term - self(term)
                if not term:
                    break
                acc = acc + term
            return acc
        return ModeOperator(fn, self.dim, self.K)

    def unipotent_log(self) -> "ModeOperator":
        """``log(Id + N) = sum (-1)^{k+1} N^k / k``."""
        def N(F):
            return self(F) - F

        def fn(m):
            term = _unit(m, self.K)
            acc = TorusFun.zero(self.dim, self.K)
            for k in range(1, self.K + 1):
                term = N(term)
                if not term:
                    break
                acc = acc + term.scale(mpq((-1) ** (k + 1), k))
            return acc
        return ModeOperator(fn, self.dim, self.K)

    def equals_on(self, other, modes) -> bool:
        return all(self.on_mode(m) == other.on_mode(m) for m in modes)

    def is_unipotent_on(self, modes) -> bool:
        for m in modes:
            diff = self.on_mode(m) - _unit(m, self.K)
            if any(s.c[0] for s in diff.modes.values()):
                return False
        return True


_QUARTER_PHASES = {0: GaussQ(1), 1: GaussQ(0, 1), 2: GaussQ(-1), 3: GaussQ(0, -1)}


def translation_phase(m, X) -> GaussQ:
    """``exp(2 pi i m.X)`` for rational ``X``; exact only at quarter periods."""
    q = sum(Fraction(mi) * Fraction(xi) for mi, xi in zip(m, X))
    q4 = q * 4
    if q4.denominator != 1:
        raise RepresentationError(f"translation phase exp(2 pi i {q}) is not a Gaussian rational")
    return _QUARTER_PHASES[int(q4) % 4]


class Automorphism:
    """Automorphism ``A = T_X o V`` of a star product.

    ``T_X`` is pull-back by the translation ``theta -> theta + 2 pi X``
    (the classical part) and ``V`` is unipotent.  ``V`` may carry a
    Fedosov exponent section ``u`` with ``V F = sigma(exp(ad u / nu) Q F)``.
    """

    def __init__(self, P: StarProduct, vertical: ModeOperator | None = None, shift=None,
                 section=None):
        self.P = P
        self.dim, self.K = P.dim, P.K
        self.shift = tuple(Fraction(x) for x in (shift or (0,) * P.dim))
        self.vertical = vertical if vertical is not None else ModeOperator.identity(P.dim, P.K)
        self.section = section
        if any(self.shift):
            T = self._translation(self.shift)
            self.op = T.compose(self.vertical)
        else:
            self.op = self.vertical

    def _translation(self, X) -> ModeOperator:
        K = self.K
        return ModeOperator(lambda m: TorusFun.mode(m, translation_phase(m, X), K), self.dim, K)

    @classmethod
    def identity(cls, P) -> "Automorphism":
        return cls(P)

    @classmethod
    def translation(cls, X, P) -> "Automorphism":
        if not P.is_translation_invariant():
            raise DomainError("translations are automorphisms only of translation-invariant products")
        return cls(P, None, X)

    @classmethod
    def exp_derivation(cls, D: Derivation) -> "Automorphism":
        v = D.valuation()
        if v is not None and v < 1:
            raise UnsupportedPathError("exponential of a derivation with a classical part")
        return cls(D.P, ModeOperator.exp_of(D, D.dim, D.K))

    @classmethod
    def from_section(cls, u, P) -> "Automorphism":
        """``F -> sigma(exp((1/nu) ad u) Q F)`` for a Fedosov product ``P``."""
        data = _fedosov_data(P)
        K = P.K

        def fn(m):
            a = data.Q_mode(m)
            acc = a
            term = a
            for k in range(1, data.D_max + 2):
                term = _scomm(u, term).scale(mpq(1, k))
                if not term:
                    break
                acc = acc + term
            return acc.sigma().with_order(K)
        return cls(P, ModeOperator(fn, P.dim, K), None, u)

    @property
    def classical(self) -> tuple:
        """Translation vector of ``Cl(A)`` (in units of ``2 pi``)."""
        return self.shift

    def __call__(self, F: TorusFun) -> TorusFun:
        return self.op(F)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``; ``Cl`` of the result is ``Cl(other) o Cl(self)``."""
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        full = self.op.compose(other.op)
        if any(shift):
            back = self._translation(tuple(-x for x in shift))
            vertical = back.compose(full)
        else:
            vertical = full
        section = None
        if self.section is not None and other.section is not None and not any(shift):
            section = bch(self.section, other.section)
        return Automorphism(self.P, vertical, shift, section)

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self) -> "Automorphism":
        Vinv = self.vertical.unipotent_inverse()
        if any(self.shift):
            Tinv = self._translation(tuple(-x for x in self.shift))
            full = Vinv.compose(Tinv)
            vertical = self._translation(self.shift).compose(full)
        else:
            vertical = Vinv
        section = -self.section if self.section is not None else None
        return Automorphism(self.P, vertical, tuple(-x for x in self.shift), section)

    def equals_on_probes(self, other: "Automorphism", bound: int = 3) -> bool:
        return self.op.equals_on(other.op, probe_modes(self.dim, bound))

    def is_identity_on_probes(self, bound: int = 3) -> bool:
        return self.equals_on_probes(Automorphism.identity(self.P), bound)

    def multiplicativity_residuals(self, bound: int = 2) -> list:
        """``A(e_m * e_n) - A(e_m) * A(e_n)`` over probe pairs (all zero for an automorphism)."""
        P = self.P
        modes = probe_modes(self.dim, bound)
        out = []
        for m in modes:
            for n in modes:
                em, en = _unit(m, self.K), _unit(n, self.K)
                out.append(self(P.star(em, en)) - P.star(self(em), self(en)))
        return out

    def log(self, probe_bound: int = 2) -> Derivation:
        """The derivation ``D`` with ``V = exp(D)`` (vertical part)."""
        L = self.vertical.unipotent_log()
        return Derivation(derivation_class(L, self.P, probe_bound), self.P)


def _fedosov_data(P):
    data = getattr(P, "data", None)
    if data is None or not hasattr(data, "Q_mode"):
        raise DomainError("operation needs a Fedosov product")
    return data


def _scomm(a, b):
    from .weyl import scaled_commutator
    return scaled_commutator(a, b)


def bch(X, Y):
    """``log(exp(ad X / nu) exp(ad Y / nu))`` for the bracket ``(1/nu)[., .]``.

    Uses the recursion ``(n+1) Z_{n+1} = 1/2 [X - Y, Z_n] + sum_p B_2p/(2p)! ...``;
    it terminates because each bracket raises the Weyl degree.
    """
    from math import factorial
    from .weyl import scaled_commutator as br

    bern = {2: Fraction(1, 6), 4: Fraction(-1, 30), 6: Fraction(1, 42), 8: Fraction(-1, 30),
            10: Fraction(5, 66), 12: Fraction(-691, 2730), 14: Fraction(7, 6)}
    Z = {1: X + Y}
    XmY = X - Y
    XpY = X + Y
    n = 1
    limit = X.D_max + 2
    while n < limit:
        acc = br(XmY, Z[n]).scale(mpq(1, 2))
        for p in range(1, n // 2 + 1):
            B = bern.get(2 * p)
            if B is None:
                raise RepresentationError("BCH recursion exceeded the tabulated Bernoulli numbers")
            coeff = B / factorial(2 * p)
            for ks in _compositions(n, 2 * p):
                term = XpY
                for k in reversed(ks):
                    term = br(Z[k], term)
                    if not term:
                        break
                if term:
                    acc = acc + term.scale(mpq(coeff.numerator, coeff.denominator))
        Z[n + 1] = acc.scale(mpq(1, n + 1))
        n += 1
        if all(not Z[k] for k in range(max(2, n - 2), n + 1)) and n > 3:
            break
    out = Z[1]
    for k in range(2, n + 1):
        out = out + Z[k]
    return out


def _compositions(n: int, parts: int):
    if parts == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


# ----------------------------------------------------------------------
# polynomial time ring
# ----------------------------------------------------------------------

class TPoly:
    """``t -> sum_j t^j f_j`` with :class:`TorusFun` coefficients."""

    __slots__ = ("c", "dim", "K")

    def __init__(self, c: Mapping[int, TorusFun] | None, dim: int, K: int):
        self.c = {j: f for j, f in (c or {}).items() if f}
        self.dim = dim
        self.K = K

    @classmethod
    def const(cls, f: TorusFun) -> "TPoly":
        return cls({0: f}, f.dim, f.K)

    def __add__(self, other):
        out = dict(self.c)
        for j, f in other.c.items():
            out[j] = out[j] + f if j in out else f
        return TPoly(out, self.dim, self.K)

    def __neg__(self):
        return TPoly({j: -f for j, f in self.c.items()}, self.dim, self.K)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, TPoly) and (self - other).c == {}

    def __bool__(self):
        return bool(self.c)

    def map(self, op) -> "TPoly":
        """Apply a time-independent linear map coefficientwise."""
        return TPoly({j: op(f) for j, f in self.c.items()}, self.dim, self.K)

    def integrate(self) -> "TPoly":
        """``t -> int_0^t``."""
        return TPoly({j + 1: f.scale(mpq(1, j + 1)) for j, f in self.c.items()}, self.dim, self.K)

    def derivative(self) -> "TPoly":
        return TPoly({j - 1: f.scale(j) for j, f in self.c.items() if j}, self.dim, self.K)

    def at(self, t) -> TorusFun:
        t = gq(t)
        out = TorusFun.zero(self.dim, self.K)
        for j, f in self.c.items():
            p = gq(1)
            for _ in range(j):
                p = p * t
            out = out + f.scale(p)
        return out

    def degree(self) -> int:
        return max(self.c, default=0)


class PathOperator:
    """A path of linear maps ``t -> A_t`` with polynomial time dependence, by modes."""

    def __init__(self, fn: Callable[[tuple], TPoly], dim: int, K: int):
        self._fn = fn
        self.dim = dim
        self.K = K
        self._cache: dict = {}

    def on_mode(self, m) -> TPoly:
        m = tuple(m)
        v = self._cache.get(m)
        if v is None:
            v = self._fn(m)
            self._cache[m] = v
        return v

    def apply(self, g: TPoly) -> TPoly:
        """``t -> A_t(g(t))``."""
        out: dict = {}
        for j, f in g.c.items():
            for n, c in f.modes.items():
                for i, h in self.on_mode(n).c.items():
                    v = h.scale(c)
                    out[i + j] = out[i + j] + v if i + j in out else v
        return TPoly(out, self.dim, self.K)

    def __call__(self, F: TorusFun) -> TPoly:
        return self.apply(TPoly.const(F))

    def compose(self, other: "PathOperator") -> "PathOperator":
        """``t -> A_t o B_t``."""
        return PathOperator(lambda m: self.apply(other.on_mode(m)), self.dim, self.K)

    def derivative(self) -> "PathOperator":
        return PathOperator(lambda m: self.on_mode(m).derivative(), self.dim, self.K)

    def inverse(self) -> "PathOperator":
        """Pointwise inverse of a unipotent path (Neumann series)."""
        K = self.K

        def fn(m):
            e = TPoly.const(_unit(m, K))
            term = acc = e
            for _ in range(K):
                term = term - self.apply(term)
                if not term:
                    break
                acc = acc + term
            return acc
        return PathOperator(fn, self.dim, K)

    def at(self, t) -> ModeOperator:
        return ModeOperator(lambda m: self.on_mode(m).at(t), self.dim, self.K)

    def endpoint(self) -> ModeOperator:
        return self.at(1)

    def generator(self) -> "PathOperator":
        """``t -> (d/dt A_t) A_t^{-1}``."""
        return self.derivative().compose(self.inverse())

    def coefficient(self, j: int) -> ModeOperator:
        """The ``t^j`` coefficient as a fixed operator."""
        return ModeOperator(lambda m: self.on_mode(m).c.get(j, TorusFun.zero(self.dim, self.K)),
                            self.dim, self.K)

    def generator_forms(self, P: StarProduct, probe_bound: int = 2) -> dict:
        """``{j: beta_j}`` with ``t -> sum t^j D_{beta_j}`` the generator of the path."""
        G = self.generator()
        deg = 0
        for m in probe_modes(self.dim, probe_bound):
            deg = max(deg, G.on_mode(m).degree())
        out = {}
        for j in range(deg + 1):
            beta = derivation_class(G.coefficient(j), P, probe_bound)
            if beta:
                out[j] = beta
        return out


# ----------------------------------------------------------------------
# paths
# ----------------------------------------------------------------------

class AutPath:
    """Path ``A_t`` solving ``d/dt A_t = D_t A_t``, ``A_0 = Id``.

    The generator is ``D_t = sum_j t^j D_{beta_j}``; every ``beta_j`` must have
    positive nu-valuation (classical flows of non-constant Hamiltonians
    leave the exact ring; rotations are handled by the loop lifts of
    :mod:`starflux.flux`).
    """

    def __init__(self, generator, P: StarProduct):
        if isinstance(generator, (Derivation, TorusForm)):
            generator = {0: generator}
        self.P = P
        self.terms: dict = {}
        for j, b in generator.items():
            beta = b.beta if isinstance(b, Derivation) else b
            beta = beta.with_order(P.K)
            if not beta:
                continue
            v = _nu_valuation(beta)
            if v is not None and v < 1:
                raise UnsupportedPathError(
                    "generator has a classical part; only vertical generators are integrated exactly")
            self.terms[int(j)] = Derivation(beta, P)
        self._family: PathOperator | None = None

    @classmethod
    def hamiltonian(cls, H: Mapping[int, TorusFun] | TorusFun, P) -> "AutPath":
        """Path generated by ``t -> D_{H_t}`` with ``H_t = sum t^j H_j``."""
        if isinstance(H, TorusFun):
            H = {0: H}
        return cls({j: dfun(h.with_order(P.K)) for j, h in H.items()}, P)

    @property
    def dim(self):
        return self.P.dim

    @property
    def K(self):
        return self.P.K

    def is_autonomous(self) -> bool:
        return set(self.terms) <= {0}

    def generator_at(self, t) -> Derivation:
        t = gq(t)
        beta = TorusForm.zero(1, self.dim, self.K)
        for j, D in self.terms.items():
            p = gq(1)
            for _ in range(j):
                p = p * t
            beta = beta + D.beta.scale(p)
        return Derivation(beta, self.P)

    def forms(self) -> dict:
        return {j: D.beta for j, D in self.terms.items()}

    def _apply_generator(self, g: TPoly) -> TPoly:
        out: dict = {}
        for i, D in self.terms.items():
            for j, f in g.c.items():
                v = D(f)
                out[i + j] = out[i + j] + v if i + j in out else v
        return TPoly(out, self.dim, self.K)

    def family(self) -> PathOperator:
        """``A_t`` by Picard iteration ``g = e_m + int_0^t D_s g``."""
        if self._family is None:
            K = self.K

            def fn(m):
                e = TPoly.const(_unit(m, K))
                g = e
                for _ in range(K + 1):
                    new = e + self._apply_generator(g).integrate()
                    if new == g:
                        break
                    g = new
                return g
            self._family = PathOperator(fn, self.dim, K)
        return self._family

    def endpoint(self, route: str = "picard") -> Automorphism:
        if route == "picard":
            return Automorphism(self.P, self.family().endpoint())
        if route == "fedosov":
            if not self.is_autonomous():
                raise UnsupportedPathError(
                    "the closed-form exponential is valid only for autonomous generators")
            data = _fedosov_data(self.P)
            beta = self.terms[0].beta if self.terms else TorusForm.zero(1, self.dim, self.K)
            u = data.q_tail(beta.with_order(data.K)).with_truncation(K=data.K)
            return Automorphism.from_section(u, self.P)
        raise ConfigurationError(f"unknown route {route!r}")

    def flux(self) -> H1Class:
        """``int_0^1 [beta_t] dt``."""
        total = H1Class.zero(self.dim, self.K)
        for j, D in self.terms.items():
            total = total + D.h1().scale(FormalScalar.const(Fraction(1, j + 1), self.K))
        return total


def heisenberg_flow(gen, P: StarProduct | None = None, route: str = "picard") -> Automorphism:
    """Endpoint ``A_1`` of the flow of a generator (path, derivation or 1-form)."""
    if not isinstance(gen, AutPath):
        if P is None:
            P = gen.P
        gen = AutPath(gen, P)
    return gen.endpoint(route)


def log_vertical(A: Automorphism, probe_bound: int = 2):
    """Exponent of a vertical automorphism.

    Returns the Fedosov section ``u`` when ``A`` carries one (or can be
    given one: ``q_tail`` of the extracted derivation), else the derivation.
    """
    if any(A.shift):
        raise DomainError("log_vertical needs an automorphism with identity classical part")
    if A.section is not None:
        return A.section
    D = A.log(probe_bound)
    data = getattr(A.P, "data", None)
    if data is not None and hasattr(data, "q_tail"):
        return data.q_tail(D.beta.with_order(data.K))
    return D


def hamiltonianize(path: AutPath, probe_bound: int = 2) -> dict:
    """Hamiltonian generator ``{j: H_j}`` of a path with the same endpoint.

    Precondition: the flux of the whole path vanishes.  The harmonic parts
    ``h_t = int_0^t [beta_s] ds`` (with ``h_0 = h_1 = 0``) are removed by
    ``C_t = exp(-D_{h_t}) A_t``; ``C_t`` has zero flux on every initial
    segment, so its generator is ``D_{H_t}``, recovered exactly and
    normalised to zero mean.
    """
    P = path.P
    if not path.flux().is_zero():
        raise DomainError("path not flux-exact: its total flux is nonzero")
    if not P.is_translation_invariant():
        raise UnsupportedPathError("straightening needs commuting harmonic derivations "
                                   "(translation-invariant product)")
    dim, K = P.dim, P.K
    # h_t = sum_j t^{j+1}/(j+1) c_j with c_j the harmonic part of beta_j
    h: dict = {}
    for j, D in path.terms.items():
        c = D.beta.harmonic_part()
        if c:
            h[j + 1] = c.scale(FormalScalar.const(Fraction(1, j + 1), K))

    def Dh_apply(g: TPoly) -> TPoly:
        out: dict = {}
        for i, c in h.items():
            Dc = Derivation(c, P)
            for j, f in g.c.items():
                v = Dc(f)
                out[i + j] = out[i + j] + v if i + j in out else v
        return TPoly(out, dim, K)

    def fn(m):
        # exp(-D_{h_t}) applied to A_t e_m
        g = path.family().on_mode(m)
        term = acc = g
        for k in range(1, K + 1):
            term = (-Dh_apply(term)).map(lambda f: f.scale(mpq(1, k)))
            if not term:
                break
            acc = acc + term
        return acc

    C = PathOperator(fn, dim, K)
    forms = C.generator_forms(P, probe_bound)
    out = {}
    for j, beta in forms.items():
        if not h1_class(beta).is_zero():
            raise DomainError("straightened generator is not quasi-inner (internal inconsistency)")
        H = primitive(beta)
        if H:
            out[j] = H
    return out
