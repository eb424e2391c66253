"""Equivalence operators ``T = Id + sum nu^r T_r`` and transported star products."""
from __future__ import annotations

import json
from math import comb
from typing import Iterable, Mapping

from .dynamics import Automorphism, ModeOperator
from .errors import ConfigurationError, DomainError
from .star import StarProduct
from .torus import TorusFun

__all__ = [
    "EquivalenceOperator",
    "TransportedProduct",
    "transport",
    "conjugate_automorphism",
    "check_flux_invariance",
]


def _madd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _msub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def _sub_indices(mu):
    if not mu:
        yield ()
        return
    for k in range(mu[0] + 1):
        for rest in _sub_indices(mu[1:]):
            yield (k,) + rest


class EquivalenceOperator:
    """``T = Id + sum_{r>=1} nu^r sum_mu f_{r,mu} d^mu``.

    Parameters
    ----------
    terms : mapping
        ``{(r, mu): coefficient}`` with ``r >= 1``, ``|mu| >= 1`` and the
        coefficient a :class:`TorusFun` (or a number, meaning a constant).
    dim, K : int
    """

    def __init__(self, terms: Mapping | None = None, dim: int = 2, K: int = 4):
        self.dim = dim
        self.K = K
        clean: dict = {}
        for (r, mu), f in (terms or {}).items():
            mu = tuple(mu)
            if r < 1:
                raise DomainError("equivalence terms start at nu^1")
            if len(mu) != dim or sum(mu) < 1 or min(mu) < 0:
                raise DomainError(f"bad derivative multi-index {mu}: T_r must annihilate constants")
            if r > K:
                continue
            if not isinstance(f, TorusFun):
                f = TorusFun.const(f, dim, K)
            f = f.with_order(K)
            key = (r, mu)
            clean[key] = clean[key] + f if key in clean else f
        self.terms = {k: f for k, f in clean.items() if f}

    @classmethod
    def identity(cls, dim=2, K=4) -> "EquivalenceOperator":
        return cls({}, dim, K)

    def with_order(self, K: int) -> "EquivalenceOperator":
        return EquivalenceOperator({k: f.with_order(K) for k, f in self.terms.items()}, self.dim, K)

    def is_constant(self) -> bool:
        zero = (0,) * self.dim
        return all(set(f.modes) <= {zero} for f in self.terms.values())

    def __call__(self, F: TorusFun) -> TorusFun:
        if F.K != self.K:
            return self.with_order(F.K)(F)
        out = F
        for (r, mu), f in self.terms.items():
            out = out + (f * F.deriv_multi(mu)).shift_nu(r)
        return out

    apply = __call__

    def _product_terms(self, other: "EquivalenceOperator") -> dict:
        """Terms of ``N_self o N_other`` (Leibniz rule)."""
        out: dict = {}
        for (r, mu), f in self.terms.items():
            for (s, rho), g in other.terms.items():
                if r + s > self.K:
                    continue
                for kappa in _sub_indices(mu):
                    c = 1
                    for a, b in zip(mu, kappa):
                        c *= comb(a, b)
                    dg = g.deriv_multi(kappa)
                    if not dg:
                        continue
                    key = (r + s, _madd(_msub(mu, kappa), rho))
                    val = (f * dg).scale(c)
                    out[key] = out[key] + val if key in out else val
        return out

    def compose(self, other: "EquivalenceOperator") -> "EquivalenceOperator":
        """``self o other``."""
        self._check(other)
        terms = dict(self.terms)
        for k, f in other.terms.items():
            terms[k] = terms[k] + f if k in terms else f
        for k, f in self._product_terms(other).items():
            terms[k] = terms[k] + f if k in terms else f
        return EquivalenceOperator(terms, self.dim, self.K)

    def _check(self, other):
        if (self.dim, self.K) != (other.dim, other.K):
            raise ConfigurationError("equivalence operators differ in dimension or order")

    def inverse(self) -> "EquivalenceOperator":
        """``sum_k (-N)^k`` (finite: ``N`` raises the nu-valuation)."""
        negN = EquivalenceOperator({k: -f for k, f in self.terms.items()}, self.dim, self.K)
        merged = dict(negN.terms)
        power = negN
        for _ in range(self.K - 1):
            power = EquivalenceOperator(negN._product_terms(power), self.dim, self.K)
            if not power.terms:
                break
            for k, f in power.terms.items():
                merged[k] = merged[k] + f if k in merged else f
        return EquivalenceOperator(merged, self.dim, self.K)

    def first_order_part(self, j: int) -> TorusFun:
        """``(T - Id) theta_j``: the sum of ``nu^r f_{r, delta_j}``."""
        delta = tuple(1 if i == j else 0 for i in range(self.dim))
        out = TorusFun.zero(self.dim, self.K)
        for (r, mu), f in self.terms.items():
            if mu == delta:
                out = out + f.shift_nu(r)
        return out

    def order_one(self):
        """``T_1`` as a function ``F -> T_1 F`` on nu-order-0 inputs."""
        def T1(F):
            out = TorusFun.zero(F.dim, F.K)
            for (r, mu), f in self.terms.items():
                if r == 1:
                    out = out + f.with_order(F.K) * F.deriv_multi(mu)
            return out
        return T1

    def __eq__(self, other):
        return isinstance(other, EquivalenceOperator) and self.terms == other.terms

    def to_json(self) -> dict:
        return {"dim": self.dim, "K": self.K,
                "terms": [{"r": r, "mu": list(mu), "coeff": f.to_json()}
                          for (r, mu), f in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data) -> "EquivalenceOperator":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            dim, K = int(data["dim"]), int(data["K"])
            terms = {}
            for t in data["terms"]:
                c = t["coeff"]
                if isinstance(c, dict):
                    c = TorusFun.from_json(c)
                elif isinstance(c, list):
                    from fractions import Fraction
                    c = Fraction(int(c[0]), int(c[1]))
                terms[(int(t["r"]), tuple(int(x) for x in t["mu"]))] = c
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed equivalence operator: {exc}") from exc
        return cls(terms, dim, K)

    def __repr__(self):
        return f"EquivalenceOperator({self.terms!r})"


class TransportedProduct(StarProduct):
    """``F *' G = T(T^{-1} F * T^{-1} G)``, so that ``T`` intertwines ``*`` and ``*'``."""

    name = "transported"

    def __init__(self, P: StarProduct, T: EquivalenceOperator):
        if T.dim != P.dim:
            raise ConfigurationError("operator and product live on tori of different dimension")
        super().__init__(P.dim, P.K)
        self.base = P
        self.T = T.with_order(P.K)
        self.Tinv = self.T.inverse()
        self._Tg = T.with_order(self.Kg)
        self._Tinv_g = self._Tg.inverse()

    def _pair(self, m, n):
        a = self._Tinv_g(TorusFun.mode(m, 1, self.Kg))
        b = self._Tinv_g(TorusFun.mode(n, 1, self.Kg))
        return self._Tg(self.base.star_full(a, b))

    def _lin_mode(self, j, m):
        G = self.Tinv(TorusFun.mode(m, 1, self.K))
        g = self.Tinv.first_order_part(j)
        out = self.base.lin_commutator(j, G)
        if g:
            out = out + self.base.scaled_commutator(g, G)
        return self.T(out)

    def is_translation_invariant(self):
        return self.base.is_translation_invariant() and self.T.is_constant()


def transport(P: StarProduct, T: EquivalenceOperator) -> StarProduct:
    """The product ``*'`` with ``T(F * G) = TF *' TG``."""
    if not T.terms:
        return P
    return TransportedProduct(P, T)


def conjugate_automorphism(A: Automorphism, T: EquivalenceOperator,
                           P_new: StarProduct | None = None) -> Automorphism:
    """``T A T^{-1}``, an automorphism of the transported product."""
    if P_new is None:
        P_new = transport(A.P, T)
    K = A.K
    Tk = T.with_order(K)
    Tinv = Tk.inverse()
    conj = ModeOperator(lambda m: Tk(A.op(Tinv(TorusFun.mode(m, 1, K)))), A.dim, K)
    if any(A.shift):
        back = A._translation(tuple(-x for x in A.shift))
        vertical = back.compose(conj)
    else:
        vertical = conj
    return Automorphism(P_new, vertical, A.shift)


def check_flux_invariance(loop, P: StarProduct, T: EquivalenceOperator) -> tuple:
    """Deformed fluxes of ``loop`` for ``P`` and for its transport by ``T``.

    Both use the generic operator lift; equality is the claim under test.
    """
    from .flux import flux_def_generic
    P2 = transport(P, T)
    return flux_def_generic(loop, P), flux_def_generic(loop, P2)
