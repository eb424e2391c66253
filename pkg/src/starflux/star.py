"""Star products on the torus: a common interface, the Moyal product, axiom checks."""
from __future__ import annotations

from fractions import Fraction

from .errors import ConfigurationError, DomainError
from .formal import FormalScalar, GaussQ, series_exp
from .torus import TorusFun, lambda_matrix, poisson

__all__ = [
    "StarProduct",
    "MoyalProduct",
    "moyal",
    "moyal_phase",
    "extract_cochain",
    "check_associativity",
    "axiom_residuals",
]


class StarProduct:
    """Bilinear product on :class:`TorusFun` given by its values on mode pairs.

    Subclasses implement :meth:`_pair`, returning ``e_m * e_n`` computed one
    order beyond ``K`` (the guard order ``K + 1``), so that ``(1/nu)[F, G]``
    is exact through ``nu**K``.  They also implement :meth:`lin_commutator`,
    the derivation ``(1/nu)[theta_j, .]`` of the multivalued coordinate
    function, which is how harmonic derivations are realised globally.
    """

    name = "star"

    def __init__(self, dim: int = 2, K: int = 4):
        if K < 0:
            raise ConfigurationError("truncation order must be non-negative")
        self.dim = dim
        self.K = K
        self.Kg = K + 1
        self._cache: dict = {}
        self._lin_cache: dict = {}

    # -- subclass hooks -------------------------------------------------
    def _pair(self, m: tuple, n: tuple) -> TorusFun:
        raise NotImplementedError

    def _lin_mode(self, j: int, m: tuple) -> TorusFun:
        raise NotImplementedError

    def lin_commutator(self, j: int, G: TorusFun) -> TorusFun:
        """``(1/nu)[theta_j, G]``, assembled from cached values on modes."""
        self._check(G)
        out: dict = {}
        for m, c in G.modes.items():
            key = (j, m)
            val = self._lin_cache.get(key)
            if val is None:
                val = self._lin_mode(j, m)
                self._lin_cache[key] = val
            for p, a in val.modes.items():
                v = a * c
                out[p] = out[p] + v if p in out else v
        return TorusFun(out, self.dim, self.K)

    def is_translation_invariant(self) -> bool:
        return False

    # -- products -------------------------------------------------------
    def pair(self, m, n) -> TorusFun:
        key = (tuple(m), tuple(n))
        val = self._cache.get(key)
        if val is None:
            val = self._pair(*key)
            self._cache[key] = val
        return val

    def _check(self, F: TorusFun):
        if F.dim != self.dim:
            raise ConfigurationError("function lives on a torus of another dimension")
        if F.K != self.K:
            raise ConfigurationError(f"truncation orders differ: K={F.K} vs product K={self.K}")

    def star_full(self, F: TorusFun, G: TorusFun) -> TorusFun:
        """Product at the guard order (inputs and output at ``K + 1``)."""
        out: dict = {}
        for m, a in F.modes.items():
            for n, b in G.modes.items():
                ab = a * b
                for p, c in self.pair(m, n).modes.items():
                    v = ab * c
                    out[p] = out[p] + v if p in out else v
        return TorusFun._raw(out, self.dim, self.Kg)

    def star(self, F: TorusFun, G: TorusFun) -> TorusFun:
        self._check(F)
        self._check(G)
        return self.star_full(F.with_order(self.Kg), G.with_order(self.Kg)).with_order(self.K)

    def scaled_commutator(self, F: TorusFun, G: TorusFun) -> TorusFun:
        """``(1/nu)(F*G - G*F)``, exact through ``nu**K``."""
        self._check(F)
        self._check(G)
        Fg, Gg = F.with_order(self.Kg), G.with_order(self.Kg)
        diff = self.star_full(Fg, Gg) - self.star_full(Gg, Fg)
        return diff.shift_nu(-1).with_order(self.K)

    def __call__(self, F: TorusFun, G: TorusFun) -> TorusFun:
        return self.star(F, G)


def moyal_phase(m, n) -> int:
    """Integer ``lambda(m, n) = -Lambda^{ij} m_i n_j``; ``C_1`` antisymmetrised is ``lambda``."""
    lam = lambda_matrix(len(m))
    return -sum(lam[i][j] * m[i] * n[j] for i in range(len(m)) for j in range(len(m)) if lam[i][j])


class MoyalProduct(StarProduct):
    """Closed-form Moyal product ``e_m * e_n = exp(nu lambda(m, n) / 2) e_{m+n}``."""

    name = "moyal"

    def _pair(self, m, n):
        lam = moyal_phase(m, n)
        phase = series_exp(FormalScalar.nu(self.Kg) * Fraction(lam, 2))
        p = tuple(a + b for a, b in zip(m, n))
        return TorusFun._raw({p: phase}, self.dim, self.Kg)

    def _lin_mode(self, j, m):
        lam = lambda_matrix(self.dim)
        c = sum(lam[j][b] * m[b] for b in range(self.dim))
        return TorusFun.mode(m, GaussQ(0, c), self.K)

    def is_translation_invariant(self):
        return True


def moyal(F: TorusFun, G: TorusFun) -> TorusFun:
    """Moyal product of two Fourier polynomials at their own truncation order."""
    return MoyalProduct(F.dim, F.K).star(F, G)


def extract_cochain(P: StarProduct, r: int):
    """The bilinear map ``C_r`` (``nu**r`` coefficient of ``F * G``).

    Inputs should have nu-order-0 coefficients only; the output is a
    :class:`TorusFun` whose coefficients sit at nu-order 0.
    """
    if r < 0 or r > P.K:
        raise DomainError(f"cochain order {r} outside 0..{P.K}")

    def C(F: TorusFun, G: TorusFun) -> TorusFun:
        return P.star(F, G).nu_coeff(r)

    return C


def check_associativity(P: StarProduct, F: TorusFun, G: TorusFun, H: TorusFun) -> TorusFun:
    """Residual ``(F*G)*H - F*(G*H)``; zero for an associative product."""
    return P.star(P.star(F, G), H) - P.star(F, P.star(G, H))


def axiom_residuals(P: StarProduct, F: TorusFun, G: TorusFun) -> dict:
    """Residuals of the defining conditions of a star product on one pair.

    Every value is a :class:`TorusFun` that vanishes when the axiom holds:
    ``C_0 = FG``, ``C_1(F,G) - C_1(G,F) = {F,G}``, ``C_r(1, G) = C_r(G, 1) = 0``
    for ``r >= 1``, and the unit law.
    """
    F0, G0 = F.nu_coeff(0), G.nu_coeff(0)
    C0, C1 = extract_cochain(P, 0), extract_cochain(P, 1) if P.K >= 1 else None
    one = TorusFun.const(1, P.dim, P.K)
    res = {"C0": C0(F0, G0) - (F0 * G0).nu_coeff(0)}
    if C1 is not None:
        res["C1_antisym"] = C1(F0, G0) - C1(G0, F0) - poisson(F0, G0).nu_coeff(0)
    for r in range(1, P.K + 1):
        Cr = extract_cochain(P, r)
        res[f"C{r}_left_constant"] = Cr(one, G0)
        res[f"C{r}_right_constant"] = Cr(G0, one)
    res["unit"] = (P.star(F, one) - F) + (P.star(one, F) - F)
    return res
