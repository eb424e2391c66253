"""The Fedosov construction on the torus.

Given a symplectic connection and a closed 2-form series ``Omega`` of
positive nu-valuation, :class:`FedosovData` solves for the correction ``r``
of the flat connection ``D a = partial a - delta a + (1/nu)[r, a]``, builds
flat sections ``Q F`` and exposes the product ``sigma(Q F o Q G)`` through
:class:`FedosovProduct`.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import ConfigurationError, ConvergenceError, DomainError
from .formal import FormalScalar, gq
from .star import StarProduct
from .torus import TorusForm, TorusFun, omega_matrix, symplectic_form
from .weyl import (
    SymplecticConnection,
    WeylSection,
    _contractions,
    _odd_contractions,
    circ,
    connection,
    contract,
    curvature_section,
    delta,
    delta_inv,
    gamma_bar,
    lie_derivative,
    scaled_commutator,
)

__all__ = ["FedosovData", "FedosovProduct", "sigma_product", "omega_series"]


def omega_series(C: Sequence, dim: int = 2, K: int = 4) -> TorusForm:
    """``sum_{i>=1} nu^i C_i omega`` from the constants ``(C_1, C_2, ...)``."""
    w = symplectic_form(dim, K)
    coeffs = [0] + [gq(c) for c in C][:K]
    s = FormalScalar(coeffs, K)
    return w.map_components(lambda f: f.scale(s))


def sigma_product(a: WeylSection, b: WeylSection) -> TorusFun:
    """``sigma(a o b)`` for 0-form sections, using only full contractions."""
    a._check(b)
    K = a.K
    zero = (0,) * a.dim
    acc: dict = {}
    by_deg: dict = {}
    for (k2, m2, be, J2), c2 in b.terms.items():
        if not J2:
            by_deg.setdefault(sum(be), []).append((k2, m2, be, c2))
    for (k1, m1, al, J1), c1 in a.terms.items():
        if J1:
            continue
        for k2, m2, be, c2 in by_deg.get(sum(al), ()):
            if k1 + k2 + sum(al) > K:
                continue
            for c, g, v in _contractions(al, be):
                if g != zero:
                    continue
                k = k1 + k2 + c
                m = tuple(x + y for x, y in zip(m1, m2))
                row = acc.setdefault(m, {})
                val = c1 * c2 * v
                row[k] = row[k] + val if k in row else val
    modes = {}
    for m, row in acc.items():
        s = FormalScalar([row.get(k, 0) for k in range(K + 1)], K)
        if s:
            modes[m] = s
    return TorusFun._raw(modes, a.dim, K)


def sigma_scaled_commutator(a: WeylSection, b: WeylSection) -> TorusFun:
    """``sigma((1/nu)[a, b])`` for 0-form sections (odd full contractions only)."""
    a._check(b)
    K = a.K
    zero = (0,) * a.dim
    acc: dict = {}
    by_deg: dict = {}
    for (k2, m2, be, J2), c2 in b.terms.items():
        if not J2 and any(be):
            by_deg.setdefault(sum(be), []).append((k2, m2, be, c2))
    for (k1, m1, al, J1), c1 in a.terms.items():
        n = sum(al)
        if J1 or n % 2 == 0:
            continue
        for k2, m2, be, c2 in by_deg.get(n, ()):
            if k1 + k2 + n - 1 > K:
                continue
            for p, g, v in _odd_contractions(al, be):
                if g != zero:
                    continue
                k = k1 + k2 + p
                m = tuple(x + y for x, y in zip(m1, m2))
                row = acc.setdefault(m, {})
                val = c1 * c2 * v
                row[k] = row[k] + val if k in row else val
    modes = {}
    for m, row in acc.items():
        s = FormalScalar([row.get(k, 0) for k in range(K + 1)], K)
        if s:
            modes[m] = s
    return TorusFun._raw(modes, a.dim, K)


class FedosovData:
    """Connection, curvature-type form and solved ``r`` for one Fedosov product.

    Parameters
    ----------
    connection : SymplecticConnection, optional
        Defaults to the flat connection ``d``.
    Omega : TorusForm or sequence, optional
        Closed 2-form series with positive nu-valuation; a sequence
        ``(C_1, C_2, ...)`` stands for ``sum nu^i C_i omega``.
    K, D_max : int
        nu truncation and Weyl-degree bound (default ``2K + 2``).
    """

    def __init__(self, connection: SymplecticConnection | None = None, Omega=None,
                 dim: int = 2, K: int = 4, D_max: int | None = None):
        self.dim = dim
        self.K = K
        self.D_max = 2 * K + 2 if D_max is None else D_max
        self.conn = connection if connection is not None else SymplecticConnection.flat(dim)
        if self.conn.dim != dim:
            raise ConfigurationError("connection lives on a torus of another dimension")
        if Omega is None:
            Omega = TorusForm.zero(2, dim, K)
        elif not isinstance(Omega, TorusForm):
            Omega = omega_series(Omega, dim, K)
        if Omega.degree != 2 or Omega.dim != dim:
            raise ConfigurationError("Omega must be a 2-form on the same torus")
        Omega = Omega.with_order(K)
        if not Omega.is_closed():
            raise DomainError("Omega is not closed")
        for f in Omega.comps.values():
            for s in f.modes.values():
                if s[0]:
                    raise DomainError("Omega must have positive nu-valuation")
        self.Omega = Omega
        self._gbar = gamma_bar(self.conn, K, self.D_max)
        self._Omega_sec = WeylSection.from_form(Omega, self.D_max)
        self.R_bar = curvature_section(self.conn, K, self.D_max)
        self._Q_cache: dict = {}
        self._tail_cache: dict = {}
        self.r = self._solve_r()

    # -- basic operators --------------------------------------------------
    def zero(self) -> WeylSection:
        return WeylSection.zero(self.dim, self.K, self.D_max)

    def partial(self, a: WeylSection) -> WeylSection:
        return connection(a, self.conn, self._gbar)

    def D(self, a: WeylSection) -> WeylSection:
        """Fedosov connection ``partial a - delta a + (1/nu)[r, a]``."""
        return self.partial(a) - delta(a) + scaled_commutator(self.r, a)

    def is_translation_invariant(self) -> bool:
        return self.conn.is_constant() and all(
            set(f.modes) <= {(0,) * self.dim} for f in self.Omega.comps.values())

    # -- r ---------------------------------------------------------------
    def r_rhs(self, r: WeylSection) -> WeylSection:
        return (self.R_bar + self.partial(r) + scaled_commutator(r, r).scale(mpq(1, 2))
                - self._Omega_sec)

    def _solve_r(self) -> WeylSection:
        r = self.zero()
        for _ in range(self.D_max + 2):
            new = delta_inv(self.r_rhs(r))
            if new == r:
                return r
            r = new
        raise ConvergenceError("r-iteration did not stabilise within the degree bound")

    def r_residuals(self) -> dict:
        """Each value vanishes for a correct solution."""
        r = self.r
        md = r.min_degree()
        return {
            "fixed_point": r - delta_inv(self.r_rhs(r)),
            "delta_inv": delta_inv(r),
            "low_degree": r.degree_part(0, 2),
            "min_degree_ok": md is None or md >= 3,
        }

    # -- flat sections -----------------------------------------------------
    def _fixed_point(self, seed: WeylSection, extra: WeylSection | None = None) -> WeylSection:
        """Fixed point of the affine map ``a -> seed + delta^{-1}(extra + L a)``.

        ``L = partial + (1/nu) ad r`` is linear and raises the Weyl degree
        after ``delta^{-1}``, so the increments ``delta^{-1} L`` applied
        repeatedly vanish after at most ``D_max + 1`` steps.
        """
        step = delta_inv(self.partial(seed) + scaled_commutator(self.r, seed)
                         + (extra if extra is not None else self.zero()))
        a = seed
        for _ in range(self.D_max + 2):
            if not step:
                return a
            a = a + step
            step = delta_inv(self.partial(step) + scaled_commutator(self.r, step))
        raise ConvergenceError("flat-section iteration did not stabilise within the degree bound")

    def Q_mode(self, m) -> WeylSection:
        """Flat section with symbol ``e_m``."""
        m = tuple(m)
        q = self._Q_cache.get(m)
        if q is None:
            seed = WeylSection({(0, m, (0,) * self.dim, ()): 1}, self.dim, self.K, self.D_max)
            q = self._fixed_point(seed)
            self._Q_cache[m] = q
        return q

    def Q(self, F: TorusFun) -> WeylSection:
        """Flat section ``Q F`` (nu-linear, assembled from cached modes)."""
        if F.dim != self.dim:
            raise ConfigurationError("function lives on a torus of another dimension")
        F = F.with_order(self.K)
        out = self.zero()
        for m, c in F.modes.items():
            out = out + self.Q_mode(m).scale(c)
        return out

    @staticmethod
    def sigma(a: WeylSection) -> TorusFun:
        return a.sigma()

    def q_tail(self, beta: TorusForm) -> WeylSection:
        """Fixed point of ``a -> delta^{-1}(beta + partial a + (1/nu)[r, a])``.

        The global stand-in for ``Q H - H`` when ``dH = beta`` only locally;
        satisfies ``D(q_tail(beta)) = -beta``.
        """
        if beta.degree != 1 or beta.dim != self.dim:
            raise DomainError("q_tail needs a 1-form")
        beta = beta.with_order(self.K)
        if not beta.is_closed():
            raise DomainError("q_tail needs a closed 1-form")
        b = WeylSection.from_form(beta, self.D_max)
        return self._fixed_point(self.zero(), b)

    def q_tail_coordinate(self, j: int) -> WeylSection:
        """``q_tail(dtheta_j)`` (cached)."""
        q = self._tail_cache.get(j)
        if q is None:
            comps = [0] * self.dim
            comps[j] = 1
            q = self.q_tail(TorusForm.one_form(comps, self.K))
            self._tail_cache[j] = q
        return q

    def low_degree_parts(self, X: Iterable) -> tuple:
        """``(omega_ij X^i y^j, 1/2 (nabla_i X)_j y^i y^j)`` for a constant field ``X``."""
        X = [gq(x) for x in X]
        w = omega_matrix(self.dim)
        lin = self.zero()
        for i in range(self.dim):
            for j in range(self.dim):
                if w[i][j] and X[i]:
                    lin = lin + WeylSection.y(j, self.dim, self.K, self.D_max, X[i] * w[i][j])
        nab = self.conn.covariant_derivative(X)
        quad = self.zero()
        for i in range(self.dim):
            for j in range(self.dim):
                c = 0
                for k in range(self.dim):
                    if w[k][j] and nab[i][k]:
                        c = nab[i][k] * w[k][j] + c
                if c:
                    alpha = [0] * self.dim
                    alpha[i] += 1
                    alpha[j] += 1
                    quad = quad + WeylSection.monomial(alpha, (), None, 0, gq(c) * mpq(1, 2),
                                                       self.dim, self.K, self.D_max)
        return lin, quad

    def cartan_residual(self, X: Iterable, a: WeylSection) -> WeylSection:
        """Residual of the Cartan formula for the translation flow of a constant ``X``.

        ``L_X a - i(X) D a - D i(X) a - (1/nu)[omega X y + 1/2 (nabla X) y y - i(X) r, a]``.
        The rotation family is the translate of this identity at ``t = 0``
        because translations commute with every operator involved when the
        data are translation invariant.
        """
        X = [gq(x) for x in X]
        lin, quad = self.low_degree_parts(X)
        h = lin + quad - contract(X, self.r)
        rhs = contract(X, self.D(a)) + self.D(contract(X, a)) + scaled_commutator(h, a)
        return lie_derivative(X, a) - rhs


class FedosovProduct(StarProduct):
    """``F * G = sigma(Q F o Q G)`` for a flat or constant-Christoffel connection.

    The internal Fedosov data are built at the guard order ``K + 1``.
    """

    name = "fedosov"

    def __init__(self, dim: int = 2, K: int = 4, connection: SymplecticConnection | None = None,
                 Omega=None, D_max: int | None = None):
        super().__init__(dim, K)
        if isinstance(Omega, TorusForm):
            Omega = Omega.with_order(self.Kg)
        self.data = FedosovData(connection, Omega, dim, self.Kg,
                                None if D_max is None else D_max)

    @property
    def r(self) -> WeylSection:
        return self.data.r

    def _pair(self, m, n):
        return sigma_product(self.data.Q_mode(m), self.data.Q_mode(n))

    def _lin_mode(self, j, m):
        q = self.data.q_tail_coordinate(j)
        return sigma_scaled_commutator(q, self.data.Q_mode(m)).with_order(self.K)

    def is_translation_invariant(self):
        return self.data.is_translation_invariant()
