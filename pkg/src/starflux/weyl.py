"""Weyl-bundle calculus on the torus.

A section is stored flat: each term is keyed by ``(k, m, alpha, J)`` meaning
``nu^k e_m y^alpha dtheta^J`` with ``J`` strictly increasing.  Its Weyl
degree is ``2k + |alpha|``; terms above ``D_max`` (or above ``nu^K``) are
dropped, which is consistent because the fibrewise product is additive in
degree.
"""
from __future__ import annotations

import json
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .errors import ConfigurationError, DomainError
from .formal import ONE, ZERO, FormalScalar, GaussQ, I, gq
from .torus import TorusForm, TorusFun, lambda_matrix, omega_matrix

__all__ = [
    "WeylSection",
    "SymplecticConnection",
    "circ",
    "graded_commutator",
    "scaled_commutator",
    "delta",
    "delta_inv",
    "exterior_d",
    "connection",
    "gamma_bar",
    "curvature_section",
    "contract",
    "lie_derivative",
    "rotation_family",
    "integrate_rotation",
    "pullback",
]


class WeylSection:
    """Weyl-algebra valued differential form on ``T^dim``.

    Parameters
    ----------
    terms : mapping
        ``{(k, m, alpha, J): coefficient}``.
    dim, K, D_max : int
        Torus dimension, nu truncation and Weyl-degree truncation.
    """

    __slots__ = ("terms", "dim", "K", "D_max")

    def __init__(self, terms: Mapping | None = None, dim: int = 2, K: int = 4, D_max: int = 10):
        self.dim = dim
        self.K = K
        self.D_max = D_max
        clean: dict = {}
        for key, c in (terms or {}).items():
            k, m, alpha, J = key
            m, alpha = tuple(m), tuple(alpha)
            sign, Js = _sort_sign(tuple(J))
            if not sign:
                continue
            if k > K or 2 * k + sum(alpha) > D_max:
                continue
            c = gq(c) if sign > 0 else -gq(c)
            key = (k, m, alpha, Js)
            v = clean[key] + c if key in clean else c
            clean[key] = v
        self.terms = {key: c for key, c in clean.items() if c}

    @classmethod
    def _raw(cls, terms: dict, dim: int, K: int, D_max: int) -> "WeylSection":
        s = object.__new__(cls)
        s.terms = {key: c for key, c in terms.items() if c}
        s.dim = dim
        s.K = K
        s.D_max = D_max
        return s

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dim=2, K=4, D_max=10) -> "WeylSection":
        return cls._raw({}, dim, K, D_max)

    @classmethod
    def from_fun(cls, F: TorusFun, alpha=None, J=(), D_max: int = 10) -> "WeylSection":
        """``F y^alpha dtheta^J`` (defaults to the plain function ``F``)."""
        alpha = tuple(alpha) if alpha is not None else (0,) * F.dim
        terms = {}
        for m, c in F.modes.items():
            for k, a in enumerate(c.c):
                if a:
                    terms[(k, m, alpha, tuple(J))] = a
        return cls(terms, F.dim, F.K, D_max)

    @classmethod
    def from_form(cls, beta: TorusForm, D_max: int = 10) -> "WeylSection":
        """Central (``y``-free) section carrying a scalar form."""
        out = cls.zero(beta.dim, beta.K, D_max)
        for J, f in beta.comps.items():
            out = out + cls.from_fun(f, None, J, D_max)
        return out

    @classmethod
    def y(cls, i: int, dim=2, K=4, D_max=10, coeff=1) -> "WeylSection":
        alpha = tuple(1 if j == i else 0 for j in range(dim))
        return cls({(0, (0,) * dim, alpha, ()): coeff}, dim, K, D_max)

    @classmethod
    def monomial(cls, alpha, J=(), m=None, k=0, coeff=1, dim=2, K=4, D_max=10) -> "WeylSection":
        m = tuple(m) if m is not None else (0,) * dim
        return cls({(k, m, tuple(alpha), tuple(J)): coeff}, dim, K, D_max)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "WeylSection"):
        if (self.dim, self.K, self.D_max) != (other.dim, other.K, other.D_max):
            raise ConfigurationError(
                f"sections differ in (dim, K, D_max): {(self.dim, self.K, self.D_max)} vs "
                f"{(other.dim, other.K, other.D_max)}")

    def __add__(self, other: "WeylSection") -> "WeylSection":
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return WeylSection._raw(out, self.dim, self.K, self.D_max)

    def __neg__(self):
        return WeylSection._raw({k: -c for k, c in self.terms.items()}, self.dim, self.K, self.D_max)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "WeylSection":
        """Multiply by a Gaussian rational or by a :class:`FormalScalar`."""
        if isinstance(s, FormalScalar):
            out: dict = {}
            for j, a in enumerate(s.c):
                if not a:
                    continue
                for (k, m, al, J), c in self.terms.items():
                    if k + j > self.K or 2 * (k + j) + sum(al) > self.D_max:
                        continue
                    key = (k + j, m, al, J)
                    v = c * a
                    out[key] = out[key] + v if key in out else v
            return WeylSection._raw(out, self.dim, self.K, self.D_max)
        s = gq(s)
        return WeylSection._raw({k: c * s for k, c in self.terms.items()}, self.dim, self.K, self.D_max)

    def __eq__(self, other):
        if not isinstance(other, WeylSection):
            return NotImplemented
        return (self.dim, self.K, self.D_max) == (other.dim, other.K, other.D_max) and \
            self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -----------------------------------------------------
    def filter(self, pred: Callable) -> "WeylSection":
        """Terms whose key ``(k, m, alpha, J)`` satisfies ``pred``."""
        return WeylSection._raw({key: c for key, c in self.terms.items() if pred(*key)},
                                self.dim, self.K, self.D_max)

    def degree_part(self, lo: int = 0, hi: int | None = None) -> "WeylSection":
        """Terms with ``lo <= 2k + |alpha| <= hi``."""
        hi = self.D_max if hi is None else hi
        return self.filter(lambda k, m, al, J: lo <= 2 * k + sum(al) <= hi)

    def truncate(self, deg: int) -> "WeylSection":
        return self.degree_part(0, deg)

    def form_part(self, q: int) -> "WeylSection":
        return self.filter(lambda k, m, al, J: len(J) == q)

    def y_free(self) -> "WeylSection":
        return self.filter(lambda k, m, al, J: not any(al))

    def min_degree(self) -> int | None:
        return min((2 * k + sum(al) for (k, m, al, J) in self.terms), default=None)

    def modes(self) -> set:
        return {m for (k, m, al, J) in self.terms}

    def sigma(self) -> TorusFun:
        """Symbol: the ``y``-free function part, as a :class:`TorusFun`."""
        zero = (0,) * self.dim
        acc: dict = {}
        for (k, m, al, J), c in self.terms.items():
            if J or al != zero:
                continue
            acc.setdefault(m, [ZERO] * (self.K + 1))[k] = c
        return TorusFun({m: FormalScalar(v, self.K) for m, v in acc.items()}, self.dim, self.K)

    def to_scalar_form(self, q: int) -> TorusForm:
        """The ``y``-free ``q``-form part as a scalar :class:`TorusForm`."""
        zero = (0,) * self.dim
        acc: dict = {}
        for (k, m, al, J), c in self.terms.items():
            if len(J) != q or al != zero:
                continue
            acc.setdefault(J, {}).setdefault(m, [ZERO] * (self.K + 1))[k] = c
        comps = {J: TorusFun({m: FormalScalar(v, self.K) for m, v in d.items()}, self.dim, self.K)
                 for J, d in acc.items()}
        return TorusForm(comps, q, self.dim, self.K)

    def with_truncation(self, K: int | None = None, D_max: int | None = None) -> "WeylSection":
        return WeylSection(self.terms, self.dim, self.K if K is None else K,
                           self.D_max if D_max is None else D_max)

    def to_json(self) -> str:
        """Debug dump keyed by ``(alpha, J, mode)``."""
        rows = []
        for (k, m, al, J), c in sorted(self.terms.items(), key=lambda t: (t[0][2], t[0][3], t[0][1], t[0][0])):
            rows.append({"alpha": list(al), "J": list(J), "m": list(m), "nu": k, **c.to_pairs()})
        return json.dumps({"dim": self.dim, "K": self.K, "D_max": self.D_max, "terms": rows})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, m, al, J), c in sorted(self.terms.items()):
            parts.append(f"{c!r}*nu^{k}*e{m}*y^{al}*dx{J}")
        return " + ".join(parts)


# ----------------------------------------------------------------------
# combinatorics
# ----------------------------------------------------------------------

def _sort_sign(idx: tuple):
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    lst = list(idx)
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    return sign, tuple(lst)


@lru_cache(maxsize=None)
def _wedge(J1: tuple, J2: tuple):
    return _sort_sign(J1 + J2)


@lru_cache(maxsize=None)
def _lambda_entries(dim: int) -> tuple:
    lam = lambda_matrix(dim)
    return tuple((i, j, lam[i][j]) for i in range(dim) for j in range(dim) if lam[i][j])


def _falling(a: int, b: int) -> int:
    out = 1
    for t in range(b):
        out *= a - t
    return out


@lru_cache(maxsize=None)
def _contractions(alpha: tuple, beta: tuple) -> tuple:
    """Expansion of ``exp(nu/2 Lambda^{ij} d_{y^i} d_{z^j}) y^alpha z^beta |_{z=y}``.

    Returns ``((c, gamma, coeff), ...)``: the ``nu^c`` term is
    ``coeff * y^gamma``.
    """
    dim = len(alpha)
    entries = _lambda_entries(dim)
    out: dict = {}

    def rec(e: int, mu: list, rho: list, c: int, coeff: mpq):
        if e == len(entries):
            gamma = tuple(alpha[i] - mu[i] + beta[i] - rho[i] for i in range(dim))
            val = coeff
            for i in range(dim):
                val *= _falling(alpha[i], mu[i]) * _falling(beta[i], rho[i])
            val = val / (2 ** c)
            key = (c, gamma)
            out[key] = out.get(key, mpq(0)) + val
            return
        i, j, lam = entries[e]
        nmax = min(alpha[i] - mu[i], beta[j] - rho[j])
        for n in range(nmax + 1):
            mu[i] += n
            rho[j] += n
            rec(e + 1, mu, rho, c + n, coeff * mpq(lam ** n, factorial(n)))
            mu[i] -= n
            rho[j] -= n

    rec(0, [0] * dim, [0] * dim, 0, mpq(1))
    return tuple((c, g, GaussQ(v)) for (c, g), v in sorted(out.items()) if v)


@lru_cache(maxsize=None)
def _odd_contractions(alpha: tuple, beta: tuple) -> tuple:
    """Terms of the scaled commutator: ``2 * (odd-c terms)`` with nu-power ``c - 1``."""
    return tuple((c - 1, g, v * 2) for c, g, v in _contractions(alpha, beta) if c % 2)


def _madd(m, n):
    return tuple(a + b for a, b in zip(m, n))


# ----------------------------------------------------------------------
# fibrewise algebra
# ----------------------------------------------------------------------

def circ(a: WeylSection, b: WeylSection) -> WeylSection:
    """Fibrewise Moyal product, wedge on forms."""
    a._check(b)
    K, D = a.K, a.D_max
    out: dict = {}
    bt = list(b.terms.items())
    for (k1, m1, al, J1), c1 in a.terms.items():
        d1 = 2 * k1 + sum(al)
        for (k2, m2, be, J2), c2 in bt:
            if d1 + 2 * k2 + sum(be) > D or k1 + k2 > K:
                continue
            sign, J = _wedge(J1, J2)
            if not sign:
                continue
            c12 = c1 * c2
            if sign < 0:
                c12 = -c12
            m = _madd(m1, m2)
            for c, g, v in _contractions(al, be):
                k = k1 + k2 + c
                if k > K:
                    break
                key = (k, m, g, J)
                val = c12 * v
                out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, K, D)


def scaled_commutator(a: WeylSection, b: WeylSection) -> WeylSection:
    """``(1/nu)[a, b]`` for the graded commutator, from odd contraction orders only."""
    a._check(b)
    K, D = a.K, a.D_max
    out: dict = {}
    bt = list(b.terms.items())
    for (k1, m1, al, J1), c1 in a.terms.items():
        d1 = 2 * k1 + sum(al)
        if not any(al):
            continue
        for (k2, m2, be, J2), c2 in bt:
            if d1 + 2 * k2 + sum(be) - 2 > D or k1 + k2 > K:
                continue
            if not any(be):
                continue
            sign, J = _wedge(J1, J2)
            if not sign:
                continue
            c12 = c1 * c2
            if sign < 0:
                c12 = -c12
            m = _madd(m1, m2)
            for p, g, v in _odd_contractions(al, be):
                k = k1 + k2 + p
                if k > K:
                    break
                key = (k, m, g, J)
                val = c12 * v
                out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, K, D)


def graded_commutator(a: WeylSection, b: WeylSection) -> WeylSection:
    """``[a, b] = a o b - (-1)^{q1 q2} b o a`` (equal to ``nu`` times the scaled one)."""
    return scaled_commutator(a, b).scale(FormalScalar.nu(a.K))


def delta(a: WeylSection) -> WeylSection:
    """``delta a = dtheta^k ^ d a / d y^k``."""
    out: dict = {}
    for (k, m, al, J), c in a.terms.items():
        for i, ai in enumerate(al):
            if not ai or i in J:
                continue
            sign, Jn = _wedge((i,), J)
            na = al[:i] + (ai - 1,) + al[i + 1:]
            key = (k, m, na, Jn)
            val = c * ai if sign > 0 else -(c * ai)
            out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, a.K, a.D_max)


def delta_inv(a: WeylSection) -> WeylSection:
    """``delta^{-1} a_pq = y^k i(d/dtheta^k) a_pq / (p + q)``; zero on ``a_00``."""
    out: dict = {}
    for (k, m, al, J), c in a.terms.items():
        p, q = sum(al), len(J)
        if p + q == 0 or q == 0:
            continue
        if 2 * k + p + 1 > a.D_max:
            continue
        for s, i in enumerate(J):
            Jn = J[:s] + J[s + 1:]
            na = al[:i] + (al[i] + 1,) + al[i + 1:]
            val = c / (p + q)
            if s % 2:
                val = -val
            key = (k, m, na, Jn)
            out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, a.K, a.D_max)


def exterior_d(a: WeylSection) -> WeylSection:
    """Exterior derivative of the coefficient functions (``y`` held fixed)."""
    out: dict = {}
    for (k, m, al, J), c in a.terms.items():
        for i, mi in enumerate(m):
            if not mi or i in J:
                continue
            sign, Jn = _wedge((i,), J)
            val = c * GaussQ(0, mi)
            if sign < 0:
                val = -val
            key = (k, m, al, Jn)
            out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, a.K, a.D_max)


def contract(X: Iterable, a: WeylSection) -> WeylSection:
    """Interior product ``i(X)`` with a constant field ``X`` (Gaussian rationals)."""
    X = [gq(x) for x in X]
    out: dict = {}
    for (k, m, al, J), c in a.terms.items():
        for s, i in enumerate(J):
            if not X[i]:
                continue
            val = c * X[i]
            if s % 2:
                val = -val
            key = (k, m, al, J[:s] + J[s + 1:])
            out[key] = out[key] + val if key in out else val
    return WeylSection._raw(out, a.dim, a.K, a.D_max)


def lie_derivative(X: Iterable, a: WeylSection) -> WeylSection:
    """``X^k d/dtheta^k`` on coefficients, for a constant field ``X``."""
    X = [gq(x) for x in X]
    out = {}
    for (k, m, al, J), c in a.terms.items():
        f = ZERO
        for xi, mi in zip(X, m):
            if mi:
                f = f + xi * GaussQ(0, mi)
        if f:
            out[(k, m, al, J)] = c * f
    return WeylSection._raw(out, a.dim, a.K, a.D_max)


# ----------------------------------------------------------------------
# connections
# ----------------------------------------------------------------------

class SymplecticConnection:
    """Torsion-free symplectic connection given by its Christoffel symbols.

    ``christoffel`` maps ``(k, i, j)`` to ``Gamma^k_{ij}`` (a number or a
    :class:`TorusFun`).  Only one of ``(k, i, j)`` / ``(k, j, i)`` needs to
    be given.  The lowered symbols ``omega_{lk} Gamma^k_{ij}`` must be totally
    symmetric, which is checked.
    """

    def __init__(self, christoffel: Mapping | None = None, dim: int = 2):
        self.dim = dim
        raw: dict = {}
        for (k, i, j), v in (christoffel or {}).items():
            for key in {(k, i, j), (k, j, i)}:
                if key in raw and raw[key] != v:
                    raise DomainError("Christoffel symbols are not symmetric in the lower pair")
                raw[key] = v
        self.christoffel = raw
        self._check_symplectic()

    @classmethod
    def flat(cls, dim: int = 2) -> "SymplecticConnection":
        return cls({}, dim)

    @classmethod
    def from_lowered(cls, lowered: Mapping, dim: int = 2) -> "SymplecticConnection":
        """Build from totally symmetric ``Gamma_{lij} = omega_{lk} Gamma^k_{ij}``.

        ``lowered`` maps index triples to values; permutations are filled in.
        """
        import itertools
        low: dict = {}
        for key, v in lowered.items():
            for p in set(itertools.permutations(key)):
                low[p] = v
        lam = lambda_matrix(dim)
        chris = {}
        for k, i, j in itertools.product(range(dim), repeat=3):
            acc = 0
            for l in range(dim):
                if lam[k][l] and (l, i, j) in low:
                    acc = low[(l, i, j)] * lam[k][l] + acc
            if _nonzero(acc):
                chris[(k, i, j)] = acc
        return cls(chris, dim)

    def is_flat_coordinates(self) -> bool:
        return not any(_nonzero(v) for v in self.christoffel.values())

    def is_constant(self) -> bool:
        return all(not isinstance(v, TorusFun) or set(v.modes) <= {(0,) * self.dim}
                   for v in self.christoffel.values())

    def gamma(self, k, i, j):
        return self.christoffel.get((k, i, j), 0)

    def lowered(self, l, i, j):
        w = omega_matrix(self.dim)
        acc = 0
        for k in range(self.dim):
            if w[l][k]:
                g = self.gamma(k, i, j)
                if _nonzero(g):
                    acc = acc + g * w[l][k] if not isinstance(acc, int) or acc else g * w[l][k]
        return acc

    def _check_symplectic(self):
        import itertools
        for l, i, j in itertools.product(range(self.dim), repeat=3):
            a = self.lowered(l, i, j)
            for perm in ((i, l, j), (j, i, l)):
                b = self.lowered(*perm)
                if _diff_nonzero(a, b):
                    raise DomainError("connection is not symplectic: omega_{lk}Gamma^k_{ij} "
                                      "is not totally symmetric")

    def coefficient_fun(self, value, dim, K) -> TorusFun:
        if isinstance(value, TorusFun):
            return value.with_order(K)
        return TorusFun.const(value, dim, K)

    def covariant_derivative(self, X: Iterable) -> list:
        """``(nabla_i X)^k`` for a constant field ``X``, as numbers ``[i][k]``."""
        X = [gq(x) for x in X]
        out = []
        for i in range(self.dim):
            row = []
            for k in range(self.dim):
                acc = ZERO
                for j in range(self.dim):
                    g = self.gamma(k, i, j)
                    if _nonzero(g):
                        if isinstance(g, TorusFun):
                            raise DomainError("covariant_derivative needs constant Christoffel symbols")
                        acc = acc + gq(g) * X[j]
                row.append(acc)
            out.append(row)
        return out


def _nonzero(v) -> bool:
    return bool(v) if not isinstance(v, TorusFun) else bool(v.modes)


def _diff_nonzero(a, b) -> bool:
    if isinstance(a, TorusFun) or isinstance(b, TorusFun):
        if isinstance(a, int) and a == 0:
            return _nonzero(b)
        if isinstance(b, int) and b == 0:
            return _nonzero(a)
        return bool((a - b).modes)
    return gq(a) != gq(b)


def gamma_bar(conn: SymplecticConnection, K: int, D_max: int) -> WeylSection:
    """``Gamma_bar = 1/2 omega_{lk} Gamma^k_{ij} y^l y^j dtheta^i``."""
    dim = conn.dim
    out = WeylSection.zero(dim, K, D_max)
    for l in range(dim):
        for i in range(dim):
            for j in range(dim):
                g = conn.lowered(l, i, j)
                if not _nonzero(g):
                    continue
                f = conn.coefficient_fun(g, dim, K).scale(mpq(1, 2))
                alpha = [0] * dim
                alpha[l] += 1
                alpha[j] += 1
                out = out + WeylSection.from_fun(f, alpha, (i,), D_max)
    return out


def connection(a: WeylSection, conn: SymplecticConnection, gbar: WeylSection | None = None) -> WeylSection:
    """``partial a = d a + (1/nu)[Gamma_bar, a]`` extended by the Leibniz rule."""
    out = exterior_d(a)
    if conn.is_flat_coordinates():
        return out
    if gbar is None:
        gbar = gamma_bar(conn, a.K, a.D_max)
    return out + scaled_commutator(gbar, a)


def curvature_section(conn: SymplecticConnection, K: int, D_max: int) -> WeylSection:
    """``R_bar`` with ``partial^2 a = (1/nu)[R_bar, a]``: ``d Gamma_bar + (1/2nu)[Gamma_bar, Gamma_bar]``."""
    if conn.is_flat_coordinates():
        return WeylSection.zero(conn.dim, K, D_max)
    g = gamma_bar(conn, K, D_max)
    return exterior_d(g) + scaled_commutator(g, g).scale(mpq(1, 2))


# ----------------------------------------------------------------------
# translations of the torus
# ----------------------------------------------------------------------

def _check_loop(v) -> tuple:
    out = []
    for x in v:
        if isinstance(x, float) or int(x) != x:
            raise DomainError(f"rotation direction {tuple(v)} is not integral: the path is not a loop")
        out.append(int(x))
    return tuple(out)


def rotation_family(v: Iterable, a: WeylSection) -> dict:
    """``t -> phi_{t*} a`` for ``phi_t(theta) = theta + 2 pi t v``.

    Returned as ``{frequency: section}``: the family is
    ``sum_f exp(2 pi i f t) section_f`` with ``f = m . v`` (translations act
    trivially on ``y`` and on ``dtheta``).
    """
    v = _check_loop(v)
    fam: dict = {}
    for key, c in a.terms.items():
        f = sum(mi * vi for mi, vi in zip(key[1], v))
        fam.setdefault(f, {})[key] = c
    return {f: WeylSection._raw(t, a.dim, a.K, a.D_max) for f, t in fam.items()}


def integrate_rotation(v: Iterable, a: WeylSection) -> WeylSection:
    """``int_0^1 phi_{t*} a dt``: only frequency-0 terms survive the full period."""
    fam = rotation_family(v, a)
    return fam.get(0, WeylSection.zero(a.dim, a.K, a.D_max))


def pullback(v: Iterable, a: WeylSection) -> dict:
    """Alias of :func:`rotation_family` (the pull-back along a rotation loop)."""
    return rotation_family(v, a)
