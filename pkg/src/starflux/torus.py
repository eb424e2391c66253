"""Fourier calculus on the standard symplectic torus ``T^{2n}``.

Coordinates are ``theta in [0, 2 pi)^{2n}`` and the basis functions are
``e_m = exp(i m . theta)``.  The symplectic form is
``omega = sum_i dtheta_{2i-1} ^ dtheta_{2i}`` and ``Lambda = omega^{-1}``,
so with 0-based indices ``omega[0][1] = 1`` and ``Lambda[0][1] = -1``.

Sign conventions used throughout the engine:

* ``i(X_F) omega = dF`` defines the Hamiltonian field, giving
  ``X_F^a = Lambda^{ba} d_b F``;
* ``{F, G} = Lambda^{ij} d_i F d_j G = -omega(X_F, X_G)``, so that
  ``{e_(1,0), e_(0,1)} = e_(1,1)``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ConfigurationError, DomainError
from .formal import ZERO, FormalScalar, GaussQ, I, gq

__all__ = [
    "omega_matrix",
    "lambda_matrix",
    "TorusFun",
    "TorusForm",
    "TorusField",
    "H1Class",
    "poisson",
    "ham_field",
    "dfun",
    "h1_class",
    "primitive",
    "symplectic_form",
]


def omega_matrix(dim: int) -> tuple:
    """Integer matrix of the standard symplectic form."""
    if dim % 2:
        raise ConfigurationError("torus dimension must be even")
    w = [[0] * dim for _ in range(dim)]
    for b in range(0, dim, 2):
        w[b][b + 1] = 1
        w[b + 1][b] = -1
    return tuple(tuple(row) for row in w)


def lambda_matrix(dim: int) -> tuple:
    """Inverse of :func:`omega_matrix` (the Poisson tensor)."""
    w = omega_matrix(dim)
    return tuple(tuple(-w[i][j] for j in range(dim)) for i in range(dim))


def _fs(x, K: int) -> FormalScalar:
    if isinstance(x, FormalScalar):
        if x.K != K:
            raise ConfigurationError(f"truncation orders differ: K={x.K} vs K={K}")
        return x
    return FormalScalar([x], K)


class TorusFun:
    """Finite Fourier polynomial with :class:`FormalScalar` coefficients.

    ``modes`` maps integer mode vectors to coefficients; zero coefficients
    are dropped on construction.
    """

    __slots__ = ("modes", "dim", "K")

    def __init__(self, modes: Mapping | None = None, dim: int = 2, K: int = 4):
        self.dim = dim
        self.K = K
        clean = {}
        for m, c in (modes or {}).items():
            m = tuple(int(x) for x in m)
            if len(m) != dim:
                raise ConfigurationError(f"mode {m} does not have dimension {dim}")
            c = _fs(c, K)
            if c:
                clean[m] = clean[m] + c if m in clean else c
        self.modes = clean

    @classmethod
    def _raw(cls, modes: dict, dim: int, K: int) -> "TorusFun":
        f = object.__new__(cls)
        f.modes = {m: c for m, c in modes.items() if c}
        f.dim = dim
        f.K = K
        return f

    @classmethod
    def zero(cls, dim: int = 2, K: int = 4) -> "TorusFun":
        return cls._raw({}, dim, K)

    @classmethod
    def const(cls, c, dim: int = 2, K: int = 4) -> "TorusFun":
        return cls({(0,) * dim: c}, dim, K)

    @classmethod
    def mode(cls, m: Iterable[int], coeff=1, K: int = 4) -> "TorusFun":
        m = tuple(m)
        return cls({m: coeff}, len(m), K)

    def _check(self, other: "TorusFun"):
        if other.dim != self.dim:
            raise ConfigurationError("torus dimensions differ")
        if other.K != self.K:
            raise ConfigurationError(f"truncation orders differ: K={self.K} vs K={other.K}")

    def __add__(self, other: "TorusFun") -> "TorusFun":
        if not isinstance(other, TorusFun):
            other = TorusFun.const(other, self.dim, self.K)
        self._check(other)
        out = dict(self.modes)
        for m, c in other.modes.items():
            out[m] = out[m] + c if m in out else c
        return TorusFun._raw(out, self.dim, self.K)

    __radd__ = __add__

    def __neg__(self):
        return TorusFun._raw({m: -c for m, c in self.modes.items()}, self.dim, self.K)

    def __sub__(self, other):
        if not isinstance(other, TorusFun):
            other = TorusFun.const(other, self.dim, self.K)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "TorusFun":
        if not isinstance(s, FormalScalar):
            s = gq(s)
        else:
            _fs(s, self.K)
        return TorusFun._raw({m: c * s for m, c in self.modes.items()}, self.dim, self.K)

    def __mul__(self, other):
        if isinstance(other, TorusFun):
            self._check(other)
            out: dict = {}
            for m, a in self.modes.items():
                for n, b in other.modes.items():
                    p = tuple(x + y for x, y in zip(m, n))
                    ab = a * b
                    out[p] = out[p] + ab if p in out else ab
            return TorusFun._raw(out, self.dim, self.K)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TorusFun):
            return NotImplemented
        return self.dim == other.dim and self.K == other.K and self.modes == other.modes

    def __bool__(self):
        return bool(self.modes)

    def __hash__(self):
        return hash((frozenset(self.modes.items()), self.dim, self.K))

    def coeff(self, m) -> FormalScalar:
        return self.modes.get(tuple(m), FormalScalar.zero(self.K))

    def deriv(self, i: int) -> "TorusFun":
        """Partial derivative along ``theta_i``: ``e_m -> i m_i e_m``."""
        return TorusFun._raw({m: c * (I * m[i]) for m, c in self.modes.items() if m[i]},
                             self.dim, self.K)

    def deriv_multi(self, mu: Iterable[int]) -> "TorusFun":
        mu = tuple(mu)
        out = {}
        for m, c in self.modes.items():
            f = GaussQ(1)
            for mi, k in zip(m, mu):
                for _ in range(k):
                    f = f * (I * mi)
            if f:
                out[m] = c * f
        return TorusFun._raw(out, self.dim, self.K)

    def mode0(self) -> FormalScalar:
        return self.coeff((0,) * self.dim)

    def without_mode0(self) -> "TorusFun":
        z = (0,) * self.dim
        return TorusFun._raw({m: c for m, c in self.modes.items() if m != z}, self.dim, self.K)

    def conjugate(self) -> "TorusFun":
        """Complex conjugate function: ``coeff(-m) <- conj(coeff(m))``."""
        return TorusFun._raw({tuple(-x for x in m): c.conjugate() for m, c in self.modes.items()},
                             self.dim, self.K)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def times_mode(self, n: Iterable[int]) -> "TorusFun":
        n = tuple(n)
        return TorusFun._raw({tuple(a + b for a, b in zip(m, n)): c for m, c in self.modes.items()},
                             self.dim, self.K)

    def shift_nu(self, j: int) -> "TorusFun":
        """Multiply by ``nu**j`` (``j < 0`` divides, raising if not divisible)."""
        return TorusFun._raw({m: c.shift(j) for m, c in self.modes.items()}, self.dim, self.K)

    def nu_coeff(self, r: int) -> "TorusFun":
        """The ``nu**r`` coefficient as a function (placed at nu-order 0)."""
        return TorusFun._raw({m: FormalScalar([c[r]], self.K) for m, c in self.modes.items()},
                             self.dim, self.K)

    def with_order(self, K: int) -> "TorusFun":
        return TorusFun._raw({m: c.with_order(K) for m, c in self.modes.items()}, self.dim, K)

    def max_mode(self) -> int:
        return max((max(abs(x) for x in m) for m in self.modes), default=0)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "K": self.K,
            "modes": [
                {
                    "m": list(m),
                    "re": [[int(a.re.numerator), int(a.re.denominator)] for a in c.c],
                    "im": [[int(a.im.numerator), int(a.im.denominator)] for a in c.c],
                }
                for m, c in sorted(self.modes.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "TorusFun":
        if isinstance(data, str):
            data = json.loads(data)
        dim, K = int(data["dim"]), int(data["K"])
        modes = {}
        for entry in data["modes"]:
            re = entry.get("re", [])
            im = entry.get("im", [])
            n = max(len(re), len(im))
            coeffs = []
            for k in range(n):
                r = re[k] if k < len(re) else [0, 1]
                i_ = im[k] if k < len(im) else [0, 1]
                coeffs.append(GaussQ.from_pairs({"re": r, "im": i_}))
            modes[tuple(entry["m"])] = FormalScalar(coeffs, K)
        return cls(modes, dim, K)

    def __repr__(self):
        if not self.modes:
            return "0"
        return " + ".join(f"[{c!r}]e{m}" for m, c in sorted(self.modes.items()))


def _sort_sign(idx: tuple) -> tuple[int, tuple] | tuple[int, None]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats)."""
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


class TorusForm:
    """Differential ``degree``-form with :class:`TorusFun` components.

    ``comps`` maps strictly increasing index tuples to coefficients; unsorted
    keys are accepted and reordered with the permutation sign.
    """

    __slots__ = ("comps", "degree", "dim", "K")

    def __init__(self, comps: Mapping | None = None, degree: int = 1, dim: int = 2, K: int = 4):
        self.degree = degree
        self.dim = dim
        self.K = K
        clean: dict = {}
        for J, f in (comps or {}).items():
            J = tuple(J)
            if len(J) != degree or any(not 0 <= j < dim for j in J):
                raise ConfigurationError(f"bad form index {J} for degree {degree}, dim {dim}")
            sign, Js = _sort_sign(J)
            if not sign:
                continue
            if not isinstance(f, TorusFun):
                f = TorusFun.const(f, dim, K)
            if f.dim != dim or f.K != K:
                raise ConfigurationError("form component has wrong dimension or order")
            f = f if sign > 0 else -f
            clean[Js] = clean[Js] + f if Js in clean else f
        self.comps = {J: f for J, f in clean.items() if f}

    @classmethod
    def zero(cls, degree: int, dim: int = 2, K: int = 4) -> "TorusForm":
        return cls({}, degree, dim, K)

    def component(self, J) -> TorusFun:
        sign, Js = _sort_sign(tuple(J))
        if not sign:
            return TorusFun.zero(self.dim, self.K)
        f = self.comps.get(Js, TorusFun.zero(self.dim, self.K))
        return f if sign > 0 else -f

    def _check(self, other):
        if (other.degree, other.dim, other.K) != (self.degree, self.dim, self.K):
            raise ConfigurationError("forms of different degree, dimension or order")

    def __add__(self, other: "TorusForm") -> "TorusForm":
        self._check(other)
        out = dict(self.comps)
        for J, f in other.comps.items():
            out[J] = out[J] + f if J in out else f
        return TorusForm(out, self.degree, self.dim, self.K)

    def __neg__(self):
        return TorusForm({J: -f for J, f in self.comps.items()}, self.degree, self.dim, self.K)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "TorusForm":
        return TorusForm({J: f.scale(s) for J, f in self.comps.items()}, self.degree, self.dim, self.K)

    def __eq__(self, other):
        if not isinstance(other, TorusForm):
            return NotImplemented
        return (self.degree, self.dim, self.K) == (other.degree, other.dim, other.K) and \
            self.comps == other.comps

    def __bool__(self):
        return bool(self.comps)

    def d(self) -> "TorusForm":
        """Exterior derivative."""
        out: dict = {}
        for J, f in self.comps.items():
            for k in range(self.dim):
                if k in J:
                    continue
                df = f.deriv(k)
                if not df:
                    continue
                key = (k,) + J
                out[key] = out[key] + df if key in out else df
        return TorusForm(out, self.degree + 1, self.dim, self.K)

    def is_closed(self) -> bool:
        return not self.d()

    def wedge(self, other: "TorusForm") -> "TorusForm":
        out: dict = {}
        for J1, f in self.comps.items():
            for J2, g in other.comps.items():
                key = J1 + J2
                fg = f * g
                out[key] = out[key] + fg if key in out else fg
        return TorusForm(out, self.degree + other.degree, self.dim, self.K)

    def contract(self, X: "TorusField") -> "TorusForm":
        """Interior product ``i(X)``."""
        if self.degree == 0:
            raise DomainError("cannot contract a 0-form")
        out: dict = {}
        for J, f in self.comps.items():
            for pos, j in enumerate(J):
                Xj = X.comps[j]
                if not Xj:
                    continue
                key = J[:pos] + J[pos + 1:]
                val = Xj * f
                if pos % 2:
                    val = -val
                out[key] = out[key] + val if key in out else val
        return TorusForm(out, self.degree - 1, self.dim, self.K)

    def harmonic_part(self) -> "TorusForm":
        """Constant-coefficient part (mode 0 of every component)."""
        z = (0,) * self.dim
        return TorusForm({J: TorusFun({z: f.mode0()}, self.dim, self.K) for J, f in self.comps.items()},
                         self.degree, self.dim, self.K)

    def map_components(self, fn) -> "TorusForm":
        return TorusForm({J: fn(f) for J, f in self.comps.items()}, self.degree, self.dim, self.K)

    def with_order(self, K: int) -> "TorusForm":
        return TorusForm({J: f.with_order(K) for J, f in self.comps.items()}, self.degree, self.dim, K)

    @classmethod
    def constant(cls, coeffs: Mapping, degree: int = 1, dim: int = 2, K: int = 4) -> "TorusForm":
        """Form with constant components ``{J: FormalScalar-or-number}``."""
        return cls({J: TorusFun.const(c, dim, K) for J, c in coeffs.items()}, degree, dim, K)

    @classmethod
    def one_form(cls, comps: Iterable, K: int = 4) -> "TorusForm":
        """1-form from a list of per-coordinate coefficients (TorusFun or scalar)."""
        comps = list(comps)
        dim = len(comps)
        return cls({(j,): c for j, c in enumerate(comps)}, 1, dim, K)

    def __repr__(self):
        return f"TorusForm(deg={self.degree}, {self.comps!r})"


class TorusField:
    """Vector field ``sum X^i d/dtheta_i`` with :class:`TorusFun` components."""

    __slots__ = ("comps", "dim", "K")

    def __init__(self, comps: Iterable, dim: int | None = None, K: int | None = None):
        comps = list(comps)
        self.dim = dim if dim is not None else len(comps)
        if K is None:
            K = next((c.K for c in comps if isinstance(c, TorusFun)), 4)
        self.K = K
        self.comps = tuple(c if isinstance(c, TorusFun) else TorusFun.const(c, self.dim, K)
                           for c in comps)

    @classmethod
    def constant(cls, vec: Iterable, K: int = 4) -> "TorusField":
        vec = list(vec)
        return cls([TorusFun.const(v, len(vec), K) for v in vec], len(vec), K)

    def __add__(self, other):
        return TorusField([a + b for a, b in zip(self.comps, other.comps)], self.dim, self.K)

    def __neg__(self):
        return TorusField([-a for a in self.comps], self.dim, self.K)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, TorusField) and self.comps == other.comps

    def is_constant(self) -> bool:
        z = (0,) * self.dim
        return all(set(c.modes) <= {z} for c in self.comps)

    def constant_vector(self) -> tuple:
        """Mode-0 components as FormalScalars (for translation fields)."""
        return tuple(c.mode0() for c in self.comps)

    def apply(self, F: TorusFun) -> TorusFun:
        """Lie derivative of a function: ``X^i d_i F``."""
        out = TorusFun.zero(self.dim, self.K)
        for i, c in enumerate(self.comps):
            if c:
                out = out + c * F.deriv(i)
        return out

    def __repr__(self):
        return f"TorusField({list(self.comps)!r})"


@dataclass(frozen=True)
class H1Class:
    """First de Rham class on ``T^{2n}``: the constant coefficients of ``dtheta_i``."""

    periods: tuple

    @classmethod
    def zero(cls, dim: int, K: int) -> "H1Class":
        return cls(tuple(FormalScalar.zero(K) for _ in range(dim)))

    @classmethod
    def of(cls, values: Iterable, K: int) -> "H1Class":
        return cls(tuple(_fs(v, K) for v in values))

    @property
    def dim(self) -> int:
        return len(self.periods)

    def __add__(self, other: "H1Class") -> "H1Class":
        return H1Class(tuple(a + b for a, b in zip(self.periods, other.periods)))

    def __neg__(self):
        return H1Class(tuple(-a for a in self.periods))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "H1Class":
        return H1Class(tuple(a * s for a in self.periods))

    def truncate(self, order: int) -> "H1Class":
        """Keep coefficients up to ``nu**order`` (same K)."""
        return H1Class(tuple(FormalScalar(p.c[: order + 1], p.K) for p in self.periods))

    def with_order(self, K: int) -> "H1Class":
        return H1Class(tuple(p.with_order(K) for p in self.periods))

    def is_zero(self) -> bool:
        return not any(self.periods)

    def as_form(self) -> TorusForm:
        K = self.periods[0].K
        return TorusForm.constant({(j,): p for j, p in enumerate(self.periods)}, 1, self.dim, K)

    def to_json(self) -> list:
        return [p.to_json() for p in self.periods]

    def __repr__(self):
        return f"H1Class({', '.join(repr(p) for p in self.periods)})"


def symplectic_form(dim: int = 2, K: int = 4) -> TorusForm:
    w = omega_matrix(dim)
    return TorusForm.constant({(i, j): w[i][j] for i in range(dim) for j in range(i + 1, dim) if w[i][j]},
                              2, dim, K)


def poisson(F: TorusFun, G: TorusFun) -> TorusFun:
    """``{F, G} = Lambda^{ij} d_i F d_j G``."""
    F._check(G)
    lam = lambda_matrix(F.dim)
    out = TorusFun.zero(F.dim, F.K)
    for i, j in itertools.product(range(F.dim), repeat=2):
        if lam[i][j]:
            out = out + (F.deriv(i) * G.deriv(j)).scale(lam[i][j])
    return out


def dfun(F: TorusFun) -> TorusForm:
    """Exterior derivative of a function."""
    return TorusForm({(i,): F.deriv(i) for i in range(F.dim)}, 1, F.dim, F.K)


def ham_field(F: TorusFun) -> TorusField:
    """The field ``X_F`` with ``i(X_F) omega = dF``."""
    return field_from_form(dfun(F))


def field_from_form(beta: TorusForm) -> TorusField:
    """The field ``X`` with ``i(X) omega = beta`` (``X^a = Lambda^{ba} beta_b``)."""
    if beta.degree != 1:
        raise DomainError("expected a 1-form")
    lam = lambda_matrix(beta.dim)
    comps = []
    for a in range(beta.dim):
        c = TorusFun.zero(beta.dim, beta.K)
        for b in range(beta.dim):
            if lam[b][a]:
                c = c + beta.component((b,)).scale(lam[b][a])
        comps.append(c)
    return TorusField(comps, beta.dim, beta.K)


def form_from_field(X: TorusField) -> TorusForm:
    """``i(X) omega``."""
    return symplectic_form(X.dim, X.K).contract(X)


def h1_class(beta: TorusForm) -> H1Class:
    """De Rham class of a closed 1-form."""
    if beta.degree != 1:
        raise DomainError("h1_class expects a 1-form")
    if not beta.is_closed():
        raise DomainError("1-form is not closed")
    return H1Class(tuple(beta.component((j,)).mode0() for j in range(beta.dim)))


def primitive(beta: TorusForm) -> TorusFun:
    """``F`` with ``dF = beta`` and zero mean; raises if ``beta`` is not exact."""
    cls = h1_class(beta)
    if not cls.is_zero():
        raise DomainError("not exact: 1-form has nonzero cohomology class")
    out: dict = {}
    for j in range(beta.dim):
        for m, c in beta.component((j,)).modes.items():
            if m in out or not m[j]:
                continue
            out[m] = c / (I * m[j])
    F = TorusFun(out, beta.dim, beta.K)
    if dfun(F) != beta:
        raise DomainError("1-form is not closed")
    return F
