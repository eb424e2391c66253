"""Exact ground ring: Gaussian rationals, truncated series in nu, and the time ring.

Everything here is exact.  ``GaussQ`` is a complex number with rational real
and imaginary parts, ``FormalScalar`` is a power series in the formal
parameter nu truncated at a fixed order ``K``, and ``TimeFun`` is the small
ring of functions of ``t`` on ``[0, 1]`` whose integrals stay rational.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import ConfigurationError, DomainError, RepresentationError

__all__ = [
    "GaussQ",
    "FormalScalar",
    "TimeFun",
    "gq",
    "series_mul",
    "series_exp",
    "time_integrate",
]

_MPQ_TYPE = type(mpq(0))


def _q(x) -> mpq:
    if isinstance(x, _MPQ_TYPE):
        return x
    if isinstance(x, float):
        raise RepresentationError("floating point values are not allowed in exact arithmetic")
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class GaussQ:
    """A Gaussian rational ``re + i*im`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussQ":
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    def __add__(self, other):
        if not isinstance(other, GaussQ):
            other = gq(other)
        return GaussQ._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussQ):
            other = gq(other)
        return GaussQ._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return gq(other) - self

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussQ):
            if isinstance(other, (int, Rational, _MPQ_TYPE)):
                o = _q(other)
                return GaussQ._raw(self.re * o, self.im * o)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussQ._raw(a * c, b)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussQ):
            other = gq(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussQ._raw(other.re / n, -other.im / n)

    def __rtruediv__(self, other):
        return gq(other) / self

    def conjugate(self) -> "GaussQ":
        return GaussQ._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussQ):
            try:
                other = gq(other)
            except (TypeError, RepresentationError):
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def to_pairs(self) -> dict:
        """``{"re": [num, den], "im": [num, den]}`` for JSON output."""
        return {
            "re": [int(self.re.numerator), int(self.re.denominator)],
            "im": [int(self.im.numerator), int(self.im.denominator)],
        }

    @classmethod
    def from_pairs(cls, d: Mapping) -> "GaussQ":
        re = d.get("re", [0, 1])
        im = d.get("im", [0, 1])
        return cls(mpq(int(re[0]), int(re[1])), mpq(int(im[0]), int(im[1])))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*I"
        return f"({self.re}{'+' if self.im > 0 else ''}{self.im}*I)"


ZERO = GaussQ._raw(mpq(0), mpq(0))
ONE = GaussQ._raw(mpq(1), mpq(0))
I = GaussQ._raw(mpq(0), mpq(1))


def gq(x) -> GaussQ:
    """Coerce ints, Fractions, mpq, complex-with-integer-parts or GaussQ."""
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise RepresentationError("only integral complex literals are accepted")
        return GaussQ(int(x.real), int(x.imag))
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return GaussQ(x[0], x[1])
    return GaussQ._raw(_q(x), mpq(0))


class FormalScalar:
    """Power series ``sum_k c_k nu^k`` truncated at ``nu^K``.

    Parameters
    ----------
    coeffs : iterable
        Coefficients by nu-power; anything accepted by :func:`gq`.  Entries
        beyond ``K`` are dropped, missing entries are zero.
    K : int
        Truncation order.
    """

    __slots__ = ("c", "K")

    def __init__(self, coeffs: Iterable = (), K: int = 4):
        c = [gq(x) for x in coeffs][: K + 1]
        c.extend([ZERO] * (K + 1 - len(c)))
        self.c = tuple(c)
        self.K = K

    @classmethod
    def _raw(cls, c: tuple, K: int) -> "FormalScalar":
        s = object.__new__(cls)
        s.c = c
        s.K = K
        return s

    @classmethod
    def const(cls, x, K: int) -> "FormalScalar":
        return cls([x], K)

    @classmethod
    def zero(cls, K: int) -> "FormalScalar":
        return cls._raw((ZERO,) * (K + 1), K)

    @classmethod
    def one(cls, K: int) -> "FormalScalar":
        return cls([1], K)

    @classmethod
    def nu(cls, K: int, power: int = 1) -> "FormalScalar":
        return cls([0] * power + [1], K)

    def _check(self, other: "FormalScalar"):
        if other.K != self.K:
            raise ConfigurationError(f"truncation orders differ: K={self.K} vs K={other.K}")

    def _coerce(self, other) -> "FormalScalar":
        if isinstance(other, FormalScalar):
            self._check(other)
            return other
        return FormalScalar([other], self.K)

    def __add__(self, other):
        o = self._coerce(other)
        return FormalScalar._raw(tuple(a + b for a, b in zip(self.c, o.c)), self.K)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FormalScalar._raw(tuple(a - b for a, b in zip(self.c, o.c)), self.K)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FormalScalar._raw(tuple(-a for a in self.c), self.K)

    def __mul__(self, other):
        if isinstance(other, FormalScalar):
            return series_mul(self, other)
        if isinstance(other, (GaussQ, int, Rational, _MPQ_TYPE)):
            g = gq(other)
            return FormalScalar._raw(tuple(a * g for a in self.c), self.K)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FormalScalar):
            return self * other.inverse()
        g = gq(other)
        return FormalScalar._raw(tuple(a / g for a in self.c), self.K)

    def __eq__(self, other):
        if isinstance(other, FormalScalar):
            return self.K == other.K and self.c == other.c
        try:
            return self == FormalScalar([other], self.K)
        except (TypeError, RepresentationError):
            return NotImplemented

    def __hash__(self):
        return hash((self.c, self.K))

    def __bool__(self):
        return any(self.c)

    def __getitem__(self, k: int) -> GaussQ:
        return self.c[k] if 0 <= k <= self.K else ZERO

    def valuation(self) -> int | None:
        """Lowest nu-power with a nonzero coefficient (None for zero)."""
        for k, a in enumerate(self.c):
            if a:
                return k
        return None

    def conjugate(self) -> "FormalScalar":
        return FormalScalar._raw(tuple(a.conjugate() for a in self.c), self.K)

    def shift(self, j: int) -> "FormalScalar":
        """Multiply by ``nu**j``; negative ``j`` divides and requires valuation >= -j."""
        if j >= 0:
            return FormalScalar._raw(((ZERO,) * j + self.c)[: self.K + 1], self.K)
        if any(self.c[:-j]):
            raise DomainError("division by nu of a series with nonzero low-order terms")
        return FormalScalar._raw(self.c[-j:] + (ZERO,) * (-j), self.K)

    def with_order(self, K: int) -> "FormalScalar":
        """Re-truncate (or zero-pad) to order ``K``."""
        return FormalScalar(self.c, K)

    def inverse(self) -> "FormalScalar":
        if not self.c[0]:
            raise DomainError("series with zero constant term is not invertible")
        inv0 = ONE / self.c[0]
        out = [inv0]
        for k in range(1, self.K + 1):
            acc = ZERO
            for j in range(1, k + 1):
                acc = acc + self.c[j] * out[k - j]
            out.append(-acc * inv0)
        return FormalScalar._raw(tuple(out), self.K)

    def is_real(self) -> bool:
        return not any(a.im for a in self.c)

    def to_json(self) -> list:
        return [a.to_pairs() for a in self.c]

    @classmethod
    def from_json(cls, data: list, K: int) -> "FormalScalar":
        return cls([GaussQ.from_pairs(d) for d in data], K)

    def __repr__(self):
        terms = []
        for k, a in enumerate(self.c):
            if a:
                terms.append(repr(a) if k == 0 else f"{a!r}*nu^{k}")
        return " + ".join(terms) if terms else "0"


def series_mul(a: FormalScalar, b: FormalScalar) -> FormalScalar:
    """Cauchy product truncated at ``nu**K``."""
    if a.K != b.K:
        raise ConfigurationError(f"truncation orders differ: K={a.K} vs K={b.K}")
    K = a.K
    ac, bc = a.c, b.c
    out = []
    for k in range(K + 1):
        acc = ZERO
        for j in range(k + 1):
            x = ac[j]
            if x:
                y = bc[k - j]
                if y:
                    acc = acc + x * y
        out.append(acc)
    return FormalScalar._raw(tuple(out), K)


def series_exp(a: FormalScalar) -> FormalScalar:
    """``sum a^n / n!`` for a series without constant term."""
    if a.c[0]:
        raise DomainError("formal exponential needs a series with zero constant term")
    result = FormalScalar.one(a.K)
    term = FormalScalar.one(a.K)
    for n in range(1, a.K + 1):
        term = series_mul(term, a) / n
        if not term:
            break
        result = result + term
    return result


class TimeFun:
    """``t -> sum_k p_k(t) exp(2 pi i k t)`` on ``[0, 1]``.

    ``terms`` maps a frequency ``k`` to polynomial coefficients in ``t``
    (lowest degree first).  Nonzero frequencies carry constant amplitudes
    only, which keeps every definite integral Gaussian-rational.
    """

    __slots__ = ("terms", "K")

    def __init__(self, terms: Mapping[int, Iterable] | None = None, K: int = 4):
        self.K = K
        clean: dict[int, tuple] = {}
        for k, poly in (terms or {}).items():
            p = [x if isinstance(x, FormalScalar) else FormalScalar([x], K) for x in poly]
            for x in p:
                if x.K != K:
                    raise ConfigurationError("time function coefficients use a different K")
            while p and not p[-1]:
                p.pop()
            if not p:
                continue
            if k != 0 and len(p) > 1:
                raise RepresentationError(
                    "nonzero frequencies must have constant amplitude in the exact time ring")
            clean[int(k)] = tuple(p)
        self.terms = clean

    @classmethod
    def constant(cls, x, K: int) -> "TimeFun":
        return cls({0: [x]}, K)

    @classmethod
    def monomial(cls, j: int, K: int, coeff=1) -> "TimeFun":
        return cls({0: [0] * j + [coeff]}, K)

    @classmethod
    def wave(cls, k: int, K: int, amplitude=1) -> "TimeFun":
        return cls({k: [amplitude]}, K)

    def __add__(self, other: "TimeFun") -> "TimeFun":
        out = {k: list(p) for k, p in self.terms.items()}
        for k, p in other.terms.items():
            q = out.setdefault(k, [])
            for j, x in enumerate(p):
                if j < len(q):
                    q[j] = q[j] + x
                else:
                    q.append(x)
        return TimeFun(out, self.K)

    def __neg__(self):
        return TimeFun({k: [-x for x in p] for k, p in self.terms.items()}, self.K)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "TimeFun":
        return TimeFun({k: [x * s for x in p] for k, p in self.terms.items()}, self.K)

    def __mul__(self, other: "TimeFun") -> "TimeFun":
        if not isinstance(other, TimeFun):
            return self.scale(other)
        out: dict[int, list] = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                q = out.setdefault(k1 + k2, [])
                for i, x in enumerate(p1):
                    for j, y in enumerate(p2):
                        while len(q) <= i + j:
                            q.append(FormalScalar.zero(self.K))
                        q[i + j] = q[i + j] + x * y
        return TimeFun(out, self.K)

    def __eq__(self, other):
        return isinstance(other, TimeFun) and (self - other).terms == {}

    def __repr__(self):
        return f"TimeFun({self.terms!r})"


def time_integrate(f: TimeFun) -> FormalScalar:
    """Exact value of the integral of ``f`` over ``[0, 1]``."""
    total = FormalScalar.zero(f.K)
    for j, x in enumerate(f.terms.get(0, ())):
        total = total + x / (j + 1)
    return total
