"""Exact polynomials in ``u`` and truncated power series in ``z``.

Coefficients are Python ``int`` or :class:`fractions.Fraction`; a fraction
with denominator one is always stored as an ``int``.  Nothing in this module
ever rounds.

A :class:`ZSeries` carries a scaling tag.  In ``EGF`` scaling the stored
coefficient ``n`` is ``n! [z^n] f``; in ``OGF`` scaling it is ``[z^n] f``.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence, Union

__all__ = [
    "ExactDivisionError",
    "ScalingMismatchError",
    "UPoly",
    "Scaling",
    "ZSeries",
    "poly_arith",
    "poly_exact_divide",
    "binom_poly",
    "falling_factorial",
    "series_arith",
    "series_binomial_power",
    "forward_map",
    "series_reversion",
]

Number = Union[int, Fraction]
Exponent = Union[int, str, "UPoly"]

# Below this length schoolbook convolution beats packing into one big integer.
_KRONECKER_MIN_LEN = 10


class ExactDivisionError(ArithmeticError):
    """A polynomial division that must be exact left a remainder."""


class ScalingMismatchError(ValueError):
    """Two series with different EGF/OGF conventions were combined."""


def _norm(c) -> Number:
    if type(c) is int:
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, Rational):
        f = Fraction(c.numerator, c.denominator)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"exact rational coefficient required, got {type(c).__name__}")


# -- integer convolution -------------------------------------------------------

def _pack(cs: Sequence[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in cs), "little")


def _unpack(x: int, nbytes: int, count: int) -> list[int]:
    raw = x.to_bytes(nbytes * count, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]


def _schoolbook(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, y in enumerate(b):
        if y:
            for i, x in enumerate(a):
                out[i + j] += x * y
    return out


def _kronecker(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Multiply integer polynomials by packing them into single big integers."""
    amax = max(abs(c) for c in a)
    bmax = max(abs(c) for c in b)
    if not amax or not bmax:
        return [0] * (len(a) + len(b) - 1)
    bound = amax * bmax * min(len(a), len(b))
    count = len(a) + len(b) - 1
    if min(a) >= 0 and min(b) >= 0:
        nbytes = (bound.bit_length() + 8) // 8
        prod = _pack(a, nbytes) * _pack(b, nbytes)
        return _unpack(prod, nbytes, count)
    # signed: shift every digit by half the slot so that all digits are nonnegative
    nbytes = (bound.bit_length() + 9) // 8
    half = 1 << (8 * nbytes - 1)
    pa = _pack([c + half for c in a], nbytes) - _pack([half] * len(a), nbytes)
    pb = _pack([c + half for c in b], nbytes) - _pack([half] * len(b), nbytes)
    prod = pa * pb + _pack([half] * count, nbytes)
    return [d - half for d in _unpack(prod, nbytes, count)]


def _int_convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) < _KRONECKER_MIN_LEN:
        return _schoolbook(a, b)
    return _kronecker(a, b)


def _convolve(a: Sequence[Number], b: Sequence[Number]) -> list[Number]:
    if not a or not b:
        return []
    da = math.lcm(*(c.denominator for c in a if type(c) is not int)) if any(type(c) is not int for c in a) else 1
    db = math.lcm(*(c.denominator for c in b if type(c) is not int)) if any(type(c) is not int for c in b) else 1
    if da == 1 and db == 1:
        return _int_convolve(a, b)
    ia = [int(c * da) for c in a]
    ib = [int(c * db) for c in b]
    d = da * db
    return [_norm(Fraction(c, d)) for c in _int_convolve(ia, ib)]


# -- polynomials in u ------------------------------------------------------------

class UPoly:
    """Dense polynomial in ``u`` with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``u**i``; trailing zeros are trimmed,
    so the zero polynomial has ``coeffs == ()`` and degree ``-inf``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_norm(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple[Number, ...] = tuple(cs)

    @classmethod
    def _trusted(cls, cs: list) -> "UPoly":
        # caller guarantees normalized entries
        while cs and not cs[-1]:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def constant(cls, c) -> "UPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> "UPoly":
        return cls([0] * k + [c])

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k: int) -> Number:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, UPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, Rational):
            return self.coeffs == UPoly.constant(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"UPoly({list(self.coeffs)!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                cs = f"({c})" if isinstance(c, Fraction) else str(c)
                terms.append(cs + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")

    @staticmethod
    def _coerce(other) -> "UPoly | None":
        if isinstance(other, UPoly):
            return other
        if isinstance(other, Rational):
            return UPoly.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = _norm(out[i] + c)
        return UPoly._trusted(out)

    __radd__ = __add__

    def __neg__(self) -> "UPoly":
        return UPoly._trusted([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, UPoly):
            return UPoly._trusted(_convolve(self.coeffs, other.coeffs))
        if isinstance(other, Rational):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out, base = UPoly.constant(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "UPoly":
        c = _norm(c)
        return UPoly._trusted([_norm(x * c) for x in self.coeffs])

    def shift(self, s: int) -> "UPoly":
        """Multiply by ``u**s``."""
        if not self.coeffs:
            return self
        return UPoly._trusted([0] * s + list(self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return _norm(acc) if isinstance(acc, Rational) else acc

    def derivative(self) -> "UPoly":
        return UPoly._trusted([k * c for k, c in enumerate(self.coeffs)][1:])

    def compose_shift(self, a: int) -> "UPoly":
        """Return ``p(u + a)``."""
        out = UPoly()
        step = UPoly((a, 1))
        for c in reversed(self.coeffs):
            out = out * step + c
        return out

    def divmod(self, q: "UPoly") -> tuple["UPoly", "UPoly"]:
        if not q.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(q.coeffs) - 1
        lead = q.coeffs[-1]
        if len(rem) <= dq:
            return UPoly(), UPoly(rem)
        quot = [0] * (len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if not c:
                continue
            f = _norm(Fraction(c) / lead)
            quot[i - dq] = f
            for j, qc in enumerate(q.coeffs):
                rem[i - dq + j] = _norm(rem[i - dq + j] - f * qc)
        return UPoly(quot), UPoly(rem[:dq])

    def is_integral(self) -> bool:
        return all(type(c) is int for c in self.coeffs)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def to_ints(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError(f"polynomial has non-integer coefficients: {self}")
        return self.coeffs  # type: ignore[return-value]


U = UPoly((0, 1))


def poly_exact_divide(p: UPoly, q: UPoly) -> UPoly:
    """Return ``p / q``; raise :class:`ExactDivisionError` unless the remainder is zero."""
    quot, rem = p.divmod(q)
    if rem:
        raise ExactDivisionError(f"({p}) / ({q}) leaves remainder {rem}")
    return quot


def poly_arith(a: UPoly, b, op: str):
    """Dispatch ``add``, ``sub``, ``mul``, ``scale``, ``eval`` or ``derivative``.

    For ``scale`` and ``eval`` the second argument is a number; ``derivative``
    ignores it.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    if op == "eval":
        return a(b)
    if op == "derivative":
        return a.derivative()
    raise ValueError(f"unknown polynomial operation {op!r}")


def falling_factorial(e: UPoly, k: int) -> UPoly:
    """``e (e-1) ... (e-k+1)`` for a polynomial ``e``."""
    out = UPoly.constant(1)
    for i in range(k):
        out = out * (e - i)
    return out


def binom_poly(k: int) -> UPoly:
    """The binomial coefficient ``C(u, k) = u(u-1)...(u-k+1)/k!`` as a polynomial."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return falling_factorial(U, k).scale(Fraction(1, math.factorial(k)))


# -- truncated series in z -------------------------------------------------------

class Scaling(str, enum.Enum):
    EGF = "EGF"
    OGF = "OGF"


class ZSeries:
    """Series ``sum_n c_n z^n`` known modulo ``z^(order+1)``, with ``UPoly`` coefficients."""

    __slots__ = ("order", "coeffs", "scaling")

    def __init__(self, coeffs: Iterable, order: int | None = None, scaling: Scaling = Scaling.OGF):
        cs = [c if isinstance(c, UPoly) else UPoly.constant(c) if isinstance(c, Rational) else UPoly(c)
              for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        cs = cs[:order + 1] + [UPoly()] * (order + 1 - len(cs))
        self.order = order
        self.coeffs: tuple[UPoly, ...] = tuple(cs)
        self.scaling = Scaling(scaling)

    @classmethod
    def zero(cls, order: int, scaling: Scaling = Scaling.OGF) -> "ZSeries":
        return cls([], order, scaling)

    @classmethod
    def one(cls, order: int, scaling: Scaling = Scaling.OGF) -> "ZSeries":
        return cls([1], order, scaling)

    @classmethod
    def z(cls, order: int, scaling: Scaling = Scaling.OGF) -> "ZSeries":
        # [z^1] = 1 in both scalings since 1! = 1
        return cls([0, 1], order, scaling)

    def __getitem__(self, n: int) -> UPoly:
        return self.coeffs[n]

    def coefficient(self, n: int) -> UPoly:
        """The true ``[z^n]`` coefficient, undoing EGF scaling."""
        c = self.coeffs[n]
        if self.scaling is Scaling.EGF:
            return c.scale(Fraction(1, math.factorial(n)))
        return c

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZSeries):
            return NotImplemented
        return (self.order, self.scaling, self.coeffs) == (other.order, other.scaling, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.order, self.scaling, self.coeffs))

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"ZSeries[{self.scaling.value}, O(z^{self.order + 1})]({body}{more})"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, order: int) -> "ZSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series known to order {self.order} to {order}")
        return ZSeries(self.coeffs[:order + 1], order, self.scaling)

    def rescale(self, scaling: Scaling) -> "ZSeries":
        scaling = Scaling(scaling)
        if scaling is self.scaling:
            return self
        if scaling is Scaling.OGF:
            cs = [c.scale(Fraction(1, math.factorial(n))) for n, c in enumerate(self.coeffs)]
        else:
            cs = [c.scale(math.factorial(n)) for n, c in enumerate(self.coeffs)]
        return ZSeries(cs, self.order, scaling)

    def map(self, fn: Callable[[UPoly], UPoly]) -> "ZSeries":
        return ZSeries([fn(c) for c in self.coeffs], self.order, self.scaling)

    def _check(self, other: "ZSeries", same_order: bool) -> None:
        if self.scaling is not other.scaling:
            raise ScalingMismatchError(f"cannot combine {self.scaling.value} with {other.scaling.value} series")
        if same_order and self.order != other.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "ZSeries") -> "ZSeries":
        self._check(other, True)
        return ZSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order, self.scaling)

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        self._check(other, True)
        return ZSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order, self.scaling)

    def __neg__(self) -> "ZSeries":
        return self.map(lambda c: -c)

    def __mul__(self, other) -> "ZSeries":
        if isinstance(other, (UPoly, int, Fraction)):
            return self.map(lambda c: c * other)
        self._check(other, False)
        order = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        egf = self.scaling is Scaling.EGF
        for n in range(order + 1):
            acc = UPoly()
            for h in range(n + 1):
                if a[h] and b[n - h]:
                    term = a[h] * b[n - h]
                    acc = acc + (term.scale(math.comb(n, h)) if egf else term)
            out.append(acc)
        return ZSeries(out, order, self.scaling)

    __rmul__ = __mul__

    def reciprocal(self) -> "ZSeries":
        """``1/f`` for a series whose constant term is a nonzero constant."""
        c0 = self.coeffs[0]
        if c0.degree != 0:
            raise ZeroDivisionError("constant term must be a nonzero constant to invert")
        inv0 = Fraction(1, 1) / c0[0]
        egf = self.scaling is Scaling.EGF
        out = [UPoly.constant(inv0)]
        for n in range(1, self.order + 1):
            acc = UPoly()
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    t = self.coeffs[k] * out[n - k]
                    acc = acc + (t.scale(math.comb(n, k)) if egf else t)
            out.append(acc.scale(-inv0))
        return ZSeries(out, self.order, self.scaling)

    def power(self, k: int) -> "ZSeries":
        if k < 0:
            return self.reciprocal().power(-k)
        out = ZSeries.one(self.order, self.scaling)
        for _ in range(k):
            out = out * self
        return out

    def compose_into(self, outer: Sequence[UPoly]) -> "ZSeries":
        """``sum_k outer[k] * self**k`` for a series with zero constant term.

        ``outer`` lists the ordinary coefficients of the outer series.
        """
        if self.coeffs[0]:
            raise ValueError("inner series must have zero constant term")
        outer = list(outer)[:self.order + 1]
        acc = ZSeries.zero(self.order, self.scaling)
        for c in reversed(outer):
            acc = acc * self + ZSeries([c], self.order, self.scaling)
        return acc


def series_arith(a: ZSeries, b: ZSeries, op: str) -> ZSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown series operation {op!r}")


def _exponent_poly(exponent: Exponent) -> UPoly:
    if isinstance(exponent, UPoly):
        return exponent
    if isinstance(exponent, str):
        key = exponent.replace(" ", "")
        if key == "u":
            return U
        if key == "u+1":
            return U + 1
        raise ValueError(f"unsupported symbolic exponent {exponent!r}")
    if isinstance(exponent, int):
        return UPoly.constant(exponent)
    raise TypeError(f"unsupported exponent {exponent!r}")


def series_binomial_power(f: ZSeries, exponent: Exponent, method: str = "recurrence") -> ZSeries:
    """Expand ``(1 + f)**exponent`` modulo ``z^(order+1)``.

    ``exponent`` is ``"u"``, ``"u+1"``, an integer, or any :class:`UPoly`.

    ``method="binomial"`` sums ``C(e, k) f**k`` for ``k <= order``.
    ``method="recurrence"`` solves ``(1+f) g' = e f' g`` coefficient by
    coefficient, which costs ``O(order**2)`` polynomial products instead of
    ``O(order**3)``.  Both are exact and agree.
    """
    if f.coeffs[0]:
        raise ValueError("(1+f)^e needs f with zero constant term")
    e = _exponent_poly(exponent)
    N = f.order
    if method == "binomial":
        acc = ZSeries.one(N, f.scaling)
        fk = ZSeries.one(N, f.scaling)
        weight = UPoly.constant(1)
        for k in range(1, N + 1):
            fk = fk * f
            weight = (weight * (e - (k - 1))).scale(Fraction(1, k))
            acc = acc + fk * weight
        return acc
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    F = f.coeffs
    g = [UPoly.constant(1)]
    if f.scaling is Scaling.EGF:
        # G_n = sum_j [C(n-1, j-1) e - C(n-1, j)] F_j G_{n-j}
        for n in range(1, N + 1):
            acc = UPoly()
            for j in range(1, n + 1):
                if F[j] and g[n - j]:
                    w = e.scale(math.comb(n - 1, j - 1)) - math.comb(n - 1, j)
                    acc = acc + w * (F[j] * g[n - j])
            g.append(acc)
    else:
        # n g_n = sum_j (j e - (n - j)) f_j g_{n-j}
        for n in range(1, N + 1):
            acc = UPoly()
            for j in range(1, n + 1):
                if F[j] and g[n - j]:
                    acc = acc + (e.scale(j) - (n - j)) * (F[j] * g[n - j])
            g.append(acc.scale(Fraction(1, n)))
    return ZSeries(g, N, f.scaling)


def forward_map(N: int) -> ZSeries:
    """Ordinary series in ``phi`` for ``z = (u^2 phi - (1+phi)^u + 1) / (u(u-1))``.

    The ``u(u-1)`` factor is cancelled exactly, order by order.
    """
    uu1 = U * U - U
    cs = [UPoly()]
    for k in range(1, N + 1):
        num = -binom_poly(k)
        if k == 1:
            num = num + U * U
        cs.append(poly_exact_divide(num, uu1))
    return ZSeries(cs, N, Scaling.OGF)


def series_reversion(N: int) -> ZSeries:
    """Compositional inverse of :func:`forward_map`, returned in EGF scaling.

    Uses Lagrange inversion, ``[z^n] phi = (1/n) [w^(n-1)] (w / z(w))^n``, so it
    shares no code path with the order-by-order solver.
    """
    if N < 1:
        raise ValueError("reversion order must be at least 1")
    zmap = forward_map(N)
    # z(w)/w, then its reciprocal w/z(w)
    quotient = ZSeries(zmap.coeffs[1:], N - 1, Scaling.OGF)
    h = quotient.reciprocal()
    out = [UPoly()]
    hn = ZSeries.one(N - 1, Scaling.OGF)
    for n in range(1, N + 1):
        hn = hn * h
        out.append(hn[n - 1].scale(Fraction(math.factorial(n), n)))
    return ZSeries(out, N, Scaling.EGF)
