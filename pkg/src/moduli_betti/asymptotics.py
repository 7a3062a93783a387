"""Singularity data and Quasi-Powers moment predictions.

Around ``u = 1`` every quantity here is built from
``u^(1/(u-1)) = exp(log(u)/(u-1))`` with ``log(u)/(u-1) = sum_j (-1)^j t^j/(j+1)``
for ``t = u - 1``.  Taylor jets at ``u = 1`` are computed exactly, with
coefficients in the field Q(e); floating evaluation goes through mpmath at
:data:`PRECISION_BITS` bits.

Series index versus space index: the coefficient ``[z^s] phi`` describes
``M_{0,s+1}``, so ``M_{0,n}`` sits at series index ``s = n - 1``; for
``P^1[n]`` the two indices coincide.  The moment formulas below are linear in
the series index ``s``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .series import UPoly

__all__ = [
    "PRECISION_BITS",
    "set_precision",
    "QE",
    "Jet",
    "rho_jet",
    "lambda_jet",
    "gamma_jet",
    "a_jet",
    "b_jet",
    "SingularityData",
    "singularity_data",
    "eval_singularity",
    "MomentFormulas",
    "moment_formulas",
    "qp_moments",
    "formula_moments",
    "coeff_asymptotic",
    "exact_coefficient",
    "middle_betti_asymp",
    "log_middle_betti_asymp",
    "ScanResult",
    "rho_modulus_scan",
]

PRECISION_BITS = 96
SERIES_RADIUS = 1e-3
NEIGHBORHOOD = 0.5


def set_precision(bits: int) -> None:
    global PRECISION_BITS
    if bits < 64:
        raise ValueError("at least 64 bits of mantissa are required")
    PRECISION_BITS = int(bits)


# -- exact arithmetic in Q(e) ------------------------------------------------------

def _poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    while b:
        a, b = b, a.divmod(b)[1]
    return a.scale(Fraction(1) / a[len(a) - 1]) if a else UPoly.constant(1)


class QE:
    """An element ``num(e)/den(e)`` of Q(e), with ``e`` treated as transcendental."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = num if isinstance(num, UPoly) else UPoly.constant(num)
        den = den if isinstance(den, UPoly) else UPoly.constant(den)
        if not den:
            raise ZeroDivisionError("zero denominator in Q(e)")
        g = _poly_gcd(num, den) if num else den
        num, den = num.divmod(g)[0], den.divmod(g)[0]
        lead = den[len(den) - 1]
        self.num = num.scale(Fraction(1) / lead)
        self.den = den.scale(Fraction(1) / lead)

    @classmethod
    def e(cls) -> "QE":
        return cls(UPoly((0, 1)))

    @classmethod
    def linear(cls, a, b) -> "QE":
        """``a + b e``."""
        return cls(UPoly((a, b)))

    @staticmethod
    def _lift(x) -> "QE | None":
        if isinstance(x, QE):
            return x
        if isinstance(x, (int, Fraction, UPoly)):
            return QE(x)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QE(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QE(-self.num, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QE(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QE(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __float__(self) -> float:
        return float(self.to_mpf())

    def to_mpf(self) -> mpmath.mpf:
        with mpmath.workprec(PRECISION_BITS):
            return self.num(mpmath.e) / self.den(mpmath.e)

    def as_linear(self) -> tuple[Fraction, Fraction]:
        """``(a, b)`` with ``self == a + b e``; raises if not of that form."""
        if self.den.degree != 0 or self.num.degree > 1:
            raise ValueError(f"{self} is not of the form a + b e")
        return Fraction(self.num[0]), Fraction(self.num[1])

    def __repr__(self) -> str:
        n = str(self.num).replace("u", "e")
        if self.den == 1:
            return f"QE({n})"
        return f"QE(({n}) / ({str(self.den).replace('u', 'e')}))"


class Jet:
    """Taylor polynomial in ``t = u - 1`` truncated after ``t^order``."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order: int):
        cs = [x if isinstance(x, QE) else QE(x) for x in coeffs][:order + 1]
        cs += [QE(0)] * (order + 1 - len(cs))
        self.c: tuple[QE, ...] = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def const(cls, x, order: int) -> "Jet":
        return cls([x], order)

    def __add__(self, other):
        o = other if isinstance(other, Jet) else Jet.const(other, self.order)
        return Jet([a + b for a, b in zip(self.c, o.c)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-a for a in self.c], self.order)

    def __sub__(self, other):
        o = other if isinstance(other, Jet) else Jet.const(other, self.order)
        return self + (-o)

    def __rsub__(self, other):
        return Jet.const(other, self.order) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([a * other for a in self.c], self.order)
        k = self.order
        return Jet([sum((self.c[i] * other.c[n - i] for i in range(n + 1)), QE(0)) for n in range(k + 1)], k)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        inv0 = 1 / self.c[0]
        out = [inv0]
        for n in range(1, self.order + 1):
            s = sum((self.c[k] * out[n - k] for k in range(1, n + 1)), QE(0))
            out.append(-s * inv0)
        return Jet(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1 / (other if isinstance(other, QE) else QE(other)))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def exp(self) -> "Jet":
        """``exp`` of a jet with zero constant term."""
        if self.c[0] != 0:
            raise ValueError("exp is only taken of jets vanishing at t = 0")
        # g' = f' g, solved coefficient by coefficient
        out = [QE(1)]
        for n in range(1, self.order + 1):
            s = sum((k * self.c[k] * out[n - k] for k in range(1, n + 1)), QE(0))
            out.append(s / n)
        return Jet(out, self.order)

    def derivatives(self) -> tuple[QE, ...]:
        """Values ``f(1), f'(1), f''(1), ...``."""
        return tuple(c * math.factorial(k) for k, c in enumerate(self.c))

    def pgf_mean(self) -> QE:
        return self.c[1] / self.c[0]

    def pgf_variance(self) -> QE:
        """``f''(1) + f'(1) - f'(1)^2`` for a jet normalised to ``f(1) = 1``."""
        if self.c[0] != 1:
            raise ValueError("PGF variance needs f(1) = 1")
        return 2 * self.c[2] + self.c[1] - self.c[1] * self.c[1]


def _t(order: int) -> Jet:
    return Jet([0, 1], order)


def _log_ratio_jet(order: int) -> Jet:
    """``log(u)/(u-1)`` around ``u = 1``."""
    return Jet([Fraction((-1) ** j, j + 1) for j in range(order + 1)], order)


def _pow_jet(a: Jet, order: int) -> tuple[Jet, Fraction]:
    """``u^(a(u)/(u-1)) = e^c0 * exp(rest)``; returns ``(exp(rest), c0)``."""
    x = a * _log_ratio_jet(order)
    c0 = x.c[0]
    if c0.den != 1 or c0.num.degree > 0:
        raise ValueError("leading exponent must be rational")
    c0r = Fraction(c0.num[0])
    return (x - c0r).exp(), c0r


def _e_power(c0: Fraction, order: int) -> Jet:
    if c0.denominator != 1:
        raise ValueError("e^c needs integer c to stay inside Q(e)")
    k = int(c0)
    val = QE(UPoly.monomial(k)) if k >= 0 else 1 / QE(UPoly.monomial(-k))
    return Jet.const(val, order)


def rho_jet(order: int = 3) -> Jet:
    t = _t(order)
    core, c0 = _pow_jet(Jet.const(1, order), order)
    return _e_power(c0, order) * core - (2 + t) / (1 + t)


def lambda_jet(order: int = 3) -> Jet:
    core, c0 = _pow_jet(Jet.const(1, order), order)
    return _e_power(c0, order) * core - 1


def gamma_jet(order: int = 3) -> Jet:
    t = _t(order)
    core, c0 = _pow_jet(2 + t, order)
    return _e_power(c0, order) * core


def b_jet(order: int = 2) -> Jet:
    """``B(u) = (e-2)/rho(u)``."""
    return (QE.e() - 2) / rho_jet(order)


def a_jet(family: str, order: int = 2) -> Jet:
    """Prefactor ``A(u)`` under the convention ``ratio = A(u) B(u)^(s - 1/2)``."""
    t = _t(order)
    if family == "M0n":
        # u^(-(u-2)/(2(u-1))) / sqrt(e)
        core, c0 = _pow_jet((1 - t) * Fraction(1, 2), order)
        if c0 != Fraction(1, 2):
            raise AssertionError(c0)
        return core
    if family == "FM":
        # (u+1) u^((u+2)/(2(u-1))) / (2 e sqrt(e))
        core, c0 = _pow_jet((3 + t) * Fraction(1, 2), order)
        if c0 != Fraction(3, 2):
            raise AssertionError(c0)
        return (1 + t * Fraction(1, 2)) * core
    raise ValueError(f"unknown family {family!r}")


# -- floating evaluation -----------------------------------------------------------

def _log_ratio(u, method: str = "auto"):
    """``log(u)/(u-1)`` in mpmath, by the Taylor series when ``u`` is near 1."""
    t = u - 1
    if method == "auto":
        method = "series" if abs(t) < SERIES_RADIUS else "direct"
    if method == "direct":
        return mpmath.log(u) / t
    if method != "series":
        raise ValueError(method)
    eps = mpmath.mpf(2) ** (-PRECISION_BITS - 4)
    acc, term, j = mpmath.mpf(0), mpmath.mpf(1), 0
    while True:
        piece = term / (j + 1)
        acc += piece
        if abs(piece) < eps or j > 4 * PRECISION_BITS:
            return acc
        term *= -t
        j += 1


def _upow(u, a, method: str = "auto"):
    """``u^(a/(u-1))`` with the removable singularity at ``u = 1`` filled in."""
    return mpmath.exp(a * _log_ratio(u, method))


def _mp(u):
    if isinstance(u, complex) or isinstance(u, mpmath.mpc):
        return mpmath.mpc(u)
    return mpmath.mpf(u) if not isinstance(u, Fraction) else mpmath.mpf(u.numerator) / u.denominator


def eval_singularity(u, which: str = "rho", method: str = "auto"):
    """Evaluate ``rho``, ``lambda`` or ``gamma`` at a real or complex ``u != 0``.

    rho(u) = u^(1/(u-1)) - (u+1)/u, lambda(u) = u^(1/(u-1)) - 1,
    gamma(u) = u^((u+1)/(u-1)).  Complex powers use the principal logarithm.
    """
    with mpmath.workprec(PRECISION_BITS):
        x = _mp(u)
        if x == 0:
            raise ValueError("u = 0 is outside the domain")
        if which == "rho":
            return _upow(x, 1, method) - (x + 1) / x
        if which == "lambda":
            return _upow(x, 1, method) - 1
        if which == "gamma":
            return _upow(x, x + 1, method)
    raise ValueError(f"unknown singularity function {which!r}")


@dataclass(frozen=True)
class SingularityData:
    rho: Callable
    lam: Callable
    gamma: Callable
    rho_derivs_at_1: tuple[QE, ...]


def singularity_data(order: int = 2) -> SingularityData:
    """Evaluators plus exact ``rho(1), rho'(1), ..., rho^(order)(1)`` as ``a + b e``."""
    return SingularityData(
        rho=lambda u: eval_singularity(u, "rho"),
        lam=lambda u: eval_singularity(u, "lambda"),
        gamma=lambda u: eval_singularity(u, "gamma"),
        rho_derivs_at_1=rho_jet(order).derivatives(),
    )


# -- moment formulas -----------------------------------------------------------

_INDEX_SHIFT = {"M0n": 1, "FM": 0}


@dataclass(frozen=True)
class MomentFormulas:
    """``mean = mean_slope * s + mean_offset`` and the same for the variance.

    ``s`` is the series index; a space of index ``n`` sits at ``s = n - index_shift``.
    """

    family: str
    index_shift: int
    mean_slope: QE
    mean_offset: QE
    var_slope: QE
    var_offset: QE

    def mean(self, n: int) -> float:
        s = n - self.index_shift
        return float(self.mean_slope * s + self.mean_offset)

    def variance(self, n: int) -> float:
        s = n - self.index_shift
        return float(self.var_slope * s + self.var_offset)

    def floats(self) -> dict[str, float]:
        return {k: float(getattr(self, k)) for k in ("mean_slope", "mean_offset", "var_slope", "var_offset")}


def moment_formulas(family: str) -> MomentFormulas:
    if family not in _INDEX_SHIFT:
        raise ValueError(f"no Quasi-Powers formula for family {family!r}")
    a, b = a_jet(family), b_jet()
    mb, vb = b.pgf_mean(), b.pgf_variance()
    ma, va = a.pgf_mean(), a.pgf_variance()
    half = Fraction(1, 2)
    return MomentFormulas(family, _INDEX_SHIFT[family], mb, ma - mb * half, vb, va - vb * half)


def qp_moments(betaN: float, family: str) -> tuple[float, float]:
    """Quasi-Powers mean and variance ``beta m(B) + m(A)``, ``beta v(B) + v(A)``.

    ``betaN`` is the power of ``B`` under the convention ``beta = s - 1/2``.
    """
    a, b = a_jet(family), b_jet()
    mean = float(b.pgf_mean()) * betaN + float(a.pgf_mean())
    var = float(b.pgf_variance()) * betaN + float(a.pgf_variance())
    return mean, var


def formula_moments(space: str, n: int) -> tuple[float, float]:
    """Predicted mean and variance for ``M_{0,n}`` (``"M0n"``) or ``P^1[n]`` (``"FM"``)."""
    space = getattr(space, "value", space)
    f = _formulas_cached(space)
    return f.mean(n), f.variance(n)


_FORMULA_CACHE: dict[str, MomentFormulas] = {}


def _formulas_cached(family: str) -> MomentFormulas:
    if family not in _FORMULA_CACHE:
        _FORMULA_CACHE[family] = moment_formulas(family)
    return _FORMULA_CACHE[family]


# -- coefficient asymptotics -------------------------------------------------------

def coeff_asymptotic(n: int, u=1, family: str = "phi"):
    """Leading-order estimate of ``[z^n] phi(z,u)`` or ``[z^n] psi(z,u)``.

    ``phi``: (2 pi)^(-1/2) u^(-(u-2)/(2(u-1))) rho(u)^(1/2-n) n^(-3/2).
    ``psi``: the same with prefactor (u+1) u^((u+2)/(2(u-1))).  The relative
    error is O(1/n).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if abs(complex(u) - 1) > NEIGHBORHOOD:
        warnings.warn(f"u={u} is outside |u-1| <= {NEIGHBORHOOD}; estimate may be poor", stacklevel=2)
    with mpmath.workprec(PRECISION_BITS):
        x = _mp(u)
        rho = eval_singularity(x, "rho")
        base = rho ** (mpmath.mpf(1) / 2 - n) * mpmath.mpf(n) ** (-mpmath.mpf(3) / 2) / mpmath.sqrt(2 * mpmath.pi)
        if family == "phi":
            return _upow(x, -(x - 2) / 2) * base
        if family == "psi":
            return (x + 1) * _upow(x, (x + 2) / 2) * base
    raise ValueError(f"unknown family {family!r}")


def exact_coefficient(n: int, u=1, family: str = "phi"):
    """``[z^n] phi(z,u)`` or ``[z^n] psi(z,u)`` from the exact series, as an mpmath number."""
    from .moduli import solve_phi, solve_psi

    series = solve_phi(max(n, 1)) if family == "phi" else solve_psi(n)
    p = series[n]
    if isinstance(u, (int, Fraction)):
        val = Fraction(p(u)) / math.factorial(n)
        with mpmath.workprec(PRECISION_BITS):
            return mpmath.mpf(val.numerator) / val.denominator
    with mpmath.workprec(PRECISION_BITS):
        return p(_mp(u)) / math.factorial(n)


def log_middle_betti_asymp(n: int):
    """Log of the estimate for the middle Betti number ``b_{(n-2)/2}`` of ``M_{0,n+1}``."""
    if n % 2 or n < 4:
        raise ValueError("middle Betti estimate needs even n >= 4")
    with mpmath.workprec(PRECISION_BITS):
        e = mpmath.e
        c = (3 - e) / (3 * (e - 2)) * mpmath.pi
        return -mpmath.log(c) / 2 - mpmath.log(n) + (n - mpmath.mpf(1) / 2) * mpmath.log(n / (e * e - 2 * e))


def middle_betti_asymp(n: int):
    """``(c pi)^(-1/2) n^(-1) (n/(e^2-2e))^(n-1/2)`` with ``c = (3-e)/(3(e-2))``."""
    with mpmath.workprec(PRECISION_BITS):
        return mpmath.exp(log_middle_betti_asymp(n))


# -- unit circle scan -----------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    min_theta: float
    min_value: float
    boundary_min: float
    K: float
    grid_points: int
    exclusion_radius: float


def rho_modulus_scan(grid_points: int = 1024, exclusion_radius: float = 0.1) -> ScanResult:
    """Scan ``|rho(e^{i theta})|`` around the unit circle.

    ``min_theta``/``min_value`` refer to the whole grid; ``boundary_min`` is the
    minimum over points with ``|u - 1| >= exclusion_radius``, and
    ``K = boundary_min / (e - 2)``.  The two arc endpoints ``|u - 1| = r`` are
    always included in the grid.
    """
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    if exclusion_radius < 0 or exclusion_radius >= 2:
        raise ValueError("exclusion_radius must lie in [0, 2)")
    cut = 2 * math.asin(exclusion_radius / 2)
    thetas = [2 * math.pi * j / grid_points for j in range(grid_points)]
    thetas = [th - 2 * math.pi if th > math.pi else th for th in thetas]
    if exclusion_radius > 0:
        thetas += [cut, -cut]
    best = (math.inf, 0.0)
    outer = math.inf
    with mpmath.workprec(PRECISION_BITS):
        for th in thetas:
            u = mpmath.expj(th) if th else mpmath.mpf(1)
            val = float(abs(eval_singularity(u, "rho")))
            if val < best[0] or (val == best[0] and abs(th) < abs(best[1])):
                best = (val, th)
            if abs(th) >= cut * (1 - 1e-12):
                outer = min(outer, val)
        e2 = float(mpmath.e - 2)
    return ScanResult(best[1], best[0], outer, outer / e2, grid_points, exclusion_radius)
