"""Poincare polynomials of M_{0,n} and of the Fulton-MacPherson space P^1[n].

The generating function ``phi(z, u) = z + sum_{n>=2} P(M_{0,n+1})(u) z^n / n!``
satisfies ``(1+phi)^u = u^2 phi - u(u-1) z + 1``.  It is stored as an EGF
series, so coefficient ``n`` is the integer polynomial ``P(M_{0,n+1})``.
Likewise coefficient ``n`` of ``psi = (1+phi)^(u+1)`` is ``P(P^1[n])``.

Index convention: ``betti_m0n(n)`` reads series coefficient ``n - 1``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from .series import (
    U,
    Scaling,
    UPoly,
    ZSeries,
    _int_convolve,
    poly_exact_divide,
    series_binomial_power,
)
from .tables import BettiTable, Space, TableValidationError, euler_char

__all__ = [
    "IdentityError",
    "IdentityReport",
    "solve_phi",
    "solve_psi",
    "betti_m0n",
    "betti_m0n1",
    "betti_fm",
    "m0n_tables",
    "fm_tables",
    "functional_residual",
    "verify_fm_identity",
    "euler_char",
]

_UU1 = U * U - U


class IdentityError(ArithmeticError):
    """Two exact computations of the same quantity disagree."""


def _add_scaled(acc: list[int], p: list[int], s: int) -> None:
    if len(acc) < len(p):
        acc.extend([0] * (len(p) - len(acc)))
    for i, c in enumerate(p):
        acc[i] += s * c


class _ReferenceSolver:
    """Order-by-order substitution into the functional equation.

    ``bell[m][k]`` holds ``m! [z^m] phi^k / k!`` (a partial Bell polynomial in
    the already known coefficients), updated once per new order, so that
    ``n! [z^n] sum_k C(u,k) phi^k = sum_k (u)_k bell[n][k]``.
    """

    def __init__(self):
        self.phi: list[list[int]] = [[], [1]]
        self.bell: list[list[list[int]]] = [[[1]], [[], [1]]]
        self.lock = threading.Lock()

    def extend(self, N: int) -> None:
        with self.lock:
            for n in range(len(self.phi), N + 1):
                self._step(n)

    def _step(self, n: int) -> None:
        phi, bell = self.phi, self.bell
        row: list[list[int]] = [[] for _ in range(n + 1)]
        for k in range(2, n + 1):
            acc: list[int] = []
            # B_{n,k} = sum_j C(n-1, j-1) Phi_j B_{n-j,k-1}
            for j in range(1, n - k + 2):
                prev = bell[n - j][k - 1]
                if prev:
                    _add_scaled(acc, _int_convolve(phi[j], prev), math.comb(n - 1, j - 1))
            row[k] = acc
        # Horner in the falling-factorial basis: sum_k (u)_k row[k]
        t: list[int] = []
        for k in range(n, -1, -1):
            nxt = [0] * (len(t) + 1) if t else []
            for i, c in enumerate(t):
                nxt[i + 1] += c
                nxt[i] -= k * c
            _add_scaled(nxt, row[k], 1)
            t = nxt
        rhs = UPoly._trusted(t)
        try:
            phin = poly_exact_divide(rhs, _UU1)
        except ArithmeticError as exc:
            raise IdentityError(f"order {n}: right-hand side not divisible by u^2 - u") from exc
        if not phin.is_integral() or not phin.is_nonnegative():
            raise IdentityError(f"order {n}: n! phi_n = {phin} is not a nonnegative integer polynomial")
        phi.append(list(phin.coeffs))
        row[1] = phi[n]
        bell.append(row)


class _RecurrenceSolver:
    """Quadratic recurrence from differentiating the functional equation.

    ``Phi_{n+1} = Phi_n + u * sum_{h=2}^{n} C(n, h) Phi_h Phi_{n+1-h}``.
    """

    def __init__(self):
        self.phi: list[list[int]] = [[], [1]]
        self.lock = threading.Lock()

    def extend(self, N: int) -> None:
        with self.lock:
            phi = self.phi
            while len(phi) <= N:
                n = len(phi) - 1
                acc: list[int] = []
                for h in range(2, n + 1):
                    _add_scaled(acc, _int_convolve(phi[h], phi[n + 1 - h]), math.comb(n, h))
                nxt = [0] + acc
                _add_scaled(nxt, phi[n], 1)
                while nxt and not nxt[-1]:
                    nxt.pop()
                phi.append(nxt)


_SOLVERS = {"reference": _ReferenceSolver(), "recurrence": _RecurrenceSolver()}


def solve_phi(N: int, method: str = "reference") -> ZSeries:
    """Solve ``(1+phi)^u = u^2 phi - u(u-1) z + 1`` modulo ``z^(N+1)``.

    Returns the EGF series whose coefficient ``n`` is ``n! [z^n] phi``, the
    Poincare polynomial of ``M_{0,n+1}``.  Solved coefficients are memoised, so
    a later call with a larger ``N`` resumes where the previous one stopped.

    ``method="reference"`` is the order-by-order substitution with an exact
    division by ``u^2 - u`` at every step; ``method="recurrence"`` is a faster
    quadratic recurrence, checked against the reference in the test suite.
    """
    if N < 1:
        raise ValueError("order must be at least 1")
    try:
        solver = _SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    solver.extend(N)
    return ZSeries([UPoly._trusted(list(p)) for p in solver.phi[:N + 1]], N, Scaling.EGF)


def _phi_for(order: int, phi: ZSeries | None) -> ZSeries:
    if phi is None:
        return solve_phi(order)
    if phi.scaling is not Scaling.EGF:
        raise ValueError("phi must be in EGF scaling")
    if phi.order < order:
        raise ValueError(f"phi is solved to order {phi.order}, need {order}")
    return phi


def _right_side(phi: ZSeries) -> ZSeries:
    """``u^2 phi - u(u-1) z + 1``."""
    N, s = phi.order, phi.scaling
    return phi * (U * U) - ZSeries.z(N, s) * _UU1 + ZSeries.one(N, s)


def functional_residual(phi: ZSeries, method: str = "recurrence") -> ZSeries:
    """``(1+phi)^u - u^2 phi + u(u-1) z - 1``; identically zero for the true ``phi``."""
    return series_binomial_power(phi, "u", method=method) - _right_side(phi)


def betti_m0n(n: int, phi: ZSeries | None = None) -> BettiTable:
    """Betti numbers of ``M_{0,n}`` for ``n >= 3`` (degree ``n - 3``)."""
    if n < 3:
        raise ValueError("M_{0,n} needs n >= 3")
    phi = _phi_for(n - 1, phi)
    p = phi[n - 1]
    if not p.is_integral() or not p.is_nonnegative():
        raise TableValidationError(f"M0n n={n}: coefficient {p} is not a nonnegative integer polynomial")
    return BettiTable.from_poly(Space.M0n, n, p)


def betti_m0n1(n: int, phi: ZSeries | None = None) -> BettiTable:
    """``M_{0,n+1}`` filed under ``n`` (series coefficient ``n``, degree ``n - 2``)."""
    if n < 2:
        raise ValueError("M_{0,n+1} needs n >= 2")
    t = betti_m0n(n + 1, phi)
    return BettiTable(Space.M0n1, n, t.betti)


def m0n_tables(N: int, phi: ZSeries | None = None) -> list[BettiTable]:
    """Tables for ``M_{0,n}``, ``3 <= n <= N``."""
    phi = _phi_for(max(N - 1, 1), phi)
    return [betti_m0n(n, phi) for n in range(3, N + 1)]


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of an exact identity check; truthy when the identity holds."""

    name: str
    n: int
    ok: bool
    lhs: UPoly
    rhs: UPoly

    def __bool__(self) -> bool:
        return self.ok

    def diff(self) -> str:
        if self.ok:
            return ""
        d = self.lhs - self.rhs
        first = next(k for k, c in enumerate(d.coeffs) if c)
        return f"{self.name} fails at n={self.n}: lhs - rhs = {d} (first nonzero coefficient u^{first})"


def _fm_from_phi(phi: ZSeries, n: int) -> UPoly:
    # psi_n = (1+u)^2 phi_n + (n-2)/n u(1+u) phi_{n-1} in [z^n] terms; EGF-scaled below
    out = phi[n] * ((U + 1) * (U + 1))
    if n >= 2:
        out = out + (phi[n - 1] * (U * (U + 1))).scale(n - 2)
    return out


def verify_fm_identity(phi: ZSeries, psi: ZSeries, n: int) -> IdentityReport:
    """Check ``psi_n = (1+u)^2 phi_n + (n-2)/n u(1+u) phi_{n-1}`` exactly."""
    if n < 2:
        raise ValueError("identity is stated for n >= 2")
    if phi.scaling is not Scaling.EGF or psi.scaling is not Scaling.EGF:
        raise ValueError("phi and psi must be EGF series")
    lhs = psi[n]
    rhs = _fm_from_phi(phi, n)
    return IdentityReport("fm-identity", n, lhs == rhs, lhs, rhs)


def solve_psi(N: int, phi: ZSeries | None = None) -> ZSeries:
    """``psi = (1+phi)^(u+1)`` modulo ``z^(N+1)``, in EGF scaling.

    Computed twice, as the binomial power and as the product
    ``(1+phi)(u^2 phi - u(u-1) z + 1)``; raises :class:`IdentityError` if the
    two disagree anywhere.
    """
    if N < 0:
        raise ValueError("order must be nonnegative")
    phi = _phi_for(max(N, 1), phi).truncate(max(N, 1))
    power = series_binomial_power(phi, "u+1")
    product = (phi + ZSeries.one(phi.order, Scaling.EGF)) * _right_side(phi)
    for n in range(phi.order + 1):
        if power[n] != product[n]:
            raise IdentityError(f"psi_{n}: (1+phi)^(u+1) = {power[n]} but (1+phi)(...) = {product[n]}")
    return power.truncate(N)


def betti_fm(n: int, psi: ZSeries | None = None) -> BettiTable:
    """Betti numbers of ``P^1[n]`` for ``n >= 1`` (degree ``n``)."""
    if n < 1:
        raise ValueError("P^1[n] needs n >= 1")
    if psi is None:
        psi = solve_psi(n)
    p = psi[n]
    if not p.is_integral() or not p.is_nonnegative():
        raise TableValidationError(f"FM n={n}: coefficient {p} is not a nonnegative integer polynomial")
    return BettiTable.from_poly(Space.FM, n, p)


def fm_tables(N: int, psi: ZSeries | None = None) -> list[BettiTable]:
    if psi is None:
        psi = solve_psi(N)
    return [betti_fm(n, psi) for n in range(1, N + 1)]
