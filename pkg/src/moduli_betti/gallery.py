"""Comparison families: Hilbert schemes of points on a surface, GIT quotients of (P^1)^n, flag varieties."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .series import _int_convolve
from .tables import BettiTable, Space

__all__ = [
    "SurfaceBetti",
    "PRESETS",
    "surface",
    "hilb_series",
    "git_betti",
    "flag_betti",
    "gallery_diagnose",
]


@dataclass(frozen=True)
class SurfaceBetti:
    """Even-degree Betti numbers ``b_i = dim H^{2i}(S)``, ``i = 0, 1, 2``."""

    b0: int
    b1: int
    b2: int
    name: str = ""

    def __post_init__(self):
        for v in (self.b0, self.b1, self.b2):
            if type(v) is not int or v < 0:
                raise ValueError(f"surface Betti numbers must be nonnegative integers, got {v!r}")
        if self.b0 != 1:
            raise ValueError("b0 of a connected surface is 1")

    @property
    def label(self) -> str:
        return self.name or f"{self.b0}-{self.b1}-{self.b2}"


PRESETS = {
    "P2": SurfaceBetti(1, 1, 1, "P2"),
    "P1xP1": SurfaceBetti(1, 2, 1, "P1xP1"),
    "A2": SurfaceBetti(1, 0, 0, "A2"),
}


def surface(name: str) -> SurfaceBetti:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown surface {name!r}; choose from {', '.join(PRESETS)}") from None


def hilb_series(s: SurfaceBetti, N: int) -> list[BettiTable]:
    """Tables of ``Hilb^n(S)``, ``n = 0..N``, from Goettsche's product.

    ``sum_n P(Hilb^n S) z^n = prod_m prod_i (1 - u^{m-1+i} z^m)^{-b_i}``; only
    ``m <= N`` can reach ``z^N``.  Each factor ``1/(1 - u^a z^m)`` is applied
    in place as ``c_n += u^a c_{n-m}`` ascending in ``n``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    coeffs: list[list[int]] = [[1]] + [[] for _ in range(N)]
    for m in range(1, N + 1):
        for i, mult in enumerate((s.b0, s.b1, s.b2)):
            a = m - 1 + i
            for _ in range(mult):
                for n in range(m, N + 1):
                    src = coeffs[n - m]
                    if not src:
                        continue
                    dst = coeffs[n]
                    need = a + len(src)
                    if len(dst) < need:
                        dst.extend([0] * (need - len(dst)))
                    for j, c in enumerate(src):
                        dst[a + j] += c
    out = []
    for n, c in enumerate(coeffs):
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        out.append(BettiTable(Space.Hilb, n, tuple(c)))
    return out


def git_betti(n: int) -> BettiTable:
    """``(P^1)^n // SL_2`` for odd ``n >= 5``: ``b_k = sum_{j <= min(k, n-3-k)} C(n-1, j)``."""
    if n < 5:
        raise ValueError("GIT quotient needs n >= 5")
    if n % 2 == 0:
        raise ValueError(f"n={n} is even: strictly semistable points, no formula")
    b = tuple(sum(math.comb(n - 1, j) for j in range(min(k, n - 3 - k) + 1)) for k in range(n - 2))
    return BettiTable(Space.GIT, n, b)


def flag_betti(n: int) -> BettiTable:
    """Complete flag variety of ``C^n``: ``prod_{k<=n} (1 + u + ... + u^{k-1})``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = [1]
    for k in range(2, n + 1):
        p = _int_convolve(p, [1] * k)
    return BettiTable(Space.Flag, n, tuple(p))


def gallery_diagnose(
    hilb: Iterable[tuple[SurfaceBetti, int]] = (),
    git: Iterable[int] = (),
    flag: Iterable[int] = (),
    **kwargs,
):
    """Diagnostics rows for each requested member of the three families.

    ``hilb`` takes ``(surface, n)`` pairs.  Keyword arguments go to
    :func:`statistics.diagnose`.
    """
    from .statistics import diagnose

    kwargs.setdefault("ulc_r", None)
    rows = []
    by_surface: dict[SurfaceBetti, list[int]] = {}
    for s, n in hilb:
        by_surface.setdefault(s, []).append(n)
    for s, ns in by_surface.items():
        tables = hilb_series(s, max(ns))
        rows.extend(diagnose(tables[n], **kwargs) for n in ns)
    rows.extend(diagnose(git_betti(n), **kwargs) for n in git)
    rows.extend(diagnose(flag_betti(n), **kwargs) for n in flag)
    return rows
