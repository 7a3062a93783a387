"""Log-concavity and r-ultra-log-concavity, decided in exact integer arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .tables import BettiTable, Space

__all__ = [
    "LogConcavityVerdict",
    "UlcVerdict",
    "is_log_concave",
    "ulc_at",
    "central_window_ulc",
    "max_ulc_r",
    "ambient_degree",
]


@dataclass(frozen=True)
class LogConcavityVerdict:
    holds: bool
    first_violation: int | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class UlcVerdict:
    r: int
    ambient_n: int
    window: tuple[int, ...]
    holds: bool
    first_violation: int | None = None

    def __post_init__(self):
        if self.holds != (self.first_violation is None):
            raise ValueError("first_violation must be set exactly when the verdict fails")

    def __bool__(self) -> bool:
        return self.holds


def is_log_concave(seq: Sequence[int]) -> LogConcavityVerdict:
    for k in range(1, len(seq) - 1):
        if seq[k] * seq[k] < seq[k - 1] * seq[k + 1]:
            return LogConcavityVerdict(False, k)
    return LogConcavityVerdict(True)


def ulc_at(seq: Sequence[int], r: int, k: int, ambient_n: int) -> bool:
    """``(a_k/C(n,k)^r)^2 >= (a_{k-1}/C(n,k-1)^r)(a_{k+1}/C(n,k+1)^r)``.

    Cleared of denominators:
    ``a_k^2 (C(n,k-1) C(n,k+1))^r >= a_{k-1} a_{k+1} C(n,k)^(2r)``.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if not 1 <= k <= len(seq) - 2:
        raise IndexError(f"k={k} is not an interior index of a length-{len(seq)} sequence")
    if ambient_n < len(seq) - 1:
        raise ValueError(f"ambient n={ambient_n} is below the sequence degree {len(seq) - 1}")
    c_prev = math.comb(ambient_n, k - 1)
    c_mid = math.comb(ambient_n, k)
    c_next = math.comb(ambient_n, k + 1)
    return seq[k] ** 2 * (c_prev * c_next) ** r >= seq[k - 1] * seq[k + 1] * c_mid ** (2 * r)


def ambient_degree(table: BettiTable) -> int:
    if table.space is Space.M0n:
        return table.n - 3
    if table.space is Space.FM:
        return table.n
    raise ValueError(f"central-window ULC is defined for M0n and FM tables, not {table.space.value}")


def central_window_ulc(table: BettiTable, r: int, c: float = 1.0) -> UlcVerdict:
    """Check r-ULC on ``{k : |k - d/2| <= c sqrt(n)}`` clipped to interior indices, ambient ``d``."""
    d = ambient_degree(table)
    half = c * math.sqrt(table.n)
    lo = max(1, math.ceil(d / 2 - half))
    hi = min(d - 1, math.floor(d / 2 + half))
    window = tuple(range(lo, hi + 1))
    for k in window:
        if not ulc_at(table.betti, r, k, d):
            return UlcVerdict(r, d, window, False, k)
    return UlcVerdict(r, d, window, True)


def max_ulc_r(table: BettiTable, k: int, cap: int = 16) -> int:
    """Largest ``r <= cap`` passing at ``k``; a linear scan, since monotonicity in r is not assumed.

    Returns ``-1`` if even ``r = 0`` fails.
    """
    d = ambient_degree(table)
    best = -1
    for r in range(cap + 1):
        if ulc_at(table.betti, r, k, d):
            best = r
    return best
