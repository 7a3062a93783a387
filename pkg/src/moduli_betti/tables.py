"""Betti tables and their JSON record form.

A record is ``{"space": str, "n": int, "betti": [decimal strings]}``.  Betti
numbers pass through JSON as strings because they leave the 64-bit range
around ``n = 25``.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass
from typing import Iterable

from .series import UPoly

__all__ = ["Space", "BettiTable", "PalindromeWarning", "TableValidationError", "euler_char"]


class Space(str, enum.Enum):
    M0n = "M0n"
    M0n1 = "M0n1"
    FM = "FM"
    M0nQuot = "M0nQuot"
    M0n1Quot = "M0n1Quot"
    FMQuot = "FMQuot"
    Hilb = "Hilb"
    GIT = "GIT"
    Flag = "Flag"

    @property
    def is_quotient(self) -> bool:
        return self in (Space.M0nQuot, Space.M0n1Quot, Space.FMQuot)


class TableValidationError(ValueError):
    pass


class PalindromeWarning(UserWarning):
    pass


def _expected_degree(space: Space, n: int) -> int | None:
    if space is Space.M0n or space is Space.GIT:
        return n - 3
    if space is Space.M0n1:
        return n - 2
    if space is Space.FM:
        return n
    if space is Space.Flag:
        return n * (n - 1) // 2
    return None


@dataclass(frozen=True)
class BettiTable:
    """Even-degree Betti numbers ``b_0..b_d`` of one space."""

    space: Space
    n: int
    betti: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "space", Space(self.space))
        betti = tuple(self.betti)
        if not betti:
            raise TableValidationError(f"{self.space.value} n={self.n}: empty Betti table")
        for k, b in enumerate(betti):
            if type(b) is not int:
                raise TableValidationError(f"{self.space.value} n={self.n}: b_{k}={b!r} is not an integer")
            if b < 0:
                raise TableValidationError(f"{self.space.value} n={self.n}: b_{k}={b} is negative")
        if betti[0] != 1:
            raise TableValidationError(f"{self.space.value} n={self.n}: b_0={betti[0]}, expected 1")
        object.__setattr__(self, "betti", betti)

    @classmethod
    def from_poly(cls, space: Space, n: int, p: UPoly) -> "BettiTable":
        if not p.is_integral():
            raise TableValidationError(f"{Space(space).value} n={n}: non-integer coefficient in {p}")
        return cls(space, n, p.to_ints())

    @property
    def degree(self) -> int:
        return len(self.betti) - 1

    @property
    def euler_characteristic(self) -> int:
        return sum(self.betti)

    def poly(self) -> UPoly:
        return UPoly(self.betti)

    def is_palindromic(self) -> bool:
        return self.betti == self.betti[::-1]

    def is_positive(self) -> bool:
        return all(b > 0 for b in self.betti)

    def check_duality(self) -> None:
        """Check degree and Poincare duality where the space guarantees them.

        Quotient tables only warn; Hilbert schemes are skipped here because the
        answer depends on the surface.
        """
        d = _expected_degree(self.space, self.n)
        if d is not None and self.degree != d:
            raise TableValidationError(f"{self.space.value} n={self.n}: degree {self.degree}, expected {d}")
        if self.is_palindromic() or self.space is Space.Hilb:
            return
        msg = f"{self.space.value} n={self.n}: Betti table is not palindromic"
        if self.space.is_quotient:
            warnings.warn(msg, PalindromeWarning, stacklevel=2)
        else:
            raise TableValidationError(msg)

    def to_record(self) -> dict:
        return {"space": self.space.value, "n": self.n, "betti": [str(b) for b in self.betti]}

    @classmethod
    def from_record(cls, rec: dict) -> "BettiTable":
        if not isinstance(rec, dict):
            raise TableValidationError(f"expected a JSON object, got {type(rec).__name__}")
        missing = {"space", "n", "betti"} - rec.keys()
        if missing:
            raise TableValidationError(f"record lacks field(s) {sorted(missing)}")
        extra = rec.keys() - {"space", "n", "betti"}
        if extra:
            raise TableValidationError(f"record has unknown field(s) {sorted(extra)}")
        try:
            space = Space(rec["space"])
        except ValueError:
            raise TableValidationError(f"unknown space {rec['space']!r}") from None
        n = rec["n"]
        if type(n) is not int:
            raise TableValidationError(f"n must be an integer, got {n!r}")
        raw = rec["betti"]
        if not isinstance(raw, list):
            raise TableValidationError("betti must be an array of decimal strings")
        betti = []
        for k, s in enumerate(raw):
            if not isinstance(s, str) or not s.lstrip("-").isdigit() or not s.isascii():
                raise TableValidationError(f"b_{k}={s!r} is not a decimal string")
            betti.append(int(s))
        return cls(space, n, tuple(betti))

    def dumps(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def loads(cls, text: str) -> "BettiTable":
        return cls.from_record(json.loads(text))


def euler_char(table: BettiTable) -> int:
    return table.euler_characteristic


def tables_to_json(tables: Iterable[BettiTable]) -> str:
    """One record per line inside a JSON array; the canonical file form."""
    lines = [t.dumps() for t in tables]
    if not lines:
        return "[]\n"
    return "[\n" + ",\n".join(lines) + "\n]\n"
