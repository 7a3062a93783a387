"""Externally computed Betti tables of the S_n-quotients, and what can be checked about them.

Families, keyed by ``n``:

* ``M0nQuot``: ``M_{0,n} / S_n``
* ``M0n1Quot``: ``M_{0,n+1} / S_n``, written ``q_n``
* ``FMQuot``: ``P^1[n] / S_n``

With ``phibar = z + sum_{n>=2} q_n z^n`` (ordinary, not divided by ``n!``),
the generating function of ``P^1[n]/S_n`` is
``(1 + phibar)(u^2 phibar - u(u-1) z + 1)``.
"""

from __future__ import annotations

import csv
import io
import json
import statistics as _stats
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .moduli import IdentityReport
from .series import U, Scaling, UPoly, ZSeries
from .statistics import DiagnosticsReport, diagnose, ks_distance, moments
from .tables import BettiTable, Space, TableValidationError, tables_to_json

__all__ = [
    "FAMILIES",
    "IngestError",
    "MissingTableError",
    "QuotientDataset",
    "ConjectureReport",
    "ingest",
    "ingest_all",
    "serialize",
    "predict_fm_quotient",
    "cross_validate",
    "normalized_variance",
    "table1_report",
    "table1_csv",
    "conjecture_diagnostics",
]

FAMILIES = (Space.M0nQuot, Space.M0n1Quot, Space.FMQuot)


class IngestError(ValueError):
    """A quotient data file could not be accepted; the message names the line."""


class MissingTableError(LookupError):
    pass


@dataclass
class QuotientDataset:
    family: Space
    tables: dict[int, BettiTable] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self):
        self.family = Space(self.family)
        if self.family not in FAMILIES:
            raise ValueError(f"{self.family.value} is not a quotient family")
        for n, t in self.tables.items():
            if t.space is not self.family or t.n != n:
                raise ValueError(f"table {t.space.value} n={t.n} filed under {self.family.value} n={n}")

    def __getitem__(self, n: int) -> BettiTable:
        try:
            return self.tables[n]
        except KeyError:
            raise MissingTableError(f"{self.family.value}: no table for n={n}") from None

    def __contains__(self, n: int) -> bool:
        return n in self.tables

    def ns(self) -> list[int]:
        return sorted(self.tables)


def _records_with_lines(text: str, source: str):
    """Yield ``(line, record)`` for each element of a top-level JSON array."""
    dec = json.JSONDecoder()

    def line_of(pos: int) -> int:
        return text.count("\n", 0, pos) + 1

    def skip_ws(i: int) -> int:
        while i < len(text) and text[i] in " \t\r\n":
            i += 1
        return i

    i = skip_ws(0)
    if i >= len(text) or text[i] != "[":
        raise IngestError(f"{source}:{line_of(i)}: expected a JSON array of records")
    i = skip_ws(i + 1)
    if i < len(text) and text[i] == "]":
        tail = skip_ws(i + 1)
        if tail != len(text):
            raise IngestError(f"{source}:{line_of(tail)}: trailing data after the array")
        return
    while True:
        try:
            rec, end = dec.raw_decode(text, i)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{source}:{exc.lineno}: {exc.msg}") from None
        yield line_of(i), rec
        i = skip_ws(end)
        if i < len(text) and text[i] == ",":
            i = skip_ws(i + 1)
            continue
        if i < len(text) and text[i] == "]":
            tail = skip_ws(i + 1)
            if tail != len(text):
                raise IngestError(f"{source}:{line_of(tail)}: trailing data after the array")
            return
        raise IngestError(f"{source}:{line_of(i)}: expected ',' or ']'")


def _parse(text: str, source: str) -> dict[Space, QuotientDataset]:
    out: dict[Space, QuotientDataset] = {}
    for line, rec in _records_with_lines(text, source):
        try:
            t = BettiTable.from_record(rec)
        except TableValidationError as exc:
            raise IngestError(f"{source}:{line}: {exc}") from None
        if t.space not in FAMILIES:
            raise IngestError(f"{source}:{line}: space {t.space.value} is not a quotient family")
        if not t.is_positive():
            raise IngestError(f"{source}:{line}: {t.space.value} n={t.n} has a zero Betti number")
        ds = out.setdefault(t.space, QuotientDataset(t.space, provenance=source))
        if t.n in ds.tables:
            raise IngestError(f"{source}:{line}: duplicate n={t.n} for {t.space.value}")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            t.check_duality()
        for w in caught:
            warnings.warn(f"{source}:{line}: {w.message}", w.category, stacklevel=3)
        ds.tables[t.n] = t
    return out


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path}: not UTF-8 text ({exc.reason})") from None


def ingest_all(path) -> dict[Space, QuotientDataset]:
    """Every family present in one file.  ``OSError`` propagates unchanged."""
    return _parse(_read(path), str(path))


def ingest(path) -> QuotientDataset:
    """A single-family file as a validated dataset."""
    found = ingest_all(path)
    if len(found) > 1:
        names = ", ".join(f.value for f in found)
        raise IngestError(f"{path}: several families ({names}); use ingest_all")
    if not found:
        raise IngestError(f"{path}: no records")
    return next(iter(found.values()))


def serialize(ds: QuotientDataset) -> str:
    return tables_to_json(ds[n] for n in ds.ns())


def _q(q: QuotientDataset, h: int) -> UPoly:
    return UPoly.constant(1) if h == 1 else q[h].poly()


def _predict_product(q: QuotientDataset, n: int) -> UPoly:
    coeffs = [UPoly()] + [_q(q, h) for h in range(1, n + 1)]
    phibar = ZSeries(coeffs, n, Scaling.OGF)
    one = ZSeries.one(n, Scaling.OGF)
    z = ZSeries.z(n, Scaling.OGF)
    return ((one + phibar) * (phibar * (U * U) - z * (U * U - U) + one))[n]


def _predict_closed(q: QuotientDataset, n: int) -> UPoly:
    u2 = U * U
    if n == 2:
        # h = 1 meets h = n - 1 once only
        return (u2 + 1) * _q(q, 2) + U
    out = (u2 + 1) * _q(q, n) + (U * (U + 1)) * _q(q, n - 1)
    for h in range(2, n - 1):
        out = out + u2 * (_q(q, h) * _q(q, n - h))
    return out


def predict_fm_quotient(q: QuotientDataset, n: int) -> BettiTable:
    """``P^1[n]/S_n`` from the ``M_{0,n+1}/S_n`` tables, by two independent expansions.

    ``(1+u^2) q_n + u(1+u) q_{n-1} + u^2 sum_{h=2}^{n-2} q_h q_{n-h}`` for
    ``n >= 3``, with ``q_1 = 1``; at ``n = 2`` this is ``(1+u^2) q_2 + u``.
    """
    from .moduli import IdentityError

    if q.family is not Space.M0n1Quot:
        raise ValueError(f"prediction needs the M0n1Quot family, got {q.family.value}")
    if n < 2:
        raise MissingTableError(f"n={n} is below the smallest table index 2")
    missing = [h for h in range(2, n + 1) if h not in q]
    if missing:
        raise MissingTableError(f"M0n1Quot tables missing for n={missing}")
    a = _predict_product(q, n)
    b = _predict_closed(q, n)
    if a != b:
        raise IdentityError(f"FMQuot n={n}: series product {a} != closed form {b}")
    return BettiTable.from_poly(Space.FMQuot, n, a)


def cross_validate(q: QuotientDataset, fm: QuotientDataset) -> list[IdentityReport]:
    """Compare predictions with ingested ``P^1[n]/S_n`` tables wherever both exist."""
    if fm.family is not Space.FMQuot:
        raise ValueError("second dataset must be FMQuot")
    reports = []
    for n in fm.ns():
        if n < 2 or any(h not in q for h in range(2, n + 1)):
            continue
        pred = predict_fm_quotient(q, n).poly()
        obs = fm[n].poly()
        reports.append(IdentityReport("fm-quotient", n, pred == obs, obs, pred))
    return reports


def normalized_variance(table: BettiTable) -> Fraction:
    return moments(table)[1] / table.n


def _round10(x: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return format(d.quantize(Decimal("1e-10"), rounding=ROUND_HALF_EVEN), "f")


def table1_report(datasets: Mapping[Space, QuotientDataset], ns: Iterable[int] | None = None) -> list[tuple]:
    """Rows ``(n, sigma^2/n per family)``, each value a string with 10 decimals.

    Families are in the order M0nQuot, M0n1Quot, FMQuot; an absent family is
    an empty cell.  ``ns`` defaults to every n present in any family, with
    empty cells where a family lacks that n; an explicitly requested n must be
    present in every supplied family.
    """
    present = [datasets.get(f) for f in FAMILIES]
    strict = ns is not None
    if ns is None:
        ns = sorted({n for d in present if d is not None for n in d.ns()})
    rows = []
    for n in ns:
        row: list = [n]
        for d in present:
            if d is None or (not strict and n not in d):
                row.append("")
            else:
                row.append(_round10(normalized_variance(d[n])))
        rows.append(tuple(row))
    return rows


def table1_csv(rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [f.value for f in FAMILIES])
    w.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class ConjectureReport:
    """Per-family diagnostics and linear fits of the variance; a report, not a verdict."""

    rows: dict[Space, list[DiagnosticsReport]]
    slopes: dict[Space, float]
    intercepts: dict[Space, float]
    ks_decreasing: dict[Space, bool]

    @property
    def slope_spread(self) -> float:
        """``(max - min) / min`` over the fitted slopes."""
        vals = list(self.slopes.values())
        return (max(vals) - min(vals)) / min(vals)


def conjecture_diagnostics(datasets: Mapping[Space, QuotientDataset]) -> ConjectureReport:
    rows, slopes, icepts, trend = {}, {}, {}, {}
    for fam in FAMILIES:
        d = datasets.get(fam)
        if d is None:
            continue
        ns = d.ns()
        if len(ns) < 3:
            raise ValueError(f"{fam.value}: {len(ns)} value(s) of n, need at least 3 for a fit")
        rows[fam] = [diagnose(d[n], ulc_r=None) for n in ns]
        fit = _stats.linear_regression([float(n) for n in ns], [float(moments(d[n])[1]) for n in ns])
        slopes[fam], icepts[fam] = fit.slope, fit.intercept
        ks = [ks_distance(d[n]) for n in ns]
        trend[fam] = all(b < a for a, b in zip(ks, ks[1:]))
    if not rows:
        raise ValueError("no quotient data")
    return ConjectureReport(rows, slopes, icepts, trend)
