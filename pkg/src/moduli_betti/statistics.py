"""A Betti table as a lattice probability distribution, and its distance to normal.

Probabilities stay exact (``Fraction``) until the final comparison with the
Gaussian, where they are converted to float once.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .asymptotics import formula_moments
from .tables import BettiTable, Space

__all__ = [
    "BettiDistribution",
    "DiagnosticsReport",
    "distribution",
    "moments",
    "normal_cdf",
    "normal_pdf",
    "ks_distance",
    "local_limit_error",
    "middle_betti_rel_error",
    "plot_data",
    "plot_data_csv",
    "diagnose",
    "reports_to_csv",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_FORMULA_SPACES = (Space.M0n, Space.FM)


def moments(table: BettiTable) -> tuple[Fraction, Fraction]:
    """Exact mean ``f'(1)`` and variance ``f''(1) + f'(1) - f'(1)^2`` of ``f = P/chi``."""
    if not table.betti:
        raise ValueError("empty table")
    p = table.poly()
    chi = table.euler_characteristic
    if chi <= 0:
        raise ValueError("Euler characteristic must be positive")
    d1 = Fraction(p.derivative()(1), chi)
    d2 = Fraction(p.derivative().derivative()(1), chi)
    return d1, d2 + d1 - d1 * d1


@dataclass(frozen=True)
class BettiDistribution:
    table: BettiTable
    probs: tuple[Fraction, ...]
    mean: Fraction
    variance: Fraction

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def standardization(self, mode: str = "exact") -> tuple[float, float]:
        """``(mean, sigma)`` from the exact moments or from the closed-form predictions."""
        if mode == "exact":
            return float(self.mean), self.sigma
        if mode == "formula":
            if self.table.space not in _FORMULA_SPACES:
                raise ValueError(f"no closed-form moments for {self.table.space.value}")
            m, v = formula_moments(self.table.space, self.table.n)
            return m, math.sqrt(v)
        raise ValueError(f"unknown moment mode {mode!r}")


def distribution(table: BettiTable) -> BettiDistribution:
    chi = table.euler_characteristic
    mean, var = moments(table)
    return BettiDistribution(table, tuple(Fraction(b, chi) for b in table.betti), mean, var)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _as_dist(d) -> BettiDistribution:
    return d if isinstance(d, BettiDistribution) else distribution(d)


def _require_spread(dist: BettiDistribution) -> None:
    if dist.variance <= 0:
        raise ValueError(f"{dist.table.space.value} n={dist.table.n}: zero variance, no standardization")


def ks_distance(dist, mode: str = "exact") -> float:
    """``sup_x |F_n(x) - Phi((x - m)/sigma)|`` for the lattice distribution.

    The supremum of a step function against a continuous CDF is attained at a
    jump, so both one-sided limits are compared at every lattice point.
    """
    dist = _as_dist(dist)
    _require_spread(dist)
    m, s = dist.standardization(mode)
    cum = Fraction(0)
    best = 0.0
    for k, p in enumerate(dist.probs):
        g = normal_cdf((k - m) / s)
        left = float(cum)
        cum += p
        best = max(best, abs(left - g), abs(float(cum) - g))
    return best


def local_limit_error(dist, window_halfwidth_sigmas: float = 2.0, mode: str = "exact") -> float:
    """``max |sigma p_k - gauss((k - m)/sigma)|`` over ``k = floor(m + x sigma)``, ``|x| <= w``."""
    dist = _as_dist(dist)
    _require_spread(dist)
    m, s = dist.standardization(mode)
    lo = max(0, math.floor(m - window_halfwidth_sigmas * s))
    hi = min(len(dist.probs) - 1, math.floor(m + window_halfwidth_sigmas * s))
    err = 0.0
    for k in range(lo, hi + 1):
        err = max(err, abs(s * float(dist.probs[k]) - normal_pdf((k - m) / s)))
    return err


def middle_betti_rel_error(n: int, table: BettiTable | None = None, mode: str = "formula") -> float:
    """Relative error of the Gaussian estimate for the middle Betti number of ``M_{0,n}``.

    The middle index is ``k = floor((n-3)/2)``.  With ``mode="formula"`` the
    estimate uses the closed-form mean and variance, ``mode="exact"`` the
    table's own moments.
    """
    if n < 10:
        raise ValueError("middle Betti comparison needs n >= 10")
    if table is None:
        from .moduli import betti_m0n

        table = betti_m0n(n)
    if table.space is not Space.M0n or table.n != n:
        raise ValueError("expected the M0n table for the same n")
    dist = distribution(table)
    m, s = dist.standardization(mode)
    k = (n - 3) // 2
    observed = float(dist.probs[k])
    estimate = normal_pdf((k - m) / s) / s
    return abs(observed - estimate) / observed


def plot_data(dist) -> list[tuple[int, float, float]]:
    """Rows ``(k, b_k/chi, gaussian density)`` using the table's own mean and variance."""
    dist = _as_dist(dist)
    _require_spread(dist)
    m, s = float(dist.mean), dist.sigma
    return [(k, float(p), normal_pdf((k - m) / s) / s) for k, p in enumerate(dist.probs)]


def plot_data_csv(rows: Sequence[tuple[int, float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "normalized_betti", "gaussian_density"])
    for k, p, g in rows:
        w.writerow([k, repr(p), repr(g)])
    return buf.getvalue()


@dataclass(frozen=True)
class DiagnosticsReport:
    n: int
    space: str
    mean: float
    variance: float
    ks: float
    lle: float
    mid_rel_err: float | None = None
    log_concave: bool | None = None
    ulc_r: int | None = None
    ulc_holds: bool | None = None
    ulc_first_violation: int | None = None
    var_residual: float | None = None


def diagnose(
    table: BettiTable,
    *,
    window_halfwidth_sigmas: float = 2.0,
    ulc_r: int | None = 3,
    window_c: float = 1.0,
    moments_mode: str = "exact",
) -> DiagnosticsReport:
    """All per-table diagnostics in one row.

    ``var_residual`` is ``n * (exact variance - closed-form variance)`` for the
    families that have a closed form.  The ULC columns are filled for M0n and
    FM tables only.
    """
    from .logconcavity import central_window_ulc, is_log_concave

    dist = distribution(table)
    mid = None
    resid = None
    lc_ok = is_log_concave(table.betti).holds
    holds = first = None
    if table.space in _FORMULA_SPACES:
        _, fvar = formula_moments(table.space, table.n)
        resid = table.n * (float(dist.variance) - fvar)
        if ulc_r is not None:
            v = central_window_ulc(table, ulc_r, window_c)
            holds, first = v.holds, v.first_violation
        if table.space is Space.M0n and table.n >= 10:
            mid = middle_betti_rel_error(table.n, table)
    return DiagnosticsReport(
        n=table.n,
        space=table.space.value,
        mean=float(dist.mean),
        variance=float(dist.variance),
        ks=ks_distance(dist, moments_mode),
        lle=local_limit_error(dist, window_halfwidth_sigmas, moments_mode),
        mid_rel_err=mid,
        log_concave=lc_ok,
        ulc_r=ulc_r if holds is not None else None,
        ulc_holds=holds,
        ulc_first_violation=first,
        var_residual=resid,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def reports_to_csv(reports: Iterable[DiagnosticsReport], label: str | None = None) -> str:
    """CSV with header ``n,space,mean,variance,ks,lle,mid_rel_err,...``."""
    names = [f.name for f in fields(DiagnosticsReport)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in reports:
        w.writerow([_fmt(getattr(r, k)) for k in names])
    return buf.getvalue()
