"""Exact Betti numbers of M_{0,n}, P^1[n] and comparison spaces, with Gaussian-limit diagnostics."""

from .moduli import betti_fm, betti_m0n, betti_m0n1, fm_tables, m0n_tables, solve_phi, solve_psi
from .series import UPoly, ZSeries, series_reversion
from .statistics import distribution, ks_distance, local_limit_error, middle_betti_rel_error, moments
from .tables import BettiTable, Space

__all__ = [
    "BettiTable",
    "Space",
    "UPoly",
    "ZSeries",
    "solve_phi",
    "solve_psi",
    "series_reversion",
    "betti_m0n",
    "betti_m0n1",
    "betti_fm",
    "m0n_tables",
    "fm_tables",
    "distribution",
    "moments",
    "ks_distance",
    "local_limit_error",
    "middle_betti_rel_error",
]

__version__ = "0.1.0"
