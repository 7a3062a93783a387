"""Normalized Betti numbers of M_{0,50} next to the Gaussian density.

Run: python3 demos/m0n_normal_fit.py [out.csv]
Writes the plot data as CSV and, if matplotlib is installed, a PNG beside it.
"""

# %%
import sys
from pathlib import Path

from moduli_betti import asymptotics as asy
from moduli_betti.moduli import betti_m0n
from moduli_betti.statistics import distribution, ks_distance, local_limit_error, plot_data, plot_data_csv

n = 50
table = betti_m0n(n)
d = distribution(table)
print(f"M_(0,{n}): {len(table.betti)} Betti numbers, Euler characteristic {sum(table.betti)}")
print(f"exact mean {d.mean} and variance {float(d.variance):.6f}")
print(f"formula mean and variance {asy.formula_moments('M0n', n)}")

# %% how close to normal is it?
print(f"Kolmogorov-Smirnov distance {ks_distance(d):.5f}")
print(f"local-limit error within 2 sigma {local_limit_error(d):.5f}")

# %% plot data
rows = plot_data(table)
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("m0n_50_plot.csv")
out.write_text(plot_data_csv(rows))
print(f"wrote {len(rows)} rows to {out}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    k, p, g = zip(*rows)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(k, [float(x) for x in p], width=0.8, alpha=0.6, label="normalized Betti numbers")
    ax.plot(k, g, "k-", lw=1.2, label="normal density")
    ax.set_xlabel("k")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out.with_suffix(".png"), dpi=120)
    print(f"wrote {out.with_suffix('.png')}")
