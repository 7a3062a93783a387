"""Exact variances against the closed-form constants, and where they come from.

Run: python3 demos/variance_constants.py
"""

# %%
import math

from moduli_betti import asymptotics as asy
from moduli_betti.moduli import betti_fm, betti_m0n
from moduli_betti.statistics import moments

for fam in ("M0n", "FM"):
    f = asy.moment_formulas(fam)
    print(f"{fam:4s} mean ~ {f.mean_slope!r} n + {f.mean_offset!r}")
    print(f"     variance ~ {float(f.var_slope):.8f} n + {float(f.var_offset):.8f}")
print(f"(3 - e) / (6 (e - 2)) = {(3 - math.e) / (6 * (math.e - 2)):.8f}")

# %% the 1/n residual shrinks; n times the residual stays bounded
print(f"{'n':>4} {'M0n resid':>12} {'n*resid':>9} {'FM resid':>12} {'n*resid':>9}")
for n in (10, 20, 40, 80, 120):
    rm = float(moments(betti_m0n(n))[1]) - asy.formula_moments("M0n", n)[1]
    rf = float(moments(betti_fm(n))[1]) - asy.formula_moments("FM", n)[1]
    print(f"{n:4d} {rm:12.3e} {n * rm:9.4f} {rf:12.3e} {n * rf:9.4f}")

# %% the singularity rho(u) = u^(1/(u-1)) - (u+1)/u has its smallest modulus at u = 1
scan = asy.rho_modulus_scan(2048, 0.1)
print(f"|rho| on the unit circle: min {scan.min_value:.10f} at theta {scan.min_theta}; e - 2 = {math.e - 2:.10f}")
print(f"outside |theta| < {scan.exclusion_radius}: min {scan.boundary_min:.6f}, ratio K = {scan.K:.6f}")

# %% coefficient asymptotics at u = 1
for n in (10, 20, 40, 80):
    r = asy.exact_coefficient(n, 1) / asy.coeff_asymptotic(n, 1)
    print(f"n={n:3d}: exact / asymptotic = {float(r):.6f}")
