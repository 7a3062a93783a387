"""Which families look normal?  KS distances across the comparison gallery.

Run: python3 demos/gallery_contrast.py
"""

# %%
from moduli_betti.gallery import flag_betti, git_betti, hilb_series, surface
from moduli_betti.moduli import betti_fm, betti_m0n
from moduli_betti.statistics import ks_distance

ns = (11, 21, 31, 41)
hilb = hilb_series(surface("P2"), max(ns))
series = {
    "M0n": [betti_m0n(n) for n in ns],
    "FM": [betti_fm(n) for n in ns],
    "Hilb(P2)": [hilb[n] for n in ns],
    "GIT": [git_betti(n) for n in ns],
    "Flag": [flag_betti(n) for n in ns],
}
print(f"{'family':10s}" + "".join(f"{'n=' + str(n):>10s}" for n in ns))
for name, tabs in series.items():
    print(f"{name:10s}" + "".join(f"{ks_distance(t):10.4f}" for t in tabs))

# %% GIT quotients keep a flat top: the distance never settles toward zero
print("GIT b_k for n = 11:", git_betti(11).betti)
