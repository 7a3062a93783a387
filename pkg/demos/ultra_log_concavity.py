"""How ultra-log-concave are the central Betti numbers?

For each n this finds the largest r that holds across the window
|k - d/2| <= sqrt(n).  Large-n theory predicts about 1/(4v) = 3.82; M_{0,n}
reaches 3 early, while P^1[n] only gets there from about n = 25.

Run: python3 demos/ultra_log_concavity.py
"""

# %%
from moduli_betti.logconcavity import central_window_ulc
from moduli_betti.moduli import betti_fm, betti_m0n


def window_r(table, cap=8):
    best = -1
    for r in range(cap + 1):
        if not central_window_ulc(table, r):
            break
        best = r
    return best


print(f"{'n':>4} {'M0n':>4} {'FM':>4}")
for n in range(10, 61, 5):
    print(f"{n:4d} {window_r(betti_m0n(n)):4d} {window_r(betti_fm(n)):4d}")

# %% the first n from which P^1[n] stays 3-ULC on its window
onset = next(n for n in range(10, 61) if all(central_window_ulc(betti_fm(m), 3) for m in range(n, 61)))
print(f"P^1[n] is 3-ULC on the central window for every n in [{onset}, 60]")
