"""Frozen reference values, produced once by an independent route and pasted here.

M0n / FM: the inverse relation z(phi) was reversed as a univariate series at
each integer u = 2..11 with sympy, psi taken as (1+phi)^(u+1), and the
Poincare polynomials recovered by interpolation in u.  Hilb: sympy expansion
of the truncated Goettsche product.  None of this code is imported by the tests.
"""

M0N_TABLES = {
    3: (1,),
    4: (1, 1),
    5: (1, 5, 1),
    6: (1, 16, 16, 1),
    7: (1, 42, 127, 42, 1),
    8: (1, 99, 715, 715, 99, 1),
    9: (1, 219, 3292, 7723, 3292, 219, 1),
    10: (1, 466, 13333, 63173, 63173, 13333, 466, 1),
}

FM_TABLES = {
    1: (1, 1),
    2: (1, 2, 1),
    3: (1, 4, 4, 1),
    4: (1, 9, 16, 9, 1),
    5: (1, 21, 67, 67, 21, 1),
    6: (1, 48, 280, 466, 280, 48, 1),
    7: (1, 106, 1129, 3089, 3089, 1129, 106, 1),
    8: (1, 227, 4331, 19410, 30610, 19410, 4331, 227, 1),
    9: (1, 475, 15806, 114882, 279957, 279957, 114882, 15806, 475, 1),
}

HILB_TABLES = {
    "P2": {
        1: (1, 1, 1),
        2: (1, 2, 3, 2, 1),
        3: (1, 2, 5, 6, 5, 2, 1),
        4: (1, 2, 6, 10, 13, 10, 6, 2, 1),
        5: (1, 2, 6, 12, 21, 24, 21, 12, 6, 2, 1),
    },
    "P1xP1": {
        1: (1, 2, 1),
        2: (1, 3, 6, 3, 1),
        3: (1, 3, 9, 14, 9, 3, 1),
        4: (1, 3, 10, 22, 33, 22, 10, 3, 1),
        5: (1, 3, 10, 25, 52, 70, 52, 25, 10, 3, 1),
    },
    "A2": {
        1: (1,),
        2: (1, 1),
        3: (1, 1, 1),
        4: (1, 1, 2, 1),
        5: (1, 1, 2, 2, 1),
    },
}
