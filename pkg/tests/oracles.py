"""Reference values computed once with mpmath (30 digits) from the closed-form plateau.

b(t) = exp(-1 / ((t - 1/2)(3/2 - t))), rho_1(x) = int_|x|^{3/2} b / int_{1/2}^{3/2} b.
Moments use integration by parts; the L2 norm nests two quadratures.
"""

import numpy as np

TRANSITION_NORMALISER = 0.007029858406609656239241271
RHO1_MOMENT0 = 2.0
RHO1_MOMENT2 = 0.7049151266944135817467176
RHO1_NORM_SQ = 1.841929846853457460683311
KAPPA0_AT_ZERO = 1.276215704994075495413874


def richardson_derivative(f, k: int, h: float = 0.02, levels: int = 3):
    """k-th derivative at 0 from central binomial differences, Richardson-extrapolated in h^2."""
    from math import comb

    def central(step):
        x = (np.arange(k + 1) - k / 2.0) * step
        coeffs = np.array([(-1) ** (k - j) * comb(k, j) for j in range(k + 1)], dtype=float)
        return (coeffs @ np.asarray(f(x))) / step**k

    table = [central(h / 2**i) for i in range(levels)]
    for m in range(1, levels):
        table = [(4**m * b - a) / (4**m - 1) for a, b in zip(table, table[1:])]
    return table[0]
