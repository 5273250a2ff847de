"""Seeded generators of random test functions.

Two named families are provided, both driven by ``numpy.random.default_rng``:

``mixed``
    One to four components. A central component is a polynomial
    sum_i a_i x^i/i! times a plateau bump whose plateau covers the origin,
    so its jet is (a_0, a_1, ...). Off-centre components are dilated,
    possibly differentiated bumps sitting at least one plateau width away
    from 0, so they contribute nothing to the jet.

``positive``
    Members of the positive part for truncation N: off-centre components
    plus central terms x^m rho_w with m > N, so the jet vanishes through N.

The same (name, seed, count, N) always yields the same functions.
"""

from __future__ import annotations

import numpy as np

from .funcrep import FunctionRep, derivative, dilate, plateau_bump, times_monomial, translate, zero

FAMILY_NAMES = ("mixed", "positive")


def _round(x: float) -> float:
    # short decimals keep the exact rational coefficients small
    return float(np.round(x, 6))


def _off_centre(rng: np.random.Generator) -> FunctionRep:
    width = _round(rng.uniform(0.1, 0.6))
    side = rng.choice([-1.0, 1.0])
    centre = side * _round(1.5 * width + rng.uniform(0.05, 2.0))
    f = dilate(plateau_bump(1.0), width)
    for _ in range(int(rng.integers(0, 3))):
        f = derivative(f) * width
    return translate(f, centre) * _round(rng.normal())


def _central(rng: np.random.Generator, degree: int) -> FunctionRep:
    width = _round(rng.uniform(0.2, 1.5))
    base = plateau_bump(width)
    f = zero()
    for i in range(degree + 1):
        a = _round(rng.normal() * 0.8**i)
        if a:
            f = f + times_monomial(base, i) * a
    return f


def random_test_function(rng: np.random.Generator, N: int = 6) -> FunctionRep:
    f = zero()
    if rng.random() < 0.85:
        f = f + _central(rng, int(rng.integers(0, N + 4)))
    for _ in range(int(rng.integers(0 if not f.is_zero else 1, 4))):
        f = f + _off_centre(rng)
    return f if not f.is_zero else plateau_bump(1.0)


def random_positive_function(rng: np.random.Generator, N: int = 6) -> FunctionRep:
    f = _off_centre(rng)
    for _ in range(int(rng.integers(0, 3))):
        f = f + _off_centre(rng)
    if rng.random() < 0.5:
        m = N + 1 + int(rng.integers(0, 3))
        width = _round(rng.uniform(0.2, 1.0))
        f = f + times_monomial(plateau_bump(width), m) * _round(rng.normal())
    return f


def family(name: str, seed: int, count: int, N: int = 6) -> list[FunctionRep]:
    if name not in FAMILY_NAMES:
        raise ValueError(f"unknown family {name!r}; choose from {FAMILY_NAMES}")
    rng = np.random.default_rng(seed)
    gen = random_test_function if name == "mixed" else random_positive_function
    return [gen(rng, N) for _ in range(count)]


def regression_family() -> list[FunctionRep]:
    """Fixed functions used for moment and operator regression checks."""
    rho1 = plateau_bump(1.0)
    return [
        rho1,
        times_monomial(rho1, 1),
        translate(rho1, 2) * 0.5,
        translate(dilate(rho1, 0.3), -1),
        derivative(translate(rho1, 3)),
        times_monomial(plateau_bump(0.4), 3) + translate(plateau_bump(0.25), 1.5),
        derivative(derivative(plateau_bump(0.7))),
    ]


def graded_jet_function(profile, degree: int = 12, width: float = 1e-3, ratio: float = 10.0,
                        sign_seed: int | None = None) -> FunctionRep:
    """Central bump with jet lambda_k chosen so that c_k^2 lambda_k^2 = ratio^-k.

    The truncation tail sum_{k > N} c_k^2 lambda_k^2 then shrinks like
    ratio^-(N+1), which makes it visible above quadrature noise at every N.
    """
    p = profile.with_truncation(degree)
    rng = np.random.default_rng(sign_seed) if sign_seed is not None else None
    base = plateau_bump(width)
    f = zero()
    for k in range(degree + 1):
        lam = ratio ** (-k / 2) / np.sqrt(p.c_sq[k])
        if rng is not None and rng.random() < 0.3:
            lam = -lam
        f = f + times_monomial(base, k) * float(lam)
    return f
