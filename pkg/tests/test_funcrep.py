import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinreg.bumps import kappa
from kreinreg.errors import EmptyCombination, QuadratureFailure, UnsupportedNode
from kreinreg.families import family, random_test_function
from kreinreg.funcrep import (
    FunctionRep, combine, derivative, dilate, evaluate, exact_jet, jet_at_zero, l2_inner, l2_inner_err,
    moment, moment_err, plateau_bump, pointwise_integral, times_monomial, times_x, translate, zero,
)
from kreinreg.quadrature import QuadratureSpec, integrate

from oracles import RHO1_MOMENT0, RHO1_MOMENT2, RHO1_NORM_SQ, richardson_derivative

seeds = st.integers(0, 2**31 - 1)
functions = seeds.map(lambda s: random_test_function(np.random.default_rng(s)))
reals = st.floats(-3, 3, allow_nan=False)


def test_plateau_values():
    r = plateau_bump(1.0)
    assert r(0.0) == 1.0
    assert r(2.0) == 0.0
    assert r(0.4) == 1.0 and r(-0.5) == 1.0
    assert r(1.5) == 0.0 and r(-1.6) == 0.0


@given(functions, functions, st.floats(-5, 5))
def test_sum_is_additive(f, g, x):
    assert (f + g)(x) == pytest.approx(f(x) + g(x), abs=1e-12)


@given(functions, seeds)
def test_vanishes_outside_support(f, seed):
    lo, hi = f.support
    rng = np.random.default_rng(seed)
    left = lo - rng.exponential(1.0, 32)
    right = hi + rng.exponential(1.0, 32)
    assert np.all(evaluate(f, np.concatenate([left, right])) == 0.0)


def test_jets_of_building_blocks():
    assert exact_jet(plateau_bump(0.3), 4) == (1, 0, 0, 0, 0)
    for i in range(6):
        jet = exact_jet(times_monomial(plateau_bump(0.5), i), 7)
        assert jet == tuple(Fraction(int(k == i)) for k in range(8))


def test_zero_function():
    z = zero()
    assert z.is_zero and z.support is None
    assert exact_jet(z, 3) == (0, 0, 0, 0)
    assert moment(z, 0) == 0.0
    assert l2_inner(z, plateau_bump(1.0)) == 0.0


def test_transition_band_jet_is_unsupported():
    with pytest.raises(UnsupportedNode):
        exact_jet(translate(plateau_bump(1.0), 1), 2)


@pytest.mark.parametrize("seed", range(6))
def test_jet_matches_richardson_differences(seed):
    rng = np.random.default_rng(100 + seed)
    f = random_test_function(rng)
    jet = jet_at_zero(f, 4)
    # f is a polynomial on |x| < d, so the stencil may be as wide as d allows
    d = min(
        float(t.eps) / 2 - abs(float(t.center)) if abs(t.center) < 1.5 * t.eps
        else abs(float(t.center)) - 1.5 * t.eps
        for t, _ in f.terms
    )
    for k in range(5):
        h = min(0.05, 1.8 * d / max(k, 1))
        fd = richardson_derivative(lambda x: evaluate(f, x), k, h=h)
        assert fd == pytest.approx(jet[k], rel=1e-6, abs=1e-6)


@given(functions, functions, reals, reals)
def test_jet_is_linear(f, g, a, b):
    a, b = Fraction(a), Fraction(b)
    lhs = exact_jet(f * a + g * b, 8)
    rhs = tuple(a * x + b * y for x, y in zip(exact_jet(f, 8), exact_jet(g, 8)))
    assert lhs == rhs


def test_l2_disjoint_and_kappa():
    a = translate(plateau_bump(0.2), -1)
    b = translate(plateau_bump(0.2), 1)
    assert l2_inner(a, b) == 0.0
    assert l2_inner(kappa(1).profile, kappa(2).profile) == 0.0


def test_rho1_norm_against_oracle():
    val = l2_inner(plateau_bump(1.0), plateau_bump(1.0))
    assert 1.0 <= val <= 3.0
    assert val == pytest.approx(RHO1_NORM_SQ, rel=1e-12)


def test_rho1_moments_against_oracle():
    r = plateau_bump(1.0)
    assert moment(r, 0) == pytest.approx(RHO1_MOMENT0, rel=1e-12)
    assert moment(r, 2) == pytest.approx(RHO1_MOMENT2, rel=1e-12)
    assert moment(r, 1) == 0.0
    assert moment(times_x(r), 2) == 0.0


@given(functions, functions)
def test_l2_symmetric(f, g):
    a = l2_inner_err(f, g)
    b = l2_inner_err(g, f)
    assert abs(a.value - b.value) <= 2 * (a.error + b.error) + 1e-13 * (1 + abs(a.value))


@given(functions, functions, functions, reals)
def test_l2_bilinear(f, g, h, s):
    lhs = l2_inner(f * s + g, h)
    rhs = s * l2_inner(f, h) + l2_inner(g, h)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-10)


@given(functions, functions)
def test_cauchy_schwarz(f, g):
    fg = l2_inner_err(f, g)
    ff = l2_inner_err(f, f)
    gg = l2_inner_err(g, g)
    assert fg.value**2 <= ff.value * gg.value + 4 * (fg.error + ff.error + gg.error) + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_l2_against_pointwise_oracle(seed):
    f, g = family("mixed", seed, 2)
    ref = pointwise_integral(f, lambda x: evaluate(g, x))
    assert l2_inner(f, g) == pytest.approx(ref.value, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("k", [0, 1, 3, 5])
def test_moments_against_pointwise_oracle(k):
    for f in family("mixed", 11, 4):
        ref = pointwise_integral(f, lambda x: x**k)
        assert moment(f, k) == pytest.approx(ref.value, rel=1e-8, abs=1e-10)


def test_moment_order_guard():
    with pytest.raises(ValueError):
        moment_err(plateau_bump(1.0), 99)


def test_combine():
    f = family("mixed", 3, 1)[0]
    assert combine([(1, f)]) == f
    assert combine([(1, f), (-1, f)]).is_zero
    assert np.all(evaluate(combine([(1, f), (-1, f)]), np.linspace(-4, 4, 33)) == 0)
    with pytest.raises(EmptyCombination):
        combine([])


@given(functions, functions, reals, reals)
def test_combine_jets_add(f, g, a, b):
    h = combine([(a, f), (b, g)])
    fa, fb = Fraction(a), Fraction(b)
    assert exact_jet(h, 6) == tuple(fa * x + fb * y for x, y in zip(exact_jet(f, 6), exact_jet(g, 6)))


@given(functions)
def test_derivative_matches_differences(f):
    x = np.linspace(-3, 3, 17)
    # step tied to the narrowest bump; one Richardson level removes the h^2 term
    h = 1e-4 * min(t.eps for t, _ in f.terms)
    d = lambda s: (evaluate(f, x + s) - evaluate(f, x - s)) / (2 * s)
    fd = (4 * d(h / 2) - d(h)) / 3
    scale = max(1.0, float(np.max(np.abs(fd))))
    assert np.max(np.abs(evaluate(derivative(f), x) - fd)) <= 1e-7 * scale


def test_dilate_and_translate_pointwise():
    f = times_monomial(plateau_bump(0.7), 2)
    x = np.linspace(-3, 3, 41)
    assert np.allclose(evaluate(dilate(f, 2.0), x), evaluate(f, x / 2.0), atol=1e-15)
    assert np.allclose(evaluate(translate(f, 1.5), x), evaluate(f, x - 1.5), atol=1e-15)


def test_structural_equality_and_hash():
    a = plateau_bump(0.5) + times_x(plateau_bump(0.5))
    b = times_x(plateau_bump(0.5)) + plateau_bump(0.5)
    assert a == b and hash(a) == hash(b)
    assert isinstance(a, FunctionRep)


def test_tiny_support_pairing_is_finite():
    f = times_monomial(plateau_bump(1e-80), 3)
    v = l2_inner(f, f)
    assert 0.0 <= v < 1e-300 or math.isfinite(v)


def test_quadrature_contract():
    spec = QuadratureSpec()
    val, err = integrate(lambda x: np.exp(x), 0.0, 1.0, spec)
    assert val == pytest.approx(math.e - 1, rel=1e-13)
    assert err <= max(spec.rel_tol * abs(val), spec.abs_tol)
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: np.sign(np.sin(1 / (x + 1e-9))), 0.0, 1.0, QuadratureSpec(max_panels=8))
