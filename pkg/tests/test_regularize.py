import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinreg.families import family
from kreinreg.funcrep import evaluate, exact_jet, l2_inner, zero
from kreinreg.neutral import build_chi_system
from kreinreg.profile import default_profile, indefinite_inner
from kreinreg.regularize import (
    decompose, hilbert_inner, in_positive_part, majorant, majorant_norm, project_plus,
)


def test_decompose_zero_jet(sys6):
    f = family("positive", 1, 1)[0]
    d = decompose(f, sys6)
    assert all(c == 0 for c in d.coeffs)
    assert d.remainder == f


def test_decompose_chi(sys6):
    d = decompose(sys6.chi[3], sys6)
    assert d.coeffs == tuple(int(i == 3) for i in range(sys6.N + 1))
    assert d.remainder.is_zero


@pytest.mark.parametrize("seed", range(4))
def test_decompose_random(sys6, seed):
    for f in family("mixed", seed, 5):
        d = decompose(f, sys6)
        assert not any(exact_jet(d.remainder, sys6.N))
        x = np.linspace(-4, 4, 32)
        rebuilt = evaluate(d.remainder, x) + sum(float(c) * evaluate(chi, x) for c, chi in zip(d.coeffs, sys6.chi))
        assert np.max(np.abs(rebuilt - evaluate(f, x))) <= 1e-9 * max(1.0, np.max(np.abs(evaluate(f, x))))


def test_majorant_examples(sys6):
    assert majorant_norm(zero(), sys6) == 0.0
    for chi in sys6.chi:
        assert majorant_norm(chi, sys6) == pytest.approx(1.0, abs=1e-6)
    for f in family("positive", 2, 5):
        expected = l2_inner(f, f) + sum(l2_inner(f, chi) ** 2 for chi in sys6.chi)
        assert majorant(f, sys6).square == pytest.approx(expected, rel=1e-10)


def test_hilbert_inner(sys6):
    n = sys6.N + 1
    for i in range(n):
        for j in range(n):
            assert hilbert_inner(sys6.chi[i], sys6.chi[j], sys6) == pytest.approx(float(i == j), abs=1e-9)
    fs = family("mixed", 4, 6)
    for f, g in zip(fs, fs[1:]):
        a = hilbert_inner(f, g, sys6)
        b = hilbert_inner(g, f, sys6)
        assert abs(a - b) <= 1e-10 * (1 + abs(a))
        assert hilbert_inner(f, f, sys6) == pytest.approx(majorant(f, sys6).square, rel=1e-9)


@given(st.integers(0, 10**6))
def test_majorant_dominates_inner_square(seed):
    sys = _sys()
    f = family("mixed", seed, 1)[0]
    indef = indefinite_inner(f, f, sys.profile, sys.quadrature).value
    assert majorant(f, sys).square >= abs(indef) - 1e-8


def _sys():
    return build_chi_system(default_profile())


def test_pythagoras(sys6):
    for f in family("mixed", 8, 6):
        d = decompose(f, sys6)
        lhs = indefinite_inner(f, f, sys6.profile).value
        rem = indefinite_inner(d.remainder, d.remainder, sys6.profile).value
        cross = sum(2 * float(c) * pv.value for c, pv in zip(d.coeffs, d.pairings))
        assert lhs == pytest.approx(rem + cross, rel=1e-8, abs=1e-10)


def test_projection(sys6):
    C = sys6.profile.projection_constant
    for f in family("mixed", 9, 100):
        pf = project_plus(f, sys6)
        assert project_plus(pf, sys6) == pf
        assert in_positive_part(pf, sys6.N)
        assert majorant_norm(pf, sys6) <= C * majorant_norm(f, sys6) + 1e-8
    g = family("positive", 9, 1)[0]
    assert project_plus(g, sys6) == g


def test_truncation_stability():
    s4 = build_chi_system(default_profile(4))
    s6 = build_chi_system(default_profile(6))
    for f in family("mixed", 12, 8, 4):
        a = majorant(f, s4)
        b = majorant(f, s6)
        assert abs(a.square - b.square) <= a.tail_bound + a.quad_err + b.quad_err + 1e-10 * (1 + a.square)
        assert math.isfinite(a.tail_bound)
