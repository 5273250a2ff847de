import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinreg.bumps import kappa, kappa_norm, rho_eps
from kreinreg.errors import UnderflowRisk
from kreinreg.funcrep import exact_jet, l2_inner, l2_norm, moment

from oracles import KAPPA0_AT_ZERO, RHO1_MOMENT0


def test_plateau_examples():
    r = rho_eps(1.0)
    assert r.eval(0.4) == 1.0
    assert r.eval(1.6) == 0.0
    mu0 = moment(r.profile, 0)
    assert 1.0 <= mu0 <= 3.0
    assert mu0 == pytest.approx(RHO1_MOMENT0, rel=1e-12)


def test_underflow_guard():
    with pytest.raises(UnderflowRisk):
        rho_eps(1e-260)
    with pytest.raises(UnderflowRisk):
        rho_eps(0.0)
    assert rho_eps(1e-200).eps == 1e-200


@given(st.floats(1e-6, 1e3), st.floats(-2, 2))
def test_plateau_geometry(eps, s):
    r = rho_eps(eps)
    v = r.eval(s * eps)
    assert 0.0 <= v <= 1.0
    if abs(s) <= 0.5:
        assert v == 1.0
    if abs(s) >= 1.5:
        assert v == 0.0


def test_jet_at_zero():
    assert exact_jet(rho_eps(1e-30).profile, 5) == (1, 0, 0, 0, 0, 0)


def test_transition_is_smooth_at_the_joins():
    # high order differences across each join stay tiny: every derivative vanishes there
    r = rho_eps(1.0)
    for join in (0.5, 1.5):
        for h in (1e-2, 5e-3):
            x = join + (np.arange(7) - 3) * h
            d6 = np.diff(r.eval(x), 6)
            assert np.max(np.abs(d6)) / h**6 < 1e6


def test_kappa_norm_and_value():
    assert l2_norm(kappa(3).profile) == pytest.approx(1.0, abs=1e-10)
    assert kappa(0).eval(0.0) == pytest.approx(KAPPA0_AT_ZERO, rel=1e-12)
    assert kappa_norm() > 0


def test_kappa_orthogonal_and_support():
    assert l2_inner(kappa(1).profile, kappa(2).profile) == 0.0
    lo, hi = kappa(-4).profile.support
    assert -4.5 <= lo and hi <= -3.5


@given(st.integers(-10**6, 10**6), st.floats(-0.6, 0.6))
def test_translation_identity(n, y):
    x = n + y
    assert kappa(n).eval(x) == kappa(0).eval(x - n)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_distinct_positions_are_orthogonal(m, n):
    if m != n:
        assert l2_inner(kappa(m).profile, kappa(n).profile) == 0.0


def test_kappa_position_guard():
    with pytest.raises(ValueError):
        kappa(10**6 + 1)
