import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinreg.errors import InvalidProfile, TruncationMismatch, UnderflowRisk
from kreinreg.families import family
from kreinreg.funcrep import l2_inner, plateau_bump, times_monomial
from kreinreg.profile import (
    damping_monotone, default_profile, eps_seq, gamma_k, indefinite_inner, infra_exponential_constant,
    make_profile, mild_profile, profile_from_rule, regularity_fit, symbol_eval,
)

from oracles import RHO1_NORM_SQ


def test_gamma_values():
    assert gamma_k(0, 2.0) == 1.0
    assert gamma_k(1, 2.0) == 1.0
    assert gamma_k(2, 2.0) == 16.0
    assert default_profile().gamma[3] == 3.0**6


def test_invalid_profiles():
    with pytest.raises(InvalidProfile):
        make_profile([1.0, 0.0], 2.0, 1.5, 1)
    with pytest.raises(InvalidProfile):
        make_profile([1.0, 1.0], 1.5, 1.5, 1)
    with pytest.raises(InvalidProfile):
        make_profile([1.0, 1.0], 2.0, 1.0, 1)
    with pytest.raises(InvalidProfile):
        make_profile([1.0], 2.0, 1.5, 2)
    with pytest.raises(InvalidProfile):
        profile_from_rule("nope")


def test_default_profile_compliance():
    p = default_profile()
    for k in range(1, p.N + 1):
        expected = math.exp(-2 * k * 2 * math.log(k) - 2 * k * 2 - k * math.log(2))
        assert p.c_sq[k] == pytest.approx(expected, rel=1e-14)
    assert p.c_sq[0] == 0.5
    # log c_k^2 + 2k delta + 2k delta log k = -k log 2, so theta / D = 1/2
    assert p.compliance.ratio == pytest.approx(0.5, rel=1e-12)
    assert p.compliance.compliant
    assert p.compliance.max_log_excess <= 1e-12


def test_symbol():
    p = default_profile()
    assert symbol_eval(p, 0.0) == p.c_sq[0]
    const = make_profile([0.3], 2.0, 1.5, 0)
    assert symbol_eval(const, 7.0) == 0.3
    C = infra_exponential_constant(p, eps=0.1, xi_max=100.0)
    xs = np.linspace(0, 100, 257)
    assert all(symbol_eval(p, x) <= C * math.exp(0.1 * x ** (1 / 4)) * (1 + 1e-12) for x in xs)
    assert math.isfinite(C)


def test_regularity_fit():
    assert regularity_fit([0, 0, 0]) == 0.0
    assert regularity_fit([1, 0, 0, 0], B=3.0, rho=0.7) == 1.0


def test_regularity_fit_of_chi_jets(sys6):
    from kreinreg.funcrep import exact_jet

    for chi in sys6.chi:
        c = regularity_fit(exact_jet(chi, sys6.N), 1.0, sys6.profile.rho, sys6.profile.beta)
        assert 0 < c < math.inf


def test_indefinite_inner_examples(sys6):
    p = default_profile()
    f = times_monomial(plateau_bump(0.5), 8)
    assert indefinite_inner(f, f, p).value == pytest.approx(l2_inner(f, f), rel=1e-15)
    for k, chi in enumerate(sys6.chi):
        v = indefinite_inner(chi, chi, p).value
        assert abs(v) <= 1e-8 * max(1.0, sys6.scales[k])
    only0 = make_profile([0.5], 2.0, 1.5, 0)
    r = plateau_bump(1.0)
    assert indefinite_inner(r, r, only0).value == pytest.approx(RHO1_NORM_SQ - 0.5, rel=1e-12)


@given(st.integers(0, 10**6), st.floats(-2, 2), st.floats(-2, 2))
def test_indefinite_inner_symmetric_bilinear(seed, a, b):
    p = default_profile()
    f, g, h = family("mixed", seed, 3)
    fg = indefinite_inner(f, g, p)
    gf = indefinite_inner(g, f, p)
    assert abs(fg.value - gf.value) <= 2 * (fg.quad_err + gf.quad_err) + 1e-12 * (1 + abs(fg.value))
    lhs = indefinite_inner(f * a + h * b, g, p).value
    rhs = a * fg.value + b * indefinite_inner(h, g, p).value
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-10)


def test_eps_sequence():
    ones = make_profile([1.0, 2.0, 5.0], 2.0, 1.5, 2)
    assert eps_seq(ones) == [1 / (3 * math.e)] * 3
    quarter = make_profile([4.0**-k for k in range(5)], 2.0, 1.5, 4)
    for i, e in enumerate(eps_seq(quarter)):
        assert e == pytest.approx(4.0 ** (-i * (i + 1) / 2) / (3 * math.e), rel=1e-14)
    seq = eps_seq(default_profile())
    assert all(b <= a for a, b in zip(seq, seq[1:]))
    with pytest.raises(UnderflowRisk):
        eps_seq(default_profile(12))


def test_damping_monotone_and_partial_sums():
    p = default_profile()
    assert damping_monotone(p) == []
    sums = p.damped_partial_sums
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert p.projection_constant == pytest.approx(math.sqrt(1 + sums[-1]))


def test_truncation_changes():
    p = default_profile()
    assert p.with_truncation(3).c_sq == p.c_sq[:4]
    assert p.with_truncation(9).N == 9
    explicit = make_profile([0.5, 0.1], 2.0, 1.5, 1)
    with pytest.raises(TruncationMismatch):
        explicit.with_truncation(3)


def test_mild_profile_and_config():
    m = mild_profile()
    assert m.c_sq[3] == pytest.approx(0.125)
    cfg = default_profile().to_config()
    assert cfg["c_sq_rule"] == "infra" and cfg["N"] == "6"
    assert default_profile().rho == 0.25


def test_tail_bound_covers_truncation():
    p = default_profile(4)
    full = default_profile(10)
    f = times_monomial(plateau_bump(0.5), 6) + plateau_bump(0.5)
    g = times_monomial(plateau_bump(0.3), 6) * 3 + times_monomial(plateau_bump(0.3), 5)
    short = indefinite_inner(f, g, p)
    long = indefinite_inner(f, g, full)
    assert abs(short.value - long.value) <= short.tail_bound + 1e-14
    assert short.tail_bound > 0
