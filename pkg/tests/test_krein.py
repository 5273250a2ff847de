import numpy as np
import pytest
from hypothesis import given, strategies as st

from kreinreg.errors import DegenerateGram, IndexOutOfRange, TruncationMismatch, UnsupportedNode
from kreinreg.families import family, graded_jet_function
from kreinreg.funcrep import l2_inner, plateau_bump, zero
from kreinreg.krein import (
    GramMatrix, KreinVector, chi_basis_vector, coordinate_vector, embed, embedding_consistency, gram,
    gram_matrix, metric_apply, metric_matrix, model_basis, negativity_rank, v_basis_vector,
)
from kreinreg.neutral import build_chi_system
from kreinreg.profile import default_profile, indefinite_inner

N = 6
coords = st.lists(st.floats(-10, 10, allow_nan=False), min_size=N + 1, max_size=N + 1)


def test_basis_relations(sys6):
    for i in range(N + 1):
        vi, ci = v_basis_vector(i, N), chi_basis_vector(i, N)
        assert gram(vi, vi, sys6) == 0.0
        assert gram(ci, vi, sys6) == 1.0
        assert gram(vi, vi, sys6, "hilbert") == 1.0
        assert metric_apply(vi) == ci
        for j in range(N + 1):
            if j != i:
                assert gram(vi, v_basis_vector(j, N), sys6) == 0.0
    with pytest.raises(IndexOutOfRange):
        v_basis_vector(N + 1, N)


@given(coords, coords, coords, coords)
def test_metric_links_forms(a1, b1, a2, b2):
    sys = _sys()
    x, y = coordinate_vector(a1, b1), coordinate_vector(a2, b2)
    assert metric_apply(metric_apply(x)) == x
    assert abs(gram(x, metric_apply(y), sys, "hilbert") - gram(x, y, sys)) <= 1e-12 * (1 + np.abs(a1).max() * np.abs(b2).max() * 20)
    assert gram(metric_apply(x), metric_apply(y), sys, "hilbert") == gram(x, y, sys, "hilbert")


_cache = {}


def _sys():
    if "s" not in _cache:
        _cache["s"] = build_chi_system(default_profile())
    return _cache["s"]


def test_embed_examples(sys6):
    for i, chi in enumerate(sys6.chi):
        x = embed(chi, sys6)
        assert x.h.is_zero
        assert x.b == tuple(float(k == i) for k in range(N + 1))
        assert max(map(abs, x.a)) <= 1e-9
    for f in family("positive", 3, 4):
        x = embed(f, sys6)
        assert x.h == f
        assert x.b == (0.0,) * (N + 1)
        assert x.a == pytest.approx([l2_inner(chi, f) for chi in sys6.chi], rel=1e-12, abs=1e-300)


def test_v_pairs_to_coefficient(sys6):
    for f in family("mixed", 6, 5):
        x = embed(f, sys6)
        for i in range(N + 1):
            assert gram(v_basis_vector(i, N), x, sys6) == x.b[i]


def test_embedding_gram_matches_inner(sys6):
    fs = family("positive", 7, 3) + [sys6.chi[0] - sys6.chi[4] * 2.0, zero()]
    for f in fs:
        for g in fs:
            lhs = gram(embed(f, sys6), embed(g, sys6), sys6)
            ref = indefinite_inner(f, g, sys6.profile)
            assert abs(lhs - ref.value) <= ref.bound + 1e-12 * (1 + abs(ref.value))


def test_embedding_consistency_report():
    systems = [build_chi_system(default_profile(n)) for n in (2, 4, 6, 8)]
    top = systems[-1]
    fs = family("positive", 2, 2, 8) + [top.chi[1] + top.chi[3] * 0.5, graded_jet_function(default_profile(), 12), zero()]
    rep = embedding_consistency(fs, systems)
    assert rep.passed, rep.failures()
    decreasing = [r for r in rep.records if r.name == "strictly_decreasing"]
    assert decreasing, "graded pair must be resolved above noise"
    zero_idx = len(fs) - 1
    for r in rep.records:
        if r.name == "embedding_error" and zero_idx in r.index[:2]:
            assert r.measured == 0.0


def test_negativity_rank():
    assert negativity_rank(GramMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))) == 1
    assert negativity_rank(GramMatrix(np.diag([1.0, 2.0, 3.0]))) == 0
    with pytest.raises(DegenerateGram):
        negativity_rank(GramMatrix(np.diag([1.0, 1e-12])))
    for n in (2, 4, 6):
        s = build_chi_system(default_profile(n))
        h = [embed(f, s).h for f in family("positive", 1, 3, 8)]
        assert negativity_rank(gram_matrix(model_basis(s, h), s)) == n + 1


def test_summands_orthogonal(sys6):
    h = family("positive", 4, 1)[0]
    hv = KreinVector(h, (0.0,) * (N + 1), (0.0,) * (N + 1))
    for i in range(N + 1):
        for mode in ("indefinite", "hilbert"):
            assert gram(hv, v_basis_vector(i, N), sys6, mode) == 0.0
            assert gram(hv, chi_basis_vector(i, N), sys6, mode) == 0.0


def test_hilbert_gram_positive_definite(sys6):
    rng = np.random.default_rng(3)
    hs = [embed(f, sys6).h for f in family("positive", 5, 3)]
    vecs = [KreinVector(hs[k % 3] * float(rng.normal()), rng.normal(size=N + 1), rng.normal(size=N + 1))
            for k in range(8)]
    G = gram_matrix(vecs, sys6, "hilbert")
    assert np.linalg.eigvalsh(G.entries).min() > 0


def test_metric_matrix_is_maximal():
    J = metric_matrix(3, N)
    s = np.linalg.svd(J, compute_uv=False)
    assert np.allclose(s, 1.0)
    assert np.array_equal(J @ J, np.eye(J.shape[0]))


def test_vector_validation(sys6):
    with pytest.raises(UnsupportedNode):
        KreinVector(plateau_bump(1.0), (0.0,) * (N + 1), (0.0,) * (N + 1))
    with pytest.raises(TruncationMismatch):
        coordinate_vector([1.0], [1.0, 2.0])
    with pytest.raises(TruncationMismatch):
        gram(coordinate_vector([1.0, 0.0], [0.0, 1.0]), v_basis_vector(0, N), sys6)


def test_gram_matrix_symmetry():
    with pytest.raises(ValueError):
        GramMatrix(np.array([[1.0, 2.0], [2.000001, 1.0]]))
    G = GramMatrix.symmetrized(np.array([[1.0, 2.0], [2.000001, 1.0]]))
    assert G.entries[0, 1] == G.entries[1, 0]
