"""Scenario bodies run by the command line tool.

Each scenario takes a :class:`RunSettings` and returns a :class:`Report`.
All randomness flows from ``settings.seed`` through ``numpy.random.default_rng``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import abstract, heisenberg, krein
from .families import family, graded_jet_function, regression_family
from .funcrep import derivative, plateau_bump
from .neutral import NeutralSystem, build_chi_system, verify_neutral_system
from .profile import SingularityProfile, default_profile, indefinite_inner
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .regularize import hilbert_inner, in_positive_part, majorant, majorant_norm, project_plus
from .report import Report

SCENARIOS = ("neutral", "majorant", "krein", "abstract", "heisenberg", "sweep")
DEFAULT_SCENARIOS = SCENARIOS[:-1]


@dataclass(frozen=True)
class RunSettings:
    profile: SingularityProfile = field(default_factory=default_profile)
    truncations: tuple[int, ...] = (2, 4, 6, 8)
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    seed: int = 0
    family_size: int = 200
    metric_instances: int = 50
    coordinate_vectors: int = 200


@lru_cache(maxsize=32)
def _system(p: SingularityProfile, q: QuadratureSpec) -> NeutralSystem:
    return build_chi_system(p, q)


def system_for(cfg: RunSettings, N: int | None = None) -> NeutralSystem:
    p = cfg.profile if N is None else cfg.profile.with_truncation(N)
    return _system(p, cfg.quadrature)


def run_neutral(cfg: RunSettings) -> Report:
    rep = Report("neutral")
    for N in sorted({cfg.profile.N, *cfg.truncations}):
        rep.extend(verify_neutral_system(system_for(cfg, N), rel_tol=1e-6), prefix=f"N{N}.")
    return rep


def run_majorant(cfg: RunSettings) -> Report:
    rep = Report("majorant")
    sys = system_for(cfg)
    for i, chi in enumerate(sys.chi):
        rep.check_le("chi_unit_norm", abs(majorant_norm(chi, sys) - 1.0), 1e-6, index=i)

    const = sys.profile.projection_constant
    for k, f in enumerate(family("mixed", cfg.seed, cfg.family_size, sys.N)):
        m = majorant(f, sys)
        indef = indefinite_inner(f, f, sys.profile, sys.quadrature).value
        rep.check_ge("majorant_dominates", m.square - abs(indef), -1e-8, index=k)
        h = hilbert_inner(f, f, sys)
        rel = abs(h - m.square) / max(abs(m.square), 1e-300)
        rep.check_le("hilbert_matches_majorant", rel, 1e-9, index=k)

        pf = project_plus(f, sys)
        idem = project_plus(pf, sys) == pf and in_positive_part(pf, sys.N)
        rep.check_true("projection_idempotent", idem, index=k)
        rep.check_le("projection_bound", majorant_norm(pf, sys), const * m.value + 1e-8, index=k)
    return rep


def _random_coordinates(rng: np.random.Generator, N: int) -> krein.KreinVector:
    return krein.coordinate_vector(rng.normal(size=N + 1), rng.normal(size=N + 1))


def run_krein(cfg: RunSettings) -> Report:
    rep = Report("krein")
    rng = np.random.default_rng(cfg.seed)
    sys = system_for(cfg)
    N = sys.N
    worst = 0.0
    for k in range(cfg.coordinate_vectors):
        x, y = _random_coordinates(rng, N), _random_coordinates(rng, N)
        rep.check_true("metric_involution", krein.metric_apply(krein.metric_apply(x)) == x, index=k)
        lhs = krein.gram(x, krein.metric_apply(y), sys, "hilbert")
        rhs = krein.gram(x, y, sys, "indefinite")
        worst = max(worst, abs(lhs - rhs))
    rep.check_le("metric_links_forms", worst, 1e-12, note=f"{cfg.coordinate_vectors} random pairs")

    h_basis = [krein.embed(f, sys).h for f in family("positive", cfg.seed + 1, 3, max(cfg.truncations))]
    for n in sorted(set(cfg.truncations)):
        s = system_for(cfg, n)
        try:
            G = krein.gram_matrix(krein.model_basis(s, h_basis), s)
            rank = krein.negativity_rank(G)
            rep.check_le("negativity_rank", abs(rank - (n + 1)), 0, index=n, note=f"rank {rank}")
        except Exception as exc:  # recorded, not raised
            rep.check_true("negativity_rank", False, index=n, note=f"{type(exc).__name__}: {exc}")

    systems = [system_for(cfg, n) for n in sorted(set(cfg.truncations))]
    top = systems[-1]
    fs = list(family("positive", cfg.seed + 2, 3, top.N))
    chi = top.chi
    fs.append(chi[0] * 0.5 + chi[1] - chi[2] * 0.25)
    fs.append(fs[0] + chi[1] * 2.0)
    fs.append(graded_jet_function(cfg.profile, degree=top.N + 4, sign_seed=cfg.seed))
    fs.append(graded_jet_function(cfg.profile, degree=top.N + 4, ratio=30.0))
    rep.extend(krein.embedding_consistency(fs, systems))
    return rep


def run_abstract(cfg: RunSettings) -> Report:
    rep = Report("abstract")
    sys = system_for(cfg)
    samples = list(sys.chi) + family("mixed", cfg.seed, 8, sys.N) + family("positive", cfg.seed + 1, 3, sys.N)
    space = abstract.from_krein_model(sys, samples)
    rep.extend(abstract.check_conditions(space), prefix="model.")

    poly = abstract.polynomial_example(sign=-1, coeff_decay=1.5, seed=cfg.seed)
    rep.extend(abstract.check_conditions(poly), prefix="poly_literal.")
    corrected = abstract.polynomial_example(sign=1, coeff_decay=0.0, seed=cfg.seed)
    rep.extend(abstract.check_conditions(corrected), prefix="poly_corrected.")
    bad = abstract.check_conditions(abstract.corrupt_neutral(space))
    rep.check_true("corrupted_rejected", not bad.get("condition_0_neutral").passed)

    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.metric_instances):
        n = int(rng.integers(2, 9))
        A = rng.normal(size=(n, n))
        G = krein.GramMatrix.symmetrized(A)
        B = rng.normal(size=(n, n))
        H = krein.GramMatrix.symmetrized(B @ B.T + n * np.eye(n))
        J = abstract.finite_metric_solve(G, H)
        E = np.eye(n)
        for i in range(n):
            for j in range(n):
                lhs = E[i] @ G.entries @ E[j]
                rhs = E[i] @ H.entries @ (J @ E[j])
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    rep.check_le("finite_metric_solve", worst, 1e-10, note=f"{cfg.metric_instances} instances")

    J = abstract.model_metric(space)
    rep.check_true("maximality_model", abstract.maximality_check(J))
    rep.check_true("maximality_singular_rejected", not abstract.maximality_check(np.diag([1.0, 1.0, 0.0])))
    for i in range(min(3, sys.N + 1)):
        bt = [abstract.beta_tilde_estimate(space, i, R) for R in (10.0, 1e3, 1e6)]
        rep.check_true("beta_tilde_monotone", all(b1 >= b0 for b0, b1 in zip(bt, bt[1:])), index=i,
                       note=" ".join(f"{b:.3e}" for b in bt))
    return rep


def run_heisenberg(cfg: RunSettings) -> Report:
    rep = Report("heisenberg")
    sys = system_for(cfg)
    p = sys.profile
    pos = family("positive", cfg.seed + 3, 8, sys.N)
    for op in heisenberg.OperatorTag:
        worst = max(heisenberg.symmetry_defect(op, f, g, p, sys.quadrature)
                    for f in pos[:4] for g in pos[4:])
        rep.check_le("symmetry_defect", worst, 1e-8, index=op.value)
    rep.check_true("momentum_preserves_positive",
                   all(in_positive_part(heisenberg.apply_momentum(f), sys.N) for f in pos))

    mixed = family("mixed", cfg.seed, 20, sys.N)
    rep.check_true("commutation", all(heisenberg.commutation_holds(f) for f in mixed + pos))

    for n, f in enumerate(regression_family()):
        worst = max(heisenberg.moment_identity_check(f, k, sys.quadrature).defect for k in range(9))
        rep.check_le("moment_identity", worst, 1e-6, index=n)
    d3 = derivative(derivative(derivative(plateau_bump(1.0))))
    rep.check_true("vanishing_moments", heisenberg.in_l2_zero(d3, 2) and not heisenberg.in_l2_zero(d3, 3))

    worst = max(abs(heisenberg.delocalization_check(i, f, sys)) for f in pos for i in range(sys.N + 1))
    rep.check_le("delocalization", worst, 1e-8)
    for k, chi in enumerate(sys.chi):
        gap = max(abs(heisenberg.delocalization_check(i, chi, sys)) for i in range(sys.N + 1))
        rep.check_le("delocalization_chi", gap, 1e-8, index=k)
    return rep


def run_sweep(cfg: RunSettings) -> Report:
    """Truncation sweep: per N, worst majorant tail bound and embedding error on a fixed family."""
    rep = Report("sweep")
    fs = family("mixed", cfg.seed, 6, max(cfg.truncations))
    top = max(cfg.truncations)
    for n in sorted(set(cfg.truncations)):
        sys = system_for(cfg, n)
        tails = [majorant(f, sys).tail_bound for f in fs]
        rep.check_le("majorant_tail", max(tails), math.inf, index=n, note="table row")
        errs, bounds = [], []
        for f in fs:
            deg = max(f.degree_at_zero(), top)
            ref = indefinite_inner(f, f, cfg.profile.with_truncation(deg), sys.quadrature)
            trunc = indefinite_inner(f, f, sys.profile, sys.quadrature)
            x = krein.embed(f, sys)
            errs.append(abs(krein.gram(x, x, sys) - ref.value))
            bounds.append(trunc.tail_bound + 2 * (ref.quad_err + trunc.quad_err) + 1e-12 * (1 + abs(ref.value)))
        worst = max(range(len(fs)), key=lambda k: errs[k] / bounds[k])
        rep.check_le("embedding_error", errs[worst], bounds[worst], index=n, note=f"worst of {len(fs)}")
    return rep


RUNNERS = {
    "neutral": run_neutral,
    "majorant": run_majorant,
    "krein": run_krein,
    "abstract": run_abstract,
    "heisenberg": run_heisenberg,
    "sweep": run_sweep,
}
