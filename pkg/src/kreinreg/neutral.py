"""Construction of the neutral decomposition functions chi_0 .. chi_N.

Building blocks are delta_i = x^i/i! rho_{eps_i}. Their mutual L2 overlaps
are cancelled by pairs of orthonormal unit bumps kappa_n placed at the
positive positions n(i, j), and the remaining L2 budget c_i^2 is topped up
by a bump at the negative position -(i+1). Scaling by gamma_i then gives

    ||chi_k||^2 = c_k^2 gamma_k^2,   chi_k^(i)(0) = delta_ik gamma_k,
    <chi_k, chi_l>_L2 = 0 (k != l),  <chi_k, chi_l> = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bumps import kappa, rho_eps
from .errors import BudgetExceeded, DiagonalIndex, IndexOutOfRange, InvalidProfile
from .funcrep import FunctionRep, exact_jet, l2_inner, l2_inner_err, times_monomial, zero
from .profile import SingularityProfile, eps_seq, jet_correction
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .report import CheckRecord, Report

REL_TOL = 1e-8
ABS_FLOOR = 1e-12


def pair_index(i: int, j: int) -> int:
    """Enumeration n(i, j) = j(j-1)/2 + i + 1 for i < j, symmetric in (i, j)."""
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    if i == j:
        raise DiagonalIndex(f"pair_index is undefined on the diagonal (i = j = {i})")
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i + 1


def build_delta(p: SingularityProfile, i: int) -> FunctionRep:
    if not 0 <= i <= p.N:
        raise IndexOutOfRange(f"index {i} outside 0..{p.N}")
    eps = eps_seq(p)[i]
    return times_monomial(rho_eps(eps).profile, i)


@dataclass(frozen=True, eq=False)
class NeutralSystem:
    profile: SingularityProfile
    quadrature: QuadratureSpec
    eps: tuple[float, ...]
    delta_fns: tuple[FunctionRep, ...]
    overlaps: np.ndarray
    k_coeff: np.ndarray
    correctives: tuple[FunctionRep, ...]
    nu_coeff: tuple[float, ...]
    chi: tuple[FunctionRep, ...]
    gram_l2: np.ndarray
    gram_indef: np.ndarray
    corrected_sq: tuple[float, ...]

    @property
    def N(self) -> int:
        return self.profile.N

    @property
    def gamma(self) -> tuple[float, ...]:
        return self.profile.gamma

    @property
    def scales(self) -> tuple[float, ...]:
        """c_k^2 gamma_k^2."""
        return self.profile.damped_sq


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_chi_system(p: SingularityProfile, q: QuadratureSpec = DEFAULT_QUADRATURE) -> NeutralSystem:
    over = [k for k, c in enumerate(p.c_sq) if c > 1.0]
    if over:
        raise InvalidProfile(
            f"the budget argument needs c_k^2 <= 1, violated at k = {over}; rescale the symbol J"
        )
    n = p.N + 1
    eps = eps_seq(p)
    deltas = [times_monomial(rho_eps(e).profile, i) for i, e in enumerate(eps)]

    overlaps = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            overlaps[i, j] = overlaps[j, i] = l2_inner(deltas[i], deltas[j], q)

    k_coeff = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                k_coeff[i, j] = np.sign(i - j) * math.sqrt(max(overlaps[i, j], 0.0))

    correctives, nus, chis, corrected_sq = [], [], [], []
    for i in range(n):
        K = zero()
        for j in range(n):
            if j != i and k_coeff[i, j] != 0.0:
                K = K + k_coeff[i, j] * kappa(pair_index(i, j)).profile
        core = deltas[i] + K
        lhs = l2_inner(core, core, q)
        if lhs > p.c_sq[i]:
            raise BudgetExceeded(f"||delta_{i} + K_{i}||^2 = {lhs:.6e} exceeds c_{i}^2 = {p.c_sq[i]:.6e}")
        nu = math.sqrt(p.c_sq[i] - lhs)
        chi = (core + nu * kappa(-(i + 1)).profile) * p.gamma[i]
        correctives.append(K)
        nus.append(nu)
        chis.append(chi)
        corrected_sq.append(lhs)

    gram_l2 = np.zeros((n, n))
    gram_indef = np.zeros((n, n))
    for k in range(n):
        for l in range(k, n):
            v = l2_inner(chis[k], chis[l], q)
            gram_l2[k, l] = gram_l2[l, k] = v
            gram_indef[k, l] = gram_indef[l, k] = v - jet_correction(p, chis[k], chis[l])

    return NeutralSystem(
        profile=p, quadrature=q, eps=tuple(eps), delta_fns=tuple(deltas),
        overlaps=_frozen(overlaps), k_coeff=_frozen(k_coeff), correctives=tuple(correctives),
        nu_coeff=tuple(nus), chi=tuple(chis), gram_l2=_frozen(gram_l2),
        gram_indef=_frozen(gram_indef), corrected_sq=tuple(corrected_sq),
    )


@dataclass(frozen=True)
class Budget:
    lhs_direct: float
    lhs_sum: float
    rhs: float

    @property
    def lhs(self) -> float:
        return self.lhs_direct

    @property
    def agreement(self) -> float:
        """Relative gap between the two evaluations of the left side."""
        scale = max(abs(self.lhs_direct), abs(self.lhs_sum))
        return 0.0 if scale == 0 else abs(self.lhs_direct - self.lhs_sum) / scale

    @property
    def within(self) -> bool:
        return self.lhs_direct <= self.rhs and self.lhs_sum <= self.rhs


def correction_budget(sys: NeutralSystem, i: int) -> Budget:
    """||delta_i + K_i||^2 by direct quadrature and as sum_j |<delta_i, delta_j>|, against c_i^2."""
    if not 0 <= i <= sys.N:
        raise IndexOutOfRange(f"index {i} outside 0..{sys.N}")
    core = sys.delta_fns[i] + sys.correctives[i]
    direct = l2_inner(core, core, sys.quadrature)
    summed = math.fsum(
        abs(l2_inner(sys.delta_fns[i], sys.delta_fns[j], sys.quadrature)) for j in range(sys.N + 1)
    )
    return Budget(direct, summed, sys.profile.c_sq[i])


def _tol(scale: float, rel_tol: float) -> float:
    return max(rel_tol * scale, ABS_FLOOR)


def _worst(name: str, entries, report: Report, note: str = "") -> None:
    """Record the entry with the largest measured/bound ratio."""
    worst = max(entries, key=lambda e: e[1] / e[2] if e[2] > 0 else (math.inf if e[1] > 0 else 0.0))
    idx, measured, bound = worst
    report.add(CheckRecord(name, float(measured), float(bound), bool(measured <= bound), idx, note))


def verify_neutral_system(sys: NeutralSystem, rel_tol: float = REL_TOL) -> Report:
    rep = Report("neutral", environment={"N": sys.N, "rel_tol": rel_tol, "abs_floor": ABS_FLOOR})
    n = sys.N + 1
    scales = sys.scales
    q = sys.quadrature

    norms = [l2_inner_err(c, c, q) for c in sys.chi]
    _worst("clause_i_norm", [
        (k, abs(norms[k].value - scales[k]), _tol(scales[k], rel_tol)) for k in range(n)
    ], rep, "||chi_k||^2 against c_k^2 gamma_k^2")

    jet_gap = []
    for k, c in enumerate(sys.chi):
        jet = exact_jet(c, sys.N)
        for i, v in enumerate(jet):
            target = Fraction(sys.gamma[k]) if i == k else Fraction(0)
            jet_gap.append(((k, i), float(abs(v - target)), 0.0))
    _worst("clause_ii_jet", jet_gap, rep, "exact jets, must vanish identically")

    # recomputed from the stored chi so a tampered system cannot hide behind its cached Gram
    gl2 = np.zeros((n, n))
    gin = np.zeros((n, n))
    for k in range(n):
        for l in range(k, n):
            v = l2_inner(sys.chi[k], sys.chi[l], q)
            gl2[k, l] = gl2[l, k] = v
            gin[k, l] = gin[l, k] = v - jet_correction(sys.profile, sys.chi[k], sys.chi[l])

    off = [
        ((k, l), abs(gl2[k, l]), _tol(math.sqrt(scales[k] * scales[l]), rel_tol))
        for k in range(n) for l in range(n) if k != l
    ]
    if off:
        _worst("clause_iii_l2_orthogonal", off, rep)
    else:
        rep.check_le("clause_iii_l2_orthogonal", 0.0, ABS_FLOOR, note="single element")

    _worst("clause_iv_neutral", [
        ((k, l), abs(gin[k, l]), _tol(math.sqrt(scales[k] * scales[l]), rel_tol))
        for k in range(n) for l in range(n)
    ], rep)

    for i in range(n):
        b = correction_budget(sys, i)
        rep.check_le("budget", b.lhs, b.rhs, index=i)
        rep.check_le("budget_agreement", b.agreement, 1e-9, index=i)

    positions_ok = all(
        t.center >= 1 for K in sys.correctives for t, _ in K.terms
    ) and all(abs(d.support[0]) < 0.5 and d.support[1] < 0.5 for d in sys.delta_fns)
    rep.check_true("support_discipline", positions_ok)
    return rep
