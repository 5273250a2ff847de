"""Sufficiency checks for finite indefinite inner-product data.

An :class:`AbstractSpace` is a symmetric Gram matrix G on R^n together with
candidate neutral vectors, damping weights gamma_i and sample vectors. The
checker tests

0. the neutral vectors are mutually G-orthogonal, G-neutral and independent;
1. the residue of every sample after removing its neutral components has
   nonnegative inner square;
2. the sequences gamma_i <chi_i, v> and v^i / gamma_i decay fast enough that
   their extrapolated l2 tails vanish.

Coefficients v^i are found from a dual set w_i by solving
sum_j <w_i, chi_j> v^j = <w_i, v>. Without a dual set the neutral vectors
are fitted to v by Euclidean least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyFamily, NotPositiveDefinite, SingularDecomposition
from .funcrep import FunctionRep, l2_inner
from .krein import GramMatrix, embed
from .neutral import NeutralSystem
from .report import CheckRecord, Report

NEUTRAL_REL = 1e-10
RESIDUE_REL = 1e-9
MAXIMALITY_REL = 1e-8


@dataclass(frozen=True)
class AbstractSpace:
    G: GramMatrix
    neutral_set: tuple[np.ndarray, ...]
    gamma: tuple[float, ...]
    sample_family: tuple[np.ndarray, ...] = ()
    dual_set: tuple[np.ndarray, ...] | None = None
    H: GramMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.G.dim
        conv = lambda vs: tuple(np.asarray(v, dtype=float) for v in vs)
        object.__setattr__(self, "neutral_set", conv(self.neutral_set))
        object.__setattr__(self, "sample_family", conv(self.sample_family))
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if self.dual_set is not None:
            object.__setattr__(self, "dual_set", conv(self.dual_set))
            if len(self.dual_set) != len(self.neutral_set):
                raise ValueError("dual_set and neutral_set must have equal length")
        for v in (*self.neutral_set, *self.sample_family, *(self.dual_set or ())):
            if v.shape != (n,):
                raise ValueError(f"vector of shape {v.shape} does not match Gram dimension {n}")
        if len(self.gamma) != len(self.neutral_set):
            raise ValueError("gamma and neutral_set must have equal length")
        if any(not g > 0 for g in self.gamma):
            raise ValueError("gamma must be positive")
        if self.H is not None and self.H.dim != n:
            raise ValueError("H must match the dimension of G")

    @property
    def N(self) -> int:
        return len(self.neutral_set) - 1

    def inner(self, x, y) -> float:
        return float(x @ self.G.entries @ y)


@dataclass(frozen=True)
class Coefficients:
    coeffs: np.ndarray  # v^i along chi_i
    pairings: np.ndarray  # <chi_i, v>_G
    residue: np.ndarray


def _chi_matrix(s: AbstractSpace, n: int) -> np.ndarray:
    return np.column_stack(s.neutral_set[:n])


def coefficients(s: AbstractSpace, v: np.ndarray, n: int | None = None) -> Coefficients:
    """Decompose ``v`` against the first ``n`` neutral vectors."""
    n = len(s.neutral_set) if n is None else n
    X = _chi_matrix(s, n)
    G = s.G.entries
    if s.dual_set is not None:
        W = np.column_stack(s.dual_set[:n])
        M = W.T @ G @ X
        rhs = W.T @ G @ v
        if np.linalg.matrix_rank(M) < n:
            raise SingularDecomposition(f"coefficient system of size {n} is rank deficient")
        c = np.linalg.solve(M, rhs)
    else:
        if np.linalg.matrix_rank(X) < n:
            raise SingularDecomposition(f"neutral vectors 0..{n - 1} are linearly dependent")
        c = np.linalg.lstsq(X, v, rcond=None)[0]
    pairings = X.T @ G @ v
    return Coefficients(c, pairings, v - X @ c)


def decay_exponent(seq: Sequence[float], rel_floor: float = 1e-300) -> float | None:
    """Fitted exponent p of |x_i|^2 ~ (i+1)^p over the upper envelope of the sequence.

    The envelope max_{k >= i} |x_k| is used so isolated small entries do not
    fake decay. Returns ``None`` with fewer than three nonzero entries.
    """
    a = np.abs(np.asarray(seq, dtype=float))
    env = np.maximum.accumulate(a[::-1])[::-1]
    idx = np.flatnonzero(a > rel_floor)
    if len(idx) < 3:
        return None
    slope, _ = np.polyfit(np.log(idx + 1.0), 2.0 * np.log(env[idx]), 1)
    return float(slope)


def tail_exponent(seq: Sequence[float]) -> float | None:
    """Exponent q of the extrapolated tail sum_{k > n} |x_k|^2 ~ n^q (q = p + 1)."""
    p = decay_exponent(seq)
    return None if p is None else p + 1.0


def check_conditions(s: AbstractSpace, tol: float = NEUTRAL_REL) -> Report:
    rep = Report("abstract", environment={"dim": s.G.dim, "N": s.N, "tol": tol})
    G = s.G.entries
    gnorm = float(np.linalg.norm(G, 2))

    # condition 0
    n = len(s.neutral_set)
    worst = (None, 0.0, 0.0, 0.0)
    for i in range(n):
        for j in range(n):
            xi, xj = s.neutral_set[i], s.neutral_set[j]
            val = abs(s.inner(xi, xj))
            scale = gnorm * np.linalg.norm(xi) * np.linalg.norm(xj)
            bound = tol * scale
            ratio = val / bound if bound > 0 else (math.inf if val > 0 else 0.0)
            if worst[0] is None or ratio > worst[3]:
                worst = ((i, j), val, bound, ratio)
    rep.add(CheckRecord("condition_0_neutral", worst[1], worst[2], worst[1] <= worst[2], worst[0],
                        "worst |<chi_i, chi_j>_G|"))
    rank = int(np.linalg.matrix_rank(_chi_matrix(s, n))) if n else 0
    rep.add(CheckRecord("condition_0_independent", rank, n, rank == n, None, "rank of neutral set"))

    # conditions 1 and 2 per sample
    for k, v in enumerate(s.sample_family):
        full = coefficients(s, v)
        sq = s.inner(full.residue, full.residue)
        bound = -RESIDUE_REL * max(1.0, gnorm * float(v @ v))
        trend = []
        for m in range(1, n + 1):
            r = coefficients(s, v, m).residue
            trend.append(s.inner(r, r))
        drops = [m for m in range(1, len(trend)) if trend[m] < trend[m - 1] - abs(bound)]
        note = "nested residues " + " ".join(f"{t:.3e}" for t in trend)
        if drops:
            note += f"; non-monotone at N={drops}"
        rep.add(CheckRecord("condition_1_residue", sq, bound, sq >= bound, k, note))

        gam = np.array(s.gamma)
        for name, seq in (("pairing", gam * full.pairings), ("coefficient", full.coeffs / gam)):
            q = tail_exponent(seq)
            if q is None:
                rep.add(CheckRecord(f"condition_2_{name}", -math.inf, 0.0, True, k,
                                    "fewer than three nonzero entries"))
            else:
                rep.add(CheckRecord(f"condition_2_{name}", q, 0.0, q < 0.0, k,
                                    "extrapolated l2 tail exponent"))
    return rep


def finite_metric_solve(G: GramMatrix, H: GramMatrix) -> np.ndarray:
    """J with <x, y>_G = <x, J y>_H, i.e. J = H^-1 G."""
    if G.dim != H.dim:
        raise ValueError("G and H must have the same dimension")
    try:
        L = np.linalg.cholesky(H.entries)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("H is not positive definite") from exc
    y = np.linalg.solve(L, G.entries)
    return np.linalg.solve(L.T, y)


def maximality_check(J: np.ndarray, rel: float = MAXIMALITY_REL) -> bool:
    s = np.linalg.svd(np.asarray(J, dtype=float), compute_uv=False)
    return bool(s[0] > 0 and s[-1] >= rel * s[0])


def majorant_sq(s: AbstractSpace, v: np.ndarray) -> float:
    """Hilbert square of ``v``: H-norm if given, else the majorant built from conditions 0-2."""
    if s.H is not None:
        return float(v @ s.H.entries @ v)
    c = coefficients(s, v)
    gam = np.array(s.gamma)
    return s.inner(c.residue, c.residue) + float(np.sum((gam * c.pairings) ** 2 + (c.coeffs / gam) ** 2))


def beta_tilde_estimate(s: AbstractSpace, i: int, R: float) -> float:
    """max |<chi_i, v>_G| over samples rescaled to v^i = 1 with Hilbert norm <= R."""
    if not s.sample_family:
        raise EmptyFamily("beta_tilde needs a nonempty sample family")
    if not 0 <= i <= s.N:
        raise IndexError(i)
    best = 0.0
    for v in s.sample_family:
        c = coefficients(s, v)
        if abs(c.coeffs[i]) < 1e-300:
            continue
        u = v / c.coeffs[i]
        if math.sqrt(max(majorant_sq(s, u), 0.0)) <= R:
            best = max(best, abs(s.inner(s.neutral_set[i], u)))
    return best


def from_krein_model(sys: NeutralSystem, fs: Sequence[FunctionRep]) -> AbstractSpace:
    """Export the truncated model on the basis {h-components of fs, v_0..v_N, chi_0..chi_N}.

    The neutral vectors are chi_i / gamma_i and the dual set is the v_i
    axes, so the recovered coefficients are gamma_i f^i.
    """
    vecs = [embed(f, sys) for f in fs]
    hs = [x.h for x in vecs if not x.h.is_zero]
    n_h = len(hs)
    m = sys.N + 1
    dim = n_h + 2 * m
    G = np.zeros((dim, dim))
    for i in range(n_h):
        for j in range(i, n_h):
            G[i, j] = G[j, i] = l2_inner(hs[i], hs[j], sys.quadrature)
    H = G.copy()
    G[n_h:n_h + m, n_h + m:] = np.eye(m)
    G[n_h + m:, n_h:n_h + m] = np.eye(m)
    H[n_h:, n_h:] = np.eye(2 * m)

    samples, k = [], 0
    for x in vecs:
        v = np.zeros(dim)
        if not x.h.is_zero:
            v[k] = 1.0
            k += 1
        v[n_h:n_h + m] = x.a
        v[n_h + m:] = x.b
        samples.append(v)
    gam = sys.gamma
    neutral = [np.eye(dim)[n_h + m + i] / gam[i] for i in range(m)]
    dual = [np.eye(dim)[n_h + i] for i in range(m)]
    return AbstractSpace(GramMatrix(G), tuple(neutral), tuple(gam), tuple(samples), tuple(dual),
                         GramMatrix(H))


def model_metric(s: AbstractSpace) -> np.ndarray:
    """J = H^-1 G for a space exported from the coordinate model."""
    if s.H is None:
        raise ValueError("space carries no Hilbert Gram matrix")
    return finite_metric_solve(s.G, s.H)


def polynomial_example(m: int = 200, delta: float = 0.5, eps: float = 0.25, sign: int = -1,
                       coeff_decay: float = 0.0, n_samples: int = 3, seed: int = 0) -> AbstractSpace:
    """Hyperbolic model with polynomially decaying pairings.

    Basis {h, a_1..a_m, b_1..b_m} with <a_i, b_j> = delta_ij and <h, h> = 1.
    Neutral vectors are the b axes, gamma_i = i^(sign (1/2 + eps)). Sample v
    has <b_i, v> = C i^-(1+delta) and coefficients v^i = C' i^-coeff_decay.
    """
    rng = np.random.default_rng(seed)
    dim = 1 + 2 * m
    G = np.zeros((dim, dim))
    G[0, 0] = 1.0
    G[1:m + 1, m + 1:] = np.eye(m)
    G[m + 1:, 1:m + 1] = np.eye(m)
    i = np.arange(1, m + 1, dtype=float)
    samples = []
    for _ in range(n_samples):
        v = np.zeros(dim)
        v[0] = rng.normal()
        v[1:m + 1] = rng.uniform(0.5, 2.0) * i ** -(1.0 + delta)
        v[m + 1:] = rng.uniform(0.5, 2.0) * i ** -coeff_decay
        samples.append(v)
    eye = np.eye(dim)
    neutral = [eye[m + 1 + k] for k in range(m)]
    dual = [eye[1 + k] for k in range(m)]
    gamma = i ** (sign * (0.5 + eps))
    return AbstractSpace(GramMatrix(G), tuple(neutral), tuple(gamma), tuple(samples), tuple(dual))


def corrupt_neutral(s: AbstractSpace, index: int = 0, weight: float = 1.0) -> AbstractSpace:
    """Copy of ``s`` with neutral vector ``index`` pushed off the neutral cone along its dual."""
    vecs = list(s.neutral_set)
    if s.dual_set is not None:
        bump = s.dual_set[index]
    else:
        # any vector with nonzero pairing against chi_index
        bump = s.G.entries @ vecs[index]
    vecs[index] = vecs[index] + weight * bump / max(np.linalg.norm(bump), 1e-300)
    return AbstractSpace(s.G, tuple(vecs), s.gamma, s.sample_family, s.dual_set, s.H)


__all__ = [
    "AbstractSpace", "Coefficients", "corrupt_neutral", "polynomial_example", "beta_tilde_estimate", "check_conditions", "coefficients",
    "decay_exponent", "finite_metric_solve", "from_krein_model", "majorant_sq", "maximality_check",
    "model_metric", "tail_exponent",
]
