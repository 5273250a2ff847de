"""Coordinate model of the Krein space K = H + span(v_i) + span(chi_i).

A vector is a triple (h, a, b): h is a test function whose jet vanishes
through N, a holds coordinates along the v_i and b along the chi_i. The
indefinite form pairs a with b, the Hilbert form is diagonal, and the metric
operator J swaps a and b.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DegenerateGram, IndexOutOfRange, TruncationMismatch, UnsupportedNode
from .funcrep import FunctionRep, exact_jet, l2_inner, l2_inner_err, zero
from .neutral import NeutralSystem
from .profile import indefinite_inner
from .regularize import decompose
from .report import Report

Mode = Literal["indefinite", "hilbert"]
DEGENERACY_REL = 1e-10


@dataclass(frozen=True)
class KreinVector:
    h: FunctionRep
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise TruncationMismatch("a and b coordinates must have equal nonzero length")
        if self.h.degree_at_zero() >= 0 and any(exact_jet(self.h, self.N)):
            raise UnsupportedNode(f"H-component must have vanishing jet through order {self.N}")

    @property
    def N(self) -> int:
        return len(self.a) - 1

    def __add__(self, other: "KreinVector") -> "KreinVector":
        _check_same(self, other)
        return KreinVector(self.h + other.h, np.add(self.a, other.a), np.add(self.b, other.b))

    def __mul__(self, s: float) -> "KreinVector":
        return KreinVector(self.h * s, np.multiply(self.a, s), np.multiply(self.b, s))

    __rmul__ = __mul__


def _check_same(x: KreinVector, y: KreinVector, sys: NeutralSystem | None = None) -> None:
    if x.N != y.N or (sys is not None and x.N != sys.N):
        raise TruncationMismatch(
            f"truncations differ: {x.N}, {y.N}" + (f", system {sys.N}" if sys is not None else "")
        )


def coordinate_vector(a: Sequence[float], b: Sequence[float]) -> KreinVector:
    return KreinVector(zero(), tuple(a), tuple(b))


def gram(x: KreinVector, y: KreinVector, sys: NeutralSystem, mode: Mode = "indefinite") -> float:
    _check_same(x, y, sys)
    hh = l2_inner(x.h, y.h, sys.quadrature)
    if mode == "indefinite":
        rest = math.fsum(itertools.chain(
            (p * q for p, q in zip(x.a, y.b)), (p * q for p, q in zip(x.b, y.a))
        ))
    elif mode == "hilbert":
        rest = math.fsum(itertools.chain(
            (p * q for p, q in zip(x.a, y.a)), (p * q for p, q in zip(x.b, y.b))
        ))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return hh + rest


def metric_apply(x: KreinVector) -> KreinVector:
    return KreinVector(x.h, x.b, x.a)


def v_basis_vector(i: int, N: int) -> KreinVector:
    if not 0 <= i <= N:
        raise IndexOutOfRange(f"index {i} outside 0..{N}")
    a = [0.0] * (N + 1)
    a[i] = 1.0
    return coordinate_vector(a, [0.0] * (N + 1))


def chi_basis_vector(i: int, N: int) -> KreinVector:
    if not 0 <= i <= N:
        raise IndexOutOfRange(f"index {i} outside 0..{N}")
    b = [0.0] * (N + 1)
    b[i] = 1.0
    return coordinate_vector([0.0] * (N + 1), b)


def embed(f: FunctionRep, sys: NeutralSystem) -> KreinVector:
    """f -> (f^{N+}, <chi_i, f>, f^i)."""
    d = decompose(f, sys)
    return KreinVector(d.remainder, tuple(p.value for p in d.pairings), d.float_coeffs)


def embed_error(f: FunctionRep, sys: NeutralSystem) -> float:
    """Quadrature error attached to the coordinates of ``embed(f)``."""
    d = decompose(f, sys)
    return sum(p.quad_err for p in d.pairings)


# -- finite Gram matrices ----------------------------------------------------
@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] == 0:
            raise ValueError("Gram matrix must be square and nonempty")
        if not np.array_equal(e, e.T):
            raise ValueError("Gram matrix must be exactly symmetric")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def symmetrized(cls, a) -> "GramMatrix":
        a = np.asarray(a, dtype=float)
        return cls(0.5 * (a + a.T))

    def smallest_singular_ratio(self) -> float:
        s = np.linalg.svd(self.entries, compute_uv=False)
        return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def negativity_rank(G: GramMatrix) -> int:
    """Number of negative eigenvalues of a nondegenerate symmetric Gram matrix."""
    lam = np.linalg.eigvalsh(G.entries)
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0 or float(np.min(np.abs(lam))) < DEGENERACY_REL * scale:
        raise DegenerateGram(
            f"eigenvalue {float(np.min(np.abs(lam))):.3e} below {DEGENERACY_REL:.0e} x {scale:.3e}"
        )
    return int(np.sum(lam < 0))


def gram_matrix(vectors: Sequence[KreinVector], sys: NeutralSystem, mode: Mode = "indefinite") -> GramMatrix:
    n = len(vectors)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = gram(vectors[i], vectors[j], sys, mode)
    return GramMatrix(m)


def model_basis(sys: NeutralSystem, h_basis: Iterable[FunctionRep]) -> list[KreinVector]:
    """Basis {h-basis, v_0..v_N, chi_0..chi_N} of the truncated model."""
    N = sys.N
    zeros = (0.0,) * (N + 1)
    out = [KreinVector(h, zeros, zeros) for h in h_basis]
    out += [v_basis_vector(i, N) for i in range(N + 1)]
    out += [chi_basis_vector(i, N) for i in range(N + 1)]
    return out


def metric_matrix(dim_h: int, N: int) -> np.ndarray:
    """Matrix of J on the model basis: identity on H, swap of the a and b blocks."""
    n = N + 1
    J = np.zeros((dim_h + 2 * n, dim_h + 2 * n))
    J[:dim_h, :dim_h] = np.eye(dim_h)
    J[dim_h:dim_h + n, dim_h + n:] = np.eye(n)
    J[dim_h + n:, dim_h:dim_h + n] = np.eye(n)
    return J


def embedding_consistency(fs: Sequence[FunctionRep], systems: Sequence[NeutralSystem]) -> Report:
    """Compare gram(embed f, embed g) with the untruncated indefinite product.

    The reference sums the jet correction up to the highest degree present
    in f and g, beyond which jets vanish exactly. One record per pair and
    truncation checks the error against the reported tail plus quadrature
    bound; pairs whose error is not quadrature-level also get a record
    flagging any failure of strict decrease in N.
    """
    rep = Report("embedding_consistency", environment={"N": [s.N for s in systems]})
    top_sys = max(systems, key=lambda s: s.N)
    for (i, f), (j, g) in itertools.combinations_with_replacement(enumerate(fs), 2):
        deg = max(f.degree_at_zero(), g.degree_at_zero(), top_sys.N)
        ref_profile = top_sys.profile.with_truncation(deg)
        ref = indefinite_inner(f, g, ref_profile, top_sys.quadrature)
        errors, bounds = [], []
        for sys in systems:
            x, y = embed(f, sys), embed(g, sys)
            err = abs(gram(x, y, sys, "indefinite") - ref.value)
            trunc = indefinite_inner(f, g, sys.profile, sys.quadrature)
            quad = (ref.quad_err + trunc.quad_err + _coordinate_error(x, y, f, g, sys)) * 2
            rounding = 1e-13 * (1 + abs(ref.value) + sum(abs(u * v) for u, v in zip(x.a, y.b)))
            bound = trunc.tail_bound + quad + rounding
            rep.check_le("embedding_error", err, bound, index=(i, j, sys.N))
            errors.append(err)
            bounds.append(quad + rounding)
        # strict decrease is demanded only while the error is resolved above noise
        resolved = [e > 1e3 * b for e, b in zip(errors, bounds)]
        if resolved[0]:
            ok = all(e1 < e0 for e0, e1, r in zip(errors, errors[1:], resolved) if r)
            rep.check_true("strictly_decreasing", ok, index=(i, j),
                           note=" ".join(f"{e:.3e}" for e in errors))
    return rep


def _coordinate_error(x, y, f, g, sys) -> float:
    ex = embed_error(f, sys)
    ey = embed_error(g, sys)
    scale = max([1.0, *map(abs, x.b), *map(abs, y.b)])
    return (ex + ey) * scale + l2_inner_err(x.h, y.h, sys.quadrature).error
