"""Momentum-space Schroedinger pair acting on test functions.

The momentum operator multiplies by the coordinate, the position operator
is i d/dp. Every stored function stays real: the factor i of the position
operator is carried by :attr:`OperatorTag.phase` and only enters when two
sides of a pairing are compared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import replace
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import IndexOutOfRange, SupportStraddlesOrigin
from .funcrep import (
    MAX_MOMENT_ORDER, FunctionRep, derivative, evaluate, exact_jet, l2_norm, moment_err,
    pointwise_integral, times_x,
)
from .krein import embed, gram, v_basis_vector
from .neutral import NeutralSystem
from .profile import SingularityProfile, indefinite_inner
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec, integrate

MOMENT_REL = 1e-9


class OperatorTag(enum.Enum):
    MOMENTUM = "momentum"
    POSITION = "position"

    @property
    def phase(self) -> complex:
        return 1.0 + 0j if self is OperatorTag.MOMENTUM else 1j


def apply_momentum(f: FunctionRep) -> FunctionRep:
    return times_x(f)


def apply_position(f: FunctionRep) -> FunctionRep:
    """Real part of the action: f'. The factor i is implied by ``OperatorTag.POSITION``."""
    return derivative(f)


def apply(op: OperatorTag, f: FunctionRep) -> FunctionRep:
    return apply_momentum(f) if op is OperatorTag.MOMENTUM else apply_position(f)


def symmetry_defect(op: OperatorTag, f: FunctionRep, g: FunctionRep, p: SingularityProfile,
                    q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """|<op f, g> - <f, op g>| for the sesquilinear extension of the real form.

    The phase is conjugated on the left slot, so for the position operator
    the comparison becomes |<f', g> + <f, g'>|.
    """
    left = indefinite_inner(apply(op, f), g, p, q).value
    right = indefinite_inner(f, apply(op, g), p, q).value
    ph = op.phase
    return abs(ph.conjugate() * left - ph * right)


def commutator(f: FunctionRep) -> FunctionRep:
    """Real part of [q, p] f / i, i.e. (x f)' - x f'."""
    return apply_position(apply_momentum(f)) - apply_momentum(apply_position(f))


def commutation_holds(f: FunctionRep) -> bool:
    """Structural check that [q, p] = i on ``f``."""
    return commutator(f) == f


class MomentIdentity(NamedTuple):
    lhs: float
    rhs: float
    imag_residue: float
    error: float

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)


def moment_identity_check(f: FunctionRep, k: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> MomentIdentity:
    """i^k times the k-th derivative at 0 of the Fourier transform, against the k-th moment.

    The left side integrates f against (-ix)^k pointwise with complex
    arithmetic; the right side uses the term-wise moment.
    """
    if not 0 <= k <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must lie in [0, {MAX_MOMENT_ORDER}]")
    # an exactly vanishing moment has no relative scale; use int |x|^k |f|
    floor = replace(q, abs_tol=max(q.abs_tol, 1e-13 * _abs_moment(f, k, q)))
    ft = pointwise_integral(f, lambda x: (-1j * x) ** k, floor)
    lhs = complex(ft.value) * 1j**k
    rhs = moment_err(f, k, q)
    return MomentIdentity(lhs.real, rhs.value, abs(lhs.imag), ft.error + rhs.error)


def _abs_moment(f: FunctionRep, k: int, q: QuadratureSpec) -> float:
    if f.is_zero:
        return 0.0
    lo, hi = f.support
    # |f| has kinks at sign changes; only a scale is needed here
    loose = replace(q, rel_tol=max(q.rel_tol, 1e-6))
    val, _ = integrate(lambda x: np.abs(x) ** k * np.abs(evaluate(f, x)), lo, hi, loose, f.breakpoints)
    return val


def in_l2_zero(f: FunctionRep, K: int, q: QuadratureSpec = DEFAULT_QUADRATURE, rel: float = MOMENT_REL) -> bool:
    """True when the moments 0..K of ``f`` vanish relative to int |x|^k |f|."""
    for k in range(K + 1):
        mu = moment_err(f, k, q)
        if abs(mu.value) > rel * _abs_moment(f, k, q) + mu.error:
            return False
    return True


def momentum_coordinate(i: int, f: FunctionRep, sys: NeutralSystem) -> float:
    """<v_i, p f> in the coordinate model."""
    if not 0 <= i <= sys.N:
        raise IndexOutOfRange(f"index {i} outside 0..{sys.N}")
    return gram(v_basis_vector(i, sys.N), embed(apply_momentum(f), sys), sys, "indefinite")


def jet_shift_coefficient(i: int, f: FunctionRep, sys: NeutralSystem) -> float:
    """(p f)^i from the jet of f alone: i f^(i-1)(0) / gamma_i."""
    if not 0 <= i <= sys.N:
        raise IndexOutOfRange(f"index {i} outside 0..{sys.N}")
    if i == 0:
        return 0.0
    jet = exact_jet(f, i - 1)
    return float(i * jet[i - 1] / Fraction(sys.gamma[i]))


def delocalization_check(i: int, f: FunctionRep, sys: NeutralSystem) -> float:
    return momentum_coordinate(i, f, sys) - jet_shift_coefficient(i, f, sys)


def split_movers(f: FunctionRep) -> tuple[FunctionRep, FunctionRep]:
    """Split into the parts supported on x <= 0 and on x >= 0."""
    minus, plus = [], []
    for t, c in f.terms:
        lo, hi = t.exact_support
        if lo < 0 < hi:
            raise SupportStraddlesOrigin(
                f"term centred at {float(t.center):g} with width {t.eps:g} covers the origin"
            )
        (plus if lo >= 0 else minus).append((t, c))
    return FunctionRep(minus), FunctionRep(plus)


def symmetry_scale(f: FunctionRep, g: FunctionRep, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Natural size of the pairings in :func:`symmetry_defect`, used for relative tolerances."""
    nf, ng = l2_norm(f, q), l2_norm(g, q)
    return max(nf * l2_norm(times_x(g), q) + ng * l2_norm(times_x(f), q),
               nf * l2_norm(derivative(g), q) + ng * l2_norm(derivative(f), q), math.ulp(1.0))


__all__ = [
    "MomentIdentity", "OperatorTag", "apply", "apply_momentum", "apply_position", "commutation_holds",
    "commutator", "delocalization_check", "in_l2_zero", "jet_shift_coefficient", "moment_identity_check",
    "momentum_coordinate", "split_movers", "symmetry_defect", "symmetry_scale",
]
