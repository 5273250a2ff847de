"""Finite decomposition, majorant norm, Hilbert product and the projection P.

Every test function splits uniquely as f = f^{N+} + sum_{i<=N} f^i chi_i with
f^i = f^(i)(0) / gamma_i and a remainder whose jet vanishes through order N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import NegativeSquare
from .funcrep import FunctionRep, exact_jet, l2_inner_err
from .neutral import NeutralSystem
from .profile import DEFAULT_B, InnerValue, log_regularity_weight, indefinite_inner, regularity_fit

NEG_SQUARE_REL = 1e-10


@dataclass(frozen=True)
class Decomposition:
    N: int
    coeffs: tuple[Fraction, ...]
    remainder: FunctionRep
    pairings: tuple[InnerValue, ...]

    @property
    def float_coeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)


@lru_cache(maxsize=4096)
def decompose(f: FunctionRep, sys: NeutralSystem) -> Decomposition:
    jet = exact_jet(f, sys.N)
    coeffs = tuple(v / Fraction(g) for v, g in zip(jet, sys.gamma))
    remainder = f
    for c, chi in zip(coeffs, sys.chi):
        if c:
            remainder = remainder - chi * c
    pairings = tuple(indefinite_inner(f, chi, sys.profile, sys.quadrature) for chi in sys.chi)
    return Decomposition(sys.N, coeffs, remainder, pairings)


@dataclass(frozen=True)
class MajorantValue:
    square: float
    tail_bound: float
    quad_err: float

    @property
    def value(self) -> float:
        return math.sqrt(max(self.square, 0.0))


def _majorant_tail(f: FunctionRep, sys: NeutralSystem, l2_sq: float, horizon: int = 40) -> float:
    """Bound on |p_{N'}(f)^2 - p_N(f)^2| for N' > N from the decay of the three term types."""
    p = sys.profile
    comp = p.compliance
    deg = f.degree_at_zero()
    cf = regularity_fit(exact_jet(f, deg), DEFAULT_B, p.rho, p.beta) if deg > p.N else 0.0
    norm = math.sqrt(max(l2_sq, 0.0))
    total = 0.0
    for i in range(p.N + 1, p.N + 1 + horizon):
        log_s = comp.log_envelope(i, p.delta) + 2 * p.delta * i * math.log(i)
        s = math.exp(min(log_s, 700.0))
        phi = 0.0
        if cf and i <= deg:
            phi = cf * math.exp(min(log_regularity_weight(i, DEFAULT_B, p.rho, p.beta)
                                    - p.delta * i * math.log(i), 700.0))
        term = (norm * math.sqrt(s) + s * phi) ** 2 + phi**2 * (1 + s) + 2 * phi * norm * math.sqrt(s)
        total += term
        if term < 1e-300 and i > deg:
            break
    return total


def majorant(f: FunctionRep, sys: NeutralSystem) -> MajorantValue:
    """p(f)^2 = <f^{N+}, f^{N+}> + sum_i (<f, chi_i>^2 + (f^i)^2), with error bookkeeping."""
    if f.is_zero:
        return MajorantValue(0.0, 0.0, 0.0)
    d = decompose(f, sys)
    rem = indefinite_inner(d.remainder, d.remainder, sys.profile, sys.quadrature)
    sq = rem.value + math.fsum(pv.value**2 for pv in d.pairings) + math.fsum(
        float(c) ** 2 for c in d.coeffs
    )
    quad = rem.quad_err + sum(2 * abs(pv.value) * pv.quad_err for pv in d.pairings)
    l2 = l2_inner_err(f, f, sys.quadrature).value
    if sq < -NEG_SQUARE_REL * (1 + l2):
        raise NegativeSquare(f"majorant square {sq:.3e} is negative beyond tolerance")
    return MajorantValue(sq, _majorant_tail(f, sys, l2), quad)


def majorant_norm(f: FunctionRep, sys: NeutralSystem) -> float:
    return majorant(f, sys).value


def hilbert_inner(f: FunctionRep, g: FunctionRep, sys: NeutralSystem) -> float:
    df = decompose(f, sys)
    dg = decompose(g, sys)
    rem = indefinite_inner(df.remainder, dg.remainder, sys.profile, sys.quadrature).value
    pair = math.fsum(a.value * b.value for a, b in zip(df.pairings, dg.pairings))
    coef = math.fsum(float(a * b) for a, b in zip(df.coeffs, dg.coeffs))
    return rem + pair + coef


def project_plus(f: FunctionRep, sys: NeutralSystem) -> FunctionRep:
    """Orthogonal projection onto the functions with vanishing jet through N."""
    return decompose(f, sys).remainder


def in_positive_part(f: FunctionRep, N: int) -> bool:
    """True when the jet of ``f`` vanishes through order N."""
    return f.degree_at_zero() < 0 or not any(exact_jet(f, N))
