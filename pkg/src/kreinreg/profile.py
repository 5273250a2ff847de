"""Singularity profiles and the indefinite inner product they induce.

A profile fixes the Taylor coefficients c_k^2 of the symbol
J(xi) = sum_k c_k^2 xi^k, the orders delta > beta > 1, and the truncation N.
The indefinite product of two test functions is

    <f, g> = int f g dx - sum_{k <= N} c_k^2 f^(k)(0) g^(k)(0),

and the damping coefficients are gamma_k = k^(k delta) with 0^0 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidProfile, TruncationMismatch, UnderflowRisk
from .funcrep import FunctionRep, exact_jet, l2_inner_err
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec

EPS_FLOOR = 1e-250
DEFAULT_B = 1.0


def _xlogx(k: int) -> float:
    return k * math.log(k) if k > 0 else 0.0


def _infra_log_c_sq(k: int, delta: float) -> float:
    if k == 0:
        return math.log(0.5)
    return -2 * delta * (_xlogx(k) + k) - k * math.log(2.0)


def _mild_log_c_sq(k: int, delta: float) -> float:
    return -k * math.log(2.0)


RULES: dict[str, Callable[[int, float], float]] = {
    "infra": _infra_log_c_sq,
    "mild": _mild_log_c_sq,
}


@dataclass(frozen=True)
class Compliance:
    """Least-squares fit of c_k^2 against C (theta/D)^k / (e^(2k delta) k^(2k delta)).

    ``ratio`` is the fitted theta/D; ``C`` is shifted up so the envelope
    dominates every c_k^2 with k <= N. Compliant means ratio < 1.
    """

    ratio: float
    C: float
    max_log_excess: float
    compliant: bool

    def log_envelope(self, k: int, delta: float) -> float:
        return math.log(self.C) + k * math.log(self.ratio) - 2 * delta * (k + _xlogx(k))


@dataclass(frozen=True)
class InnerValue:
    value: float
    tail_bound: float = 0.0
    quad_err: float = 0.0

    def __post_init__(self):
        if self.tail_bound < 0 or self.quad_err < 0:
            raise ValueError("error bounds must be nonnegative")

    @property
    def bound(self) -> float:
        return self.tail_bound + self.quad_err


@dataclass(frozen=True)
class SingularityProfile:
    c_sq: tuple[float, ...]
    delta: float
    beta: float
    N: int
    alpha: float = math.inf
    rho_param: float | None = None
    rule: str | None = None
    compliance: Compliance = field(default=None, compare=False, repr=False)

    @property
    def rho(self) -> float:
        return self.rho_param if self.rho_param is not None else 1.0 / (2 * self.delta)

    @property
    def gamma(self) -> tuple[float, ...]:
        return tuple(gamma_k(k, self.delta) for k in range(self.N + 1))

    @property
    def log_c_sq(self) -> tuple[float, ...]:
        if self.rule is not None:
            return tuple(RULES[self.rule](k, self.delta) for k in range(self.N + 1))
        return tuple(math.log(c) for c in self.c_sq)

    @property
    def damped_sq(self) -> tuple[float, ...]:
        """c_k^2 gamma_k^2, evaluated in logs."""
        return tuple(
            math.exp(lc + 2 * self.delta * _xlogx(k)) for k, lc in enumerate(self.log_c_sq)
        )

    @property
    def damped_partial_sums(self) -> tuple[float, ...]:
        return tuple(np.cumsum(self.damped_sq).tolist())

    @property
    def projection_constant(self) -> float:
        """(1 + sum_k c_k^2 gamma_k^2)^(1/2)."""
        return math.sqrt(1.0 + self.damped_partial_sums[-1])

    def with_truncation(self, N: int) -> "SingularityProfile":
        if N == self.N:
            return self
        if N < self.N:
            return make_profile(
                self.c_sq[: N + 1], self.delta, self.beta, N, self.alpha, self.rho_param, self.rule
            )
        if self.rule is None:
            raise TruncationMismatch(
                f"profile given as an explicit list of length {self.N + 1} cannot be extended to N={N}"
            )
        return profile_from_rule(self.rule, self.delta, self.beta, N, self.alpha, self.rho_param)

    def to_config(self) -> dict[str, str]:
        rule = self.rule if self.rule else ",".join(repr(c) for c in self.c_sq)
        out = {"c_sq_rule": rule, "delta": repr(self.delta), "beta": repr(self.beta), "N": str(self.N),
               "alpha": repr(self.alpha)}
        if self.rho_param is not None:
            out["rho_param"] = repr(self.rho_param)
        return out


def gamma_k(k: int, delta: float) -> float:
    if k < 0:
        raise ValueError("negative index")
    if k == 0:
        return 1.0
    power = k * delta
    try:
        if float(power).is_integer():
            return float(k ** int(power))
        return math.exp(power * math.log(k))
    except OverflowError as exc:
        raise InvalidProfile(f"gamma_{k} overflows binary64 for delta={delta}") from exc


def _fit_compliance(log_c_sq: Sequence[float], delta: float) -> Compliance:
    ks = np.arange(len(log_c_sq))
    y = np.array([lc + 2 * delta * (k + _xlogx(k)) for k, lc in enumerate(log_c_sq)])
    # c_0 only fixes normalisation; the geometric rate is read off k >= 1
    sel = ks >= 1 if len(ks) >= 3 else np.ones_like(ks, dtype=bool)
    if sel.sum() >= 2:
        slope, _ = np.polyfit(ks[sel], y[sel], 1)
    else:
        slope = math.log(0.5)
    log_C = float(np.max(y - slope * ks))
    excess = float(np.max(y - (log_C + slope * ks)))
    ratio = math.exp(slope)
    return Compliance(ratio=ratio, C=math.exp(log_C), max_log_excess=excess, compliant=ratio < 1.0)


def make_profile(
    c_sq: Sequence[float],
    delta: float,
    beta: float,
    N: int,
    alpha: float = math.inf,
    rho_param: float | None = None,
    rule: str | None = None,
) -> SingularityProfile:
    if N < 0:
        raise InvalidProfile("truncation order must be nonnegative")
    c_sq = tuple(float(c) for c in c_sq)
    if len(c_sq) < N + 1:
        raise InvalidProfile(f"need {N + 1} coefficients c_k^2, got {len(c_sq)}")
    c_sq = c_sq[: N + 1]
    bad = [k for k, c in enumerate(c_sq) if not (c > 0 and math.isfinite(c))]
    if bad:
        raise InvalidProfile(f"c_k^2 must be strictly positive; offending k = {bad}")
    if not beta > 1:
        raise InvalidProfile(f"beta must exceed 1 (got {beta})")
    if not delta > beta:
        raise InvalidProfile(f"delta must exceed beta (got delta={delta}, beta={beta})")
    if not 0 <= alpha <= math.inf:
        raise InvalidProfile("alpha must lie in [0, inf]")
    for k in range(N + 1):
        gamma_k(k, delta)
    prof = SingularityProfile(c_sq, float(delta), float(beta), N, float(alpha), rho_param, rule)
    return replace(prof, compliance=_fit_compliance(prof.log_c_sq, prof.delta))


def profile_from_rule(
    rule: str, delta: float = 2.0, beta: float = 1.5, N: int = 6,
    alpha: float = math.inf, rho_param: float | None = None,
) -> SingularityProfile:
    if rule not in RULES:
        raise InvalidProfile(f"unknown c_sq rule {rule!r}; known: {sorted(RULES)}")
    c_sq = [math.exp(RULES[rule](k, delta)) for k in range(N + 1)]
    return make_profile(c_sq, delta, beta, N, alpha, rho_param, rule)


def default_profile(N: int = 6) -> SingularityProfile:
    return profile_from_rule("infra", 2.0, 1.5, N)


def mild_profile(N: int = 6) -> SingularityProfile:
    return profile_from_rule("mild", 2.0, 1.5, N)


def symbol_eval(p: SingularityProfile, xi: float) -> float:
    acc = 0.0
    for c in reversed(p.c_sq):
        acc = acc * xi + c
    return acc


def infra_exponential_constant(
    p: SingularityProfile, eps: float = 0.1, xi_max: float = 100.0, samples: int = 2001
) -> float:
    """Sampled C_eps = max_xi J(xi) / exp(eps |xi|^(1/(2 delta)))."""
    xs = np.linspace(0.0, xi_max, samples)
    vals = np.array([symbol_eval(p, x) for x in xs])
    return float(np.max(vals / np.exp(eps * np.abs(xs) ** (1.0 / (2 * p.delta)))))


def log_regularity_weight(k: int, B: float, rho: float, beta: float) -> float:
    return k * math.log(B + rho) + beta * _xlogx(k)


def regularity_fit(jet: Sequence, B: float = DEFAULT_B, rho: float = 0.25, beta: float = 1.5) -> float:
    """Smallest C_f with |f^(k)(0)| <= C_f (B + rho)^k k^(k beta) over the given jet."""
    if len(jet) == 0:
        raise ValueError("jet must be nonempty")
    best = -math.inf
    for k, v in enumerate(jet):
        if v == 0:
            continue
        if isinstance(v, Fraction):
            lv = math.log(abs(v.numerator)) - math.log(v.denominator)
        else:
            lv = math.log(abs(float(v)))
        best = max(best, lv - log_regularity_weight(k, B, rho, beta))
    return 0.0 if best == -math.inf else math.exp(best)


def tail_bound(p: SingularityProfile, f: FunctionRep, g: FunctionRep) -> float:
    """Bound on |sum_{k > N} c_k^2 f^(k)(0) g^(k)(0)| from the fitted envelope of c_k^2.

    Jets of tree functions vanish beyond their polynomial degree at 0, so
    the sum is finite. Two bounds are formed, one from the regularity
    constants of f and g and one from their exact jets; the smaller is
    returned.
    """
    top = min(f.degree_at_zero(), g.degree_at_zero())
    if top <= p.N:
        return 0.0
    jf = exact_jet(f, top)
    jg = exact_jet(g, top)
    cf = regularity_fit(jf, DEFAULT_B, p.rho, p.beta)
    cg = regularity_fit(jg, DEFAULT_B, p.rho, p.beta)
    if cf == 0 or cg == 0:
        return 0.0
    comp = p.compliance
    by_fit = 0.0
    by_jet = 0.0
    for k in range(p.N + 1, top + 1):
        env = comp.log_envelope(k, p.delta)
        lt = env + 2 * log_regularity_weight(k, DEFAULT_B, p.rho, p.beta)
        by_fit += math.exp(min(lt + math.log(cf) + math.log(cg), 700.0))
        prod = abs(jf[k] * jg[k])
        if prod:
            by_jet += math.exp(min(env + _log_abs(prod), 700.0))
    return min(by_fit, by_jet)


def _log_abs(q: Fraction) -> float:
    return math.log(abs(q.numerator)) - math.log(q.denominator)


def jet_correction(p: SingularityProfile, f: FunctionRep, g: FunctionRep) -> float:
    """sum_{k <= N} c_k^2 f^(k)(0) g^(k)(0)."""
    if f.degree_at_zero() < 0 or g.degree_at_zero() < 0:
        return 0.0
    jf = exact_jet(f, p.N)
    jg = exact_jet(g, p.N)
    return math.fsum(c * float(a * b) for c, a, b in zip(p.c_sq, jf, jg) if a and b)


def indefinite_inner(
    f: FunctionRep, g: FunctionRep, p: SingularityProfile, q: QuadratureSpec = DEFAULT_QUADRATURE
) -> InnerValue:
    l2 = l2_inner_err(f, g, q)
    corr = jet_correction(p, f, g)
    return InnerValue(l2.value - corr, tail_bound(p, f, g), l2.error)


def eps_seq(p: SingularityProfile) -> list[float]:
    """epsilon_i = (1/(3e)) prod_{k <= i} min(1, c_k^2)."""
    out = []
    eps = 1.0 / (3.0 * math.e)
    for i, c in enumerate(p.c_sq):
        eps = eps * min(1.0, c)
        if eps < EPS_FLOOR:
            raise UnderflowRisk(
                f"epsilon_{i} = {eps:.3e} falls below {EPS_FLOOR:.0e}; lower the truncation N"
            )
        out.append(eps)
    return out


def damping_monotone(p: SingularityProfile) -> list[int]:
    """Indices k >= 2 where gamma_k c_k fails to decrease (empty when monotone)."""
    d = p.damped_sq
    return [k for k in range(3, len(d)) if not d[k] < d[k - 1]]
