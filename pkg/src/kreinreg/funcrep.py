"""Exact representation of compactly supported smooth test functions.

A :class:`FunctionRep` is the expanded normal form of an expression tree
built from plateau bumps, translations, dilations, monomial factors,
derivatives, scalar multiples and finite sums. Every such tree expands into
a finite sum of terms

    coeff * (x - c)^m * rho_eps^(d)(x - c),

where ``rho_eps`` is the plateau bump of width ``eps``. Coefficients and
centres are kept as :class:`fractions.Fraction`, so tree algebra (sums,
cancellations, products with x, derivatives) and jets at the origin are
exact; only pointwise values and integrals go through binary64.

Integrals are assembled term pair by term pair. Each pair is integrated in
the scaled variable of its narrower factor, so supports of width 1e-200 are
as easy as supports of width 1. Pair contributions whose magnitude lies
below ``UNDERFLOW_FLOOR`` are flushed to exactly zero (never denormalised)
and their size is charged to the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial
from numbers import Rational, Real
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from . import _transition
from .errors import EmptyCombination, UnsupportedNode
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec, integrate

UNDERFLOW_FLOOR = 1e-300
_LOG_FLOOR = math.log(UNDERFLOW_FLOOR)
MAX_JET_ORDER = 64
MAX_MOMENT_ORDER = 32


def as_fraction(value) -> Fraction:
    """Exact rational value of an int, Fraction or finite float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {value!r}")
    return Fraction(value)


def _log_abs(q: Fraction) -> float:
    return math.log(abs(q.numerator)) - math.log(q.denominator)


class Integral(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True, order=True)
class Term:
    """Shape of one summand: ``(x - center)^power * rho_eps^(deriv)(x - center)``."""

    power: int
    deriv: int
    center: Fraction
    eps: float

    @cached_property
    def exact_support(self) -> tuple[Fraction, Fraction]:
        half = Fraction(3, 2) * Fraction(self.eps)
        return self.center - half, self.center + half

    @cached_property
    def support(self) -> tuple[float, float]:
        lo, hi = self.exact_support
        return float(lo), float(hi)

    def jet_contribution(self, order: int) -> list[Fraction]:
        """Exact derivatives 0..order at the origin of the unit-coefficient term."""
        eps = Fraction(self.eps)
        dist = abs(self.center)
        out = [Fraction(0)] * (order + 1)
        if dist >= Fraction(3, 2) * eps:
            return out
        if dist > eps / 2:
            raise UnsupportedNode(
                f"origin lies in the transition band of a bump (centre {self.center}, "
                f"width {self.eps}); its jet is not exact"
            )
        if self.deriv > 0:
            return out
        # plateau: the term is the polynomial (x - c)^m near 0
        m = self.power
        shift = -self.center
        for k in range(min(m, order) + 1):
            out[k] = Fraction(factorial(m), factorial(m - k)) * shift ** (m - k)
        return out

    def values(self, x: np.ndarray) -> np.ndarray:
        y = x - float(self.center)
        with np.errstate(over="ignore", invalid="ignore"):
            shape = _transition.plateau(y / self.eps, self.deriv)
            if self.deriv:
                shape = shape * self.eps ** (-self.deriv)
            return np.where(shape == 0.0, 0.0, y**self.power * shape)


def _normalise(pairs: Iterable[tuple[Term, Fraction]]) -> tuple[tuple[Term, Fraction], ...]:
    acc: dict[Term, Fraction] = {}
    for term, coeff in pairs:
        acc[term] = acc.get(term, Fraction(0)) + coeff
    return tuple(sorted((t, c) for t, c in acc.items() if c != 0))


class FunctionRep:
    """Immutable finite sum of plateau-bump terms with exact coefficients.

    Supports ``+``, ``-``, unary ``-`` and multiplication by real scalars.
    Calling the object evaluates it pointwise. Equality is structural on
    the expanded normal form.
    """

    __slots__ = ("terms", "__dict__")

    def __init__(self, terms: Iterable[tuple[Term, Fraction]] = ()):
        object.__setattr__(self, "terms", _normalise(terms))

    def __setattr__(self, name, value):
        if name == "terms":
            raise AttributeError("FunctionRep is immutable")
        object.__setattr__(self, name, value)

    # -- algebra ------------------------------------------------------
    def __add__(self, other: "FunctionRep") -> "FunctionRep":
        if not isinstance(other, FunctionRep):
            return NotImplemented
        return FunctionRep(self.terms + other.terms)

    def __neg__(self) -> "FunctionRep":
        return FunctionRep((t, -c) for t, c in self.terms)

    def __sub__(self, other: "FunctionRep") -> "FunctionRep":
        if not isinstance(other, FunctionRep):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "FunctionRep":
        if isinstance(scalar, FunctionRep) or not isinstance(scalar, (Real, Fraction)):
            return NotImplemented
        s = as_fraction(scalar)
        return FunctionRep((t, s * c) for t, c in self.terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FunctionRep):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "FunctionRep(0)"
        parts = [
            f"{float(c):.4g}*(x-{float(t.center):g})^{t.power}*rho[{t.eps:.3g}]^({t.deriv})"
            for t, c in self.terms[:4]
        ]
        more = f" + ... ({len(self.terms)} terms)" if len(self.terms) > 4 else ""
        return "FunctionRep(" + " + ".join(parts) + more + ")"

    # -- inspection ---------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def support(self) -> tuple[float, float] | None:
        """Hull of the term supports, or ``None`` for the zero function."""
        if not self.terms:
            return None
        return (
            min(t.support[0] for t, _ in self.terms),
            max(t.support[1] for t, _ in self.terms),
        )

    @cached_property
    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for _, c in self.terms])

    @cached_property
    def log_coeffs(self) -> np.ndarray:
        return np.array([_log_abs(c) for _, c in self.terms])

    @cached_property
    def breakpoints(self) -> list[float]:
        pts = set()
        for t, _ in self.terms:
            c = float(t.center)
            for k in (-1.5, -0.5, 0.5, 1.5):
                pts.add(c + k * t.eps)
        return sorted(pts)

    def degree_at_zero(self) -> int:
        """Highest order at which the jet at 0 can be nonzero (-1 if identically zero)."""
        deg = -1
        for t, _ in self.terms:
            if t.deriv == 0 and abs(t.center) <= Fraction(t.eps) / 2:
                deg = max(deg, t.power)
        return deg

    def __call__(self, x):
        return evaluate(self, x)


def evaluate(f: FunctionRep, x) -> np.ndarray | float:
    """Pointwise value of ``f``; exactly 0 outside its support."""
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    out = np.zeros_like(flat)
    for (term, _), coeff in zip(f.terms, f.float_coeffs):
        lo, hi = term.support
        inside = (flat > lo) & (flat < hi)
        if inside.any():
            out[inside] += coeff * term.values(flat[inside])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# -- primitives ------------------------------------------------------------
def plateau_bump(eps: float) -> FunctionRep:
    """The plateau bump of width ``eps`` (no underflow guard; see ``bumps.rho_eps``)."""
    return FunctionRep([(Term(0, 0, Fraction(0), float(eps)), Fraction(1))])


def translate(f: FunctionRep, shift) -> FunctionRep:
    """``x -> f(x - shift)``."""
    s = as_fraction(shift)
    return FunctionRep(
        (Term(t.power, t.deriv, t.center + s, t.eps), c) for t, c in f.terms
    )


def dilate(f: FunctionRep, factor) -> FunctionRep:
    """``x -> f(x / factor)`` for ``factor > 0``."""
    s = as_fraction(factor)
    if s <= 0:
        raise ValueError("dilation factor must be positive")
    out = []
    for t, c in f.terms:
        eps = float(s * Fraction(t.eps))
        out.append((Term(t.power, t.deriv, s * t.center, eps), c * s ** (t.deriv - t.power)))
    return FunctionRep(out)


def times_monomial(f: FunctionRep, i: int) -> FunctionRep:
    """Multiply by ``x^i / i!``."""
    if i < 0:
        raise ValueError("monomial order must be nonnegative")
    scale = Fraction(1, factorial(i))
    out = []
    for t, c in f.terms:
        # x^i = sum_j C(i, j) c^(i-j) (x - c)^j
        for j in range(i + 1):
            coeff = c * scale * comb(i, j) * t.center ** (i - j)
            if coeff:
                out.append((Term(t.power + j, t.deriv, t.center, t.eps), coeff))
    return FunctionRep(out)


def times_x(f: FunctionRep) -> FunctionRep:
    return times_monomial(f, 1)


def derivative(f: FunctionRep) -> FunctionRep:
    out = []
    for t, c in f.terms:
        if t.power:
            out.append((Term(t.power - 1, t.deriv, t.center, t.eps), c * t.power))
        out.append((Term(t.power, t.deriv + 1, t.center, t.eps), c))
    return FunctionRep(out)


def combine(terms: Sequence[tuple[object, FunctionRep]]) -> FunctionRep:
    """Linear combination ``sum coeff_k * f_k``."""
    if not terms:
        raise EmptyCombination("combine needs at least one (coefficient, function) pair")
    out = []
    for coeff, f in terms:
        a = as_fraction(coeff)
        out.extend((t, a * c) for t, c in f.terms)
    return FunctionRep(out)


def zero() -> FunctionRep:
    return FunctionRep()


# -- jets ------------------------------------------------------------------
def exact_jet(f: FunctionRep, order: int) -> tuple[Fraction, ...]:
    """Exact derivatives ``f^(0)(0) .. f^(order)(0)``."""
    if not 0 <= order <= MAX_JET_ORDER:
        raise ValueError(f"jet order must lie in [0, {MAX_JET_ORDER}]")
    out = [Fraction(0)] * (order + 1)
    for term, coeff in f.terms:
        for k, v in enumerate(term.jet_contribution(order)):
            if v:
                out[k] += coeff * v
    return tuple(out)


def jet_at_zero(f: FunctionRep, order: int) -> list[float]:
    return [float(v) for v in exact_jet(f, order)]


# -- integrals -------------------------------------------------------------
def _scaled_terms_product(t_ref: Term, t_oth: Term):
    """Integrand in the scaled variable of ``t_ref`` and its log prefactor."""
    e_r, e_o = t_ref.eps, t_oth.eps
    offset = float(t_oth.center - t_ref.center)
    concentric = offset == 0.0
    log_scale = (t_ref.power - t_ref.deriv + 1) * math.log(e_r) - t_oth.deriv * math.log(e_o)
    if concentric:
        log_scale += t_oth.power * math.log(e_r)
    return offset, concentric, log_scale


@lru_cache(maxsize=200_000)
def _pair_integral(
    m_r: int, d_r: int, m_o: int, d_o: int, offset: float, e_r: float, e_o: float,
    spec: QuadratureSpec,
) -> tuple[float, float]:
    """Scaled integral of a reference term (centre 0) against another term.

    The reference term is the narrower one. Returns ``(J, err)``; the
    physical integral is ``exp(log_scale) * J``.
    """
    concentric = offset == 0.0
    if concentric and (m_r + m_o + d_r + d_o) % 2:
        return 0.0, 0.0
    ratio = e_r / e_o
    lo_o = (offset - 1.5 * e_o) / e_r
    hi_o = (offset + 1.5 * e_o) / e_r
    lo, hi = max(-1.5, lo_o), min(1.5, hi_o)
    if not hi > lo:
        return 0.0, 0.0

    def integrand(s):
        ref = s**m_r * _transition.plateau(s, d_r)
        if concentric:
            oth = s**m_o * _transition.plateau(s * ratio, d_o)
        else:
            y = e_r * s - offset
            oth = y**m_o * _transition.plateau(y / e_o, d_o)
        return ref * oth

    cuts = [-0.5, 0.5]
    for k in (-1.5, -0.5, 0.5, 1.5):
        cuts.append((offset + k * e_o) / e_r)
    if concentric and m_r + m_o + d_r + d_o == 0 and lo == -hi:
        # even integrand on a symmetric interval: integrate half
        cuts = [c for c in cuts if 0 < c < hi]
        val, err = integrate(integrand, 0.0, hi, spec, cuts)
        return 2 * val, 2 * err
    return integrate(integrand, lo, hi, spec, cuts)


def _overlap_mask(f: FunctionRep, g: FunctionRep) -> np.ndarray:
    lo_f = np.array([t.support[0] for t, _ in f.terms])
    hi_f = np.array([t.support[1] for t, _ in f.terms])
    lo_g = np.array([t.support[0] for t, _ in g.terms])
    hi_g = np.array([t.support[1] for t, _ in g.terms])
    return (lo_f[:, None] < hi_g[None, :]) & (lo_g[None, :] < hi_f[:, None])


def _term_pair(t1: Term, t2: Term, spec: QuadratureSpec) -> tuple[float, float, float]:
    """``(log_scale, J, err)`` for the unit-coefficient product of two terms."""
    if (t2.eps, t2.power, t2.deriv) < (t1.eps, t1.power, t1.deriv):
        t1, t2 = t2, t1
    offset, _, log_scale = _scaled_terms_product(t1, t2)
    val, err = _pair_integral(t1.power, t1.deriv, t2.power, t2.deriv, offset, t1.eps, t2.eps, spec)
    return log_scale, val, err


def l2_inner_err(f: FunctionRep, g: FunctionRep, q: QuadratureSpec = DEFAULT_QUADRATURE) -> Integral:
    """``int f g dx`` with an error estimate (real-valued functions)."""
    if f.is_zero or g.is_zero:
        return Integral(0.0, 0.0)
    fs, gs = f.support, g.support
    if not (fs[0] < gs[1] and gs[0] < fs[1]):
        return Integral(0.0, 0.0)
    mask = _overlap_mask(f, g)
    same = f is g or f == g
    total = 0.0
    err = 0.0
    for i, j in zip(*np.nonzero(mask)):
        if same and j < i:
            continue
        weight = 2.0 if same and j > i else 1.0
        t1, c1 = f.terms[i]
        t2, c2 = g.terms[j]
        log_scale, val, e = _term_pair(t1, t2, q)
        if val == 0.0 and e == 0.0:
            continue
        log_c = f.log_coeffs[i] + g.log_coeffs[j] + log_scale
        sign = 1.0 if (c1 > 0) == (c2 > 0) else -1.0
        if val != 0.0:
            log_v = log_c + math.log(abs(val))
            if log_v < _LOG_FLOOR:
                err += weight * UNDERFLOW_FLOOR
            else:
                total += weight * sign * math.copysign(math.exp(log_v), val)
        if e > 0.0:
            log_e = log_c + math.log(e)
            err += weight * (math.exp(log_e) if log_e >= _LOG_FLOOR else UNDERFLOW_FLOOR)
    return Integral(total, err)


def l2_inner(f: FunctionRep, g: FunctionRep, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return l2_inner_err(f, g, q).value


def l2_norm(f: FunctionRep, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return math.sqrt(max(l2_inner(f, f, q), 0.0))


@lru_cache(maxsize=50_000)
def _term_moment(k: int, m: int, d: int, center: float, eps: float, spec: QuadratureSpec):
    """Scaled ``int x^k (x-c)^m rho_eps^(d)(x-c) dx`` as ``(log_scale, J, err)``.

    The d derivatives are moved onto the polynomial factor by parts (no
    boundary terms on compact support), so J integrates against the plateau
    itself and exact cancellations stay exact.
    """
    if center == 0.0:
        n = k + m
        if (n + d) % 2 or n < d:
            return 0.0, 0.0, 0.0
        log_scale = (n + 1 - d) * math.log(eps)
        fall = math.perm(n, d) * (-1) ** d
        val, err = integrate(
            lambda s: s ** (n - d) * _transition.plateau(s, 0), -1.5, 1.5, spec, [-0.5, 0.5]
        )
        return log_scale, fall * val, abs(fall) * err
    log_scale = (m + 1 - d) * math.log(eps)
    poly = Polynomial([center, eps]) ** k * Polynomial([0.0, 1.0]) ** m
    if d:
        poly = poly.deriv(d) * (-1) ** d
    if not np.any(poly.coef):
        return log_scale, 0.0, 0.0
    val, err = integrate(
        lambda s: poly(s) * _transition.plateau(s, 0), -1.5, 1.5, spec, [-0.5, 0.5]
    )
    return log_scale, val, err


def moment_err(f: FunctionRep, k: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> Integral:
    if not 0 <= k <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must lie in [0, {MAX_MOMENT_ORDER}]")
    total = 0.0
    err = 0.0
    for (t, c), log_c in zip(f.terms, f.log_coeffs):
        log_scale, val, e = _term_moment(k, t.power, t.deriv, float(t.center), t.eps, q)
        sign = 1.0 if c > 0 else -1.0
        if val != 0.0:
            log_v = log_c + log_scale + math.log(abs(val))
            if log_v < _LOG_FLOOR:
                err += UNDERFLOW_FLOOR
            else:
                total += sign * math.copysign(math.exp(log_v), val)
        if e > 0.0:
            err += math.exp(max(log_c + log_scale + math.log(e), _LOG_FLOOR))
    return Integral(total, err)


def moment(f: FunctionRep, k: int, q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """``int x^k f(x) dx``."""
    return moment_err(f, k, q).value


def pointwise_integral(
    f: FunctionRep, weight=None, q: QuadratureSpec = DEFAULT_QUADRATURE
) -> Integral:
    """Integrate ``weight(x) * f(x)`` by sampling ``f`` pointwise over its support.

    Independent of the term-pair machinery; intended as a cross-check.
    ``weight`` may return complex values.
    """
    if f.is_zero:
        return Integral(0.0, 0.0)
    lo, hi = f.support
    if weight is None:
        return Integral(*integrate(lambda x: evaluate(f, x), lo, hi, q, f.breakpoints))
    probe = np.asarray(weight(np.array([0.5 * (lo + hi)])))
    if np.iscomplexobj(probe):
        re = integrate(lambda x: np.real(weight(x)) * evaluate(f, x), lo, hi, q, f.breakpoints)
        im = integrate(lambda x: np.imag(weight(x)) * evaluate(f, x), lo, hi, q, f.breakpoints)
        return Integral(complex(re[0], im[0]), abs(complex(re[1], im[1])))
    return Integral(*integrate(lambda x: weight(x) * evaluate(f, x), lo, hi, q, f.breakpoints))
