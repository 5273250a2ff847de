"""Reference plateau profile on the unit scale.

``plateau(s)`` equals 1 for ``|s| <= 1/2``, 0 for ``|s| >= 3/2`` and on the
transition band ``1/2 < |s| < 3/2`` it is the normalised tail integral

    plateau(s) = int_{|s|}^{3/2} b(t) dt / int_{1/2}^{3/2} b(t) dt,
    b(t) = exp(-1 / ((t - 1/2) (3/2 - t))).

Every other width is obtained by dilation, ``rho_eps(x) = plateau(x / eps)``,
so no width-dependent exponentials ever underflow.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

import numpy as np

from .quadrature import QuadratureSpec, _nodes, integrate

LEFT = 0.5
RIGHT = 1.5
_TABLE_CELLS = 128
_CELL_ORDER = 24


def bump(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > LEFT) & (t < RIGHT)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((ti - LEFT) * (RIGHT - ti)))
    return out


def bump_derivatives(t: np.ndarray, n: int) -> np.ndarray:
    """Rows 0..n hold b, b', ..., b^(n) at the points ``t``.

    With u = log b = -(1/(t-l) + 1/(r-t)) (unit band width) the derivatives
    of u have closed forms, and b^(m+1) = sum_k C(m,k) u^(k+1) b^(m-k).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((n + 1, t.size))
    inside = (t > LEFT) & (t < RIGHT)
    if not inside.any():
        return out
    ti = t[inside]
    base = np.exp(-1.0 / ((ti - LEFT) * (RIGHT - ti)))
    live = base > 0.0
    ti, base = ti[live], base[live]
    p = ti - LEFT
    q = RIGHT - ti
    # du[k] = u^(k+1)
    du = [
        -(((-1) ** (k + 1)) * factorial(k + 1) / p ** (k + 2) + factorial(k + 1) / q ** (k + 2))
        for k in range(n)
    ]
    rows = [base]
    for m in range(n):
        acc = np.zeros_like(base)
        for k in range(m + 1):
            acc += comb(m, k) * du[k] * rows[m - k]
        rows.append(acc)
    idx = np.flatnonzero(inside)[live]
    for m, row in enumerate(rows):
        out[m, idx] = row
    return out


_TABLE_SPEC = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_panels=20000, order=30)


@lru_cache(maxsize=1)
def _tail_table() -> tuple[np.ndarray, np.ndarray, float]:
    """Cell edges and the tail integrals int_{edge}^{3/2} b, plus the total mass."""
    edges = np.linspace(LEFT, RIGHT, _TABLE_CELLS + 1)
    pieces = np.array(
        [integrate(bump, a, b, _TABLE_SPEC)[0] for a, b in zip(edges[:-1], edges[1:])]
    )
    tails = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    return edges, tails, float(tails[0])


def normaliser() -> float:
    return _tail_table()[2]


def _tail_integral(t: np.ndarray) -> np.ndarray:
    """int_t^{3/2} b for t in [1/2, 3/2]."""
    edges, tails, _ = _tail_table()
    cell = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, _TABLE_CELLS - 1)
    upper = edges[cell + 1]
    x, w = _nodes(_CELL_ORDER)
    half = 0.5 * (upper - t)
    mid = 0.5 * (upper + t)
    nodes = half[:, None] * x[None, :] + mid[:, None]
    partial = half * (bump(nodes.ravel()).reshape(nodes.shape) @ w)
    return tails[cell + 1] + partial


def plateau(s: np.ndarray, order: int = 0) -> np.ndarray:
    """Derivative of the given ``order`` of the unit plateau profile."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    a = np.abs(s)
    out = np.zeros_like(s)
    band = (a > LEFT) & (a < RIGHT)
    if order == 0:
        out[a <= LEFT] = 1.0
        if band.any():
            out[band] = _tail_integral(a[band]) / normaliser()
    elif band.any():
        derivs = bump_derivatives(a[band], order - 1)[order - 1]
        sign = np.sign(s[band]) ** order
        out[band] = -sign * derivs / normaliser()
    return out[0] if scalar else out
