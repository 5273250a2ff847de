"""Plateau cutoffs rho_eps and the normalised unit bumps kappa_n."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import UnderflowRisk
from .funcrep import FunctionRep, evaluate, l2_norm, plateau_bump, translate

MIN_EPS = 1e-250
MAX_KAPPA_POSITION = 10**6
KAPPA_WIDTH = 1.0 / 3.0


@dataclass(frozen=True)
class PlateauBump:
    """rho_eps: 1 on |x| <= eps/2, 0 on |x| >= 3 eps/2, smooth in between."""

    eps: float
    profile: FunctionRep

    def eval(self, x):
        return evaluate(self.profile, x)


@dataclass(frozen=True)
class UnitBump:
    """kappa_n: rho_{1/3}(x - n) scaled to unit L2 norm."""

    n: int
    profile: FunctionRep

    def eval(self, x):
        return evaluate(self.profile, x)


def rho_eps(eps: float) -> PlateauBump:
    eps = float(eps)
    if not eps > MIN_EPS:
        raise UnderflowRisk(f"plateau width {eps:.3e} is below the safe floor {MIN_EPS:.0e}")
    return PlateauBump(eps, plateau_bump(eps))


@lru_cache(maxsize=1)
def kappa_norm() -> float:
    """||rho_{1/3}||_{L2}."""
    return l2_norm(plateau_bump(KAPPA_WIDTH))


def kappa(n: int) -> UnitBump:
    n = int(n)
    if abs(n) > MAX_KAPPA_POSITION:
        raise ValueError(f"kappa position {n} outside [-1e6, 1e6]")
    base = plateau_bump(KAPPA_WIDTH) * (1.0 / kappa_norm())
    return UnitBump(n, translate(base, n))
