"""Infrared regularization of singular kernels via Krein-space completions, at finite truncation."""

from .bumps import kappa, rho_eps
from .errors import KreinRegError
from .funcrep import FunctionRep, exact_jet, l2_inner, moment, plateau_bump
from .krein import KreinVector, embed, gram, metric_apply, negativity_rank
from .neutral import NeutralSystem, build_chi_system, verify_neutral_system
from .profile import SingularityProfile, default_profile, indefinite_inner, make_profile, profile_from_rule
from .regularize import decompose, hilbert_inner, majorant, majorant_norm, project_plus
from .report import REPORT_SCHEMA, CheckRecord, Report

__version__ = "0.1.0"

__all__ = [
    "CheckRecord", "FunctionRep", "KreinRegError", "KreinVector", "NeutralSystem", "REPORT_SCHEMA", "Report",
    "SingularityProfile", "build_chi_system", "decompose", "default_profile", "embed", "exact_jet",
    "gram", "hilbert_inner", "indefinite_inner", "kappa", "l2_inner", "majorant", "majorant_norm",
    "make_profile", "metric_apply", "moment", "negativity_rank", "plateau_bump", "profile_from_rule",
    "project_plus", "rho_eps", "verify_neutral_system",
]
