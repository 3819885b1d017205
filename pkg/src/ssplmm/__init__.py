"""Exact optimizer and certificate system for strong-stability-preserving
linear multistep methods.

The package brackets optimal monotone step-size coefficients by exact LP
feasibility and bisection, extracts optimal method coefficients, produces and
verifies dual polynomial certificates, evaluates closed-form bounds and
existence thresholds, and validates methods by monotone time integration.
"""

from .bounds import (
    BoundReport,
    ImpExpReport,
    check_impexp_relation,
    existence_step_threshold,
    explicit_bound_value,
    implicit_bound_value,
    upper_bound_explicit,
    upper_bound_implicit,
)
from .certificates import (
    CertificateError,
    CertificateParseError,
    CertificatePolynomial,
    CertificateReport,
    DualSystem,
    RootAnalysis,
    RootConditionReport,
    StructuralAudit,
    analyze_roots,
    canonical_explicit_bound_certificate,
    canonical_implicit_bound_certificate,
    certificate_from_text,
    certificate_to_text,
    check_root_conditions,
    close_certificate,
    square_certificate,
    structural_audit,
    verify_certificate,
)
from .exactlp import (
    FeasibilityOutcome,
    FeasibilityProblem,
    RationalMatrix,
    rank,
    solve_feasibility,
    verify_outcome,
)
from .integrate import (
    BUILTIN_PROBLEMS,
    Norm,
    RunRecord,
    SweepReport,
    TestProblem,
    UnsupportedProblemError,
    VIOLATION_TOL,
    advection_problem,
    decay_problem,
    lmm_integrate,
    monotonicity_sweep,
)
from .optimize import (
    DEFAULT_TOLERANCE,
    NoPositiveSSP,
    ProbeResult,
    SSPBracket,
    SSPQuery,
    SupportReport,
    extract_optimal_method,
    is_feasible,
    optimal_ssp,
    simplest_between,
    support_analysis,
)
from .order_conditions import (
    MethodCoefficients,
    PrimalWitness,
    ThresholdFactor,
    UNBOUNDED,
    Variant,
    build_explicit_lp,
    build_implicit_lp,
    order_residuals,
    threshold_factor,
    witness_to_method,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "BUILTIN_PROBLEMS",
    "CertificateError",
    "CertificateParseError",
    "CertificatePolynomial",
    "CertificateReport",
    "DEFAULT_TOLERANCE",
    "DualSystem",
    "FeasibilityOutcome",
    "FeasibilityProblem",
    "ImpExpReport",
    "MethodCoefficients",
    "NoPositiveSSP",
    "Norm",
    "PrimalWitness",
    "ProbeResult",
    "RationalMatrix",
    "RootAnalysis",
    "RootConditionReport",
    "RunRecord",
    "SSPBracket",
    "SSPQuery",
    "StructuralAudit",
    "SupportReport",
    "SweepReport",
    "TestProblem",
    "ThresholdFactor",
    "UNBOUNDED",
    "UnsupportedProblemError",
    "VIOLATION_TOL",
    "Variant",
    "advection_problem",
    "analyze_roots",
    "build_explicit_lp",
    "build_implicit_lp",
    "canonical_explicit_bound_certificate",
    "canonical_implicit_bound_certificate",
    "certificate_from_text",
    "certificate_to_text",
    "check_impexp_relation",
    "check_root_conditions",
    "close_certificate",
    "decay_problem",
    "existence_step_threshold",
    "explicit_bound_value",
    "extract_optimal_method",
    "implicit_bound_value",
    "is_feasible",
    "lmm_integrate",
    "monotonicity_sweep",
    "optimal_ssp",
    "order_residuals",
    "rank",
    "simplest_between",
    "solve_feasibility",
    "square_certificate",
    "structural_audit",
    "support_analysis",
    "threshold_factor",
    "upper_bound_explicit",
    "upper_bound_implicit",
    "verify_certificate",
    "verify_outcome",
    "witness_to_method",
]
