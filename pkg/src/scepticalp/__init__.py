"""Sceptical p-values for replication studies, with exact Type-I error
calibration, power and sample-size planning, benchmark combination rules and
a Monte Carlo oracle."""
from .calibration import (
    CalibrationResult,
    NullSide,
    T1eQuery,
    calibrate_gamma_c,
    conditional_t1e,
    gamma_c,
    golden_level,
    overall_t1e,
    partial_t1e,
    success_region_area,
    success_region_boundary,
    zr_min,
)
from .combination import CombinedVerdict, combine, pearson_partial_bound, two_trials
from .core import (
    PHI,
    InfimumResult,
    Regime,
    ScepticalResult,
    StudyPair,
    expected_zs2,
    infimum_over_c,
    null_cdf,
    null_quantile,
    null_sf,
    p_derivative_wrt_c,
    p_infinity,
    sceptical_pvalues,
    solve_zs2,
)
from .data import AnalysisRow, StudyRecord, analyze_studies, load_studies
from .design import (
    DesignRequest,
    DesignResult,
    PowerKind,
    ProjectPowerQuery,
    conditional_power,
    predictive_power,
    project_power,
    required_relative_sample_size,
)
from .exceptions import (
    BracketError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    InfeasibleError,
    ParseError,
    ScepticalError,
    ValidationError,
)
from .figures import Figure, emit_figure_data
from .methods import Method, success_level
from .numerics import RngStream, Tolerance
from .simulation import SimConfig, SimResult, Truth, ks_uniformity, simulate_rate

__all__ = [
    "CalibrationResult",
    "NullSide",
    "T1eQuery",
    "calibrate_gamma_c",
    "conditional_t1e",
    "gamma_c",
    "golden_level",
    "overall_t1e",
    "partial_t1e",
    "success_region_area",
    "success_region_boundary",
    "zr_min",
    "CombinedVerdict",
    "combine",
    "pearson_partial_bound",
    "two_trials",
    "PHI",
    "InfimumResult",
    "Regime",
    "ScepticalResult",
    "StudyPair",
    "expected_zs2",
    "infimum_over_c",
    "null_cdf",
    "null_quantile",
    "null_sf",
    "p_derivative_wrt_c",
    "p_infinity",
    "sceptical_pvalues",
    "solve_zs2",
    "AnalysisRow",
    "StudyRecord",
    "analyze_studies",
    "load_studies",
    "DesignRequest",
    "DesignResult",
    "PowerKind",
    "ProjectPowerQuery",
    "conditional_power",
    "predictive_power",
    "project_power",
    "required_relative_sample_size",
    "BracketError",
    "ConvergenceError",
    "DomainError",
    "EvaluationError",
    "InfeasibleError",
    "ParseError",
    "ScepticalError",
    "ValidationError",
    "Figure",
    "emit_figure_data",
    "Method",
    "success_level",
    "RngStream",
    "Tolerance",
    "SimConfig",
    "SimResult",
    "Truth",
    "ks_uniformity",
    "simulate_rate",
]

__version__ = "0.1.0"
