"""Lyapunov feedback stabilization of N-level ensembles on flag manifolds."""

from qflag._core import (
    Basis,
    ConfigError,
    DimensionError,
    Error,
    FlagInfo,
    InvalidDensity,
    Lemma3Report,
    NotPositive,
    Plant,
    Trajectory,
    Verdict,
    adjoint_matrix,
    antipodal_points,
    bracket_span_dim,
    builtin_scenario_names,
    classify,
    distance,
    expand_in_basis,
    feedback_u,
    from_coherence,
    is_antipodal,
    is_strongly_regular,
    kalman_rank,
    lemma3,
    lie_closure_dim,
    lyapunov_V,
    reference_orbit,
    rotating_frame,
    run_builtin_scenario,
    simulate,
    support,
    to_coherence,
    verdict,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "ConfigError",
    "DimensionError",
    "Error",
    "FlagInfo",
    "InvalidDensity",
    "Lemma3Report",
    "NotPositive",
    "Plant",
    "Trajectory",
    "Verdict",
    "adjoint_matrix",
    "antipodal_points",
    "bracket_span_dim",
    "builtin_scenario_names",
    "classify",
    "distance",
    "expand_in_basis",
    "feedback_u",
    "from_coherence",
    "is_antipodal",
    "is_strongly_regular",
    "kalman_rank",
    "lemma3",
    "lie_closure_dim",
    "lyapunov_V",
    "reference_orbit",
    "rotating_frame",
    "run_builtin_scenario",
    "simulate",
    "support",
    "to_coherence",
    "verdict",
]
