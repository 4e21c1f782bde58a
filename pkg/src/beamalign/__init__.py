"""Bayesian bandit simulator for sectored mm-wave beam alignment."""

__version__ = "0.1.0"

from .bounds import (
    BoundPair,
    HorizonContext,
    QuadratureSettings,
    dp_exact_q,
    g_nu,
    h_nu,
    q_lower_bound,
    q_upper_bound,
    value_bounds,
    xi,
    xi_max,
)
from .channel import (
    GainModel,
    LinkBudget,
    SectoredEnvironment,
    compute_nu,
    feedback_log_likelihood,
    path_loss,
    sample_feedback,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .harness import (
    FrameOutcome,
    SweepPointResult,
    emit_results,
    run_frame,
    run_frame_trace,
    run_sweep,
)
from .policies import (
    PolicyKind,
    PolicySpec,
    parse_policy_spec,
    rank_arms,
    select_data_beam,
    select_first_best,
    select_lts,
    select_second_best,
    select_ucb,
    select_uniform_random,
)
from .preference import (
    alignment_reward,
    belief_from_preference,
    j_transform,
    marginal_feedback_density,
    sum_exp_identity_check,
    update_preference,
)
from .rate import (
    DataPhaseParams,
    expected_frame_rate,
    non_outage_probability,
    optimize_rate_power,
)

__all__ = [
    "BoundPair",
    "ConfigError",
    "DataPhaseParams",
    "ExperimentConfig",
    "FrameOutcome",
    "GainModel",
    "HorizonContext",
    "LinkBudget",
    "PolicyKind",
    "PolicySpec",
    "QuadratureSettings",
    "SectoredEnvironment",
    "SweepPointResult",
    "__version__",
    "alignment_reward",
    "belief_from_preference",
    "compute_nu",
    "config_from_dict",
    "dp_exact_q",
    "emit_results",
    "expected_frame_rate",
    "feedback_log_likelihood",
    "g_nu",
    "h_nu",
    "j_transform",
    "load_config",
    "marginal_feedback_density",
    "non_outage_probability",
    "optimize_rate_power",
    "parse_policy_spec",
    "path_loss",
    "q_lower_bound",
    "q_upper_bound",
    "rank_arms",
    "run_frame",
    "run_frame_trace",
    "run_sweep",
    "sample_feedback",
    "select_data_beam",
    "select_first_best",
    "select_lts",
    "select_second_best",
    "select_ucb",
    "select_uniform_random",
    "sum_exp_identity_check",
    "update_preference",
    "value_bounds",
    "xi",
    "xi_max",
]
