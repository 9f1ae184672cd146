"""LOS channel estimation toward a phase-shifting reflective surface.

The package provides the deterministic signal model, a grid-search
parametric ML estimator with a least-squares baseline, adaptive
selection of pilot-time surface configurations, and a seeded Monte
Carlo harness with CSV output.
"""

from .adaptive import (
    AdaptiveRunRecord,
    AdaptiveStep,
    ConfigurationPool,
    PlausibleAngleSet,
    PoolEntry,
    build_configuration_pool,
    config_correlation,
    local_peak_indices,
    optimal_configuration,
    plausible_angles,
    run_adaptive_estimation,
    select_initial_pair,
    simulate_pilot_reception,
    top_two_peak_gap_db,
)
from .errors import (
    AngleDomainError,
    ConfigParseError,
    ConfigValidationError,
    DegenerateDirectionError,
    DimensionError,
    InsufficientPilotsError,
    PoolExhaustedError,
    RisPilotError,
    SingularChannelError,
)
from .estimators import (
    AoaSearchGrid,
    EstimationResult,
    PilotCampaign,
    UtilitySamples,
    estimate_aoa,
    estimate_scalar_coefficient,
    least_squares_estimate,
    ml_utility,
    ml_utility_profile,
    parametric_ml_estimate,
)
from .io import emit_rate_csv, emit_utility_csv, parse_config
from .model import (
    ArrayModel,
    KnownBsRisChannel,
    LosChannel,
    RisConfiguration,
    achievable_rate,
    array_response,
    capacity,
    effective_channel,
    expand_channel,
    random_bs_ris_channel,
    steering_matrix,
)
from .simulate import (
    ExperimentConfig,
    PowerScales,
    RateCurvePoint,
    SingleRunSummary,
    TrialRates,
    UtilityStage,
    UtilityTrace,
    collect_trial_rates,
    run_rate_experiment,
    run_single_estimate,
    run_utility_trace,
    snr_to_powers,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveRunRecord",
    "AdaptiveStep",
    "AngleDomainError",
    "AoaSearchGrid",
    "ArrayModel",
    "ConfigParseError",
    "ConfigValidationError",
    "ConfigurationPool",
    "DegenerateDirectionError",
    "DimensionError",
    "EstimationResult",
    "ExperimentConfig",
    "InsufficientPilotsError",
    "KnownBsRisChannel",
    "LosChannel",
    "PilotCampaign",
    "PlausibleAngleSet",
    "PoolEntry",
    "PoolExhaustedError",
    "PowerScales",
    "RateCurvePoint",
    "RisConfiguration",
    "RisPilotError",
    "SingleRunSummary",
    "SingularChannelError",
    "TrialRates",
    "UtilitySamples",
    "UtilityStage",
    "UtilityTrace",
    "achievable_rate",
    "array_response",
    "build_configuration_pool",
    "capacity",
    "collect_trial_rates",
    "config_correlation",
    "effective_channel",
    "emit_rate_csv",
    "emit_utility_csv",
    "estimate_aoa",
    "estimate_scalar_coefficient",
    "expand_channel",
    "least_squares_estimate",
    "local_peak_indices",
    "ml_utility",
    "ml_utility_profile",
    "optimal_configuration",
    "parametric_ml_estimate",
    "parse_config",
    "plausible_angles",
    "random_bs_ris_channel",
    "run_adaptive_estimation",
    "run_rate_experiment",
    "run_single_estimate",
    "run_utility_trace",
    "select_initial_pair",
    "simulate_pilot_reception",
    "snr_to_powers",
    "steering_matrix",
    "top_two_peak_gap_db",
]
