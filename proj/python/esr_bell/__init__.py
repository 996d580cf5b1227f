"""Python bindings for the esr-bell detection-weighted CHSH library."""

from ._core import (
    ChshReport,
    ChshSetting,
    ConfigurationError,
    DensityState,
    DetectionModel,
    Direction,
    Error,
    Estimate,
    FairSamplingResult,
    GeneralizedObservable,
    MicrostateModel,
    ProjectiveObservable,
    Subsystem,
    UndefinedConditional,
    ValidationError,
    ZeroProbabilityBranch,
    born_probability,
    detection_bound,
    fair_sampling_check,
    generalized_correlation,
    gisin_gisin_model,
    micro_chsh,
    min_detection_bound,
    model_by_name,
    modified_chsh_lhs,
    optimize_chsh_angles,
    quantum_expectation,
    quantum_expectation_product,
    run_cli,
    sequential_distribution_factored,
    sign_sign_model,
    singlet_state,
    spin_observable,
    standard_chsh_lhs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
