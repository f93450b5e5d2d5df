"""Identified sets of weighted average derivatives under interval censoring.

Support-function representation of the identified set, kernel plug-in
estimation with an optional IV renormalization, efficient-influence
diagnostics, score-based weighted bootstrap confidence sets, and a
Hausdorff-risk Monte Carlo harness.
"""

__version__ = "0.1.0"

from ._core import BACKEND as PAIRWISE_BACKEND
from .density import ScoreTable, build_score_table, loo_density, loo_score
from .estimator import (
    EstimatorConfig,
    SetEstimate,
    classify_outcomes,
    estimate_set,
    extreme_point,
    support_estimate,
    support_estimate_iv,
)
from .inference import (
    BootstrapConfig,
    ConfidenceOutput,
    bootstrap_process,
    coordinate_confidence_interval,
    directed_hausdorff,
    hausdorff,
    one_sided_confidence_set,
)
from .kernels import KernelFunction, build_kernel, required_order, verify_moments
from .model import (
    ConvexSetRepr,
    DirectionGrid,
    IntervalSample,
    KernelSpec,
    SupportFunctionValues,
    make_direction_grid,
    validate_sample,
)
from .population import (
    IntervalCovariateSpec,
    PopulationSpec,
    efficient_influence,
    efficient_influence_density_weight,
    gamma_select,
    influence_centering,
    inverse_information,
    population_coordinate_bounds,
    population_support,
    smooth_bounds,
    smooth_support_interval_covariate,
)
from .simulation import DgpConfig, RiskTable, generate, risk_experiment, true_set_oracle

__all__ = [
    "PAIRWISE_BACKEND",
    "__version__",
    "BootstrapConfig",
    "ConfidenceOutput",
    "ConvexSetRepr",
    "DgpConfig",
    "DirectionGrid",
    "EstimatorConfig",
    "IntervalCovariateSpec",
    "IntervalSample",
    "KernelFunction",
    "KernelSpec",
    "PopulationSpec",
    "RiskTable",
    "ScoreTable",
    "SetEstimate",
    "SupportFunctionValues",
    "bootstrap_process",
    "build_kernel",
    "build_score_table",
    "classify_outcomes",
    "coordinate_confidence_interval",
    "directed_hausdorff",
    "efficient_influence",
    "efficient_influence_density_weight",
    "estimate_set",
    "extreme_point",
    "gamma_select",
    "generate",
    "hausdorff",
    "influence_centering",
    "inverse_information",
    "loo_density",
    "loo_score",
    "make_direction_grid",
    "one_sided_confidence_set",
    "population_coordinate_bounds",
    "population_support",
    "required_order",
    "risk_experiment",
    "smooth_bounds",
    "smooth_support_interval_covariate",
    "support_estimate",
    "support_estimate_iv",
    "true_set_oracle",
    "validate_sample",
    "verify_moments",
]
