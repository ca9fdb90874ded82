"""Multiple change-point detection in causal time series by penalized
Gaussian quasi-likelihood: model families, simulation, per-segment QMLE,
exact dynamic-programming segmentation and sandwich inference."""

from .asymptotics import SandwichEstimate, confint, sandwich_cov
from .backend import active_backend_name, available_backends, use_backend
from .errors import (
    BoundaryWarning,
    ConfigurationError,
    DegenerateInformationError,
    DomainError,
    ParameterError,
    QLBreaksError,
)
from .estimate import (
    FitResult,
    PenaltySchedule,
    SegmentationResult,
    SegmentCostTable,
    build_cost_table,
    detect,
    dp_segment,
    fit_segment,
)
from .families import (
    AR,
    ARCH,
    GARCH,
    TARCH,
    ContractionReport,
    ModelFamily,
    ParamDomain,
    RiemannianAR,
    conditional_mean,
    conditional_variance,
    contraction,
    garch_to_arch_weights,
    make_family,
    mean_var_derivatives,
)
from .harness import ExperimentConfig, ExperimentReport, run_experiment, score
from .innovations import GAUSSIAN, Gaussian, StudentT
from .likelihood import SegmentRef, point_contrast, segment_contrast, segment_score
from .simulate import (
    BreakModel,
    SeriesSample,
    sample_innovations,
    simulate_piecewise,
    simulate_stationary,
)

__version__ = "0.1.0"

__all__ = [
    "AR",
    "ARCH",
    "GARCH",
    "TARCH",
    "RiemannianAR",
    "ModelFamily",
    "ParamDomain",
    "ContractionReport",
    "make_family",
    "conditional_mean",
    "conditional_variance",
    "contraction",
    "mean_var_derivatives",
    "garch_to_arch_weights",
    "Gaussian",
    "StudentT",
    "GAUSSIAN",
    "BreakModel",
    "SeriesSample",
    "sample_innovations",
    "simulate_piecewise",
    "simulate_stationary",
    "SegmentRef",
    "point_contrast",
    "segment_contrast",
    "segment_score",
    "PenaltySchedule",
    "FitResult",
    "SegmentCostTable",
    "SegmentationResult",
    "fit_segment",
    "build_cost_table",
    "dp_segment",
    "detect",
    "SandwichEstimate",
    "sandwich_cov",
    "confint",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "score",
    "use_backend",
    "available_backends",
    "active_backend_name",
    "QLBreaksError",
    "ParameterError",
    "DomainError",
    "ConfigurationError",
    "DegenerateInformationError",
    "BoundaryWarning",
    "__version__",
]
