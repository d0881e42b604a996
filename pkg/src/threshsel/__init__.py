"""Thresholding estimators and model selection for orthogonal designs."""

from .asymptotics import (
    TailCheckReport,
    chi2_tail,
    chi2_tail_inverse,
    distribution_identity_test,
    log_tail_approx,
    threshold_law_check,
    uniform_order_check,
)
from .core import (
    OrderStats,
    Sample,
    SeedSpec,
    abs_order_statistics,
    derive_stream,
    read_sample_csv,
    threshold_level,
)
from .criteria import (
    CriterionCurve,
    PenaltyFamily,
    PenaltySpec,
    criterion_curve,
    deterministic_penalty,
    hard_criterion,
    mallows_cp,
    random_soft_penalty,
    rss,
    rss_gap,
)
from .selection import SelectionResult, complexity_select, oracle_k, risk_curve, select_k
from .thresholding import (
    Loss,
    PenalizedFitSpec,
    ThresholdEstimate,
    ThresholdKind,
    hard_path_estimate,
    hard_threshold,
    penalized_l1_fit,
    penalized_lad_fit,
    penalized_lgamma_fit,
    soft_path_estimate,
    soft_threshold,
)
from .variance import (
    DegenerateVarianceError,
    SlopeFit,
    calibrate_alpha,
    data_driven_cp_select,
    estimate_sigma2,
    fit_slope,
    rss_curve,
)

__version__ = "0.1.0"
