"""Centering strategies for subsample-based linear regression."""

from .data import (
    CenteringStats,
    Dataset,
    ModelSpec,
    WeightedStats,
    center,
    full_means,
    shift,
    take_rows,
    weighted_means,
)
from .estimators import (
    EstimatorOutput,
    InterceptMode,
    Variant,
    ols_slope_no_intercept,
    ols_with_intercept,
    recover_intercept,
    wls_slope_no_intercept,
    wls_with_intercept,
)
from .samplers import (
    DrawMode,
    Subsample,
    iboss_select,
    leverage_sample,
    leverage_scores,
    uniform_sample,
)
from .variance import (
    AvarMode,
    CovMatrix,
    LinearEstimatorMap,
    Prop1Gap,
    appendix_identities,
    avar_wls,
    build_map,
    exact_variance,
    loewner_leq,
    prop1_gap,
)

__version__ = "0.1.0"
