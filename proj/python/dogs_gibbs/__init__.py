"""Dobrushin-optimized Gibbs sampling."""

from ._dogs import (  # noqa: F401
    ConfigError,
    ConsistencyError,
    InfluenceMatrix,
    IsingModel,
    Scan,
    SizeGuardError,
    dobrushin_variation,
    dv_trace,
    estimate_expectation,
    exact_distribution,
    exact_influence,
    exact_tv,
    exhaustive_best_scan,
    exp_scan_evaluation,
    influence_bound,
    length_doubling_select,
    model_from_json,
    optimize_scan,
    run_gibbs,
    scale_bound,
    total_influence_norm,
)
