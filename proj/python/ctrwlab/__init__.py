"""Heavy-tailed moving averages and CTRWs: simulation, decompositions, integrals, SDE schemes."""

from ._core import (
    DataError,
    Error,
    ParamError,
    StepPath,
    canonical_report,
    d_j1,
    d_m1,
    d_uniform,
    evaluate,
    ito_integral,
    ks_two_sample,
    m1_modulus,
    max_eps_increments,
    run_scenario,
    sample_stable,
    simulate,
    total_variation,
    truncated_h_mean,
    wasserstein1,
)

__all__ = [
    "DataError",
    "Error",
    "ParamError",
    "StepPath",
    "canonical_report",
    "d_j1",
    "d_m1",
    "d_uniform",
    "evaluate",
    "ito_integral",
    "ks_two_sample",
    "m1_modulus",
    "max_eps_increments",
    "run_scenario",
    "sample_stable",
    "simulate",
    "total_variation",
    "truncated_h_mean",
    "wasserstein1",
]
