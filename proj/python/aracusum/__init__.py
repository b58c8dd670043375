"""Adaptive resource allocation CUSUM for multi-region binomial monitoring."""

from ._core import (
    AllocatorPolicy,
    CalibrationError,
    ConfigError,
    DataError,
    DimensionError,
    DomainError,
    ModelParams,
    PosteriorState,
    PriorConfig,
    SimulationConfig,
    behavior_medians,
    calibrate_threshold,
    check_alarm,
    cusum_step,
    even_allocate,
    generator_id,
    greedy_allocate,
    llr_increment,
    load_rate_matrix,
    monte_carlo,
    posterior_from_history,
    posterior_init,
    replay,
    reward,
    reward_increment,
    run_once,
    topr_allocate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
