"""Equilibrium and Pareto power allocation for Gaussian interference channels."""

from ._core import (
    AlConfig,
    ConditionReport,
    ConfigParseError,
    ExperimentConfig,
    GameSpec,
    IwfOptions,
    StateSpace,
    StateSpaceTooLarge,
    ValidationError,
    ViOptions,
    analyze,
    best_response,
    dump_config,
    enumerate_states,
    expected_rate,
    iterate_waterfilling,
    load_config,
    multi_start,
    run_solve,
    run_sweep,
    simulate,
    solve_vi,
    sum_rate,
    waterfill,
)

__all__ = [
    "AlConfig",
    "ConditionReport",
    "ConfigParseError",
    "ExperimentConfig",
    "GameSpec",
    "IwfOptions",
    "StateSpace",
    "StateSpaceTooLarge",
    "ValidationError",
    "ViOptions",
    "analyze",
    "best_response",
    "dump_config",
    "enumerate_states",
    "expected_rate",
    "iterate_waterfilling",
    "load_config",
    "multi_start",
    "run_solve",
    "run_sweep",
    "simulate",
    "solve_vi",
    "sum_rate",
    "waterfill",
]
