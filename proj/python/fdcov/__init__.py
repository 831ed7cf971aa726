"""Distance covariance and independence tests for discretized processes."""

from ._fdcov import (
    c0,
    dcor,
    dcov,
    dist_matrix,
    independence_test,
    run_experiment,
    simulate,
    u_stat,
)

__all__ = [
    "c0",
    "dcor",
    "dcov",
    "dist_matrix",
    "independence_test",
    "run_experiment",
    "simulate",
    "u_stat",
]
