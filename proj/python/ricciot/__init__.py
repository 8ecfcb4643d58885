from ._core import (
    ConfigError,
    ConvergenceError,
    CostFunction,
    CutLocusError,
    DomainError,
    Error,
    InvalidArgument,
    Model,
    ResolutionError,
    RunResult,
    ScaleFlow,
    admissible,
    distance,
    l_distance,
    lemma_gap,
    make_cloud,
    power_cost,
    q_kernel,
    run_config,
    solve_entropic,
    solve_exact,
    theta_from_v,
)

__version__ = "0.1.0"
