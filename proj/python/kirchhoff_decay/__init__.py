"""Spectral simulator and verification harness for the dissipative Kirchhoff equation."""

from ._core import (
    InsufficientTailError,
    InvalidInputError,
    KirchhoffError,
    NumericError,
    Problem,
    Trace,
    build_problem,
    evolve,
    evolve_linear,
    limit_ode_solution,
    main,
    predict_limits,
    reference_solve,
    verify_proposition_3,
    verify_propositions,
    verify_theorem_1,
    verify_theorem_2,
    verify_theorem_A,
)

__all__ = [
    "InsufficientTailError",
    "InvalidInputError",
    "KirchhoffError",
    "NumericError",
    "Problem",
    "Trace",
    "build_problem",
    "evolve",
    "evolve_linear",
    "limit_ode_solution",
    "main",
    "predict_limits",
    "reference_solve",
    "verify_proposition_3",
    "verify_propositions",
    "verify_theorem_1",
    "verify_theorem_2",
    "verify_theorem_A",
]
