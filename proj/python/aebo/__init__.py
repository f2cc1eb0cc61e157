"""Adaptive expansion Bayesian optimization."""

from ._aebo import (
    Result,
    Row,
    evaluate_problem,
    minimize,
    problem_names,
    run_problem,
    solve_tau,
)

__all__ = [
    "Result",
    "Row",
    "evaluate_problem",
    "minimize",
    "problem_names",
    "run_problem",
    "solve_tau",
]
