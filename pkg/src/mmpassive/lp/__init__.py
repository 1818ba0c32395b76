from .problem import (
    EPS_FEAS,
    EPS_OPT,
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LpBuilder,
    LpProblem,
    LpSolution,
    to_lp_text,
)
from .simplex import solve

__all__ = [
    "EPS_FEAS",
    "EPS_OPT",
    "EQ",
    "GE",
    "INFEASIBLE",
    "LE",
    "OPTIMAL",
    "UNBOUNDED",
    "LpBuilder",
    "LpProblem",
    "LpSolution",
    "solve",
    "to_lp_text",
]
