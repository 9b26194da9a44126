from .solver import SolveOptions, Solution, TraceRow, inner_loop, outer_step, solve
from .state import (PddState, al_objective, constraint_violation,
                    consensus_residuals, init_state, update_duals)

__all__ = [
    "SolveOptions", "Solution", "TraceRow", "inner_loop", "outer_step",
    "solve", "PddState", "al_objective", "constraint_violation",
    "consensus_residuals", "init_state", "update_duals",
]
