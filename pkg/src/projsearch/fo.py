"""First-order reference method: projected-gradient steps along curves.

At each iterate the method projects the negative gradient onto the tangent
cone; the norm of that projection is the stationarity measure, and the run
stops once it falls below a tolerance. Otherwise the method backtracks along
the projection curve ``t -> project(x - t * grad)``, halting at the largest
step of the form ``delta**j * initial_step`` that satisfies the same
``sigma * t**2`` sufficient-decrease test the pattern-search solver uses.

This solver exists as a gradient-based reference point for the
derivative-free method. Its gradient calls are not charged to the objective
budget counter, so evaluation counts are not comparable with derivative-free
runs in black-box terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .curves import SearchCurve
from .errors import ConfigError, DomainError
from .runs import IterationRecord, SolverRun

__all__ = ["FoConfig", "solve_fo"]


@dataclass(frozen=True)
class FoConfig:
    """Parameters of the first-order reference solver."""

    delta: float = 0.5                  # backtracking contraction
    sigma: float = 1e-3                 # sufficient-decrease coefficient
    initial_step: float = 1.0           # largest step tried each iteration
    max_iterations: int = 1000
    max_backtracks: int = 60            # safeguard on the backtracking loop
    stationarity_tolerance: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.sigma > 0.0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if not self.initial_step > 0.0:
            raise ConfigError(f"initial_step must be positive, got {self.initial_step}")
        if not isinstance(self.max_iterations, int) or self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be a positive integer, got {self.max_iterations}")
        if not isinstance(self.max_backtracks, int) or self.max_backtracks < 0:
            raise ConfigError(f"max_backtracks must be a nonnegative integer, got {self.max_backtracks}")
        if not self.stationarity_tolerance >= 0.0:
            raise ConfigError("stationarity_tolerance must be nonnegative")

    def describe(self) -> dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def solve_fo(problem, config: FoConfig | None = None, *, solver_name: str = "fo") -> SolverRun:
    """Minimize ``problem`` with tangent-cone projected-gradient steps.

    Requires the problem to carry a gradient oracle.
    """
    if config is None:
        config = FoConfig()
    if not getattr(problem, "has_gradient", False):
        raise DomainError("first-order solver requires a problem with a gradient oracle")
    feasible_set = problem.feasible_set
    x = np.asarray(problem.start, dtype=float).copy()
    if not feasible_set.contains(x):
        raise DomainError("start point is infeasible")

    f_x = float(problem.evaluate(x))
    n_f, n_p = 1, 0
    best_x, best_f = x.copy(), f_x
    history: list[tuple[int, float]] = [(1, f_x)]
    iterates = [x.copy()]
    records: list[IterationRecord] = []
    termination = None
    final_measure = None

    for k in range(config.max_iterations):
        grad = np.asarray(problem.gradient_at(x), dtype=float)
        grad_norm = float(np.linalg.norm(grad))
        descent = feasible_set.tangent_cone(x).project(-grad)
        measure = float(np.linalg.norm(descent))
        final_measure = measure
        if measure <= config.stationarity_tolerance:
            termination = "stationary_point"
            break

        curve = SearchCurve(feasible_set, x, -grad)
        accepted = None
        step = config.initial_step
        for _ in range(config.max_backtracks + 1):
            candidate, projected = curve.eval_counted(step)
            if projected:
                n_p += 1
            f_candidate = float(problem.evaluate(candidate))
            n_f += 1
            if math.isfinite(f_candidate) and f_candidate < best_f:
                best_x, best_f = candidate.copy(), f_candidate
                history.append((n_f, f_candidate))
            # Decrease-form comparison: subtracting the required decrease from
            # f_x can round back to f_x once sigma*step**2 drops below half an
            # ulp, which would accept zero-progress candidates.
            if math.isfinite(f_candidate) and f_x - f_candidate >= config.sigma * step * step:
                accepted = (f_candidate, candidate, step)
                break
            step *= config.delta
        if accepted is None:
            records.append(
                IterationRecord(k, False, None, config.initial_step, 0.0, f_x, n_f, n_p,
                                grad_norm=grad_norm, stationarity=measure)
            )
            iterates.append(x.copy())
            termination = "backtrack_failure"
            break
        f_candidate, candidate, step = accepted
        records.append(
            IterationRecord(k, True, None, config.initial_step, step, f_x, n_f, n_p,
                            grad_norm=grad_norm, stationarity=measure)
        )
        x = candidate.copy()
        f_x = f_candidate
        iterates.append(x.copy())
    else:
        termination = "max_iterations"

    metadata = {
        "config": config.describe(),
        "start_value": history[0][1],
        "final_stationarity": final_measure,
    }
    return SolverRun(
        problem=getattr(problem, "name", "problem"),
        solver=solver_name,
        dimension=feasible_set.dimension,
        iterates=iterates,
        records=records,
        n_f=n_f,
        n_p=n_p,
        best_point=best_x,
        best_value=best_f,
        final_value=f_x,
        termination=termination,
        history=history,
        metadata=metadata,
    )
