"""Run records: per-iteration traces and end-of-run summaries.

Both solvers return a :class:`SolverRun`. Iteration rows hold the tentative
and accepted stepsizes, the objective value at the iterate the iteration
polled from, and cumulative oracle counters, so a run can be audited line by
line: monotone descent, stepsize updates, and budget accounting are all
checkable from the trace alone. ``history`` tracks the best objective value
seen as a function of the evaluation count, which is what profile tooling
consumes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = ["IterationRecord", "SolverRun", "TERMINATIONS"]

#: Termination reasons produced by the solvers.
TERMINATIONS = (
    "stepsize_below_threshold",
    "budget_exhausted",
    "user_stop",
    "stationary_point",
    "max_iterations",
    "backtrack_failure",
)

_TRACE_COLUMNS = ("k", "success", "direction", "alpha_tilde", "alpha", "f", "n_f", "n_p")


@dataclass(frozen=True)
class IterationRecord:
    """One outer iteration of a solver.

    ``f_value`` is the objective at the iterate the iteration started from;
    ``alpha`` is 0.0 on unsuccessful iterations; ``n_f``/``n_p`` are the
    cumulative oracle-call and infeasible-point-projection counts after the
    iteration's polls. The two optional fields are filled by the first-order
    solver only.
    """

    k: int
    success: bool
    direction: int | None
    alpha_tilde: float
    alpha: float
    f_value: float
    n_f: int
    n_p: int
    grad_norm: float | None = None
    stationarity: float | None = None


@dataclass
class SolverRun:
    """Complete result of one solver run on one problem instance."""

    problem: str
    solver: str
    dimension: int
    iterates: list[np.ndarray]
    records: list[IterationRecord]
    n_f: int
    n_p: int
    best_point: np.ndarray
    best_value: float
    final_value: float
    termination: str
    history: list[tuple[int, float]]
    metadata: dict = field(default_factory=dict)

    @property
    def final_point(self) -> np.ndarray:
        return self.iterates[-1]

    def accepted_steps(self) -> list[float]:
        return [r.alpha for r in self.records]

    def tentative_steps(self) -> list[float]:
        return [r.alpha_tilde for r in self.records]

    def success_flags(self) -> list[bool]:
        return [r.success for r in self.records]

    def best_value_at(self, evaluations: int) -> float:
        """Best objective value seen within the first ``evaluations`` calls."""
        best = np.inf
        for idx, value in self.history:
            if idx > evaluations:
                break
            best = value
        return best

    # --- serialization ---------------------------------------------------

    def trace_rows(self) -> list[list[str]]:
        """Iteration rows plus a final summary row, as CSV string cells."""
        with_grad = any(r.grad_norm is not None for r in self.records)
        header = list(_TRACE_COLUMNS) + (["grad_norm", "stationarity"] if with_grad else []) + ["termination"]
        rows = [header]
        for r in self.records:
            row = [
                str(r.k),
                "1" if r.success else "0",
                "" if r.direction is None else str(r.direction),
                f"{r.alpha_tilde:.12g}",
                f"{r.alpha:.12g}",
                f"{r.f_value:.12g}",
                str(r.n_f),
                str(r.n_p),
            ]
            if with_grad:
                row += [
                    "" if r.grad_norm is None else f"{r.grad_norm:.12g}",
                    "" if r.stationarity is None else f"{r.stationarity:.12g}",
                ]
            rows.append(row + [""])
        summary = ["summary", "", "", "", "", f"{self.best_value:.12g}", str(self.n_f), str(self.n_p)]
        if with_grad:
            summary += ["", ""]
        rows.append(summary + [self.termination])
        return rows

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(self.trace_rows())

    def summary_lines(self) -> list[str]:
        point = ",".join(f"{v:.12g}" for v in np.asarray(self.best_point))
        lines = [
            f"problem={self.problem}",
            f"solver={self.solver}",
            f"dimension={self.dimension}",
            f"n_f={self.n_f}",
            f"n_p={self.n_p}",
            f"f_best={self.best_value:.12g}",
            f"best_point={point}",
            f"terminated={self.termination}",
            f"iterations={len(self.records)}",
        ]
        for key in sorted(self.metadata):
            lines.append(f"{key}={self.metadata[key]}")
        return lines
