"""Benchmark result matrices and solver comparison profiles.

Two standard step-function summaries over a (problems x solvers) matrix of
runs:

* performance profiles: for a chosen cost (objective calls or projection
  counts), each run's cost is divided by the best cost any solver achieved
  on that problem; a solver's curve at ratio ``tau`` is the fraction of
  problems it solved within ``tau`` times the per-problem best. Failed cells
  get an infinite ratio.
* data profiles: a problem counts as solved by a run at the first evaluation
  where the best value seen reaches ``f_L + epsilon * (f(start) - f_L)``,
  with ``f_L`` the best value any solver found (optionally overridden by a
  registered reference). Budgets are measured in groups of ``n + 1``
  evaluations so curves are comparable across dimensions.

Both curves are nondecreasing step functions with values in [0, 1] and are
invariant to the order in which problems and solvers are listed.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .runs import SolverRun

__all__ = [
    "RunRecord",
    "ProfileMatrix",
    "ProfileCurves",
    "performance_profile",
    "data_profile",
    "write_runs_csv",
    "write_history_csv",
    "write_profile_csv",
]

_COSTS = ("n_f", "n_p")


@dataclass(frozen=True)
class RunRecord:
    """Cost/quality summary of one run, with its best-so-far history."""

    problem: str
    solver: str
    n_f: int
    n_p: int
    f_best: float
    terminated: str
    history: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.history:
            raise InvalidInputError("history must contain at least the start evaluation")
        last_idx = 0
        last_val = math.inf
        for idx, value in self.history:
            if idx <= last_idx:
                raise InvalidInputError("history evaluation indices must increase")
            if value > last_val:
                raise InvalidInputError("history best-so-far values must not increase")
            last_idx, last_val = idx, value
        if last_idx > self.n_f:
            raise InvalidInputError("history reaches beyond the recorded n_f")

    @classmethod
    def from_solver_run(cls, run: SolverRun) -> "RunRecord":
        return cls(
            problem=run.problem,
            solver=run.solver,
            n_f=run.n_f,
            n_p=run.n_p,
            f_best=run.best_value,
            terminated=run.termination,
            history=tuple((int(i), float(v)) for i, v in run.history),
        )

    def first_hit(self, threshold: float) -> int | None:
        """Smallest evaluation count at which best-so-far <= threshold."""
        for idx, value in self.history:
            if value <= threshold:
                return idx
        return None


@dataclass
class ProfileMatrix:
    """Complete (problems x solvers) grid of runs; ``None`` marks failures."""

    problems: list[str]
    solvers: list[str]
    cells: dict[tuple[str, str], RunRecord | None]
    dimensions: dict[str, int]
    references: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.problems or not self.solvers:
            raise InvalidInputError("profile matrix needs at least one problem and one solver")
        if len(set(self.problems)) != len(self.problems) or len(set(self.solvers)) != len(self.solvers):
            raise InvalidInputError("problem and solver labels must be unique")
        for p in self.problems:
            if p not in self.dimensions:
                raise InvalidInputError(f"missing dimension for problem {p!r}")
            for s in self.solvers:
                if (p, s) not in self.cells:
                    raise InvalidInputError(f"missing cell ({p!r}, {s!r}); mark failures as None")

    def record(self, problem: str, solver: str) -> RunRecord | None:
        return self.cells[(problem, solver)]

    def start_value(self, problem: str) -> float | None:
        """Objective at the shared start point, from any non-failed cell."""
        for s in self.solvers:
            rec = self.cells[(problem, s)]
            if rec is not None:
                return rec.history[0][1]
        return None

    def f_lower(self, problem: str) -> float:
        """Best value over all solvers, with optional reference override."""
        values = [rec.f_best for s in self.solvers
                  if (rec := self.cells[(problem, s)]) is not None]
        if problem in self.references:
            values.append(self.references[problem])
        return min(values) if values else math.inf


@dataclass(frozen=True)
class ProfileCurves:
    """Per-solver nondecreasing step functions on a shared breakpoint grid."""

    kind: str       # "performance" or "data"
    parameter: str  # cost name, or "epsilon=<val>"
    axis: str       # "tau" or "kappa"
    curves: dict[str, tuple[tuple[float, ...], tuple[float, ...]]]

    def value_at(self, solver: str, t: float) -> float:
        xs, ys = self.curves[solver]
        value = 0.0
        for x, y in zip(xs, ys):
            if x > t:
                break
            value = y
        return value


def _step_curves(kind: str, parameter: str, axis: str, solvers, scores: dict[str, list[float]],
                 total: int, grid=None, origin: float = 1.0) -> ProfileCurves:
    """Build step curves from per-solver score lists (inf = never)."""
    if grid is None:
        points = sorted({v for vals in scores.values() for v in vals if math.isfinite(v)})
        if origin is not None:
            points = sorted(set(points) | {origin})
    else:
        points = sorted(float(g) for g in grid)
    curves = {}
    for s in solvers:
        values = sorted(v for v in scores[s] if math.isfinite(v))
        ys = []
        for point in points:
            count = 0
            for v in values:
                if v <= point:
                    count += 1
                else:
                    break
            ys.append(count / total)
        curves[s] = (tuple(points), tuple(ys))
    return ProfileCurves(kind, parameter, axis, curves)


def performance_profile(matrix: ProfileMatrix, cost: str = "n_f", taus=None) -> ProfileCurves:
    """Cost-ratio profile over the matrix for ``cost`` in {"n_f", "n_p"}."""
    if cost not in _COSTS:
        raise InvalidInputError(f"cost must be one of {_COSTS}, got {cost!r}")
    scores: dict[str, list[float]] = {s: [] for s in matrix.solvers}
    for p in matrix.problems:
        costs = {}
        for s in matrix.solvers:
            rec = matrix.cells[(p, s)]
            if rec is not None:
                value = getattr(rec, cost)
                costs[s] = float(value)
        best = min(costs.values()) if costs else math.inf
        for s in matrix.solvers:
            if s in costs and best > 0.0:
                scores[s].append(costs[s] / best)
            elif s in costs and costs[s] == 0.0:
                scores[s].append(1.0)  # all-zero column: every solver is best
            else:
                scores[s].append(math.inf)
    return _step_curves("performance", cost, "tau", matrix.solvers, scores,
                        len(matrix.problems), grid=taus, origin=1.0)


def data_profile(matrix: ProfileMatrix, epsilon: float, kappas=None) -> ProfileCurves:
    """Fraction of problems solved to accuracy ``epsilon`` within a budget of
    ``kappa`` groups of (dimension + 1) evaluations."""
    if not epsilon > 0.0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    scores: dict[str, list[float]] = {s: [] for s in matrix.solvers}
    for p in matrix.problems:
        group = matrix.dimensions[p] + 1
        f_low = matrix.f_lower(p)
        f_start = matrix.start_value(p)
        for s in matrix.solvers:
            rec = matrix.cells[(p, s)]
            if rec is None or f_start is None:
                scores[s].append(math.inf)
                continue
            if f_start <= f_low:
                scores[s].append(0.0)  # zero decrease available: trivially solved
                continue
            threshold = f_low + epsilon * (f_start - f_low)
            hit = rec.first_hit(threshold)
            scores[s].append(hit / group if hit is not None else math.inf)
    return _step_curves("data", f"epsilon={epsilon:g}", "kappa", matrix.solvers, scores,
                        len(matrix.problems), grid=kappas, origin=0.0)


# --- CSV emission -----------------------------------------------------------

def _real(value: float) -> str:
    return f"{value:.12g}"


def write_runs_csv(records, path) -> None:
    """Schema: problem,solver,n_f,n_p,f_best,terminated."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["problem", "solver", "n_f", "n_p", "f_best", "terminated"])
        for rec in records:
            writer.writerow([rec.problem, rec.solver, rec.n_f, rec.n_p,
                             _real(rec.f_best), rec.terminated])


def write_history_csv(records, path) -> None:
    """Schema: problem,solver,eval_index,f_best_so_far."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["problem", "solver", "eval_index", "f_best_so_far"])
        for rec in records:
            for idx, value in rec.history:
                writer.writerow([rec.problem, rec.solver, idx, _real(value)])


def _gnuplot_name(solver: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", solver)


def write_profile_csv(curves: ProfileCurves, path, gnuplot: bool = True) -> None:
    """Schema: solver,tau_or_kappa,value. Optionally emits a self-contained
    gnuplot script next to the CSV (same stem, .gp suffix)."""
    path = str(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["solver", "tau_or_kappa", "value"])
        for solver, (xs, ys) in curves.curves.items():
            for x, y in zip(xs, ys):
                writer.writerow([solver, _real(x), _real(y)])
    if not gnuplot:
        return
    stem = path[:-4] if path.endswith(".csv") else path
    lines = [
        f"# {curves.kind} profile ({curves.parameter})",
        "set ylabel 'fraction of problems'",
        f"set xlabel '{curves.axis}'",
        "set yrange [0:1.05]",
        "set key bottom right",
    ]
    for solver, (xs, ys) in curves.curves.items():
        lines.append(f"${_gnuplot_name(solver)} << EOD")
        for x, y in zip(xs, ys):
            lines.append(f"{_real(x)} {_real(y)}")
        lines.append("EOD")
    plots = ", ".join(
        f"${_gnuplot_name(solver)} using 1:2 with steps title '{solver}'"
        for solver in curves.curves
    )
    lines.append(f"plot {plots}")
    with open(stem + ".gp", "w") as handle:
        handle.write("\n".join(lines) + "\n")
