"""Derivative-free pattern search along projection curves.

The solver keeps every trial point feasible by polling the objective along
curves ``t -> project(x + t * b)`` for a fixed set of signed directions
``b``. Each outer iteration tests candidates at the current tentative
stepsize and accepts the first (or, on the opening sweep, the best) candidate
that passes the sufficient-decrease test

    f(candidate) <= f(x) - sigma * stepsize**2.

On success the tentative stepsize expands by ``tau`` but never restarts below
``alpha_bar``; after a full sweep of failures it contracts by ``delta``. The
run stops when the tentative stepsize falls below ``min_step``, when the
evaluation budget is exhausted, or when a user callback requests a stop.

Two empirically useful behaviors are on by default and can be switched off:

* the direction set carries the two unnormalized all-ones diagonals in
  addition to the 2n signed coordinate directions, and
* scanning is opportunistic with success-first ordering: an iteration stops
  at its first success and the next iteration's scan starts from that
  direction; the very first iteration instead evaluates every direction and
  accepts the best success, seeding the ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DomainError
from .curves import SearchCurve
from .runs import IterationRecord, SolverRun

__all__ = ["DirectionSet", "FspConfig", "solve"]

DIRECTION_POLICIES = ("coordinates", "coordinates_plus_diagonals")
ORDERING_POLICIES = ("static", "dynamic")


class DirectionSet:
    """Ordered poll directions with an optional success-first cursor.

    The base order is ``e_1..e_n, -e_1..-e_n`` followed, under the
    ``coordinates_plus_diagonals`` policy, by ``+[1,..,1]`` and ``-[1,..,1]``.
    Scans visit all directions cyclically starting at the cursor; under
    dynamic ordering the cursor moves to the last successful direction, so
    the scan order is always a rotation of the base order.
    """

    def __init__(self, dimension: int, policy: str = "coordinates_plus_diagonals",
                 ordering: str = "dynamic", normalize_diagonals: bool = False):
        if dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {dimension}")
        if policy not in DIRECTION_POLICIES:
            raise ConfigError(f"unknown direction policy {policy!r}")
        if ordering not in ORDERING_POLICIES:
            raise ConfigError(f"unknown ordering policy {ordering!r}")
        eye = np.eye(dimension)
        directions = [eye[i].copy() for i in range(dimension)]
        directions += [-eye[i] for i in range(dimension)]
        if policy == "coordinates_plus_diagonals":
            ones = np.ones(dimension)
            if normalize_diagonals:
                ones = ones / math.sqrt(dimension)
            directions += [ones, -ones]
        for d in directions:
            d.setflags(write=False)
        self._directions = tuple(directions)
        self._ordering = ordering
        self.cursor = 0

    def __len__(self) -> int:
        return len(self._directions)

    def direction(self, index: int) -> np.ndarray:
        return self._directions[index]

    def scan_order(self) -> list[int]:
        """Indices of one full scan, starting at the cursor."""
        m = len(self._directions)
        return [(self.cursor + j) % m for j in range(m)]

    def record_success(self, index: int) -> None:
        if self._ordering == "dynamic":
            self.cursor = index % len(self._directions)


@dataclass(frozen=True)
class FspConfig:
    """Parameters of the pattern-search solver (defaults match the
    benchmark protocol used throughout the test suite)."""

    delta: float = 0.5            # tentative stepsize contraction after a failed sweep
    sigma: float = 1e-3           # sufficient-decrease coefficient
    tau: float = 1.025            # stepsize expansion after a success
    alpha_bar: float = 1e-6       # floor for the post-success tentative stepsize
    initial_step: float = 1.0     # tentative stepsize of iteration 0
    min_step: float = 1e-7        # stop once the tentative stepsize drops below this
    max_evaluations: int = 10000  # objective-call budget
    direction_policy: str = "coordinates_plus_diagonals"
    ordering: str = "dynamic"
    first_iteration_full_sweep: bool = True
    normalize_diagonals: bool = False
    curve_factory: object = None  # callable(set, anchor, direction) -> curve

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.sigma > 0.0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if not self.tau > 1.0:
            raise ConfigError(f"tau must exceed 1, got {self.tau}")
        if not self.alpha_bar > 0.0:
            raise ConfigError(f"alpha_bar must be positive, got {self.alpha_bar}")
        if not self.min_step > 0.0:
            raise ConfigError(f"min_step must be positive, got {self.min_step}")
        if not self.initial_step >= self.min_step:
            raise ConfigError(
                f"initial_step ({self.initial_step}) must be >= min_step ({self.min_step})"
            )
        if not isinstance(self.max_evaluations, int) or self.max_evaluations < 1:
            raise ConfigError(f"max_evaluations must be a positive integer, got {self.max_evaluations}")
        if self.direction_policy not in DIRECTION_POLICIES:
            raise ConfigError(f"unknown direction policy {self.direction_policy!r}")
        if self.ordering not in ORDERING_POLICIES:
            raise ConfigError(f"unknown ordering policy {self.ordering!r}")
        if self.curve_factory is not None and not callable(self.curve_factory):
            raise ConfigError("curve_factory must be callable")

    def describe(self) -> dict[str, object]:
        out = {}
        for f in fields(self):
            if f.name == "curve_factory":
                continue
            out[f.name] = getattr(self, f.name)
        return out


def solve(problem, config: FspConfig | None = None, *, callback=None,
          solver_name: str = "fsp") -> SolverRun:
    """Minimize ``problem`` with the projection-curve pattern search.

    ``problem`` is a :class:`~projsearch.problems.BlackBoxProblem` (or any
    object with the same ``feasible_set`` / ``start`` / ``evaluate``
    surface). The optional ``callback(k, x, f_x)`` is polled once per outer
    iteration; a truthy return stops the run with termination ``user_stop``.
    """
    if config is None:
        config = FspConfig()
    feasible_set = problem.feasible_set
    x = np.asarray(problem.start, dtype=float).copy()
    if not feasible_set.contains(x):
        raise DomainError("start point is infeasible")
    factory = config.curve_factory if config.curve_factory is not None else SearchCurve
    directions = DirectionSet(
        feasible_set.dimension,
        policy=config.direction_policy,
        ordering=config.ordering,
        normalize_diagonals=config.normalize_diagonals,
    )

    budget = config.max_evaluations
    f_x = float(problem.evaluate(x))
    n_f, n_p = 1, 0
    nonfinite = 0
    best_x, best_f = x.copy(), f_x
    history: list[tuple[int, float]] = [(1, f_x)]
    iterates = [x.copy()]
    records: list[IterationRecord] = []
    alpha_tilde = config.initial_step
    termination = None
    k = 0

    while True:
        if alpha_tilde < config.min_step:
            termination = "stepsize_below_threshold"
            break
        if n_f >= budget:
            termination = "budget_exhausted"
            break
        if callback is not None and callback(k, x, f_x):
            termination = "user_stop"
            break

        full_sweep = k == 0 and config.first_iteration_full_sweep
        # Compare decreases, not absolute levels: "f_x - required" can round
        # back to f_x when the required decrease is below half an ulp of f_x,
        # which would accept zero-progress candidates and stall the stepsize.
        required_decrease = config.sigma * alpha_tilde * alpha_tilde
        accepted: tuple[float, int, np.ndarray] | None = None
        sweep_hits: list[tuple[float, int, np.ndarray]] = []
        budget_hit = False
        for index in directions.scan_order():
            if n_f >= budget:
                budget_hit = True
                break
            curve = factory(feasible_set, x, directions.direction(index))
            candidate, projected = curve.eval_counted(alpha_tilde)
            if projected:
                n_p += 1
            f_candidate = float(problem.evaluate(candidate))
            n_f += 1
            if math.isfinite(f_candidate):
                if f_candidate < best_f:
                    best_x, best_f = np.asarray(candidate, dtype=float).copy(), f_candidate
                    history.append((n_f, f_candidate))
                if f_x - f_candidate >= required_decrease:
                    if full_sweep:
                        sweep_hits.append((f_candidate, index, candidate))
                    else:
                        accepted = (f_candidate, index, candidate)
                        break
            else:
                nonfinite += 1
        if full_sweep and sweep_hits:
            accepted = min(sweep_hits, key=lambda hit: (hit[0], hit[1]))

        if accepted is not None:
            f_candidate, index, candidate = accepted
            records.append(IterationRecord(k, True, index, alpha_tilde, alpha_tilde, f_x, n_f, n_p))
            x = np.asarray(candidate, dtype=float).copy()
            f_x = f_candidate
            directions.record_success(index)
            alpha_tilde = max(config.alpha_bar, config.tau * alpha_tilde)
        else:
            records.append(IterationRecord(k, False, None, alpha_tilde, 0.0, f_x, n_f, n_p))
            alpha_tilde = config.delta * alpha_tilde
        iterates.append(x.copy())
        k += 1
        if budget_hit:
            termination = "budget_exhausted"
            break

    metadata = {
        "config": config.describe(),
        "start_value": history[0][1],
        "first_iteration_policy": (
            "best_of_successes" if config.first_iteration_full_sweep else "opportunistic"
        ),
        "nonfinite_evaluations": nonfinite,
        "directions": len(directions),
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
