"""First-order stationarity diagnostics for minimization over a convex set.

For a smooth objective on a smooth convex set, a feasible point is stationary
exactly when the projection of the negative gradient onto the tangent cone
vanishes; the norm of that projection is therefore a residual-style measure
of non-stationarity that is zero at constrained minimizers and positive
elsewhere. These helpers are diagnostics: benchmark solvers never read
gradients, and none of the evaluations made here are charged to a problem's
budget counter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticUnavailableError, DomainError, InvalidInputError
from .geometry import SmoothConvexSet, _as_vector

__all__ = [
    "stationarity_measure",
    "finite_difference_gradient",
    "StationarityReport",
    "stationarity_report",
]


def stationarity_measure(feasible_set: SmoothConvexSet, x, grad) -> float:
    """Norm of the tangent-cone projection of ``-grad`` at feasible ``x``."""
    x = _as_vector(x, feasible_set.dimension)
    grad = _as_vector(grad, feasible_set.dimension, name="grad")
    cone = feasible_set.tangent_cone(x)
    return float(np.linalg.norm(cone.project(-grad)))


def finite_difference_gradient(
    objective,
    x,
    h: float | None = None,
    feasible_set: SmoothConvexSet | None = None,
) -> np.ndarray:
    """Central-difference gradient estimate, feasibility-aware.

    When ``feasible_set`` is given, each coordinate stencil falls back to a
    one-sided difference if only one of ``x +- h e_i`` is feasible, and the
    estimate fails with :class:`DiagnosticUnavailableError` if neither is.
    """
    x = _as_vector(x)
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    h = float(h)
    if not h > 0.0:
        raise InvalidInputError(f"finite-difference step must be positive, got {h}")
    if feasible_set is not None and not feasible_set.contains(x):
        raise DomainError("finite-difference gradient requested at an infeasible point")

    grad = np.empty_like(x)
    f_x: float | None = None
    for i in range(x.shape[0]):
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        ok_p = feasible_set is None or feasible_set.contains(xp)
        ok_m = feasible_set is None or feasible_set.contains(xm)
        if ok_p and ok_m:
            grad[i] = (float(objective(xp)) - float(objective(xm))) / (2.0 * h)
        elif ok_p or ok_m:
            if f_x is None:
                f_x = float(objective(x))
            if ok_p:
                grad[i] = (float(objective(xp)) - f_x) / h
            else:
                grad[i] = (f_x - float(objective(xm))) / h
        else:
            raise DiagnosticUnavailableError(
                f"no feasible finite-difference stencil for coordinate {i} at step {h}"
            )
    return grad


@dataclass(frozen=True)
class StationarityReport:
    """Stationarity measure at a point, with how the gradient was obtained."""

    point: tuple[float, ...]
    measure: float
    gradient_source: str  # "analytic" or "finite-difference(h=...)"
    cone_case: str  # "interior" or "boundary"

    def to_lines(self) -> list[str]:
        return [
            f"stationarity_measure={self.measure:.12g}",
            f"stationarity_gradient_source={self.gradient_source}",
            f"stationarity_cone_case={self.cone_case}",
        ]


def stationarity_report(
    feasible_set: SmoothConvexSet,
    x,
    grad=None,
    objective=None,
    h: float | None = None,
) -> StationarityReport:
    """Build a :class:`StationarityReport` from an analytic gradient or, if
    none is given, from a feasibility-aware finite-difference estimate of
    ``objective``."""
    x = _as_vector(x, feasible_set.dimension)
    if grad is not None:
        source = "analytic"
        grad = _as_vector(grad, feasible_set.dimension, name="grad")
    else:
        if objective is None:
            raise InvalidInputError("need either grad or objective")
        if h is None:
            h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
        grad = finite_difference_gradient(objective, x, h=h, feasible_set=feasible_set)
        source = f"finite-difference(h={h:.3g})"
    cone = feasible_set.tangent_cone(x)
    measure = float(np.linalg.norm(cone.project(-grad)))
    case = "interior" if cone.is_full_space else "boundary"
    return StationarityReport(tuple(float(v) for v in x), measure, source, case)
