"""Feasible search curves traced by projecting a ray onto a convex set.

A curve anchored at a feasible point ``x`` with direction ``y`` is

    gamma(t) = project(x + t * y),    t >= 0.

It starts exactly at the anchor, stays feasible for every parameter value,
and its one-sided velocity at 0 is the projection of ``y`` onto the tangent
cone at the anchor. Solvers poll objective values along such curves, so the
curve performs no caching or precomputation: every evaluation maps directly
to the membership test plus (when the raw point is infeasible) one projection,
and the caller owns all operation counting.

Derivative-based callers assume the underlying objective is continuously
differentiable along the curve; that smoothness obligation lies with the
caller, not with this module.

Numerics note: when the raw point ``x + t * y`` leaves the set along the
normal direction at ``x``, the exact projection is the anchor itself ("the
curve is pinned at the anchor"). In floating point the projection round-trip
can instead return a point a few ulps away, and those phantom displacements
would feed noise into stepsize-controlled solvers. ``eval_counted`` therefore
snaps any projected point within round-off distance of the anchor back to the
anchor exactly; the snap threshold sits many orders of magnitude below the
smallest genuine poll step, so real progress is never absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import SmoothConvexSet, _as_vector, _frozen

__all__ = ["SearchCurve"]

# Projected points closer to the anchor than this (relative) distance are
# pinned: the exact projection of a step along the outward normal is the
# anchor itself, and anything this close is round-off, not movement.
PINNED_POINT_TOLERANCE = 64.0 * float(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class SearchCurve:
    """Projection curve ``t -> project(anchor + t * direction)``."""

    feasible_set: SmoothConvexSet
    anchor: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        anchor = _as_vector(self.anchor, self.feasible_set.dimension, name="anchor")
        direction = _as_vector(self.direction, self.feasible_set.dimension, name="direction")
        if not self.feasible_set.contains(anchor):
            raise DomainError("curve anchor must be feasible")
        object.__setattr__(self, "anchor", _frozen(anchor))
        object.__setattr__(self, "direction", _frozen(direction))

    def eval(self, t: float) -> np.ndarray:
        """Feasible point at parameter ``t >= 0``."""
        return self.eval_counted(t)[0]

    def eval_counted(self, t: float) -> tuple[np.ndarray, bool]:
        """Like ``eval`` but also reports whether an infeasible raw point
        had to be projected, so callers can maintain projection counters."""
        t = float(t)
        if not np.isfinite(t) or t < 0.0:
            raise DomainError(f"curve parameter must be finite and >= 0, got {t}")
        raw = self.anchor + t * self.direction
        if self.feasible_set.contains(raw):
            return raw, False
        projected = self.feasible_set.project(raw)
        snap = PINNED_POINT_TOLERANCE * (1.0 + float(np.linalg.norm(self.anchor)))
        if float(np.linalg.norm(projected - self.anchor)) <= snap:
            return np.array(self.anchor), True
        return projected, True

    def initial_velocity(self) -> np.ndarray:
        """One-sided velocity at ``t = 0``: the tangent-cone projection of
        the direction at the anchor."""
        return self.feasible_set.tangent_cone(self.anchor).project(self.direction)

    def velocity_finite_difference(self, h: float) -> np.ndarray:
        """Forward-difference velocity estimate ``(eval(h) - eval(0)) / h``.

        Intended as an independent check of ``initial_velocity``; ``h`` must
        be positive.
        """
        h = float(h)
        if not h > 0.0:
            raise DomainError(f"finite-difference step must be positive, got {h}")
        return (self.eval(h) - self.eval(0.0)) / h
