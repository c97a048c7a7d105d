"""Smooth convex feasible sets with exact Euclidean projections.

Every set kind provides the same small surface: membership with a boundary
classification, Euclidean projection, and the tangent cone at a feasible
point. For a set written as ``{x : g(x) <= 0}`` with smooth ``g``, the
tangent cone at a feasible point is either the full space (interior points)
or the halfspace ``{y : a.T y <= 0}`` with ``a`` the level-set gradient at
the boundary point. ``Box`` and ``HalfspaceIntersection`` have corners where
no single halfspace representation exists; they are shipped as test utilities
and raise on such points (see ``tangent_cone``).

All set objects are immutable after construction and safe to share across
threads; projection never mutates its argument.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .configio import format_reals, parse_reals, parse_sections
from .errors import ConfigError, DomainError, InvalidInputError, NumericalError

__all__ = [
    "TangentCone",
    "SmoothConvexSet",
    "Ball",
    "Ellipsoid",
    "Box",
    "HalfspaceIntersection",
    "set_to_record",
    "set_from_record",
]

#: Default membership tolerance on the scale-free boundary residual.
DEFAULT_BOUNDARY_TOLERANCE = 1e-9

#: Residual tolerance for the ellipsoid projection root-find.
ELLIPSOID_ROOT_TOLERANCE = 1e-12


def _as_vector(x, n: int | None = None, *, name: str = "x") -> np.ndarray:
    """Validate and copy a point: 1-D, finite, optionally of dimension n."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InvalidInputError(f"{name} has dimension {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr.copy()


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TangentCone:
    """Tangent cone of a smooth convex set at a feasible point.

    ``normal is None`` encodes the full space (interior point); otherwise the
    cone is the halfspace ``{y : normal.T y <= 0}``.
    """

    base_point: np.ndarray
    normal: np.ndarray | None

    def __post_init__(self):
        object.__setattr__(self, "base_point", _frozen(_as_vector(self.base_point, name="base_point")))
        if self.normal is not None:
            normal = _as_vector(self.normal, self.base_point.shape[0], name="normal")
            if not np.any(normal):
                raise NumericalError("tangent cone halfspace has a zero normal")
            object.__setattr__(self, "normal", _frozen(normal))

    @property
    def is_full_space(self) -> bool:
        return self.normal is None

    def project(self, y) -> np.ndarray:
        """Euclidean projection of ``y`` onto the cone.

        Full space: identity. Halfspace with normal ``a``:
        ``y - max(0, a.T y) / ||a||^2 * a``.
        """
        y = _as_vector(y, self.base_point.shape[0], name="y")
        if self.normal is None:
            return y
        s = float(self.normal @ y)
        if s <= 0.0:
            return y
        return y - (s / float(self.normal @ self.normal)) * self.normal


class SmoothConvexSet(abc.ABC):
    """Common interface of the feasible-set kinds."""

    dimension: int
    boundary_tolerance: float

    @abc.abstractmethod
    def residual(self, x) -> float:
        """Scale-free constraint residual: negative inside, ~0 on the
        boundary, positive outside."""

    @abc.abstractmethod
    def _project_outside(self, x: np.ndarray) -> np.ndarray:
        """Projection of a point already known to lie outside the set."""

    @abc.abstractmethod
    def _boundary_normal(self, x: np.ndarray) -> np.ndarray:
        """Level-set gradient at a boundary point (unnormalized)."""

    def contains(self, x) -> bool:
        """Membership test, with boundary_tolerance slack on the residual."""
        return self.residual(x) <= self.boundary_tolerance

    def on_boundary(self, x) -> bool:
        return abs(self.residual(x)) <= self.boundary_tolerance

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto the set.

        Feasible points (within tolerance) are returned unchanged, so the
        projection is exactly idempotent.
        """
        x = _as_vector(x, self.dimension)
        if self.contains(x):
            return x
        return self._project_outside(x)

    def tangent_cone(self, x) -> TangentCone:
        """Tangent cone at a feasible point ``x``."""
        x = _as_vector(x, self.dimension)
        r = self.residual(x)
        if r > self.boundary_tolerance:
            raise DomainError("tangent cone requested at an infeasible point")
        if r < -self.boundary_tolerance:
            return TangentCone(x, None)
        return TangentCone(x, self._boundary_normal(x))

    def boundary_normal(self, x) -> np.ndarray:
        """Level-set gradient at a boundary point of the set."""
        x = _as_vector(x, self.dimension)
        if not self.on_boundary(x):
            raise DomainError("point is not on the boundary")
        return self._boundary_normal(x)


@dataclass(frozen=True, eq=False)
class Ball(SmoothConvexSet):
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    center: np.ndarray
    radius: float
    boundary_tolerance: float = DEFAULT_BOUNDARY_TOLERANCE

    def __post_init__(self):
        center = _as_vector(self.center, name="center")
        if center.shape[0] == 0:
            raise InvalidInputError("center must be nonempty")
        radius = float(self.radius)
        if not np.isfinite(radius) or radius <= 0.0:
            raise InvalidInputError(f"radius must be positive and finite, got {radius}")
        if not 0.0 < float(self.boundary_tolerance) < 1.0:
            raise InvalidInputError("boundary_tolerance must lie in (0, 1)")
        object.__setattr__(self, "center", _frozen(center))
        object.__setattr__(self, "radius", radius)

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def residual(self, x) -> float:
        x = _as_vector(x, self.dimension)
        d = x - self.center
        return float(d @ d) / (self.radius * self.radius) - 1.0

    def _project_outside(self, x: np.ndarray) -> np.ndarray:
        d = x - self.center
        return self.center + (self.radius / float(np.linalg.norm(d))) * d

    def _boundary_normal(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (x - self.center)


@dataclass(frozen=True, eq=False)
class Ellipsoid(SmoothConvexSet):
    """Ellipsoid ``{x : (x - center).T A (x - center) <= 1}`` with SPD ``A``.

    Projection solves the KKT system ``y = center + (I + lam*A)^-1 (x - center)``
    for the multiplier ``lam >= 0`` that puts ``y`` on the unit level set,
    by safeguarded bisection in the eigenbasis of ``A``. The root is accepted
    when the level-set residual is below 1e-12.
    """

    center: np.ndarray
    matrix: np.ndarray
    boundary_tolerance: float = DEFAULT_BOUNDARY_TOLERANCE
    _eigvals: np.ndarray = field(init=False, repr=False)
    _eigvecs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        center = _as_vector(self.center, name="center")
        n = center.shape[0]
        A = np.asarray(self.matrix, dtype=float)
        if A.shape != (n, n):
            raise InvalidInputError(f"matrix must have shape {(n, n)}, got {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InvalidInputError("matrix has non-finite entries")
        if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(A).max()))):
            raise InvalidInputError("matrix must be symmetric")
        A = 0.5 * (A + A.T)
        w, Q = np.linalg.eigh(A)
        if w.min() <= 0.0:
            raise InvalidInputError("matrix must be positive definite")
        if not 0.0 < float(self.boundary_tolerance) < 1.0:
            raise InvalidInputError("boundary_tolerance must lie in (0, 1)")
        object.__setattr__(self, "center", _frozen(center))
        object.__setattr__(self, "matrix", _frozen(A))
        object.__setattr__(self, "_eigvals", _frozen(w))
        object.__setattr__(self, "_eigvecs", _frozen(Q))

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def residual(self, x) -> float:
        x = _as_vector(x, self.dimension)
        d = x - self.center
        return float(d @ (self.matrix @ d)) - 1.0

    def _level_residual(self, z: np.ndarray, lam: float) -> float:
        scaled = z / (1.0 + lam * self._eigvals)
        return float(np.sum(self._eigvals * scaled * scaled)) - 1.0

    def _project_outside(self, x: np.ndarray) -> np.ndarray:
        z = self._eigvecs.T @ (x - self.center)
        lo, hi = 0.0, max(1.0, 1.0 / float(self._eigvals.min()))
        grow = 0
        while self._level_residual(z, hi) > 0.0:
            hi *= 2.0
            grow += 1
            if grow > 200:
                raise NumericalError(
                    "ellipsoid projection could not bracket the multiplier",
                    residual=self._level_residual(z, hi),
                )
        lam = hi
        res = self._level_residual(z, lam)
        for _ in range(400):
            lam = 0.5 * (lo + hi)
            res = self._level_residual(z, lam)
            if abs(res) <= ELLIPSOID_ROOT_TOLERANCE:
                break
            if res > 0.0:
                lo = lam
            else:
                hi = lam
        else:
            if abs(res) > 1e-10:
                raise NumericalError("ellipsoid projection bisection stalled", residual=res)
        return self.center + self._eigvecs @ (z / (1.0 + lam * self._eigvals))

    def _boundary_normal(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (self.matrix @ (x - self.center))


@dataclass(frozen=True, eq=False)
class Box(SmoothConvexSet):
    """Axis-aligned box ``{x : lower <= x <= upper}``.

    Test utility: the boundary is not smooth at faces' intersections, so
    ``tangent_cone`` is defined only where at most one bound is active.
    """

    lower: np.ndarray
    upper: np.ndarray
    boundary_tolerance: float = DEFAULT_BOUNDARY_TOLERANCE

    def __post_init__(self):
        lower = _as_vector(self.lower, name="lower")
        upper = _as_vector(self.upper, lower.shape[0], name="upper")
        if not np.all(lower < upper):
            raise InvalidInputError("box requires lower < upper componentwise")
        object.__setattr__(self, "lower", _frozen(lower))
        object.__setattr__(self, "upper", _frozen(upper))
        object.__setattr__(self, "_scale", max(1.0, float(np.max(upper - lower))))

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def residual(self, x) -> float:
        x = _as_vector(x, self.dimension)
        gap = np.maximum(self.lower - x, x - self.upper)
        return float(gap.max()) / self._scale

    def _project_outside(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def _active_bounds(self, x: np.ndarray) -> list[tuple[int, int]]:
        tol = self.boundary_tolerance * self._scale
        active = []
        for i in range(self.dimension):
            if abs(x[i] - self.lower[i]) <= tol:
                active.append((i, -1))
            if abs(x[i] - self.upper[i]) <= tol:
                active.append((i, +1))
        return active

    def _boundary_normal(self, x: np.ndarray) -> np.ndarray:
        active = self._active_bounds(x)
        if len(active) != 1:
            raise DomainError(
                f"box tangent cone defined only where exactly one bound is active, "
                f"found {len(active)} active bounds"
            )
        i, sign = active[0]
        normal = np.zeros(self.dimension)
        normal[i] = float(sign)
        return normal


@dataclass(frozen=True, eq=False)
class HalfspaceIntersection(SmoothConvexSet):
    """Polyhedron ``{x : normals @ x <= offsets}``.

    Test utility. Projection is exact: it enumerates active subsets of the
    halfspaces and returns the KKT point, which is exponential in the number
    of rows and therefore capped at 12 rows. ``tangent_cone`` is defined only
    where at most one halfspace is active.
    """

    normals: np.ndarray
    offsets: np.ndarray
    boundary_tolerance: float = DEFAULT_BOUNDARY_TOLERANCE

    MAX_ROWS = 12

    def __post_init__(self):
        N = np.asarray(self.normals, dtype=float)
        if N.ndim != 2:
            raise InvalidInputError("normals must be a 2-D array (one row per halfspace)")
        if not np.all(np.isfinite(N)):
            raise InvalidInputError("normals have non-finite entries")
        b = _as_vector(self.offsets, N.shape[0], name="offsets")
        row_norms = np.linalg.norm(N, axis=1)
        if np.any(row_norms == 0.0):
            raise InvalidInputError("each halfspace normal must be nonzero")
        if N.shape[0] > self.MAX_ROWS:
            raise InvalidInputError(
                f"at most {self.MAX_ROWS} halfspaces supported (projection enumerates subsets)"
            )
        object.__setattr__(self, "normals", _frozen(N.copy()))
        object.__setattr__(self, "offsets", _frozen(b))
        object.__setattr__(self, "_row_norms", _frozen(row_norms.copy()))

    @property
    def dimension(self) -> int:
        return self.normals.shape[1]

    def residual(self, x) -> float:
        x = _as_vector(x, self.dimension)
        return float(np.max((self.normals @ x - self.offsets) / self._row_norms))

    def _project_outside(self, x: np.ndarray) -> np.ndarray:
        m = self.normals.shape[0]
        slack_tol = 1e-10 * max(1.0, float(np.linalg.norm(x)))
        best = None
        best_dist = np.inf
        for mask in range(1, 1 << m):
            rows = [i for i in range(m) if mask >> i & 1]
            N = self.normals[rows]
            rhs = N @ x - self.offsets[rows]
            gram = N @ N.T
            mu, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
            if np.any(mu < -slack_tol):
                continue
            y = x - N.T @ mu
            if np.max(self.normals @ y - self.offsets) > slack_tol:
                continue
            dist = float(np.linalg.norm(y - x))
            if dist < best_dist:
                best, best_dist = y, dist
        if best is None:
            raise NumericalError("polyhedron projection found no KKT point (set may be empty)")
        return best

    def _active_rows(self, x: np.ndarray) -> list[int]:
        gaps = (self.normals @ x - self.offsets) / self._row_norms
        return [i for i in range(self.normals.shape[0]) if abs(gaps[i]) <= self.boundary_tolerance]

    def _boundary_normal(self, x: np.ndarray) -> np.ndarray:
        active = self._active_rows(x)
        if len(active) != 1:
            raise DomainError(
                f"halfspace-intersection tangent cone defined only where exactly one "
                f"halfspace is active, found {len(active)}"
            )
        return self.normals[active[0]].copy()


# --- descriptor records ---------------------------------------------------

def set_to_record(feasible_set: SmoothConvexSet) -> str:
    """Serialize a set to a line-oriented key=value record."""
    if isinstance(feasible_set, Ball):
        lines = [
            "kind=ball",
            f"center={format_reals(feasible_set.center)}",
            f"radius={feasible_set.radius:.17g}",
        ]
    elif isinstance(feasible_set, Ellipsoid):
        lines = [
            "kind=ellipsoid",
            f"center={format_reals(feasible_set.center)}",
            f"matrix={format_reals(feasible_set.matrix.ravel())}",
        ]
    elif isinstance(feasible_set, Box):
        lines = [
            "kind=box",
            f"lower={format_reals(feasible_set.lower)}",
            f"upper={format_reals(feasible_set.upper)}",
        ]
    elif isinstance(feasible_set, HalfspaceIntersection):
        lines = [
            "kind=halfspaces",
            f"normals={format_reals(feasible_set.normals.ravel())}",
            f"offsets={format_reals(feasible_set.offsets)}",
        ]
    else:
        raise InvalidInputError(f"unknown set type {type(feasible_set).__name__}")
    return "\n".join(lines) + "\n"


def set_from_record(text: str) -> SmoothConvexSet:
    """Rebuild a set from its key=value record."""
    keys, sections = parse_sections(text)
    if sections:
        raise ConfigError("set record must not contain sections")
    kind = keys.get("kind")
    if kind is None:
        raise ConfigError("set record is missing 'kind'")
    try:
        if kind == "ball":
            try:
                radius = float(keys["radius"])
            except ValueError:
                raise ConfigError(f"bad radius {keys['radius']!r}") from None
            return Ball(parse_reals(keys["center"], what="center"), radius)
        if kind == "ellipsoid":
            center = parse_reals(keys["center"], what="center")
            flat = parse_reals(keys["matrix"], what="matrix")
            n = len(center)
            if len(flat) != n * n:
                raise ConfigError(f"matrix needs {n * n} entries (row-major), got {len(flat)}")
            return Ellipsoid(center, np.asarray(flat).reshape(n, n))
        if kind == "box":
            return Box(parse_reals(keys["lower"], what="lower"), parse_reals(keys["upper"], what="upper"))
        if kind == "halfspaces":
            offsets = parse_reals(keys["offsets"], what="offsets")
            flat = parse_reals(keys["normals"], what="normals")
            m = len(offsets)
            if m == 0 or len(flat) % m != 0:
                raise ConfigError("normals length must be a multiple of the offsets length")
            return HalfspaceIntersection(np.asarray(flat).reshape(m, -1), offsets)
    except KeyError as exc:
        raise ConfigError(f"set record is missing {exc.args[0]!r}") from None
    raise ConfigError(f"unknown set kind {kind!r}")
