"""Benchmark problems: counted black-box oracles over convex feasible sets.

A problem instance pairs an objective with a feasible set and a feasible
start point. The oracle counts every objective call (there is no caching, so
re-evaluations at coincident points are charged) and refuses infeasible
arguments with :class:`ContractViolationError`, which turns any solver
feasibility bug into a loud failure. Gradients, where available, are a
diagnostics-only side channel and are never charged to the counter.

The registry ships five classic low-dimensional nonlinear objectives (named
``HS22``, ``HS232``, ``HS29``, ``HS65``, ``HS43`` after their numbering in
the widely used constrained test-problem collection), a fixed 2-D shifted
quadratic, and three parametric families: shifted quadratics
``quad-shift-<n>``, linear objectives ``linear-<n>``, and chained Rosenbrock
valleys ``rosen-<n>``. Family instances are resolved by name, e.g.
``make_instance("rosen-6")``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import partial

import numpy as np

from .configio import parse_reals, parse_sections
from .errors import (
    ConfigError,
    ContractViolationError,
    DiagnosticUnavailableError,
    InvalidInputError,
    ProblemNotFoundError,
)
from .geometry import Ball, Box, Ellipsoid, SmoothConvexSet, _as_vector

__all__ = [
    "BlackBoxProblem",
    "ProblemDefinition",
    "available_problems",
    "get_definition",
    "make_instance",
    "reference_minimum",
    "InstanceDescriptor",
    "parse_descriptor",
]


class BlackBoxProblem:
    """Objective oracle bound to a feasible set, with evaluation counting."""

    def __init__(self, name: str, objective, feasible_set: SmoothConvexSet, start,
                 gradient=None, f_ref: float | None = None,
                 f_ref_provenance: str | None = None):
        self.name = str(name)
        self._objective = objective
        self._gradient = gradient
        self.feasible_set = feasible_set
        start = _as_vector(start, feasible_set.dimension, name="start")
        if not feasible_set.contains(start):
            raise InvalidInputError("start point must be feasible")
        start.setflags(write=False)
        self.start = start
        self.f_ref = None if f_ref is None else float(f_ref)
        self.f_ref_provenance = f_ref_provenance
        self._evaluations = 0

    @property
    def dimension(self) -> int:
        return self.feasible_set.dimension

    @property
    def evaluations(self) -> int:
        """Number of completed objective evaluations."""
        return self._evaluations

    @property
    def has_gradient(self) -> bool:
        return self._gradient is not None

    def _check(self, x, what: str) -> np.ndarray:
        x = _as_vector(x, self.dimension)
        if not self.feasible_set.contains(x):
            raise ContractViolationError(
                f"{what} of {self.name!r} called at an infeasible point "
                f"(residual {self.feasible_set.residual(x):.3e}); solvers must stay feasible"
            )
        return x

    def evaluate(self, x) -> float:
        """Counted objective evaluation at a feasible point."""
        x = self._check(x, "objective")
        self._evaluations += 1
        return float(self._objective(x))

    def objective_value(self, x) -> float:
        """Uncounted objective evaluation, for diagnostics only.

        Unlike :meth:`evaluate`, this does not enforce the feasibility
        contract, so analysis code may probe arbitrary points.
        """
        return float(self._objective(_as_vector(x, self.dimension, name="x")))

    def gradient_at(self, x) -> np.ndarray:
        """Uncounted analytic gradient, for diagnostics and the first-order
        reference solver."""
        if self._gradient is None:
            raise DiagnosticUnavailableError(f"problem {self.name!r} has no gradient oracle")
        x = self._check(x, "gradient")
        return np.asarray(self._gradient(x), dtype=float)


@dataclass(frozen=True)
class ProblemDefinition:
    """Registry entry: the set-free part of a benchmark problem."""

    name: str
    dimension: int
    objective: object
    gradient: object
    start: tuple[float, ...]
    summary: str


# --- objectives -------------------------------------------------------------
# Five classic constrained-benchmark objectives, plus parametric families.

_SQRT27_3 = 27.0 * math.sqrt(3.0)


def _hs22(x):
    return (x[0] - 2.0) ** 2 + (x[1] - 1.0) ** 2


def _hs22_grad(x):
    return np.array([2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)])


def _hs232(x):
    return ((x[0] - 3.0) ** 2 - 9.0) * x[1] ** 3 / _SQRT27_3


def _hs232_grad(x):
    return np.array([
        2.0 * (x[0] - 3.0) * x[1] ** 3 / _SQRT27_3,
        3.0 * ((x[0] - 3.0) ** 2 - 9.0) * x[1] ** 2 / _SQRT27_3,
    ])


def _hs29(x):
    return -x[0] * x[1] * x[2]


def _hs29_grad(x):
    return np.array([-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]])


def _hs65(x):
    return (x[0] - x[1]) ** 2 + (x[0] + x[1] - 10.0) ** 2 / 9.0 + (x[2] - 5.0) ** 2


def _hs65_grad(x):
    common = 2.0 * (x[0] + x[1] - 10.0) / 9.0
    return np.array([
        2.0 * (x[0] - x[1]) + common,
        -2.0 * (x[0] - x[1]) + common,
        2.0 * (x[2] - 5.0),
    ])


def _hs43(x):
    return (x[0] ** 2 + x[1] ** 2 + 2.0 * x[2] ** 2 + x[3] ** 2
            - 5.0 * x[0] - 5.0 * x[1] - 21.0 * x[2] + 7.0 * x[3])


def _hs43_grad(x):
    return np.array([
        2.0 * x[0] - 5.0,
        2.0 * x[1] - 5.0,
        4.0 * x[2] - 21.0,
        2.0 * x[3] + 7.0,
    ])


def _quad_shift(x, shift):
    d = x - shift
    return float(d @ d)


def _quad_shift_grad(x, shift):
    return 2.0 * (x - shift)


def _linear(x, slope):
    return float(slope @ x)


def _linear_grad(x, slope):
    return slope.copy()


def _rosen(x):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def _rosen_grad(x):
    grad = np.zeros_like(x)
    grad[:-1] = -400.0 * x[:-1] * (x[1:] - x[:-1] ** 2) - 2.0 * (1.0 - x[:-1])
    grad[1:] += 200.0 * (x[1:] - x[:-1] ** 2)
    return grad


_FIXED: dict[str, ProblemDefinition] = {
    "HS22": ProblemDefinition("HS22", 2, _hs22, _hs22_grad, (2.0, 2.0),
                              "convex quadratic distance to (2, 1)"),
    "HS232": ProblemDefinition("HS232", 2, _hs232, _hs232_grad, (2.0, 0.5),
                               "nonconvex cubic-by-quadratic product"),
    "HS29": ProblemDefinition("HS29", 3, _hs29, _hs29_grad, (1.0, 1.0, 1.0),
                              "negative coordinate product"),
    "HS65": ProblemDefinition("HS65", 3, _hs65, _hs65_grad, (-5.0, 5.0, 0.0),
                              "convex quadratic with a flat valley"),
    "HS43": ProblemDefinition("HS43", 4, _hs43, _hs43_grad, (0.0, 0.0, 0.0, 0.0),
                              "convex quadratic in four variables"),
    "quad-shift": ProblemDefinition("quad-shift", 2,
                                    partial(_quad_shift, shift=np.array([2.0, 0.0])),
                                    partial(_quad_shift_grad, shift=np.array([2.0, 0.0])),
                                    (0.0, 0.0),
                                    "squared distance to (2, 0)"),
}

_QUAD_SHIFT_RE = re.compile(r"^quad-shift-(\d+)$")
_LINEAR_RE = re.compile(r"^linear-(\d+)$")
_ROSEN_RE = re.compile(r"^rosen-(\d+)$")


def _family_definition(name: str) -> ProblemDefinition | None:
    if (m := _QUAD_SHIFT_RE.match(name)) is not None:
        n = int(m.group(1))
        if n < 1:
            return None
        shift = np.full(n, 2.0)
        return ProblemDefinition(name, n,
                                 partial(_quad_shift, shift=shift),
                                 partial(_quad_shift_grad, shift=shift),
                                 (0.0,) * n,
                                 f"squared distance to 2*ones({n})")
    if (m := _LINEAR_RE.match(name)) is not None:
        n = int(m.group(1))
        if n < 1:
            return None
        slope = np.arange(1.0, n + 1.0)
        return ProblemDefinition(name, n,
                                 partial(_linear, slope=slope),
                                 partial(_linear_grad, slope=slope),
                                 (0.0,) * n,
                                 f"linear objective with slope (1..{n})")
    if (m := _ROSEN_RE.match(name)) is not None:
        n = int(m.group(1))
        if n < 2:
            return None
        start = tuple(-1.2 if i % 2 == 0 else 1.0 for i in range(n))
        return ProblemDefinition(name, n, _rosen, _rosen_grad, start,
                                 f"chained Rosenbrock valley in {n} variables")
    return None


def available_problems() -> list[str]:
    """Fixed problem names plus the family patterns."""
    return sorted(_FIXED) + ["linear-<n>", "quad-shift-<n>", "rosen-<n>"]


def get_definition(name: str) -> ProblemDefinition:
    if name in _FIXED:
        return _FIXED[name]
    definition = _family_definition(name)
    if definition is None:
        raise ProblemNotFoundError(
            f"unknown problem {name!r}; available: {', '.join(available_problems())}"
        )
    return definition


# Reported best values over the two standard ball geometries (unit radius,
# centered at the origin / at 5*ones). Quoted to their published precision.
_LITERATURE_REFS: dict[str, tuple[float, float]] = {
    "HS22": (1.528, 16.0),
    "HS232": (-0.038, -29.373),
    "HS29": (-0.192, -173.494),
    "HS65": (26.548, 0.0),
    "HS43": (-21.435, -12.436),
}


def reference_minimum(definition: ProblemDefinition,
                      feasible_set: SmoothConvexSet) -> tuple[float, str] | None:
    """Best-known objective value for a (problem, set) pair, when one exists.

    Shifted-quadratic and linear objectives over balls have closed-form
    constrained minima; the five fixed nonlinear problems carry reported
    values for the two standard ball geometries.
    """
    name = definition.name
    if isinstance(feasible_set, Ball):
        center, radius = feasible_set.center, feasible_set.radius
        if name == "quad-shift" or _QUAD_SHIFT_RE.match(name):
            shift = np.array([2.0, 0.0]) if name == "quad-shift" else np.full(definition.dimension, 2.0)
            gap = float(np.linalg.norm(shift - center))
            return (max(0.0, gap - radius) ** 2, "closed-form")
        if _LINEAR_RE.match(name):
            slope = np.arange(1.0, definition.dimension + 1.0)
            return (float(slope @ center) - radius * float(np.linalg.norm(slope)), "closed-form")
        if name in _LITERATURE_REFS and radius == 1.0:
            if np.all(center == 0.0):
                return (_LITERATURE_REFS[name][0], "literature")
            if np.all(center == 5.0):
                return (_LITERATURE_REFS[name][1], "literature")
    return None


def make_instance(name: str, feasible_set: SmoothConvexSet | None = None) -> BlackBoxProblem:
    """Build a fresh instance: counters zeroed, canonical start projected
    onto the chosen set (default: unit ball at the origin)."""
    definition = get_definition(name)
    if feasible_set is None:
        feasible_set = Ball(np.zeros(definition.dimension), 1.0)
    if feasible_set.dimension != definition.dimension:
        raise InvalidInputError(
            f"problem {name!r} has dimension {definition.dimension}, "
            f"set has dimension {feasible_set.dimension}"
        )
    start = feasible_set.project(np.asarray(definition.start, dtype=float))
    ref = reference_minimum(definition, feasible_set)
    f_ref, provenance = ref if ref is not None else (None, None)
    return BlackBoxProblem(
        definition.name,
        definition.objective,
        feasible_set,
        start,
        gradient=definition.gradient,
        f_ref=f_ref,
        f_ref_provenance=provenance,
    )


# --- instance descriptors ---------------------------------------------------

@dataclass(frozen=True)
class InstanceDescriptor:
    """Parsed form of the line-oriented instance descriptor.

    Keys: ``problem`` (required), ``constraint`` (ball | ellipsoid | box,
    default ball), ``center`` (scalar broadcast or comma vector, default 0),
    ``radius`` (default 1), ``matrix`` (row-major, ellipsoid only),
    ``lower``/``upper`` (box only, override center/radius), ``budget``
    (optional evaluation budget for the run).
    """

    problem: str
    constraint: str = "ball"
    center: tuple[float, ...] | None = None
    radius: float = 1.0
    matrix: tuple[float, ...] | None = None
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    budget: int | None = None

    def _center_vector(self, n: int) -> np.ndarray:
        if self.center is None:
            return np.zeros(n)
        if len(self.center) == 1:
            return np.full(n, self.center[0])
        if len(self.center) == n:
            return np.asarray(self.center, dtype=float)
        raise ConfigError(
            f"center has {len(self.center)} entries; expected 1 or {n}"
        )

    def build_set(self, dimension: int) -> SmoothConvexSet:
        center = self._center_vector(dimension)
        if self.constraint == "ball":
            return Ball(center, self.radius)
        if self.constraint == "ellipsoid":
            if self.matrix is None:
                matrix = np.eye(dimension) / (self.radius * self.radius)
            else:
                if len(self.matrix) != dimension * dimension:
                    raise ConfigError(
                        f"matrix needs {dimension * dimension} entries (row-major), "
                        f"got {len(self.matrix)}"
                    )
                matrix = np.asarray(self.matrix, dtype=float).reshape(dimension, dimension)
            return Ellipsoid(center, matrix)
        if self.constraint == "box":
            if (self.lower is None) != (self.upper is None):
                raise ConfigError("box needs both lower and upper (or neither)")
            if self.lower is not None:
                return Box(np.asarray(self.lower, float), np.asarray(self.upper, float))
            return Box(center - self.radius, center + self.radius)
        raise ConfigError(f"unknown constraint kind {self.constraint!r}")

    def build_problem(self) -> BlackBoxProblem:
        definition = get_definition(self.problem)
        return make_instance(self.problem, self.build_set(definition.dimension))

    def to_lines(self) -> list[str]:
        from .configio import format_reals

        lines = [f"problem={self.problem}", f"constraint={self.constraint}"]
        if self.center is not None:
            lines.append(f"center={format_reals(self.center)}")
        lines.append(f"radius={self.radius:.17g}")
        if self.matrix is not None:
            lines.append(f"matrix={format_reals(self.matrix)}")
        if self.lower is not None:
            lines.append(f"lower={format_reals(self.lower)}")
            lines.append(f"upper={format_reals(self.upper)}")
        if self.budget is not None:
            lines.append(f"budget={self.budget}")
        return lines


def descriptor_from_keys(keys: dict[str, str], *, where: str = "descriptor") -> InstanceDescriptor:
    """Build an :class:`InstanceDescriptor` from parsed key/value pairs."""
    known = {"problem", "constraint", "center", "radius", "matrix", "lower", "upper", "budget"}
    unknown = set(keys) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    if "problem" not in keys:
        raise ConfigError(f"{where}: missing required key 'problem'")
    constraint = keys.get("constraint", "ball")
    if constraint not in ("ball", "ellipsoid", "box"):
        raise ConfigError(f"{where}: unknown constraint kind {constraint!r}")

    def reals(key):
        return tuple(parse_reals(keys[key], what=key)) if key in keys else None

    radius = 1.0
    if "radius" in keys:
        try:
            radius = float(keys["radius"])
        except ValueError:
            raise ConfigError(f"{where}: bad radius {keys['radius']!r}") from None
    budget = None
    if "budget" in keys:
        try:
            budget = int(keys["budget"])
        except ValueError:
            raise ConfigError(f"{where}: bad budget {keys['budget']!r}") from None
        if budget < 1:
            raise ConfigError(f"{where}: budget must be positive")
    return InstanceDescriptor(
        problem=keys["problem"],
        constraint=constraint,
        center=reals("center"),
        radius=radius,
        matrix=reals("matrix"),
        lower=reals("lower"),
        upper=reals("upper"),
        budget=budget,
    )


def parse_descriptor(text: str) -> InstanceDescriptor:
    """Parse a single-instance descriptor file (key=value lines)."""
    keys, sections = parse_sections(text)
    if sections:
        raise ConfigError("instance descriptor must not contain sections")
    return descriptor_from_keys(keys)
