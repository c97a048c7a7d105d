"""projsearch: derivative-free minimization over smooth convex feasible sets.

The solver polls along projected search curves ``t -> project(x + t d)``,
accepting steps that satisfy a sufficient-decrease test. The package bundles
exact projection operators for balls, ellipsoids, boxes, and small halfspace
intersections, a benchmark problem suite, performance/data profile tooling,
and a CLI (``projsearch run`` / ``projsearch campaign``).
"""

from .curves import SearchCurve
from .errors import (
    ConfigError,
    ContractViolationError,
    DiagnosticUnavailableError,
    DomainError,
    InvalidInputError,
    NumericalError,
    ProblemNotFoundError,
    ProjSearchError,
)
from .fo import FoConfig, solve_fo
from .fsp import DirectionSet, FspConfig, solve
from .geometry import (
    Ball,
    Box,
    Ellipsoid,
    HalfspaceIntersection,
    SmoothConvexSet,
    TangentCone,
    set_from_record,
    set_to_record,
)
from .problems import (
    BlackBoxProblem,
    InstanceDescriptor,
    ProblemDefinition,
    available_problems,
    get_definition,
    make_instance,
    parse_descriptor,
    reference_minimum,
)
from .profiles import (
    ProfileCurves,
    ProfileMatrix,
    RunRecord,
    data_profile,
    performance_profile,
    write_history_csv,
    write_profile_csv,
    write_runs_csv,
)
from .runs import IterationRecord, SolverRun
from .stationarity import (
    StationarityReport,
    finite_difference_gradient,
    stationarity_measure,
    stationarity_report,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BlackBoxProblem",
    "Box",
    "ConfigError",
    "ContractViolationError",
    "DiagnosticUnavailableError",
    "DirectionSet",
    "DomainError",
    "Ellipsoid",
    "FoConfig",
    "FspConfig",
    "HalfspaceIntersection",
    "InstanceDescriptor",
    "InvalidInputError",
    "IterationRecord",
    "NumericalError",
    "ProblemDefinition",
    "ProblemNotFoundError",
    "ProfileCurves",
    "ProfileMatrix",
    "ProjSearchError",
    "RunRecord",
    "SearchCurve",
    "SmoothConvexSet",
    "SolverRun",
    "StationarityReport",
    "TangentCone",
    "available_problems",
    "data_profile",
    "finite_difference_gradient",
    "get_definition",
    "make_instance",
    "parse_descriptor",
    "performance_profile",
    "reference_minimum",
    "set_from_record",
    "set_to_record",
    "solve",
    "solve_fo",
    "stationarity_measure",
    "stationarity_report",
    "write_history_csv",
    "write_profile_csv",
    "write_runs_csv",
    "__version__",
]
