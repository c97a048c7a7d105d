"""Command-line harness: single runs and benchmark campaigns.

``projsearch run`` solves one problem instance and writes a per-iteration
trace plus a summary; ``projsearch campaign`` executes a (instances x
solvers) grid from a config file and emits the run/history CSVs and the
performance/data profiles. Campaign outputs are deterministic: re-running
the same config produces byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import os
import sys

from .configio import parse_bool, parse_reals, parse_sections
from .errors import ConfigError, ContractViolationError, ProjSearchError
from .fo import FoConfig, solve_fo
from .fsp import FspConfig, solve
from .problems import InstanceDescriptor, available_problems, descriptor_from_keys, parse_descriptor
from .profiles import (
    ProfileMatrix,
    RunRecord,
    data_profile,
    performance_profile,
    write_history_csv,
    write_profile_csv,
    write_runs_csv,
)
from .stationarity import stationarity_report

__all__ = ["main", "builtin_solvers", "SolverSpec"]

DEFAULT_EPSILONS = (1e-2, 1e-4, 1e-6, 1e-8)
DEFAULT_COSTS = ("n_f", "n_p")


@dataclasses.dataclass(frozen=True)
class SolverSpec:
    """A named, fully configured solver ready to run."""

    name: str
    kind: str  # "fsp" or "fo"
    config: object

    def run(self, problem, budget: int | None = None):
        if self.kind == "fsp":
            config = self.config
            if budget is not None:
                config = dataclasses.replace(config, max_evaluations=budget)
            return solve(problem, config, solver_name=self.name)
        return solve_fo(problem, self.config, solver_name=self.name)


def builtin_solvers() -> dict[str, SolverSpec]:
    return {
        "fsp-default": SolverSpec("fsp-default", "fsp", FspConfig()),
        "fsp-static": SolverSpec("fsp-static", "fsp", FspConfig(ordering="static")),
        "fsp-coordinates": SolverSpec(
            "fsp-coordinates", "fsp", FspConfig(direction_policy="coordinates")
        ),
        "fo-default": SolverSpec("fo-default", "fo", FoConfig()),
    }


_FSP_KEYS = {
    "delta": ("delta", float),
    "sigma": ("sigma", float),
    "tau": ("tau", float),
    "alpha_bar": ("alpha_bar", float),
    "initial_step": ("initial_step", float),
    "min_step": ("min_step", float),
    "budget": ("max_evaluations", int),
    "directions": ("direction_policy", str),
    "ordering": ("ordering", str),
    "first_sweep": ("first_iteration_full_sweep", "bool"),
    "normalize_diagonals": ("normalize_diagonals", "bool"),
}

_FO_KEYS = {
    "delta": ("delta", float),
    "sigma": ("sigma", float),
    "initial_step": ("initial_step", float),
    "max_iterations": ("max_iterations", int),
    "max_backtracks": ("max_backtracks", int),
    "stationarity_tolerance": ("stationarity_tolerance", float),
}


def _convert(value: str, kind, *, what: str):
    if kind == "bool":
        return parse_bool(value, what=what)
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {what}") from None


def solver_from_keys(name: str, keys: dict[str, str]) -> SolverSpec:
    """Build a solver from a ``[solver.<name>]`` section."""
    keys = dict(keys)
    base: SolverSpec | None = None
    if "builtin" in keys:
        builtin = keys.pop("builtin")
        if builtin not in builtin_solvers():
            raise ConfigError(f"unknown builtin solver {builtin!r}")
        base = builtin_solvers()[builtin]
        kind = base.kind
        if "type" in keys and keys.pop("type") != kind:
            raise ConfigError(f"solver {name!r}: type conflicts with builtin")
    else:
        kind = keys.pop("type", "fsp")
    if kind not in ("fsp", "fo"):
        raise ConfigError(f"solver {name!r}: unknown type {kind!r}")
    key_map = _FSP_KEYS if kind == "fsp" else _FO_KEYS
    overrides = {}
    for key, value in keys.items():
        if key not in key_map:
            raise ConfigError(f"solver {name!r}: unknown key {key!r}")
        field_name, converter = key_map[key]
        overrides[field_name] = _convert(value, converter, what=f"solver {name!r} key {key!r}")
    if base is not None:
        config = dataclasses.replace(base.config, **overrides)
    else:
        config = FspConfig(**overrides) if kind == "fsp" else FoConfig(**overrides)
    return SolverSpec(name, kind, config)


# --- single run -------------------------------------------------------------

def _write_run_outputs(run, problem, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"{run.problem}__{run.solver}")
    run.write_trace(stem + ".trace.csv")
    lines = run.summary_lines()
    if problem.has_gradient:
        report = stationarity_report(
            problem.feasible_set, run.final_point, grad=problem.gradient_at(run.final_point)
        )
        lines += report.to_lines()
    if problem.f_ref is not None:
        lines.append(f"f_ref={problem.f_ref:.12g}")
        lines.append(f"f_ref_provenance={problem.f_ref_provenance}")
    with open(stem + ".summary.txt", "w") as handle:
        handle.write("\n".join(lines) + "\n")


def _cmd_run(args) -> int:
    if args.descriptor is not None:
        with open(args.descriptor) as handle:
            descriptor = parse_descriptor(handle.read())
        if args.problem is not None:
            descriptor = dataclasses.replace(descriptor, problem=args.problem)
    else:
        if args.problem is None:
            raise ConfigError("either --problem or --descriptor is required")
        descriptor = InstanceDescriptor(problem=args.problem)
    updates = {}
    if args.constraint is not None:
        updates["constraint"] = args.constraint
    if args.center is not None:
        updates["center"] = tuple(parse_reals(args.center, what="--center"))
    if args.radius is not None:
        updates["radius"] = args.radius
    if args.matrix is not None:
        updates["matrix"] = tuple(parse_reals(args.matrix, what="--matrix"))
    if args.lower is not None:
        updates["lower"] = tuple(parse_reals(args.lower, what="--lower"))
    if args.upper is not None:
        updates["upper"] = tuple(parse_reals(args.upper, what="--upper"))
    if args.budget is not None:
        updates["budget"] = args.budget
    if updates:
        descriptor = dataclasses.replace(descriptor, **updates)

    solvers = builtin_solvers()
    if args.solver not in solvers:
        raise ConfigError(f"unknown solver {args.solver!r}; available: {', '.join(sorted(solvers))}")
    spec = solvers[args.solver]
    flag_overrides = {
        "delta": args.delta,
        "sigma": args.sigma,
        "tau": args.tau,
        "alpha_bar": args.alpha_bar,
        "min_step": args.min_step,
        "initial_step": args.initial_step,
    }
    allowed = {f.name for f in dataclasses.fields(type(spec.config))}
    overrides = {}
    for field_name, value in flag_overrides.items():
        if value is None:
            continue
        if field_name not in allowed:
            raise ConfigError(f"--{field_name.replace('_', '-')} does not apply to solver {spec.name!r}")
        overrides[field_name] = value
    if overrides:
        spec = dataclasses.replace(spec, config=dataclasses.replace(spec.config, **overrides))

    problem = descriptor.build_problem()
    run = spec.run(problem, budget=descriptor.budget)
    _write_run_outputs(run, problem, args.out)
    print(f"{run.problem} {run.solver} {run.best_value:.12g} {run.n_f} {run.n_p} {run.termination}")
    return 0


# --- campaigns ---------------------------------------------------------------

@dataclasses.dataclass
class CampaignConfig:
    instances: list[tuple[str, InstanceDescriptor]]
    solvers: list[SolverSpec]
    budget: int | None
    epsilons: tuple[float, ...]
    costs: tuple[str, ...]
    seed: int | None  # reserved: current solvers are deterministic

    @classmethod
    def parse(cls, text: str) -> "CampaignConfig":
        top, sections = parse_sections(text)
        known = {"budget", "epsilons", "costs", "solvers", "seed"}
        unknown = set(top) - known
        if unknown:
            raise ConfigError(f"unknown campaign keys {sorted(unknown)}")
        budget = None
        if "budget" in top:
            budget = _convert(top["budget"], int, what="budget")
            if budget < 1:
                raise ConfigError("budget must be positive")
        epsilons = DEFAULT_EPSILONS
        if "epsilons" in top:
            epsilons = tuple(parse_reals(top["epsilons"], what="epsilons"))
        costs = DEFAULT_COSTS
        if "costs" in top:
            costs = tuple(c.strip() for c in top["costs"].split(",") if c.strip())
            for c in costs:
                if c not in ("n_f", "n_p"):
                    raise ConfigError(f"unknown cost metric {c!r}")
        seed = _convert(top["seed"], int, what="seed") if "seed" in top else None

        instances: list[tuple[str, InstanceDescriptor]] = []
        solvers: list[SolverSpec] = []
        if "solvers" in top:
            for name in (s.strip() for s in top["solvers"].split(",")):
                if not name:
                    continue
                if name not in builtin_solvers():
                    raise ConfigError(f"unknown builtin solver {name!r} in solvers=")
                solvers.append(builtin_solvers()[name])
        for section, keys in sections.items():
            if section.startswith("instance."):
                label = section[len("instance."):]
                if not label:
                    raise ConfigError("instance section needs a label: [instance.<label>]")
                instances.append((label, descriptor_from_keys(keys, where=f"[{section}]")))
            elif section.startswith("solver."):
                label = section[len("solver."):]
                if not label:
                    raise ConfigError("solver section needs a name: [solver.<name>]")
                if any(s.name == label for s in solvers):
                    raise ConfigError(f"duplicate solver name {label!r}")
                solvers.append(solver_from_keys(label, keys))
            else:
                raise ConfigError(f"unknown section [{section}]")
        if not instances:
            raise ConfigError("campaign defines no instances")
        if not solvers:
            raise ConfigError("campaign defines no solvers")
        labels = [label for label, _ in instances]
        if len(set(labels)) != len(labels):
            raise ConfigError("instance labels must be unique")
        return cls(instances, solvers, budget, epsilons, costs, seed)


def _campaign_cell(label: str, descriptor: InstanceDescriptor, spec: SolverSpec,
                   budget: int | None):
    """One campaign cell; module-level so process pools can pickle it."""
    problem = descriptor.build_problem()
    effective = descriptor.budget if descriptor.budget is not None else budget
    run = spec.run(problem, budget=effective)
    run.problem = label
    run.metadata["problem_id"] = problem.name
    return run, problem.f_ref, problem.dimension


def _cmd_campaign(args) -> int:
    with open(args.config) as handle:
        campaign = CampaignConfig.parse(handle.read())
    out = args.out
    runs_dir = os.path.join(out, "runs")
    os.makedirs(runs_dir, exist_ok=True)

    tasks = [(label, descriptor, spec)
             for label, descriptor in campaign.instances
             for spec in campaign.solvers]
    results: dict[tuple[str, str], object] = {}
    failures: list[tuple[str, str, str]] = []

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {
                pool.submit(_campaign_cell, label, descriptor, spec, campaign.budget):
                (label, spec.name)
                for label, descriptor, spec in tasks
            }
            for future, key in futures.items():
                try:
                    results[key] = future.result()
                except ProjSearchError as exc:
                    failures.append((*key, str(exc)))
                    results[key] = None
    else:
        for label, descriptor, spec in tasks:
            try:
                results[(label, spec.name)] = _campaign_cell(label, descriptor, spec, campaign.budget)
            except ProjSearchError as exc:
                failures.append((label, spec.name, str(exc)))
                results[(label, spec.name)] = None

    labels = [label for label, _ in campaign.instances]
    cells: dict[tuple[str, str], RunRecord | None] = {}
    records = []
    dimensions: dict[str, int] = {}
    references: dict[str, float] = {}
    for label, descriptor in campaign.instances:
        for spec in campaign.solvers:
            outcome = results[(label, spec.name)]
            if outcome is None:
                cells[(label, spec.name)] = None
                continue
            run, f_ref, dimension = outcome
            dimensions[label] = dimension
            if f_ref is not None:
                references[label] = f_ref
            rec = RunRecord.from_solver_run(run)
            cells[(label, spec.name)] = rec
            records.append(rec)
            stem = os.path.join(runs_dir, f"{label}__{spec.name}")
            run.write_trace(stem + ".trace.csv")
        if label not in dimensions:
            # every solver failed on this instance; dimension from the registry
            from .problems import get_definition

            dimensions[label] = get_definition(descriptor.problem).dimension

    write_runs_csv(records, os.path.join(out, "runs.csv"))
    write_history_csv(records, os.path.join(out, "history.csv"))

    # profiles compare evaluation-only solvers; the first-order solver is a
    # gradient-based diagnostic (its runs/traces are kept, its curves are not)
    profile_solvers = [spec.name for spec in campaign.solvers if spec.kind == "fsp"]
    if profile_solvers:
        profile_cells = {(label, name): cells[(label, name)]
                         for label in labels for name in profile_solvers}
        matrix = ProfileMatrix(labels, profile_solvers, profile_cells,
                               dimensions, references)
        for cost in campaign.costs:
            curves = performance_profile(matrix, cost=cost)
            write_profile_csv(curves, os.path.join(out, f"perf_profile_{cost}.csv"))
        for eps in campaign.epsilons:
            curves = data_profile(matrix, epsilon=eps)
            write_profile_csv(curves, os.path.join(out, f"data_profile_eps{eps:.0e}.csv"))

    if failures:
        with open(os.path.join(out, "failures.txt"), "w") as handle:
            for label, solver, message in failures:
                handle.write(f"{label} {solver}: {message}\n")
        print(f"campaign finished with {len(failures)} failed cell(s); see failures.txt",
              file=sys.stderr)
        return 1
    print(f"campaign complete: {len(records)} runs -> {out}")
    return 0


def _cmd_list(_args) -> int:
    print("problems:")
    for name in available_problems():
        print(f"  {name}")
    print("solvers:")
    for name in sorted(builtin_solvers()):
        print(f"  {name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projsearch",
        description="Feasible-set minimization via projection search curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="solve one problem instance")
    run_p.add_argument("--problem", help="problem name (see 'projsearch list')")
    run_p.add_argument("--descriptor", help="instance descriptor file (flags override it)")
    run_p.add_argument("--constraint", choices=["ball", "ellipsoid", "box"])
    run_p.add_argument("--center", help="scalar (broadcast) or comma-separated vector")
    run_p.add_argument("--radius", type=float)
    run_p.add_argument("--matrix", help="row-major entries of the ellipsoid matrix")
    run_p.add_argument("--lower", help="box lower bounds (comma-separated)")
    run_p.add_argument("--upper", help="box upper bounds (comma-separated)")
    run_p.add_argument("--budget", type=int, help="objective evaluation budget")
    run_p.add_argument("--solver", default="fsp-default")
    run_p.add_argument("--delta", type=float)
    run_p.add_argument("--sigma", type=float)
    run_p.add_argument("--tau", type=float)
    run_p.add_argument("--alpha-bar", dest="alpha_bar", type=float)
    run_p.add_argument("--min-step", dest="min_step", type=float)
    run_p.add_argument("--initial-step", dest="initial_step", type=float)
    run_p.add_argument("--out", default="out")
    run_p.set_defaults(func=_cmd_run)

    camp_p = sub.add_parser("campaign", help="run an instances x solvers grid")
    camp_p.add_argument("config", help="campaign config file")
    camp_p.add_argument("--out", default="campaign-out")
    camp_p.add_argument("--jobs", type=int, default=1, help="concurrent cells")
    camp_p.set_defaults(func=_cmd_campaign)

    list_p = sub.add_parser("list", help="list problems and builtin solvers")
    list_p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractViolationError as exc:
        print(f"solver contract violation: {exc}", file=sys.stderr)
        return 3
    except ProjSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
