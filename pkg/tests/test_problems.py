"""Problem registry, counters, contracts, instance descriptors."""

import numpy as np
import pytest

import projsearch as ps
from projsearch.errors import (
    ConfigError,
    ContractViolationError,
    InvalidInputError,
    ProblemNotFoundError,
)


def test_registry_contents():
    names = ps.available_problems()
    for required in ("HS22", "HS232", "HS29", "HS65", "HS43", "quad-shift"):
        assert required in names
    assert any("linear" in n for n in names)
    assert any("rosen" in n for n in names)


def test_get_definition_and_families():
    d = ps.get_definition("HS22")
    assert d.dimension == 2
    assert np.allclose(d.start, [2.0, 2.0])
    assert d.objective(np.array([2.0, 1.0])) == 0.0

    fam = ps.get_definition("quad-shift-4")
    assert fam.dimension == 4
    assert fam.objective(2.0 * np.ones(4)) == 0.0

    lin = ps.get_definition("linear-3")
    assert lin.objective(np.zeros(3)) == 0.0
    assert lin.objective(np.ones(3)) == pytest.approx(6.0)  # slopes 1+2+3

    ros = ps.get_definition("rosen-2")
    assert ros.objective(np.ones(2)) == 0.0

    with pytest.raises(ProblemNotFoundError):
        ps.get_definition("HS999")
    with pytest.raises(ProblemNotFoundError):
        ps.get_definition("rosen-1")  # needs dimension >= 2


def test_objective_values_match_textbook_forms():
    assert ps.get_definition("HS22").objective(np.array([1.0, 1.0])) == 1.0
    hs232 = ps.get_definition("HS232").objective(np.array([3.0, 1.0]))
    assert hs232 == pytest.approx(-9.0 / (27.0 * np.sqrt(3.0)))
    assert ps.get_definition("HS29").objective(np.array([1.0, 2.0, 3.0])) == -6.0
    hs65 = ps.get_definition("HS65").objective(np.array([1.0, 2.0, 3.0]))
    assert hs65 == pytest.approx(1.0 + 49.0 / 9.0 + 4.0)
    hs43 = ps.get_definition("HS43").objective(np.ones(4))
    assert hs43 == pytest.approx(1 + 1 + 2 + 1 - 5 - 5 - 21 + 7)


def test_gradients_match_finite_differences():
    gen = np.random.default_rng(5)
    for name in ("HS22", "HS232", "HS29", "HS65", "HS43", "quad-shift-3",
                 "linear-4", "rosen-3"):
        d = ps.get_definition(name)
        x = gen.uniform(0.5, 1.5, size=d.dimension)
        numeric = ps.finite_difference_gradient(d.objective, x, h=1e-7)
        assert np.linalg.norm(d.gradient(x) - numeric) <= 1e-5 * max(
            1.0, np.linalg.norm(d.gradient(x))
        )


def test_make_instance_projects_start():
    problem = ps.make_instance("HS65")  # canonical start (-5,5,0), unit ball
    norm = np.linalg.norm([-5.0, 5.0, 0.0])
    assert np.allclose(problem.start, np.array([-5.0, 5.0, 0.0]) / norm)
    assert problem.feasible_set.contains(problem.start)


def test_counters_and_contract():
    problem = ps.make_instance("HS22")
    assert problem.evaluations == 0
    problem.evaluate(problem.start)
    assert problem.evaluations == 1
    with pytest.raises(ContractViolationError):
        problem.evaluate(np.array([5.0, 5.0]))
    # the rejected call is not counted
    assert problem.evaluations == 1
    # objective_value is an uncounted diagnostic and works anywhere
    problem.objective_value(np.array([5.0, 5.0]))
    assert problem.evaluations == 1


def test_reference_values_and_provenance():
    p0 = ps.make_instance("HS22")
    assert p0.f_ref == pytest.approx(1.528)
    assert p0.f_ref_provenance == "literature"
    p5 = ps.make_instance("HS22", feasible_set=ps.Ball(np.full(2, 5.0), 1.0))
    assert p5.f_ref == pytest.approx(16.0)

    quad = ps.make_instance("quad-shift", feasible_set=ps.Ball(np.zeros(2), 1.0))
    # shift (2,0): distance from center 2, radius 1, so best value (2-1)^2
    assert quad.f_ref == pytest.approx(1.0)
    assert quad.f_ref_provenance == "closed-form"

    lin = ps.make_instance("linear-2", feasible_set=ps.Ball(np.zeros(2), 2.0))
    # slope (1,2): optimum value is -r * ||g||
    assert lin.f_ref == pytest.approx(-2.0 * np.sqrt(5.0))

    odd = ps.make_instance("HS22", feasible_set=ps.Ball(np.array([1.0, 7.0]), 1.0))
    assert odd.f_ref is None


def test_instance_descriptor_round_trip():
    descriptor = ps.parse_descriptor(
        "problem=HS22\nconstraint=ball\ncenter=0,0\nradius=1\nbudget=10000\n"
    )
    assert descriptor.problem == "HS22"
    assert descriptor.budget == 10000
    problem = descriptor.build_problem()
    assert problem.name == "HS22"
    assert isinstance(problem.feasible_set, ps.Ball)
    text = "\n".join(descriptor.to_lines())
    again = ps.parse_descriptor(text)
    assert again == descriptor


def test_descriptor_center_broadcast_and_kinds():
    d = ps.parse_descriptor("problem=HS43\nconstraint=ball\ncenter=5\nradius=1\n")
    problem = d.build_problem()
    assert np.allclose(problem.feasible_set.center, np.full(4, 5.0))

    ell = ps.parse_descriptor(
        "problem=HS22\nconstraint=ellipsoid\ncenter=0\nradius=2\n"
    ).build_problem()
    assert isinstance(ell.feasible_set, ps.Ellipsoid)
    assert np.allclose(ell.feasible_set.matrix, np.eye(2) / 4.0)

    ell2 = ps.parse_descriptor(
        "problem=HS22\nconstraint=ellipsoid\nmatrix=0.25,0,0,1\n"
    ).build_problem()
    assert np.allclose(ell2.feasible_set.matrix, np.diag([0.25, 1.0]))

    box = ps.parse_descriptor(
        "problem=HS22\nconstraint=box\nlower=-1,-1\nupper=1,1\n"
    ).build_problem()
    assert isinstance(box.feasible_set, ps.Box)

    box2 = ps.parse_descriptor(
        "problem=HS22\nconstraint=box\ncenter=0\nradius=1\n"
    ).build_problem()
    assert np.allclose(box2.feasible_set.lower, [-1.0, -1.0])
    assert np.allclose(box2.feasible_set.upper, [1.0, 1.0])


def test_descriptor_errors():
    with pytest.raises(ConfigError):
        ps.parse_descriptor("constraint=ball\n")  # missing problem
    with pytest.raises(ConfigError):
        ps.parse_descriptor("problem=HS22\nshape=ball\n")  # unknown key
    with pytest.raises(ConfigError):
        ps.parse_descriptor("problem=HS22\nconstraint=simplex\n")
    with pytest.raises(ConfigError):
        ps.parse_descriptor("problem=HS22\nradius=abc\n")
    with pytest.raises(ConfigError):
        ps.parse_descriptor("problem=HS22\nbudget=-5\n")
    with pytest.raises((ConfigError, InvalidInputError)):
        ps.parse_descriptor("problem=HS22\ncenter=1,2,3\n").build_problem()
    with pytest.raises(ProblemNotFoundError):
        ps.parse_descriptor("problem=HS999\n").build_problem()


def test_problem_start_must_be_feasible():
    ball = ps.Ball(np.zeros(2), 1.0)
    with pytest.raises(InvalidInputError):
        ps.BlackBoxProblem("bad", lambda x: 0.0, ball, np.array([3.0, 0.0]))


def test_dimension_mismatch_rejected():
    ball3 = ps.Ball(np.zeros(3), 1.0)
    with pytest.raises(InvalidInputError):
        ps.make_instance("HS22", feasible_set=ball3)
