"""Degree regularization: duplication, dispersers, lifting."""

from fractions import Fraction

import pytest

from svpforge.csp import evaluate, max_sat_bruteforce, parse_csp, validate_regular
from svpforge.errors import RegularizeError
from svpforge.gadgets import BipartiteBiregular, verify_disperser
from svpforge.regularize import (
    RegularizeParams,
    build_disperser,
    duplicate_constraints,
    lineage_json,
    regularize,
)


@pytest.fixture
def reg_toy1(toy1):
    params = RegularizeParams.defaults(
        toy1, duplication=2, spread=2, beta=Fraction(1, 2)
    )
    return regularize(toy1, params)


def test_defaults(toy_unsat):
    params = RegularizeParams.defaults(toy_unsat)
    assert params.duplication == 2  # ceil(1 / (1/2))
    assert params.spread == 12  # ceil(6q / c) with q=2, c=1
    assert 0 < params.beta < 1
    # the default beta respects beta**(2q) <= s
    assert params.beta ** (2 * toy_unsat.arity) <= toy_unsat.soundness


def test_defaults_with_unit_soundness(toy1):
    params = RegularizeParams.defaults(toy1)
    assert params.duplication == 1
    assert params.beta == Fraction(1, 2)


def test_param_validation():
    with pytest.raises(RegularizeError):
        RegularizeParams(duplication=0, spread=1, beta=Fraction(1, 2))
    with pytest.raises(RegularizeError):
        RegularizeParams(duplication=1, spread=1, beta=Fraction(3, 2))
    with pytest.raises(RegularizeError):
        RegularizeParams(duplication=1, spread=1, beta=Fraction(1, 2), strategy="nope")
    with pytest.raises(RegularizeError):
        RegularizeParams(
            duplication=1, spread=1, beta=Fraction(1, 2), strategy="supplied-graph"
        )


def test_duplicate_constraints(toy1):
    dup, lineage = duplicate_constraints(toy1, 3)
    assert dup.num_constraints == 6
    assert lineage == ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2))
    # copies are adjacent and identical
    assert dup.constraints[0] == dup.constraints[1] == dup.constraints[2]
    assert dup.constraints[3] == toy1.constraints[1]


def test_regularize_toy1_shape(toy1, reg_toy1):
    out = reg_toy1.instance
    assert (out.num_vars, out.num_constraints, out.arity) == (4, 4, 4)
    report = validate_regular(out)
    assert report.is_regular and report.degree == 4
    assert reg_toy1.right_degree == 4
    # scopes repeat each original variable's copies, in ascending copy order
    for con in out.constraints:
        assert len(set(con.variables)) == 4


def test_regularize_lift_and_project(toy1, reg_toy1):
    out = reg_toy1.instance
    for assignment in ((0, 0), (1, 1), (0, 1)):
        lifted = reg_toy1.lift_assignment(assignment)
        assert len(lifted) == out.num_vars
        assert reg_toy1.project_assignment(lifted) == tuple(assignment)
    # a satisfying assignment lifts to a fully satisfying assignment
    lifted = reg_toy1.lift_assignment((0, 0))
    assert evaluate(out, lifted) == 1


def test_regularize_preserves_unsat_gap(toy_unsat):
    params = RegularizeParams.defaults(
        toy_unsat, duplication=2, spread=2, beta=Fraction(1, 2)
    )
    reg = regularize(toy_unsat, params)
    best, _ = max_sat_bruteforce(reg.instance)
    assert best == Fraction(1, 2)


def test_regularize_accepted_tuples_repeat_symbols(toy1, reg_toy1):
    out = reg_toy1.instance
    con = out.constraints[0]
    src = toy1.constraints[0]
    assert len(con.accepted) == len(src.accepted)
    for tup, orig in zip(con.accepted, src.accepted):
        assert tup == tuple(a for a in orig for _ in range(2))


def test_regularize_dispersers_certified(reg_toy1):
    params = reg_toy1.params
    delta = 3 * params.beta**params.spread
    for g in reg_toy1.dispersers:
        ok, cert = verify_disperser(g, delta, params.beta)
        assert ok and cert is None


def test_regularize_rejects_bad_right_degree(toy1):
    params = RegularizeParams.defaults(
        toy1, duplication=2, spread=2, beta=Fraction(1, 2), right_degree=3
    )
    with pytest.raises(RegularizeError):
        regularize(toy1, params)  # 3 does not divide w*d = 8


def test_regularize_rejects_unused_variable():
    inst = parse_csp("csp 3 1 2 2\ncon 0 1\nacc 0 0\n")
    params = RegularizeParams.defaults(inst, duplication=1, spread=1)
    with pytest.raises(RegularizeError):
        regularize(inst, params)  # variable 2 has degree zero


def test_supplied_graph_strategy(toy1):
    g = BipartiteBiregular(4, 2, 2, 4, ((0, 1),) * 4)
    params = RegularizeParams.defaults(
        toy1,
        duplication=2,
        spread=2,
        beta=Fraction(1, 2),
        strategy="supplied-graph",
        supplied=(g, g),
        right_degree=4,
    )
    reg = regularize(toy1, params)
    assert validate_regular(reg.instance).is_regular


def test_greedy_strategy(toy1):
    params = RegularizeParams.defaults(
        toy1, duplication=2, spread=2, beta=Fraction(1, 2), strategy="greedy-verified"
    )
    reg = regularize(toy1, params)
    out = reg.instance
    assert validate_regular(out).is_regular
    lifted = reg.lift_assignment((0, 0))
    assert evaluate(out, lifted) == 1


def test_build_disperser_small_sizes():
    for a, w, beta in ((4, 2, Fraction(1, 2)), (6, 2, Fraction(1, 2)), (4, 1, Fraction(1, 2))):
        g = build_disperser(a, w, beta, "exhaustive-search")
        assert g.left_size == a and g.left_degree == w
        assert g.right_size <= 12
        ok, _ = verify_disperser(g, 3 * beta**w, beta)
        assert ok


def test_lineage_json(reg_toy1):
    data = lineage_json(reg_toy1)
    assert data["duplication"] == 2
    assert data["spread"] == 2
    assert len(data["variables"]) == reg_toy1.instance.num_vars
    assert len(data["constraints"]) == reg_toy1.instance.num_constraints
