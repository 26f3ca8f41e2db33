"""Profile derivation and basis assembly."""

from fractions import Fraction

import pytest

from svpforge.csp import parse_csp
from svpforge.errors import ProfileError
from svpforge.reduction import (
    GapFactor,
    build_spread_block,
    derive_profile,
    normalize_p,
    reduce_csp,
    tuple_rank,
)

from conftest import explicit_profile

SCALE = 10**6


def test_normalize_p():
    assert normalize_p(None) is None
    assert normalize_p("inf") is None
    assert normalize_p(float("inf")) is None
    assert normalize_p(3) == 3
    with pytest.raises(ProfileError):
        normalize_p(0)
    with pytest.raises(ProfileError):
        normalize_p(2.5)


def test_gap_factor_exact_comparisons():
    g = GapFactor(Fraction(2), Fraction(1, 300))
    # 2**(300/300) == 2, strictly between 1 and 3
    assert g.cmp_power(2, 1, Fraction(300)) == 0
    assert g.cmp_power(1, 1, Fraction(300)) < 0
    assert g.cmp_power(3, 1, Fraction(300)) > 0
    # 2**(1/300) is itself strictly between 1 and 2
    assert g.cmp_power(1, 1) < 0
    assert g.cmp_power(2, 1) > 0
    assert g.floor() == 1
    assert 1.0 < g.as_float() < 1.01


def test_gap_factor_trivial_base():
    g = GapFactor(Fraction(1), Fraction(1, 50))
    assert g.cmp_power(1, 1) == 0
    assert g.floor() == 1


def test_explicit_profile_values(toy1):
    prof = explicit_profile(toy1)
    assert prof.p == 3
    assert prof.prime == 67
    assert prof.scale == SCALE
    assert prof.consistency_width == 1
    assert prof.support_width == 1
    assert prof.rows_full == 8
    assert prof.consistency_cols == 4
    assert prof.support_cols == 1
    assert prof.spread_cols == 8
    assert prof.nprime == 13
    assert prof.padded_alphabet == 2
    assert prof.threshold_power == 13


def test_asymptotic_profile_values(toy1):
    prof = derive_profile(toy1, p="inf")
    assert prof.p is None
    assert prof.mode == "asymptotic-default"
    # log-cube of M=2 is 1, so widths equal degree and constraint count
    assert prof.consistency_width == 2
    assert prof.support_width == 2
    assert prof.scale == 64  # (M * SIGMA**q * ceil(1/s))**2 = (8 * 1)**2
    assert prof.prime == 67  # least prime >= (M * SIGMA**q)**2 = 64
    assert prof.nprime == 2 * 2 * 2 + 2 + 8
    assert prof.threshold_power == 1


def test_gap_factor_of_tagged_instance(toy_unsat):
    prof = explicit_profile(toy_unsat)
    gap = prof.gap_factor
    assert gap.base == 2  # 1 / (1/2)
    assert gap.exponent == Fraction(1, 300)  # (1/2 - 1/3) / (25 * 2)
    prof_inf = explicit_profile(toy_unsat, p="inf")
    assert prof_inf.gap_factor.exponent == Fraction(1, 100)  # 1 / (50 * 2)


def test_profile_rejections(toy1):
    with pytest.raises(ProfileError):
        derive_profile(toy1, p=2)  # finite p below 3
    with pytest.raises(ProfileError):
        derive_profile(toy1, mode="bogus")
    irregular = parse_csp("csp 3 2 2 2\ncon 0 1\nacc 0 0\ncon 0 2\nacc 0 0\n")
    with pytest.raises(ProfileError):
        derive_profile(irregular)
    unary = parse_csp("csp 1 1 1 2\ncon 0\nacc 0\n")
    with pytest.raises(ProfileError):
        derive_profile(unary)
    with pytest.raises(ProfileError):
        derive_profile(toy1, prime=10)  # composite override
    with pytest.raises(ProfileError):
        derive_profile(toy1, consistency_width=3)  # exceeds degree 2


def test_tuple_rank():
    assert tuple_rank((0, 0), 2) == 0
    assert tuple_rank((1, 0), 2) == 2
    assert tuple_rank((1, 1), 2) == 3
    assert tuple_rank((2, 1), 3) == 7


def test_reduce_toy1_pinned_basis(toy1_reduced):
    inst = toy1_reduced
    assert inst.num_rows == 3
    assert inst.num_cols == 13
    assert inst.row_provenance == ((0, (0, 0)), (0, (1, 1)), (1, (0, 0)))
    s = SCALE
    assert inst.basis == (
        (s, 0, s, 0, s, 1, -1, -1, 1, 0, 0, 0, 0),
        (0, s, 0, s, s, 1, 1, 1, 1, 0, 0, 0, 0),
        (s, 0, s, 0, s, 0, 0, 0, 0, 1, -1, -1, 1),
    )


def test_reduce_unsat_shape(unsat_reduced):
    inst = unsat_reduced
    assert inst.num_rows == 4
    assert inst.row_provenance == (
        (0, (0, 1)),
        (0, (1, 0)),
        (1, (0, 0)),
        (1, (1, 1)),
    )


def test_spans_and_groups(toy1_reduced):
    inst = toy1_reduced
    assert inst.consistency_span == (0, 4)
    assert inst.support_span == (4, 5)
    assert inst.spread_span == (5, 13)
    assert inst.consistency_col_span(1, 0) == (2, 3)
    assert inst.spread_col_span(1) == (9, 13)
    assert inst.constraint_row_groups() == ((0, 0, 2), (1, 2, 3))


def test_spread_block_padding():
    # alphabet 3 pads to 4, so each constraint owns 16 spread columns
    inst = parse_csp(
        "csp 2 2 2 3\n"
        "con 0 1\nacc 0 0\nacc 1 1\nacc 2 2\n"
        "con 0 1\nacc 0 1\nacc 1 2\nacc 2 0\n"
    )
    prof = derive_profile(inst, p=3, mode="explicit", consistency_width=1, support_width=1)
    assert prof.padded_alphabet == 4
    assert prof.spread_cols_per_constraint == 16
    out = reduce_csp(inst, prof)
    assert out.num_rows == 6
    assert out.num_cols == prof.nprime == 2 * 3 * 1 + 1 + 2 * 16
    rows = build_spread_block(inst, prof)
    # candidate rows carry the Hadamard row of their rank over the original alphabet
    nonzero = [r for r in rows if any(r)]
    assert len(nonzero) == 18  # every candidate tuple, accepted or not
    # distinct tuples map to distinct Hadamard rows inside one constraint block
    first_block = [tuple(r[:16]) for r in rows[:9]]
    assert len(set(first_block)) == 9


def test_reduce_rejects_profile_mismatch(toy1, toy_unsat):
    prof = explicit_profile(toy1)
    with pytest.raises(ProfileError):
        reduce_csp(
            parse_csp("csp 3 3 2 2\ncon 0 1\nacc 0 0\ncon 1 2\nacc 0 0\ncon 0 2\nacc 0 0\n"),
            prof,
        )


def test_scaled_blocks_dominate(toy1_reduced):
    # every consistency or support entry is 0 or a multiple of the scale
    inst = toy1_reduced
    lo, hi = inst.consistency_span[0], inst.support_span[1]
    for row in inst.basis:
        for j in range(lo, hi):
            assert row[j] == 0 or abs(row[j]) >= SCALE
            assert row[j] % SCALE == 0
    # spread entries stay in {-1, 0, 1}
    for row in inst.basis:
        for j in range(*inst.spread_span):
            assert row[j] in (-1, 0, 1)
