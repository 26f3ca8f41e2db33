"""Compile a regular CSP into a gapped shortest-vector lattice basis.

The basis G = [consistency | support | spread] has one candidate row per
(constraint, accepted tuple) pair:

  consistency: per (variable, symbol) column block, the j-th row referencing
      that pair (in global row order) carries row j of a reduced Vandermonde
      matrix, scaled.  A cancellation inside one block therefore needs more
      than ``consistency_width`` participating rows.
  support: row i carries row i of another reduced Vandermonde matrix, scaled,
      forcing any cancellation to use more than ``support_width`` rows.
  spread: a full +-1 Hadamard row per basis row, placed in the owning
      constraint's column block and indexed by the tuple's rank, so rows of
      one constraint are mutually orthogonal there.

Candidate rows whose consistency part is all zero (tuples the constraint
rejects) are deleted.  Short lattice vectors then correspond to consistent
assignments: the scaled blocks are expensive to touch, and the spread block
prices whatever cannot cancel.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .csp import (
    CspInstance,
    IndicatorMatrix,
    candidate_rows,
    indicator_matrix,
    validate_regular,
)
from .errors import ProfileError
from .gadgets import hadamard, is_prime, reduced_vandermonde, smallest_prime_geq

log = logging.getLogger(__name__)

INFINITY = "inf"


def normalize_p(p) -> Optional[int]:
    """Accept int >= 1, the string 'inf', None, or float('inf'); None means max-norm."""
    if p is None or p == INFINITY:
        return None
    if isinstance(p, float):
        if math.isinf(p) and p > 0:
            return None
        raise ProfileError("non-integer norms are only available as 'inf'")
    if isinstance(p, int) and p >= 1:
        return p
    raise ProfileError(f"unsupported norm index {p!r}")


@dataclass(frozen=True)
class GapFactor:
    """The value base**exponent kept symbolically for exact comparisons.

    base is 1/soundness (>= 1) and exponent is (1/2 - 1/p) / (25 q), so the
    value is irrational in general; comparisons cross-multiply integer powers
    instead of evaluating it.
    """

    base: Fraction
    exponent: Fraction

    def __post_init__(self):
        if self.base < 1 or self.exponent < 0:
            raise ProfileError("gap factor needs base >= 1 and exponent >= 0")

    def cmp_power(self, lhs: int, mult: int, power: Fraction = Fraction(1)) -> int:
        """Exact sign of lhs - mult * value**power for nonnegative integers."""
        if lhs < 0 or mult < 0 or power < 0:
            raise ValueError("cmp_power needs nonnegative arguments")
        e = self.exponent * Fraction(power)
        if self.base == 1 or e == 0:
            return (lhs > mult) - (lhs < mult)
        en, ed = e.numerator, e.denominator
        left = lhs**ed * self.base.denominator**en
        right = mult**ed * self.base.numerator**en
        return (left > right) - (left < right)

    def floor(self) -> int:
        """Exact integer floor of the value."""
        n = 1
        while self.cmp_power(n + 1, 1) <= 0:
            n += 1
        return n

    def as_float(self) -> float:
        return math.exp(float(self.exponent) * math.log(float(self.base)))


@dataclass(frozen=True)
class ReductionProfile:
    """All knobs of one reduction, plus the source instance's shape."""

    p: Optional[int]  # None is the max-norm
    prime: int
    scale: int
    consistency_width: int
    support_width: int
    mode: str  # "asymptotic-default" | "explicit"
    soundness: Fraction
    num_vars: int
    num_constraints: int
    arity: int
    alphabet_size: int
    degree: int
    padded_alphabet: int

    @property
    def rows_full(self) -> int:
        """Candidate row count before deletion: M * SIGMA**q."""
        return self.num_constraints * self.alphabet_size**self.arity

    @property
    def spread_cols_per_constraint(self) -> int:
        return self.padded_alphabet**self.arity

    @property
    def consistency_cols(self) -> int:
        return self.num_vars * self.alphabet_size * self.consistency_width

    @property
    def support_cols(self) -> int:
        return self.support_width

    @property
    def spread_cols(self) -> int:
        return self.num_constraints * self.spread_cols_per_constraint

    @property
    def nprime(self) -> int:
        return self.consistency_cols + self.support_cols + self.spread_cols

    @property
    def gap_factor(self) -> GapFactor:
        q = self.arity
        if self.p is None:
            exponent = Fraction(1, 50 * q)
        else:
            exponent = (Fraction(1, 2) - Fraction(1, self.p)) / (25 * q)
        return GapFactor(1 / self.soundness, exponent)

    @property
    def threshold(self) -> tuple[int, Optional[int]]:
        """The length threshold (N')**(1/p), symbolically as (N', p)."""
        return self.nprime, self.p

    @property
    def threshold_power(self) -> int:
        """threshold**p for finite p; the threshold itself (exactly 1) for max-norm."""
        if self.p is None:
            return 1
        return self.nprime


def derive_profile(
    inst: CspInstance,
    p="inf",
    mode: str = "asymptotic-default",
    *,
    prime: Optional[int] = None,
    scale: Optional[int] = None,
    consistency_width: Optional[int] = None,
    support_width: Optional[int] = None,
) -> ReductionProfile:
    """Fix every reduction parameter for ``inst``.

    asymptotic-default instantiates the generic choices at log-cube scaling;
    explicit mode records that knobs were pinned by hand.  Either way the
    overrides win, and the result is validated as a whole.
    """
    pn = normalize_p(p)
    if pn is not None and pn < 3:
        raise ProfileError("profiles need p >= 3 or the max-norm")
    if mode not in ("asymptotic-default", "explicit"):
        raise ProfileError(f"unknown mode {mode!r}")
    if inst.arity < 2:
        raise ProfileError("the reduction needs arity >= 2")
    report = validate_regular(inst)
    if not report.is_regular:
        raise ProfileError(f"instance is irregular (degrees {report.degrees})")
    d = report.degree
    m, n, q, sigma = (
        inst.num_constraints,
        inst.num_vars,
        inst.arity,
        inst.alphabet_size,
    )
    rows_full = m * sigma**q
    logcube = max(1, (m - 1).bit_length()) ** 3

    if consistency_width is None:
        consistency_width = d // logcube
        if consistency_width < 1:
            log.warning(
                "degree %d below log-cube %d; clamping consistency width to 1", d, logcube
            )
            consistency_width = 1
    if support_width is None:
        support_width = m // logcube
        if support_width < 1:
            log.warning(
                "constraint count %d below log-cube %d; clamping support width to 1",
                m,
                logcube,
            )
            support_width = 1
    if scale is None:
        scale = (rows_full * math.ceil(1 / inst.soundness)) ** 2
    if prime is None:
        prime = smallest_prime_geq(max(rows_full**2, rows_full + 1))

    padded = 1 << max(0, (sigma - 1).bit_length())
    if padded != sigma:
        log.info("alphabet size %d padded to %d for the spread block", sigma, padded)

    profile = ReductionProfile(
        p=pn,
        prime=prime,
        scale=scale,
        consistency_width=consistency_width,
        support_width=support_width,
        mode=mode,
        soundness=inst.soundness,
        num_vars=n,
        num_constraints=m,
        arity=q,
        alphabet_size=sigma,
        degree=d,
        padded_alphabet=padded,
    )
    _validate_profile(profile)
    return profile


def _validate_profile(prof: ReductionProfile) -> None:
    if not is_prime(prof.prime):
        raise ProfileError(f"{prof.prime} is not prime")
    if prof.prime < prof.rows_full + 1:
        raise ProfileError(
            f"prime {prof.prime} too small: the support block needs {prof.rows_full} distinct rows"
        )
    if prof.scale < 1:
        raise ProfileError("scale must be positive")
    if not (1 <= prof.consistency_width <= prof.degree):
        raise ProfileError(
            f"consistency width must lie in [1, degree {prof.degree}]"
        )
    if not (1 <= prof.support_width <= prof.num_constraints):
        raise ProfileError(
            f"support width must lie in [1, constraint count {prof.num_constraints}]"
        )
    if prof.consistency_width >= prof.prime or prof.support_width >= prof.prime:
        raise ProfileError("widths must stay below the prime")


def build_consistency_block(
    inst: CspInstance, prof: ReductionProfile, matrix: Optional[IndicatorMatrix] = None
) -> list[list[int]]:
    """Vandermonde-tagged copy of the indicator matrix.

    Column block (x, a) spans consistency_width columns; in global row order,
    the j-th row with an indicator 1 in column (x, a) receives scaled
    Vandermonde row j there (j is 1-based, rows of the same block distinct).
    """
    if matrix is None:
        matrix = indicator_matrix(inst)
    width = prof.consistency_width
    vm = reduced_vandermonde(prof.prime, width)
    out = [[0] * (matrix.num_cols * width) for _ in range(matrix.num_rows)]
    occurrences = [0] * matrix.num_cols
    for r in range(matrix.num_rows):
        row = matrix.entries[r]
        for col in range(matrix.num_cols):
            if row[col]:
                occurrences[col] += 1
                j = occurrences[col]
                if j > vm.num_rows:
                    raise ProfileError(
                        f"column {matrix.col_index[col]} has more than {vm.num_rows} occurrences"
                    )
                vrow = vm.rows[j - 1]
                base = col * width
                for t in range(width):
                    out[r][base + t] = prof.scale * vrow[t]
    return out


def build_support_block(prof: ReductionProfile) -> list[list[int]]:
    """Rows 1..rows_full of the (prime, support_width) reduced Vandermonde, scaled."""
    vm = reduced_vandermonde(prof.prime, prof.support_width)
    if prof.rows_full > vm.num_rows:
        raise ProfileError("prime too small for the support block")
    return [
        [prof.scale * x for x in vm.rows[i]] for i in range(prof.rows_full)
    ]


def tuple_rank(tup: Sequence[int], sigma: int) -> int:
    """Lexicographic rank of a tuple over the original alphabet."""
    rank = 0
    for a in tup:
        rank = rank * sigma + a
    return rank


def build_spread_block(inst: CspInstance, prof: ReductionProfile) -> list[list[int]]:
    """Block-diagonal Hadamard rows: basis row (t, tuple) places the Hadamard
    row indexed by the tuple's rank into constraint t's column block.

    When the alphabet is padded, the Hadamard order grows but row indexing
    still uses ranks over the original alphabet, so the map stays injective.
    """
    per = prof.spread_cols_per_constraint
    k = per.bit_length() - 1
    if 1 << k != per:
        raise ProfileError("spread block width per constraint must be a power of two")
    h = hadamard(k)
    sigma, q, m = inst.alphabet_size, inst.arity, inst.num_constraints
    out = []
    for t, tup in candidate_rows(inst):
        row = [0] * (m * per)
        hrow = h.rows[tuple_rank(tup, sigma)]
        base = t * per
        for j in range(per):
            row[base + j] = hrow[j]
        out.append(row)
    return out


@dataclass(frozen=True)
class GapSvpInstance:
    """A lattice basis with provenance back to the CSP that produced it.

    Rows are integer basis vectors (the lattice is their integer row span);
    row_provenance records the (constraint, accepted tuple) pair behind each
    surviving row, in construction order (constraints ascending, tuples in
    lexicographic order within a constraint).
    """

    csp: CspInstance
    profile: ReductionProfile
    basis: tuple[tuple[int, ...], ...]
    row_provenance: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def num_rows(self) -> int:
        return len(self.basis)

    @property
    def num_cols(self) -> int:
        return self.profile.nprime

    @property
    def consistency_span(self) -> tuple[int, int]:
        return 0, self.profile.consistency_cols

    @property
    def support_span(self) -> tuple[int, int]:
        lo = self.profile.consistency_cols
        return lo, lo + self.profile.support_cols

    @property
    def spread_span(self) -> tuple[int, int]:
        lo = self.profile.consistency_cols + self.profile.support_cols
        return lo, self.profile.nprime

    def consistency_col_span(self, var: int, symbol: int) -> tuple[int, int]:
        w = self.profile.consistency_width
        base = (var * self.profile.alphabet_size + symbol) * w
        return base, base + w

    def spread_col_span(self, constraint: int) -> tuple[int, int]:
        per = self.profile.spread_cols_per_constraint
        lo = self.spread_span[0] + constraint * per
        return lo, lo + per

    def constraint_row_groups(self) -> tuple[tuple[int, int, int], ...]:
        """Contiguous (constraint, row_start, row_end) groups of the basis."""
        groups = []
        for r, (t, _tup) in enumerate(self.row_provenance):
            if groups and groups[-1][0] == t:
                groups[-1][2] = r + 1
            else:
                groups.append([t, r, r + 1])
        return tuple(tuple(g) for g in groups)


def reduce_csp(inst: CspInstance, prof: ReductionProfile) -> GapSvpInstance:
    """Assemble the basis and delete rows with an all-zero consistency part.

    Surviving rows are exactly the (constraint, accepted tuple) pairs: every
    inserted Vandermonde row starts with a 1 (the zeroth power), so a row's
    consistency part vanishes iff its tuple is rejected.
    """
    if (
        prof.num_vars,
        prof.num_constraints,
        prof.arity,
        prof.alphabet_size,
    ) != (inst.num_vars, inst.num_constraints, inst.arity, inst.alphabet_size):
        raise ProfileError("profile was derived for a different instance shape")
    matrix = indicator_matrix(inst)
    consistency = build_consistency_block(inst, prof, matrix)
    support = build_support_block(prof)
    spread = build_spread_block(inst, prof)

    basis = []
    provenance = []
    for r, (t, tup) in enumerate(matrix.row_index):
        alive = any(consistency[r])
        satisfied = tup in inst.constraints[t].accepted_set
        assert alive == satisfied, "zero-row deletion must match the accept sets"
        if alive:
            basis.append(tuple(consistency[r] + support[r] + spread[r]))
            provenance.append((t, tup))
    inst_out = GapSvpInstance(
        csp=inst,
        profile=prof,
        basis=tuple(basis),
        row_provenance=tuple(provenance),
    )
    if basis:
        assert len(basis[0]) == prof.nprime
    return inst_out
