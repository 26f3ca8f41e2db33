"""Constraint satisfaction instances: model, text format, exact evaluation.

An instance is a list of constraints over variables 0..N-1 taking values in
the alphabet 0..SIGMA-1.  Each constraint names exactly q distinct variables
and carries the set of q-tuples it accepts.  Evaluation is exact (fractions,
never floats).

Text format (one directive per line, ``#`` starts a comment):

    csp N M q SIGMA     header, exactly once, first directive
    s NUM/DEN           optional soundness tag, rational in (0, 1], default 1
    con v1 ... vq       starts constraint (q distinct variable indices)
    acc a1 ... aq       adds an accepted tuple to the open constraint

Constraints appear in order; a ``con`` with no ``acc`` lines accepts nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import BudgetExceededError, CspParseError, CspValidationError

DEFAULT_ASSIGNMENT_BUDGET = 1 << 21
DEFAULT_MATRIX_CELL_BUDGET = 1 << 24


@dataclass(frozen=True)
class Constraint:
    """One constraint: an ordered scope plus the tuples it accepts."""

    variables: tuple[int, ...]
    accepted: tuple[tuple[int, ...], ...]
    accepted_set: frozenset[tuple[int, ...]] = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "accepted_set", frozenset(self.accepted))

    @property
    def arity(self) -> int:
        return len(self.variables)

    def satisfied_by(self, values: Sequence[int]) -> bool:
        """True iff the full assignment ``values`` satisfies this constraint."""
        return tuple(values[x] for x in self.variables) in self.accepted_set


@dataclass(frozen=True)
class CspInstance:
    """An arity-q CSP over N variables and an alphabet of size SIGMA.

    ``soundness`` is metadata: the claimed bound on the satisfiable fraction
    of an unsatisfiable instance.  It feeds parameter defaults downstream and
    is never used in a verdict about this instance itself.
    """

    num_vars: int
    alphabet_size: int
    arity: int
    constraints: tuple[Constraint, ...]
    soundness: Fraction = Fraction(1)

    def __post_init__(self):
        n, sigma, q = self.num_vars, self.alphabet_size, self.arity
        if n < 1:
            raise CspValidationError("need at least one variable")
        if sigma < 1:
            raise CspValidationError("alphabet must be nonempty")
        if q < 1:
            raise CspValidationError("arity must be at least 1")
        if not (0 < self.soundness <= 1):
            raise CspValidationError("soundness tag must lie in (0, 1]")
        for idx, con in enumerate(self.constraints):
            if con.arity != q:
                raise CspValidationError(f"constraint {idx} has arity {con.arity}, expected {q}")
            if len(set(con.variables)) != q:
                raise CspValidationError(f"constraint {idx} repeats a variable")
            for x in con.variables:
                if not (0 <= x < n):
                    raise CspValidationError(f"constraint {idx} uses variable {x} out of range")
            for tup in con.accepted:
                if len(tup) != q:
                    raise CspValidationError(f"constraint {idx} has an accepted tuple of wrong arity")
                for a in tup:
                    if not (0 <= a < sigma):
                        raise CspValidationError(f"constraint {idx} accepts symbol {a} out of range")

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def degrees(self) -> tuple[int, ...]:
        """Occurrence count of every variable across all constraint scopes."""
        counts = [0] * self.num_vars
        for con in self.constraints:
            for x in con.variables:
                counts[x] += 1
        return tuple(counts)

    @property
    def degree(self) -> Optional[int]:
        """The common variable degree, or None when the instance is irregular."""
        degs = set(self.degrees())
        if len(degs) == 1:
            return degs.pop()
        return None

    @property
    def randomness_bits(self) -> Optional[int]:
        """log2 of the constraint count, exact powers of two only."""
        m = self.num_constraints
        if m >= 1 and m & (m - 1) == 0:
            return m.bit_length() - 1
        return None


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    degree: Optional[int]
    degrees: tuple[int, ...]
    handshake_holds: Optional[bool]  # N*d == M*q, defined only when regular


def validate_regular(inst: CspInstance) -> RegularityReport:
    """Check that every variable occurs in the same number of constraints."""
    degs = inst.degrees()
    regular = len(set(degs)) == 1
    d = degs[0] if regular else None
    handshake = None
    if regular:
        handshake = inst.num_vars * d == inst.num_constraints * inst.arity
    return RegularityReport(regular, d, degs, handshake)


def evaluate(inst: CspInstance, assignment: Sequence[int]) -> Fraction:
    """Exact fraction of constraints satisfied by a full assignment."""
    if len(assignment) != inst.num_vars:
        raise CspValidationError(
            f"assignment length {len(assignment)} != variable count {inst.num_vars}"
        )
    for a in assignment:
        if not (0 <= a < inst.alphabet_size):
            raise CspValidationError(f"assignment value {a} out of range")
    if inst.num_constraints == 0:
        return Fraction(1)
    hits = sum(1 for con in inst.constraints if con.satisfied_by(assignment))
    return Fraction(hits, inst.num_constraints)


def max_sat_bruteforce(
    inst: CspInstance, budget: int = DEFAULT_ASSIGNMENT_BUDGET
) -> tuple[Fraction, tuple[int, ...]]:
    """Exhaustive maximum satisfiable fraction and its first witness.

    Enumerates all SIGMA**N assignments in lexicographic order, so the
    returned witness is the lexicographically smallest optimum.  Raises
    BudgetExceededError before starting if the space is too large.
    """
    total = inst.alphabet_size ** inst.num_vars
    if total > budget:
        raise BudgetExceededError(
            f"{total} assignments exceed the budget of {budget}"
        )
    best = Fraction(-1)
    best_assignment = None
    for values in itertools.product(range(inst.alphabet_size), repeat=inst.num_vars):
        frac = evaluate(inst, values)
        if frac > best:
            best = frac
            best_assignment = values
            if best == 1:
                break
    return best, best_assignment


@dataclass(frozen=True)
class IndicatorMatrix:
    """0/1 matrix pairing candidate (constraint, tuple) rows with (variable, symbol) columns.

    Row order: constraints in instance order, and for each constraint all
    SIGMA**q candidate tuples in lexicographic order (accepted or not).
    Column order: variables ascending, symbols ascending within a variable.
    Entry 1 means: the row's tuple satisfies the row's constraint, the
    column's variable is in the constraint's scope, and the tuple assigns the
    column's symbol to it.  Nonzero rows therefore have exactly q ones.
    """

    entries: tuple[tuple[int, ...], ...]
    row_index: tuple[tuple[int, tuple[int, ...]], ...]  # (constraint, candidate tuple)
    col_index: tuple[tuple[int, int], ...]  # (variable, symbol)

    @property
    def num_rows(self) -> int:
        return len(self.entries)

    @property
    def num_cols(self) -> int:
        return len(self.col_index)


def candidate_rows(inst: CspInstance) -> Iterable[tuple[int, tuple[int, ...]]]:
    """All (constraint index, candidate tuple) pairs in canonical row order."""
    for t in range(inst.num_constraints):
        for tup in itertools.product(range(inst.alphabet_size), repeat=inst.arity):
            yield t, tup


def indicator_matrix(
    inst: CspInstance, cell_budget: int = DEFAULT_MATRIX_CELL_BUDGET
) -> IndicatorMatrix:
    """Build the dense indicator matrix for ``inst``."""
    sigma, q = inst.alphabet_size, inst.arity
    num_rows = inst.num_constraints * sigma**q
    num_cols = inst.num_vars * sigma
    if num_rows * num_cols > cell_budget:
        raise BudgetExceededError(
            f"indicator matrix with {num_rows * num_cols} cells exceeds budget {cell_budget}"
        )
    rows = []
    row_index = []
    for t, tup in candidate_rows(inst):
        con = inst.constraints[t]
        row = [0] * num_cols
        if tup in con.accepted_set:
            for x, a in zip(con.variables, tup):
                row[x * sigma + a] = 1
        rows.append(tuple(row))
        row_index.append((t, tup))
    col_index = [(x, a) for x in range(inst.num_vars) for a in range(sigma)]
    return IndicatorMatrix(tuple(rows), tuple(row_index), tuple(col_index))


def parse_csp(text: str) -> CspInstance:
    """Parse the line-oriented CSP format.  Errors carry 1-based line numbers."""
    header = None
    soundness = None
    scopes: list[tuple[int, ...]] = []
    accepts: list[list[tuple[int, ...]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        if kind == "csp":
            if header is not None:
                raise CspParseError("duplicate header", lineno)
            if len(args) != 4:
                raise CspParseError("header needs exactly N M q SIGMA", lineno)
            header = tuple(_int_token(a, lineno) for a in args)
        elif kind == "s":
            if header is None:
                raise CspParseError("soundness tag before header", lineno)
            if soundness is not None:
                raise CspParseError("duplicate soundness tag", lineno)
            if len(args) != 1:
                raise CspParseError("soundness tag needs one NUM/DEN token", lineno)
            try:
                soundness = Fraction(args[0])
            except (ValueError, ZeroDivisionError):
                raise CspParseError(f"bad rational {args[0]!r}", lineno) from None
            if not (0 < soundness <= 1):
                raise CspParseError("soundness must lie in (0, 1]", lineno)
        elif kind == "con":
            if header is None:
                raise CspParseError("constraint before header", lineno)
            n, _m, q, _sigma = header
            if len(args) != q:
                raise CspParseError(f"expected {q} variables, got {len(args)}", lineno)
            scope = tuple(_int_token(a, lineno) for a in args)
            for x in scope:
                if not (0 <= x < n):
                    raise CspParseError(f"variable {x} out of range [0, {n})", lineno)
            if len(set(scope)) != q:
                raise CspParseError("repeated variable in scope", lineno)
            scopes.append(scope)
            accepts.append([])
        elif kind == "acc":
            if not scopes:
                raise CspParseError("accepted tuple before any constraint", lineno)
            _n, _m, q, sigma = header
            if len(args) != q:
                raise CspParseError(f"expected {q} symbols, got {len(args)}", lineno)
            tup = tuple(_int_token(a, lineno) for a in args)
            for a in tup:
                if not (0 <= a < sigma):
                    raise CspParseError(f"symbol {a} out of range [0, {sigma})", lineno)
            if tup in accepts[-1]:
                raise CspParseError(f"duplicate accepted tuple {tup}", lineno)
            accepts[-1].append(tup)
        else:
            raise CspParseError(f"unknown directive {kind!r}", lineno)

    if header is None:
        raise CspParseError("missing header")
    n, m, q, sigma = header
    if len(scopes) != m:
        raise CspParseError(f"header promises {m} constraints, found {len(scopes)}")
    constraints = tuple(
        Constraint(scope, tuple(acc)) for scope, acc in zip(scopes, accepts)
    )
    try:
        return CspInstance(n, sigma, q, constraints, soundness or Fraction(1))
    except CspValidationError as exc:
        raise CspParseError(str(exc)) from exc


def emit_csp(inst: CspInstance) -> str:
    """Serialize an instance; parse(emit(inst)) reproduces it exactly."""
    lines = [
        f"csp {inst.num_vars} {inst.num_constraints} {inst.arity} {inst.alphabet_size}"
    ]
    if inst.soundness != 1:
        lines.append(f"s {inst.soundness.numerator}/{inst.soundness.denominator}")
    for con in inst.constraints:
        lines.append("con " + " ".join(str(x) for x in con.variables))
        for tup in con.accepted:
            lines.append("acc " + " ".join(str(a) for a in tup))
    return "\n".join(lines) + "\n"


def _int_token(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CspParseError(f"expected integer, got {token!r}", lineno) from None
