"""Degree regularization by constraint duplication and variable splitting.

Pipeline: duplicate every constraint a fixed number of times, then replace
each variable with a set of copies wired through a certified bi-regular
disperser graph.  Every constraint reads ``spread`` copies of each original
variable in its scope and accepts only tuples that are constant on those
copies and satisfy the original test.  The output has uniform variable
degree equal to the dispersers' right degree.

A (delta, beta)-disperser here is a bipartite graph where no right-side
subset of at most beta*B vertices absorbs the complete neighborhood of more
than delta*A left vertices; graphs are only ever accepted after the
exhaustive subset check in gadgets.verify_disperser.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .csp import Constraint, CspInstance
from .errors import BudgetExceededError, DisperserCertificationError, RegularizeError
from .gadgets import BipartiteBiregular, verify_disperser

log = logging.getLogger(__name__)

DEFAULT_LEAF_BUDGET = 20_000
DEFAULT_SUBSET_BUDGET = 1 << 22

STRATEGIES = ("exhaustive-search", "greedy-verified", "supplied-graph")


@dataclass(frozen=True)
class RegularizeParams:
    """Parameters for regularize().

    duplication: copies made of every constraint (default ceil(1/s)).
    spread: copies of each scope variable every constraint reads (left degree w).
    beta: disperser parameter; certification uses delta = 3 * beta**spread.
    arity_exponent: the c in the precondition s <= min(1/(3q), 1/SIGMA**c).
    right_degree: common output degree f; per-variable copy counts follow as
        spread * degree(x) / f.  None picks a default.
    strategy: exhaustive-search | greedy-verified | supplied-graph.
    supplied: per-original-variable graphs, only for supplied-graph.
    """

    duplication: int
    spread: int
    beta: Fraction
    arity_exponent: Fraction = Fraction(1)
    strategy: str = "exhaustive-search"
    right_degree: Optional[int] = None
    supplied: Optional[tuple[BipartiteBiregular, ...]] = None
    leaf_budget: int = DEFAULT_LEAF_BUDGET
    subset_budget: int = DEFAULT_SUBSET_BUDGET

    def __post_init__(self):
        if self.duplication < 1:
            raise RegularizeError("duplication must be at least 1")
        if self.spread < 1:
            raise RegularizeError("spread must be at least 1")
        if not (0 < self.beta < 1):
            raise RegularizeError("beta must lie strictly between 0 and 1")
        if self.strategy not in STRATEGIES:
            raise RegularizeError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "supplied-graph" and self.supplied is None:
            raise RegularizeError("supplied-graph strategy needs supplied graphs")

    @classmethod
    def defaults(cls, inst: CspInstance, **overrides) -> "RegularizeParams":
        """Instance-derived defaults, individually overridable by keyword."""
        s = inst.soundness
        q = inst.arity
        c = overrides.pop("arity_exponent", Fraction(1))
        t = overrides.pop("duplication", math.ceil(1 / s))
        w = overrides.pop("spread", math.ceil(Fraction(6 * q) / c))
        beta = overrides.pop("beta", None)
        if beta is None:
            beta = _default_beta(s, q)
        return cls(duplication=t, spread=w, beta=beta, arity_exponent=c, **overrides)


def _default_beta(s: Fraction, q: int) -> Fraction:
    """Rational floor approximation of s**(1/(2q)) at resolution 1/64."""
    if s == 1:
        return Fraction(1, 2)
    k = 64
    scaled = (s.numerator * k ** (2 * q)) // s.denominator
    root = _iroot(scaled, 2 * q)
    return Fraction(max(root, 1), k)


def _iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n == 0:
        return 0
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x


@dataclass(frozen=True)
class RegularizedCsp:
    """Regularization output with full lineage back to the source instance."""

    instance: CspInstance
    source: CspInstance
    var_lineage: tuple[tuple[int, int], ...]  # new variable -> (original, copy)
    con_lineage: tuple[tuple[int, int], ...]  # new constraint -> (original, duplicate)
    dispersers: tuple[BipartiteBiregular, ...]  # one per original variable
    params: RegularizeParams
    right_degree: int

    def lift_assignment(self, values: Sequence[int]) -> tuple[int, ...]:
        """Copy each original value onto all copies of its variable."""
        if len(values) != self.source.num_vars:
            raise RegularizeError("assignment length must match the source instance")
        return tuple(values[orig] for orig, _copy in self.var_lineage)

    def project_assignment(self, values: Sequence[int]) -> tuple[int, ...]:
        """Read copy 0 of every original variable."""
        if len(values) != self.instance.num_vars:
            raise RegularizeError("assignment length must match the output instance")
        out = [0] * self.source.num_vars
        for new_idx, (orig, copy) in enumerate(self.var_lineage):
            if copy == 0:
                out[orig] = values[new_idx]
        return tuple(out)


def duplicate_constraints(
    inst: CspInstance, t: int
) -> tuple[CspInstance, tuple[tuple[int, int], ...]]:
    """Repeat each constraint t times (duplicates adjacent, order preserved)."""
    if t < 1:
        raise RegularizeError("duplication must be at least 1")
    cons = []
    lineage = []
    for idx, con in enumerate(inst.constraints):
        for dup in range(t):
            cons.append(con)
            lineage.append((idx, dup))
    out = CspInstance(
        inst.num_vars, inst.alphabet_size, inst.arity, tuple(cons), inst.soundness
    )
    return out, tuple(lineage)


def build_disperser(
    left_size: int,
    spread: int,
    beta: Fraction,
    strategy: str = "exhaustive-search",
    right_size: Optional[int] = None,
    supplied: Optional[BipartiteBiregular] = None,
    leaf_budget: int = DEFAULT_LEAF_BUDGET,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
) -> BipartiteBiregular:
    """Produce a bi-regular graph certified as a (3*beta**spread, beta)-disperser.

    Never returns an uncertified graph: every candidate passes through
    gadgets.verify_disperser and failure raises with the violating subset.
    """
    a, w = left_size, spread
    if a < 1 or w < 1:
        raise RegularizeError("need at least one left vertex and spread >= 1")
    delta = 3 * beta**w
    if right_size is None:
        b = _default_right_size(a, w, beta)
    else:
        b = right_size
    if b < w or (w * a) % b != 0:
        raise RegularizeError(
            f"right size {b} must divide spread*left = {w * a} and be >= spread {w}"
        )
    f = w * a // b

    if strategy == "supplied-graph":
        if supplied is None:
            raise RegularizeError("supplied-graph strategy needs a graph")
        if (supplied.left_size, supplied.right_size, supplied.left_degree) != (a, b, w):
            raise RegularizeError("supplied graph has the wrong shape")
        ok, cert = verify_disperser(supplied, delta, beta, subset_budget)
        if not ok:
            raise DisperserCertificationError(
                f"supplied graph fails ({delta}, {beta}) dispersion at subset {cert}",
                certificate=cert,
            )
        return supplied

    if strategy == "greedy-verified":
        last_cert = None
        for candidate in _canonical_candidates(a, b, w, f):
            ok, cert = verify_disperser(candidate, delta, beta, subset_budget)
            if ok:
                return candidate
            last_cert = cert
        raise DisperserCertificationError(
            f"no canonical candidate certifies ({delta}, {beta}) dispersion",
            certificate=last_cert,
        )

    if strategy == "exhaustive-search":
        got = _search_certified(a, b, w, f, delta, beta, leaf_budget, subset_budget)
        if got is None:
            raise DisperserCertificationError(
                f"no bi-regular graph on ({a}, {b}) certifies ({delta}, {beta}) dispersion"
            )
        return got

    raise RegularizeError(f"unknown strategy {strategy!r}")


def _default_right_size(a: int, w: int, beta: Fraction) -> int:
    """Copy count target: matchings for spread 1, else spread*A / f_default
    with f_default = w * ceil(1/beta)**w, rounded to the nearest admissible
    divisor of spread*A (at least spread; ties take the smaller size)."""
    if w == 1:
        return a
    f_default = w * math.ceil(1 / beta) ** w
    target = Fraction(w * a, f_default)
    divisors = [d for d in range(w, w * a + 1) if (w * a) % d == 0]
    return min(divisors, key=lambda d: (abs(d - target), d))


def _canonical_candidates(a, b, w, f):
    """Deterministic candidate stream for greedy-verified: a cyclic-shift
    graph when it is bi-regular, then the staircase graph."""
    if w <= b:
        shift = [tuple(sorted((i + j) % b for j in range(w))) for i in range(a)]
        counts = [0] * b
        for nbrs in shift:
            for r in nbrs:
                counts[r] += 1
        if all(cnt == f for cnt in counts):
            yield BipartiteBiregular(a, b, w, f, tuple(shift))
    stair = []
    ok = True
    for i in range(a):
        nbrs = tuple(sorted((i * w + j) % b for j in range(w)))
        if len(set(nbrs)) != w:
            ok = False
            break
        stair.append(nbrs)
    if ok:
        counts = [0] * b
        for nbrs in stair:
            for r in nbrs:
                counts[r] += 1
        if all(cnt == f for cnt in counts):
            candidate = BipartiteBiregular(a, b, w, f, tuple(stair))
            yield candidate


def _search_certified(a, b, w, f, delta, beta, leaf_budget, subset_budget):
    """Backtracking over left adjacency choices in lex order; first graph to
    pass certification wins, so the result is deterministic."""
    choices = list(itertools.combinations(range(b), w))
    caps = [f] * b
    adj: list[tuple[int, ...]] = []
    leaves = 0

    def backtrack(i):
        nonlocal leaves
        if i == a:
            leaves += 1
            if leaves > leaf_budget:
                raise BudgetExceededError(
                    f"disperser search exceeded {leaf_budget} candidate graphs"
                )
            graph = BipartiteBiregular(a, b, w, f, tuple(adj))
            ok, _cert = verify_disperser(graph, delta, beta, subset_budget)
            return graph if ok else None
        open_rights = sum(1 for r in range(b) if caps[r] > 0)
        if open_rights < w:
            return None
        for subset in choices:
            if all(caps[r] > 0 for r in subset):
                for r in subset:
                    caps[r] -= 1
                adj.append(subset)
                got = backtrack(i + 1)
                if got is not None:
                    return got
                adj.pop()
                for r in subset:
                    caps[r] += 1
        return None

    return backtrack(0)


def regularize(inst: CspInstance, params: RegularizeParams) -> RegularizedCsp:
    """Full regularization; the output passes validate_regular exactly."""
    q = inst.arity
    sigma = inst.alphabet_size
    _warn_on_weak_soundness(inst.soundness, q, sigma, params.arity_exponent)

    dup, con_lineage = duplicate_constraints(inst, params.duplication)
    degrees = dup.degrees()
    if min(degrees) == 0:
        bad = degrees.index(0)
        raise RegularizeError(f"variable {bad} occurs in no constraint")

    w = params.spread
    fprime = params.right_degree
    if fprime is None:
        fprime = _default_right_degree(degrees, w, params.beta)
    for x, d in enumerate(degrees):
        if (w * d) % fprime != 0:
            raise RegularizeError(
                f"right degree {fprime} does not divide spread*degree {w * d} of variable {x}"
            )
        if (w * d) // fprime < w:
            raise RegularizeError(
                f"right degree {fprime} exceeds degree {d} of variable {x}"
            )

    dispersers = []
    for x, d in enumerate(degrees):
        b_x = (w * d) // fprime
        supplied = params.supplied[x] if params.supplied is not None else None
        graph = build_disperser(
            d,
            w,
            params.beta,
            strategy=params.strategy,
            right_size=b_x,
            supplied=supplied,
            leaf_budget=params.leaf_budget,
            subset_budget=params.subset_budget,
        )
        dispersers.append(graph)

    offsets = []
    total = 0
    for x in range(dup.num_vars):
        offsets.append(total)
        total += dispersers[x].right_size
    var_lineage = tuple(
        (x, copy)
        for x in range(dup.num_vars)
        for copy in range(dispersers[x].right_size)
    )

    # occurrence rank of each (constraint, variable) pair, in constraint order
    seen = [0] * dup.num_vars
    new_constraints = []
    for con in dup.constraints:
        scope = []
        for x in con.variables:
            nbrs = dispersers[x].adjacency[seen[x]]
            seen[x] += 1
            scope.extend(offsets[x] + r for r in nbrs)
        accepted = tuple(
            tuple(a for a in tup for _ in range(w)) for tup in con.accepted
        )
        new_constraints.append(Constraint(tuple(scope), accepted))
    for x, d in enumerate(degrees):
        assert seen[x] == d

    out = CspInstance(
        total, sigma, q * w, tuple(new_constraints), inst.soundness
    )
    out_degrees = set(out.degrees())
    assert out_degrees == {fprime}, f"output degrees {out_degrees} != {fprime}"
    return RegularizedCsp(
        instance=out,
        source=inst,
        var_lineage=var_lineage,
        con_lineage=con_lineage,
        dispersers=tuple(dispersers),
        params=replace(params, right_degree=fprime),
        right_degree=fprime,
    )


def _default_right_degree(degrees, w, beta) -> int:
    """Largest divisor of spread*gcd(degrees) bounded by the default target
    degree and by min(degrees); spread 1 always uses matchings (degree 1)."""
    if w == 1:
        return 1
    g = w * math.gcd(*degrees)
    f_default = w * math.ceil(1 / beta) ** w
    cap = min(f_default, min(degrees))
    best = 1
    for d in range(1, g + 1):
        if g % d == 0 and d <= cap:
            best = d
    return best


def _warn_on_weak_soundness(s: Fraction, q: int, sigma: int, c: Fraction) -> None:
    """The construction's guarantees assume s <= min(1/(3q), 1/SIGMA**c)."""
    weak = s > Fraction(1, 3 * q)
    # s <= sigma**(-c)  <=>  s**cd * sigma**cn <= 1  for c = cn/cd > 0
    if not weak and c > 0:
        cn, cd = c.numerator, c.denominator
        weak = s**cd * sigma**cn > 1
    if weak:
        log.warning(
            "soundness tag %s is above min(1/(3q), 1/SIGMA**c); "
            "regularization still runs but its guarantees assume smaller s",
            s,
        )


def lineage_json(reg: RegularizedCsp) -> dict:
    """JSON-ready lineage and parameter record."""
    return {
        "format": "regularize-lineage",
        "version": 1,
        "duplication": reg.params.duplication,
        "spread": reg.params.spread,
        "beta": [reg.params.beta.numerator, reg.params.beta.denominator],
        "strategy": reg.params.strategy,
        "right_degree": reg.right_degree,
        "variables": [list(pair) for pair in reg.var_lineage],
        "constraints": [list(pair) for pair in reg.con_lineage],
        "dispersers": [
            {
                "left_size": g.left_size,
                "right_size": g.right_size,
                "left_degree": g.left_degree,
                "right_degree": g.right_degree,
                "adjacency": [list(nbrs) for nbrs in g.adjacency],
            }
            for g in reg.dispersers
        ],
    }
