"""Small combinatorial building blocks with exact certification helpers.

Everything here is integer-exact: primality is deterministic Miller-Rabin,
determinants are integer determinants, disperser checks enumerate subsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from . import kernels
from .errors import BudgetExceededError

DEFAULT_SUBSET_BUDGET = 1 << 22

# Deterministic Miller-Rabin witness set, valid for all n below 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_VALID_BELOW = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Deterministic primality test for n below 3.3e24."""
    if n >= _MR_VALID_BELOW:
        raise ValueError("deterministic witness set only covers n < 3.3e24")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def smallest_prime_geq(n: int) -> int:
    """The least prime >= n."""
    cand = max(n, 2)
    while not is_prime(cand):
        cand += 1
    return cand


@dataclass(frozen=True)
class ReducedVandermonde:
    """The (a-1) x b matrix with row i (1-based) equal to (i**0, ..., i**(b-1)) mod a.

    For prime a and b < a, every b x b row-induced submatrix is nonsingular,
    so a nonzero integer vector orthogonal to all b columns must have more
    than b nonzero entries.
    """

    modulus: int
    width: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def num_rows(self) -> int:
        return len(self.rows)


def reduced_vandermonde(a: int, b: int) -> ReducedVandermonde:
    if not is_prime(a):
        raise ValueError(f"modulus {a} is not prime")
    if not (1 <= b < a):
        raise ValueError(f"width must satisfy 1 <= b < a, got b={b}, a={a}")
    rows = tuple(
        tuple(pow(i, j, a) for j in range(b)) for i in range(1, a)
    )
    return ReducedVandermonde(a, b, rows)


def first_singular_submatrix(vm: ReducedVandermonde) -> Optional[tuple[int, ...]]:
    """First width x width row combination with determinant zero, or None.

    None certifies the full-rank property of every row-induced submatrix.
    """
    return kernels.det_sweep(vm.rows, vm.width)


def kernel_support_check(vm: ReducedVandermonde, v: Sequence[int]) -> bool:
    """True unless v is a nonzero kernel vector with support <= width.

    This is the executable form of the submatrix rank property: such a
    vector cannot exist, so False pinpoints a counterexample.
    """
    if len(v) != vm.num_rows:
        raise ValueError("vector length must match the row count")
    support = [i for i, x in enumerate(v) if x]
    if not support:
        return True
    image = [0] * vm.width
    for i in support:
        vi = v[i]
        row = vm.rows[i]
        for j in range(vm.width):
            image[j] += vi * row[j]
    if any(image):
        return True
    return len(support) > vm.width


def search_kernel_support_counterexample(
    vm: ReducedVandermonde,
    max_support: int,
    entry_bound: int,
    budget: int = DEFAULT_SUBSET_BUDGET,
) -> Optional[tuple[int, ...]]:
    """Exhaustive search for a nonzero v with v*V == 0 and support <= max_support.

    Entries range over [-entry_bound, entry_bound].  Returns the first
    counterexample found or None; None is a certification over the whole box.
    """
    n = vm.num_rows
    nonzero_entries = [x for x in range(-entry_bound, entry_bound + 1) if x]
    work = sum(
        comb(n, k) * len(nonzero_entries) ** k for k in range(1, max_support + 1)
    )
    if work > budget:
        raise BudgetExceededError(f"{work} candidate vectors exceed budget {budget}")
    for k in range(1, max_support + 1):
        for support in itertools.combinations(range(n), k):
            rows = [vm.rows[i] for i in support]
            for values in itertools.product(nonzero_entries, repeat=k):
                if all(
                    sum(values[t] * rows[t][j] for t in range(k)) == 0
                    for j in range(vm.width)
                ):
                    v = [0] * n
                    for i, val in zip(support, values):
                        v[i] = val
                    return tuple(v)
    return None


@dataclass(frozen=True)
class HadamardMatrix:
    """Sylvester-type Hadamard matrix of order 2**k with entries +-1."""

    k: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return 1 << self.k


def hadamard(k: int) -> HadamardMatrix:
    """Order 2**k matrix from the recursion H_{i+1} = [[H_i, -H_i], [H_i, H_i]]."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    rows = [[1]]
    for _ in range(k):
        rows = [r + [-x for x in r] for r in rows] + [r + r for r in rows]
    return HadamardMatrix(k, tuple(tuple(r) for r in rows))


def hadamard_gram_ok(h: HadamardMatrix) -> bool:
    """Exact check that H * H^T equals order * identity."""
    n = h.order
    for i in range(n):
        for j in range(i, n):
            dot = sum(a * b for a, b in zip(h.rows[i], h.rows[j]))
            if dot != (n if i == j else 0):
                return False
    return True


def kronecker(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    """Kronecker product: entry ((i1, i2), (j1, j2)) = a[i1][j1] * b[i2][j2]."""
    ra, ca = len(a), len(a[0]) if a else 0
    rb, cb = len(b), len(b[0]) if b else 0
    out = [[0] * (ca * cb) for _ in range(ra * rb)]
    for i1 in range(ra):
        for j1 in range(ca):
            aij = a[i1][j1]
            if aij == 0:
                continue
            for i2 in range(rb):
                row = out[i1 * rb + i2]
                brow = b[i2]
                base = j1 * cb
                for j2 in range(cb):
                    row[base + j2] = aij * brow[j2]
    return out


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class BipartiteBiregular:
    """Bi-regular bipartite graph: A left vertices of degree w, B right of degree f.

    Adjacency lists are sorted tuples of distinct right vertices, so the
    handshake w*A == f*B holds and no constraint scope built from the graph
    repeats a variable copy.
    """

    left_size: int
    right_size: int
    left_degree: int
    right_degree: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        a, b, w, f = self.left_size, self.right_size, self.left_degree, self.right_degree
        if len(self.adjacency) != a:
            raise ValueError("adjacency must list every left vertex")
        if w * a != f * b:
            raise ValueError("handshake w*A == f*B fails")
        counts = [0] * b
        for i, nbrs in enumerate(self.adjacency):
            if len(nbrs) != w or len(set(nbrs)) != w:
                raise ValueError(f"left vertex {i} must have {w} distinct neighbors")
            if tuple(sorted(nbrs)) != tuple(nbrs):
                raise ValueError(f"left vertex {i} adjacency must be sorted")
            for r in nbrs:
                if not (0 <= r < b):
                    raise ValueError(f"right vertex {r} out of range")
                counts[r] += 1
        if any(cnt != f for cnt in counts):
            raise ValueError(f"right degrees {counts} are not uniformly {f}")


def verify_disperser(
    graph: BipartiteBiregular,
    delta: Fraction,
    beta: Fraction,
    budget: int = DEFAULT_SUBSET_BUDGET,
) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Certify: no right subset of size <= beta*B absorbs the full neighborhood
    of more than delta*A left vertices.

    The absorbed-count is monotone under subset inclusion, so only subsets of
    size exactly floor(beta*B) are enumerated.  Returns (True, None) on
    success or (False, violating_subset) on failure.
    """
    a, b = graph.left_size, graph.right_size
    m = int(beta * b)  # floor for nonnegative rationals
    if m <= 0:
        return True, None
    m = min(m, b)
    if comb(b, m) > budget:
        raise BudgetExceededError(f"{comb(b, m)} subsets exceed budget {budget}")
    neighbor_sets = [frozenset(nbrs) for nbrs in graph.adjacency]
    threshold = delta * a
    for subset in itertools.combinations(range(b), m):
        inside = frozenset(subset)
        covered = sum(1 for ns in neighbor_sets if ns <= inside)
        if covered > threshold:
            return False, subset
    return True, None
