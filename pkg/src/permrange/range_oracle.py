"""Brute-force ground truth for permanent value sets.

Matrices in Omega_{k,n} are encoded as integers: bit ``i*n + j`` set means
entry (i, j) is -1.  Witnesses are always the smallest code attaining a
value, so results do not depend on how the work is split.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations

from permrange.errors import BudgetExceeded
from permrange.gap import derive_counts, per_ab_values
from permrange.permanent import falling, permanent, per_rows
from permrange.sign_matrix import SignMatrix, concat_rows

NAIVE_BUDGET = 1 << 28
CANONICAL_BUDGET = 1 << 24
PARTITIONS = 16


@dataclass
class RangeReport:
    k: int
    n: int
    mode: str
    values: list[int]
    witnesses: dict[int, int]  # value -> smallest matrix code
    visited: int
    classes: int
    seconds: float = 0.0

    @property
    def r(self):
        return len(self.values)

    @property
    def min_positive(self):
        return next((v for v in self.values if v > 0), None)

    @property
    def two_adic_content(self):
        nonzero = [abs(v) for v in self.values if v]
        if not nonzero:
            return None
        return 1 << min((v & -v).bit_length() - 1 for v in nonzero)

    def witness(self, value) -> SignMatrix:
        return SignMatrix.from_code(self.k, self.n, self.witnesses[value])


def _row_table(n):
    return [tuple(-1 if m >> j & 1 else 1 for j in range(n)) for m in range(1 << n)]


def _naive_part(k, n, lo, hi):
    table = _row_table(n)
    mask = (1 << n) - 1
    best = {}
    for code in range(lo, hi):
        rows = [table[code >> (i * n) & mask] for i in range(k)]
        v = per_rows(rows, n)
        if v not in best:
            best[v] = code
    return best


def _columns_to_code(cols, k, n):
    code = 0
    for j, c in enumerate(cols):
        for i in range(k):
            if c >> i & 1:
                code |= 1 << (i * n + j)
    return code


def _canonical_part(k, n, first):
    """Column multisets whose smallest column type is ``first``, restricted
    to matrices where every row has at most n/2 minus entries."""
    table = _row_table(n)
    mask = (1 << n) - 1
    flip0 = mask  # negating row 0 flips its n bits
    best = {}
    classes = 0
    for rest in combinations_with_replacement(range(first, 1 << k), n - 1):
        cols = (first,) + rest
        if any(2 * sum(c >> i & 1 for c in cols) > n for i in range(k)):
            continue
        classes += 1
        code = _columns_to_code(cols, k, n)
        rows = [table[code >> (i * n) & mask] for i in range(k)]
        v = per_rows(rows, n)
        for val, c in ((v, code), (-v, code ^ flip0)):
            if val not in best or c < best[val]:
                best[val] = c
    return best, classes


def _merge(parts):
    best = {}
    for part in parts:
        for v, c in part.items():
            if v not in best or c < best[v]:
                best[v] = c
    return best


def _run(fn, argsets, workers):
    if workers > 1 and len(argsets) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, *zip(*argsets)))
    return [fn(*a) for a in argsets]


def enumerate_range(k, n, mode="canonical", budget=None, workers=1) -> RangeReport:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    t0 = time.perf_counter()
    if mode == "naive":
        total = 1 << (k * n)
        cap = NAIVE_BUDGET if budget is None else budget
        if total > cap:
            raise BudgetExceeded("naive range enumeration", total, cap)
        parts = min(PARTITIONS, total)
        bounds = [total * p // parts for p in range(parts + 1)]
        results = _run(_naive_part, [(k, n, bounds[p], bounds[p + 1]) for p in range(parts)], workers)
        best = _merge(results)
        visited = classes = total
    elif mode == "canonical":
        total = math.comb(n + (1 << k) - 1, n)
        cap = CANONICAL_BUDGET if budget is None else budget
        if total > cap:
            raise BudgetExceeded("canonical range enumeration", total, cap)
        results = _run(_canonical_part, [(k, n, f) for f in range(1 << k)], workers)
        best = _merge(r[0] for r in results)
        classes = sum(r[1] for r in results)
        visited = total
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return RangeReport(
        k, n, mode, sorted(best), dict(sorted(best.items())), visited, classes,
        time.perf_counter() - t0,
    )


@dataclass
class GammaCounts:
    k: int
    n: int
    exact: dict[int, int]  # |Gamma_I|, I as a row bitmask
    at_least: dict[int, int]  # |Gamma_{>=J}|, counted directly
    per: int
    product_formula: bool | None  # None when B is not a B-matrix
    mobius: bool
    per_by_exact: bool
    per_by_at_least: bool

    @property
    def holds(self):
        return self.mobius and self.per_by_exact and self.per_by_at_least and (
            self.product_formula is not False
        )


def _popcount(x):
    return bin(x).count("1")


def count_gamma(b: SignMatrix, budget=None) -> GammaCounts:
    """Classify injections by the set of rows landing on a -1 entry and check
    the inclusion-exclusion identities behind the closed form."""
    k, n = b.k, b.n
    cap = 10**7 if budget is None else budget
    if falling(n, k) > cap:
        raise BudgetExceeded("injection classification", falling(n, k), cap)
    rows = b.rows()
    exact = {m: 0 for m in range(1 << k)}
    for sigma in permutations(range(n), k):
        hit = 0
        for i, c in enumerate(sigma):
            if rows[i][c] < 0:
                hit |= 1 << i
        exact[hit] += 1
    at_least = {}
    for j in range(1 << k):
        allowed = [b.minus[i] if j >> i & 1 else range(n) for i in range(k)]
        at_least[j] = sum(
            1 for sigma in permutations(range(n), k)
            if all(c in allowed[i] for i, c in enumerate(sigma))
        )
    per = permanent(b)
    mobius = all(
        exact[i] == sum(
            (-1) ** _popcount(j ^ i) * at_least[j] for j in range(1 << k) if j & i == i
        )
        for i in range(1 << k)
    )
    per_exact = per == sum((-1) ** _popcount(i) * c for i, c in exact.items())
    per_at_least = per == sum((-2) ** _popcount(j) * c for j, c in at_least.items())
    product_ok = None
    if all(c <= 1 for c in b.column_minus_counts()):
        sizes = [len(m) for m in b.minus]
        product_ok = all(
            at_least[j] == math.prod(sizes[i] for i in range(k) if j >> i & 1)
            * falling(n - _popcount(j), k - _popcount(j))
            for j in range(1 << k)
        )
    return GammaCounts(k, n, exact, at_least, per, product_ok, mobius, per_exact, per_at_least)


def krauter_prediction(n):
    """2^{n - floor(log2 n) - 1} if n = 2^m - 1, else 2^{n - floor(log2 n)}."""
    lg = n.bit_length() - 1
    return 2 ** (n - lg - 1) if (n + 1) & n == 0 else 2 ** (n - lg)


@dataclass
class KrauterVerdict:
    n: int
    observed: int
    predicted: int
    witness: SignMatrix

    @property
    def matches(self):
        return self.observed == self.predicted


def min_positive_permanent(n, allow_long=False, workers=1) -> KrauterVerdict:
    if n < 1:
        raise ValueError("n must be positive")
    if n > 5 or (n == 5 and not allow_long):
        raise BudgetExceeded("minimum positive permanent order", n, 5 if allow_long else 4)
    rep = enumerate_range(n, n, "canonical", workers=workers)
    v = rep.min_positive
    return KrauterVerdict(n, v, krauter_prediction(n), rep.witness(v))


@dataclass
class SubsetVerdict:
    k: int
    n: int
    construction_values: list[int]
    range_size: int
    outside: list[int]

    @property
    def holds(self):
        return not self.outside

    @property
    def coverage(self):
        return Fraction(len(self.construction_values), self.range_size)


def construction_subset_check(k, n, mode="canonical", budget=None, workers=1) -> SubsetVerdict:
    """{per(a * B)} must lie inside the oracle range of Omega_{k+1,n}."""
    _, counts = derive_counts(k, n)
    values = per_ab_values(counts)
    full = set(enumerate_range(k + 1, n, mode, budget, workers).values)
    outside = [v for v in values if v not in full]
    return SubsetVerdict(k, n, values, len(full), outside)


@dataclass
class UpperTriangularReport:
    report: RangeReport
    full_values: list[int]

    @property
    def equal(self):
        return self.report.values == self.full_values

    @property
    def missing(self):
        have = set(self.report.values)
        return [v for v in self.full_values if v not in have]


def upper_triangular_range(n, workers=1) -> UpperTriangularReport:
    """Range over matrices whose -1 entries all sit on or above the diagonal."""
    if not 1 <= n <= 4:
        raise BudgetExceeded("upper-triangular order", n, 4)
    t0 = time.perf_counter()
    free = [(i, j) for i in range(n) for j in range(i, n)]
    best = {}
    for mask in range(1 << len(free)):
        code = 0
        for t, (i, j) in enumerate(free):
            if mask >> t & 1:
                code |= 1 << (i * n + j)
        a = SignMatrix.from_code(n, n, code)
        v = per_rows(a.rows(), n)
        if v not in best or code < best[v]:
            best[v] = code
    rep = RangeReport(
        n, n, "upper-triangular", sorted(best), dict(sorted(best.items())),
        1 << len(free), 1 << len(free), time.perf_counter() - t0,
    )
    full = enumerate_range(n, n, "canonical", workers=workers).values
    return UpperTriangularReport(rep, full)


@dataclass
class MonotonicityVerdict:
    k: int
    n: int
    r_k: int
    r_k1: int
    padding_failures: list[tuple[SignMatrix, int]] = field(default_factory=list)
    samples: int = 0

    @property
    def holds(self):
        return self.r_k <= self.r_k1 and not self.padding_failures


def padding_identity(a: SignMatrix, extra):
    """(per(A * J_{extra,n}), per(A) (n-k)_extra)."""
    lhs = permanent(concat_rows(a, SignMatrix.ones(extra, a.n))) if extra else permanent(a)
    return lhs, permanent(a) * falling(a.n - a.k, extra)


def monotonicity_check(k, n, samples=100, seed=0, mode="canonical", workers=1) -> MonotonicityVerdict:
    if k + 1 > n:
        raise ValueError(f"need k + 1 <= n, got k={k}, n={n}")
    r_k = enumerate_range(k, n, mode, workers=workers).r
    r_k1 = enumerate_range(k + 1, n, mode, workers=workers).r
    rng = random.Random(seed)
    failures = []
    for _ in range(samples):
        a = SignMatrix.from_code(k, n, rng.getrandbits(k * n))
        extra = rng.randint(1, n - k)
        lhs, rhs = padding_identity(a, extra)
        if lhs != rhs:
            failures.append((a, extra))
    return MonotonicityVerdict(k, n, r_k, r_k1, failures, samples)
