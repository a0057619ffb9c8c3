"""Exact permanents of +-1 matrices.

Three engines share one contract (exact Python integers, k <= n):

* injection sum -- the defining sum over all (n)_k injections; the oracle.
* bitmask DP -- row-by-row expansion over sets of used columns.
* Ryser -- inclusion-exclusion with Gray-code row-sum updates, square only.

The ``_*_rows`` functions take plain tuples of +-1 rows so that the
enumeration code can skip building ``SignMatrix`` objects.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations

from permrange.errors import BudgetExceeded
from permrange.sign_matrix import SignMatrix

ORACLE_BUDGET = 10**7
DP_MAX_COLS = 26
RYSER_MAX_N = 32


def falling(n, k):
    """(n)_k = n (n-1) ... (n-k+1); zero when 0 <= n < k."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def default_budget():
    env = os.environ.get("PERMRANGE_BUDGET")
    return int(env) if env else ORACLE_BUDGET


def _injection_rows(rows, n):
    total = 0
    for sigma in permutations(range(n), len(rows)):
        s = 1
        for row, c in zip(rows, sigma):
            s *= row[c]
        total += s
    return total


def _dp_rows(rows, n):
    layer = {0: 1}
    for row in rows:
        nxt = {}
        for mask, val in layer.items():
            for j in range(n):
                bit = 1 << j
                if not mask & bit:
                    nxt[mask | bit] = nxt.get(mask | bit, 0) + val * row[j]
        layer = nxt
    return sum(layer.values())


def _ryser_chunk(rows, lo, hi):
    """Sum of (-1)^|S| prod_i rowsum_i(S) over Gray codes g(lo) .. g(hi-1)."""
    n = len(rows)
    cols = list(zip(*rows))
    gray = lo ^ (lo >> 1)
    sums = [sum(r[j] for j in range(n) if gray >> j & 1) for r in rows]
    size = bin(gray).count("1")
    total = (-1) ** size * math.prod(sums)
    for g in range(lo + 1, hi):
        j = (g & -g).bit_length() - 1
        bit = 1 << j
        col = cols[j]
        if gray & bit:
            sums = [s - c for s, c in zip(sums, col)]
            size -= 1
        else:
            sums = [s + c for s, c in zip(sums, col)]
            size += 1
        gray ^= bit
        p = math.prod(sums)
        total += -p if size & 1 else p
    return total


def _ryser_rows(rows, workers=1):
    n = len(rows)
    end = 1 << n
    if workers <= 1 or n < 12:
        partial = _ryser_chunk(rows, 0, end)
    else:
        # fixed chunk count keeps the split independent of worker count
        bounds = [end * c // 64 for c in range(65)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                _ryser_chunk, [rows] * 64, bounds[:-1], bounds[1:]
            )
            partial = sum(parts)
    return -partial if n & 1 else partial


def permanent_injection_sum(a: SignMatrix, budget=None):
    budget = default_budget() if budget is None else budget
    count = falling(a.n, a.k)
    if count > budget:
        raise BudgetExceeded("injection-sum oracle", count, budget)
    return _injection_rows(a.rows(), a.n)


def permanent_bitmask_dp(a: SignMatrix):
    if a.n > DP_MAX_COLS:
        raise BudgetExceeded("bitmask DP column count", a.n, DP_MAX_COLS)
    return _dp_rows(a.rows(), a.n)


def permanent_ryser(a: SignMatrix, workers=1):
    if a.k != a.n:
        raise ValueError(f"Ryser engine needs a square matrix, got {a.k}x{a.n}")
    if a.n > RYSER_MAX_N:
        raise BudgetExceeded("Ryser order", a.n, RYSER_MAX_N)
    return _ryser_rows(a.rows(), workers)


def _work(k, n):
    """Rough operation counts of each engine, used for dispatch."""
    est = {"injection": falling(n, k) * k}
    if k == n and n <= RYSER_MAX_N:
        # square: Ryser's O(n) memory beats the DP's 2^n-entry table
        est["ryser"] = (1 << n) * n
    elif n <= DP_MAX_COLS:
        est["dp"] = sum(math.comb(n, i) * (n - i) for i in range(k))
    return est


def choose_engine(a: SignMatrix, budget=None):
    """Name of the cheapest engine for ``a``; raises when even that one is
    over ``budget`` operations."""
    budget = default_budget() if budget is None else budget
    est = _work(a.k, a.n)
    name = min(est, key=lambda e: (est[e], e))
    if est[name] > budget:
        raise BudgetExceeded(f"permanent of a {a.k}x{a.n} matrix", est[name], budget)
    return name


def permanent(a: SignMatrix, budget=None, workers=1):
    engine = choose_engine(a, budget)
    if engine == "injection":
        return _injection_rows(a.rows(), a.n)
    if engine == "dp":
        return _dp_rows(a.rows(), a.n)
    return _ryser_rows(a.rows(), workers)


def permanent_minor(a: SignMatrix, i, j, budget=None):
    """Permanent after deleting row ``i`` and column ``j`` (0-based)."""
    if a.k < 2:
        raise ValueError("minors need at least two rows")
    return permanent(a.delete(i, j), budget)


def laplace_expand(a: SignMatrix, i, budget=None):
    """Expansion of the permanent along row ``i`` (0-based)."""
    if a.k < 2:
        raise ValueError("Laplace expansion needs at least two rows")
    if not 0 <= i < a.k:
        raise IndexError(f"row {i} outside [0, {a.k})")
    return sum(a.entry(i, j) * permanent_minor(a, i, j, budget) for j in range(a.n))


def per_rows(rows, n):
    """Permanent of raw +-1 rows, picking the quickest engine for tiny sizes."""
    k = len(rows)
    if k == 1:
        return sum(rows[0])
    if falling(n, k) <= 24:
        return _injection_rows(rows, n)
    if k == n:
        return _ryser_rows(rows)
    return _dp_rows(rows, n)
