"""The value set of per(a * B) as a generalized arithmetic progression.

For fixed k the construction picks weights mu_i = i / C(k+1, 2), splits
n - n0 columns (n0 = n mod d_k) into blocks of size n_i = mu_i (n - n0),
and looks at the first-row Laplace expansion of a * B.  The values
sum_i p_i x_i (0 <= x_i <= n_i) form a GAP whose restriction to a small
box over an independent index set I is proper.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from permrange.errors import BudgetExceeded, IdentityFailure
from permrange.permanent import default_budget, permanent
from permrange.sign_matrix import CountsVector, SignMatrix, concat_rows, sign_row
from permrange.symbolic import p_bar_polys, per_b_closed_form, verify_main_lemma


def choose_mu(k):
    if k < 1:
        raise ValueError("k must be at least 1")
    total = math.comb(k + 1, 2)
    return tuple(Fraction(i, total) for i in range(1, k + 1))


def mu_lcm(mu):
    return math.lcm(*(m.denominator for m in mu))


def derive_counts(k, n, mu=None):
    """(n0, counts) with n0 = n mod d_k and n_i = mu_i (n - n0)."""
    mu = choose_mu(k) if mu is None else tuple(Fraction(m) for m in mu)
    d = mu_lcm(mu)
    if n < d:
        raise ValueError(f"n too small: need n >= d_k = {d}, got n={n}")
    n0 = n % d
    counts = tuple(int(m * (n - n0)) for m in mu)
    return n0, CountsVector(counts, n)


def minor_basis(counts: CountsVector):
    """p_i = per(B with the ith count decremented) on n-1 columns."""
    if any(c < 1 for c in counts.entries):
        raise ValueError("every count must be at least 1")
    out = []
    for i in range(counts.k):
        dec = list(counts.entries)
        dec[i] -= 1
        out.append(per_b_closed_form(CountsVector(dec, counts.n - 1)))
    return out


def all_plus_minor(counts: CountsVector):
    """Minor at one of the n0 all-plus columns (needs n0 >= 1)."""
    if counts.n0 < 1:
        raise ValueError("no all-plus column to delete")
    return per_b_closed_form(CountsVector(counts.entries, counts.n - 1))


@dataclass(frozen=True)
class GapDescriptor:
    """{offset + sum_i l_i basis_i : 0 <= l_i < limits_i}."""

    offset: int
    basis: tuple[int, ...]
    limits: tuple[int, ...]

    @property
    def size(self):
        return math.prod(self.limits)

    def values(self, budget=None):
        return gamma_values(self.basis, [L - 1 for L in self.limits], budget, self.offset)

    def is_proper(self, budget=None):
        return len(self.values(budget)) == self.size


def gamma_values(basis: Sequence[int], counts: Sequence[int], budget=None, offset=0):
    """Sorted distinct values of offset + sum basis_i x_i, 0 <= x_i <= counts_i."""
    if len(basis) != len(counts):
        raise ValueError("basis and counts must have the same length")
    budget = default_budget() if budget is None else budget
    size = math.prod(c + 1 for c in counts)
    if size > budget:
        raise BudgetExceeded("GAP box", size, budget)
    vals = {offset}
    for p, c in zip(basis, counts):
        vals = {v + p * x for v in vals for x in range(c + 1)}
    return sorted(vals)


def construction_gap(counts: CountsVector) -> GapDescriptor:
    """The full first-row Laplace GAP of epsilon * B over all epsilon in {0,1}^n.

    When n0 > 0 the all-plus columns contribute an extra generator."""
    basis = tuple(minor_basis(counts))
    limits = tuple(c + 1 for c in counts.entries)
    if counts.n0:
        basis = (all_plus_minor(counts),) + basis
        limits = (counts.n0 + 1,) + limits
    return GapDescriptor(0, basis, limits)


def per_ab_values(counts: CountsVector, budget=None):
    """{per(a * B) : a in {+-1}^n}, through the affine map from the 0/1 GAP."""
    top = per_b_closed_form(CountsVector((0,) + counts.entries, counts.n))
    return sorted(top - 2 * v for v in construction_gap(counts).values(budget))


@dataclass
class TransformVerdict:
    lhs: int
    rhs: Fraction
    holds: bool


def affine_transform_check(a: Sequence[int], b: SignMatrix, budget=None) -> TransformVerdict:
    """per(eps_a * B) == (per(j_n * B) - per(a * B)) / 2 with eps_a = (j_n - a)/2.

    The 0/1 row is expanded by linearity: per(eps * B) = sum_j eps_j per(B - col j).
    """
    a = list(a)
    if len(a) != b.n:
        raise ValueError(f"row has length {len(a)}, matrix has {b.n} columns")
    eps = [(1 - v) // 2 for v in a]
    lhs = sum(permanent(b.drop_column(j), budget) for j in range(b.n) if eps[j])
    top = permanent(concat_rows(SignMatrix.ones(1, b.n), b), budget)
    mid = permanent(concat_rows(sign_row(a), b), budget)
    rhs = Fraction(top - mid, 2)
    return TransformVerdict(lhs, rhs, lhs == rhs)


@dataclass(frozen=True)
class MkResult:
    value: int
    bound: int
    argmax_n0: int
    per_n0: tuple[int, ...]


def compute_Mk(k, mu=None) -> MkResult:
    """Max over n0 of the total |coefficient| of d_k^k * p_bar_1..p_bar_k."""
    mu = choose_mu(k) if mu is None else tuple(Fraction(m) for m in mu)
    d = mu_lcm(mu)
    scale = d**k
    sums = []
    for n0 in range(d):
        total = sum(abs(c * scale) for p in p_bar_polys(k, mu, n0) for c in p.coeffs)
        if Fraction(total).denominator != 1:
            raise IdentityFailure(f"d_k^k does not clear denominators at n0={n0}")
        sums.append(int(total))
    best = max(range(d), key=lambda t: (sums[t], -t))
    return MkResult(sums[best], (16 * k**5) ** k, best, tuple(sums))


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    mu: tuple[Fraction, ...]
    d: int
    N: int
    Mk: int
    Mk_bound: int
    delta: Fraction
    eps: Fraction

    @property
    def delta_floor(self):
        """1 / (4 (16 k^5)^k)."""
        return Fraction(1, 4 * self.Mk_bound)

    def for_n(self, n):
        return derive_counts(self.k, n, self.mu)

    def min_n_for_unit_side(self):
        """Least n >= d_k with floor(delta_k n) >= 1."""
        return max(self.d, math.ceil(1 / self.delta))


@lru_cache(maxsize=None)
def constants(k) -> ConstructionParams:
    mu = choose_mu(k)
    d = mu_lcm(mu)
    mk = compute_Mk(k, mu)
    if mk.value > mk.bound:
        raise IdentityFailure(f"M_{k} = {mk.value} exceeds (16k^5)^k = {mk.bound}")
    delta = min([Fraction(1, 4 * mk.value)] + list(mu))
    params = ConstructionParams(
        k=k, mu=mu, d=d, N=d**k, Mk=mk.value, Mk_bound=mk.bound,
        delta=delta, eps=delta ** (k - 2),
    )
    if params.delta < params.delta_floor:
        raise IdentityFailure(f"delta_{k} below 1/(4(16k^5)^k)")
    return params


def _box_slice(basis, side, lead):
    """Value -> first point, and the first internal collision, for points
    whose leading coordinate equals ``lead``."""
    seen = {}
    collision = None
    for rest in product(range(side + 1), repeat=len(basis) - 1):
        x = (lead,) + rest
        v = sum(p * c for p, c in zip(basis, x))
        if v in seen:
            if collision is None:
                collision = (seen[v], x)
        else:
            seen[v] = x
    return seen, collision


def enumerate_box(basis: Sequence[int], side, workers=1):
    """Distinct values of sum basis_i x_i over [0..side]^d.

    Returns (count, collision) where collision is the lexicographically
    first pair of points with equal value, or None.  The result does not
    depend on ``workers``.
    """
    basis = list(basis)
    if not basis:
        return 1, None
    leads = range(side + 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_box_slice, [basis] * (side + 1), [side] * (side + 1), leads))
    else:
        parts = [_box_slice(basis, side, t) for t in leads]
    merged = {}
    candidates = []
    for seen, collision in parts:
        if collision is not None:
            candidates.append((collision[1], collision[0]))
        for v, x in seen.items():
            if v in merged:
                candidates.append((x, merged[v]))
            else:
                merged[v] = x
    first = min(candidates) if candidates else None
    return len(merged), None if first is None else (first[1], first[0])


@dataclass
class SubboxVerdict:
    k: int
    n: int
    n0: int
    counts: tuple[int, ...]
    basis: tuple[int, ...]
    witness: tuple[int, ...]
    side: int
    default_side: int
    vacuous: bool
    min_n_nonvacuous: int
    count: int
    box_size: int
    collision: tuple[tuple[int, ...], tuple[int, ...]] | None
    eps_bound: Fraction
    meets_eps_bound: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def proper(self):
        return self.collision is None and self.count == self.box_size


def proper_subbox(k, n, witness=None, side=None, workers=1, budget=None) -> SubboxVerdict:
    """Certify that sum_{i in I} p_i x_i is injective on [0..side]^I.

    ``witness`` is the 1-based index set I (default: the greedy one from the
    lemma check at n0 = n mod d_k); ``side`` defaults to floor(delta_k n).
    """
    params = constants(k)
    n0, counts = params.for_n(n)
    basis = minor_basis(counts)
    if witness is None:
        verdict = verify_main_lemma(k, params.mu, n0)
        if verdict.witness is None:
            raise IdentityFailure(f"no independent witness set for k={k}, n0={n0}")
        witness = verdict.witness
    witness = tuple(witness)
    if any(not 1 <= i <= k for i in witness):
        raise ValueError(f"witness indices must lie in 1..{k}")
    default_side = math.floor(params.delta * n)
    eps_bound = params.eps * Fraction(n) ** (k - 2)
    common = dict(
        k=k, n=n, n0=n0, counts=counts.entries, basis=tuple(basis), witness=witness,
        default_side=default_side, min_n_nonvacuous=params.min_n_for_unit_side(),
        eps_bound=eps_bound,
    )
    if side is None and default_side < 1 and witness:
        return SubboxVerdict(
            side=default_side, vacuous=True, count=1, box_size=1, collision=None,
            notes=[f"vacuous at this n: floor(delta_k n) = 0; need n >= {params.min_n_for_unit_side()}"],
            **common,
        )
    use_default = side is None
    side = default_side if use_default else side
    if side < 0:
        raise ValueError("side must be nonnegative")
    too_long = [i for i in witness if side > counts.entries[i - 1]]
    if too_long:
        raise ValueError(f"side {side} exceeds n_i for i in {too_long}; box leaves the GAP domain")
    box_size = (side + 1) ** len(witness)
    budget = default_budget() if budget is None else budget
    if box_size > budget:
        raise BudgetExceeded("sub-box enumeration", box_size, budget)
    count, collision = enumerate_box([basis[i - 1] for i in witness], side, workers)
    full = None
    if collision is not None:
        full = tuple(_embed(pt, witness, k) for pt in collision)
    out = SubboxVerdict(
        side=side, vacuous=False, count=count, box_size=box_size, collision=full, **common
    )
    if use_default:
        out.meets_eps_bound = count >= eps_bound
    return out


def _embed(point, witness, k):
    full = [0] * k
    for i, x in zip(witness, point):
        full[i - 1] = x
    return tuple(full)


@dataclass
class Main2Report:
    n: int
    eps: float
    k: int
    exponent: int
    log_bound_exponent: float


def main2_plugin(n, eps=0.1) -> Main2Report:
    """k = floor(eps log n / log log n) and the exponents it yields.

    ``exponent`` is k - 2 from n^{k-2}; ``log_bound_exponent`` is k/2 - 2,
    what remains once the k^{-O(k^2)} factor is absorbed as n^{-k/2}.
    """
    if n < 16:
        raise ValueError("n must be at least 16 so that log log n > 1")
    k = math.floor(eps * math.log(n) / math.log(math.log(n)))
    return Main2Report(n, eps, k, k - 2, k / 2 - 2)


@dataclass
class LowerBoundReport:
    params: ConstructionParams
    subbox: SubboxVerdict
    certified_count: int
    rows: int  # the certified count lower-bounds r_{rows,n} and hence r_n
    main2: Main2Report | None = None


def lower_bound_report(k, n, side=None, eps=None, workers=1, budget=None) -> LowerBoundReport:
    params = constants(k)
    if n < max(params.d, k + 1):
        raise ValueError(f"n must be at least max(d_k, k+1) = {max(params.d, k + 1)}")
    sub = proper_subbox(k, n, side=side, workers=workers, budget=budget)
    # distinct values stay distinct under the affine map to per(a * B)
    certified = sub.count
    main2 = main2_plugin(n, eps) if eps is not None and n >= 16 else None
    return LowerBoundReport(params, sub, certified, k + 1, main2)
