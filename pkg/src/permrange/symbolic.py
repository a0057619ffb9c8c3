"""Exact univariate polynomials over Q and the linear algebra behind the
rank bound for the minor polynomials.

Polynomials are in the single variable ``n``.  Everything is exact
(``fractions.Fraction``); nothing here rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

from permrange.errors import IdentityFailure
from permrange.permanent import falling
from permrange.sign_matrix import CountsVector

RationalMatrix = list[list[Fraction]]


class RationalPoly:
    """Coefficients lowest degree first, trailing zeros stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def linear(cls, slope, intercept):
        """``slope * n + intercept``."""
        return cls([intercept, slope])

    @classmethod
    def monomial(cls, d, c=1):
        return cls([0] * d + [c])

    @property
    def degree(self):
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, d):
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _lift(self, other):
        return other if isinstance(other, RationalPoly) else RationalPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        m = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly([self.coeff(i) + other.coeff(i) for i in range(m)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            other = Fraction(other)
            return RationalPoly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = RationalPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __truediv__(self, c):
        c = Fraction(c)
        return RationalPoly([x / c for x in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def denominator(self):
        return lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1

    def int_coeffs(self):
        """Coefficients as ints; raises if any is not integral."""
        if self.denominator() != 1:
            raise ValueError(f"{self} has non-integer coefficients")
        return [int(c) for c in self.coeffs]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if d == 0:
                body = str(mag)
            else:
                var = "n" if d == 1 else f"n^{d}"
                body = var if mag == 1 else f"{mag}*{var}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


N = RationalPoly.monomial(1)


def falling_factorial_poly(shift, length):
    """(n - shift)(n - shift - 1) ... (n - shift - length + 1)."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    out = RationalPoly.const(1)
    for t in range(length):
        out = out * RationalPoly.linear(1, -(shift + t))
    return out


def alpha_poly(ell, k, shift=0):
    """(-2)^ell (n - ell)_{k - ell}, evaluated at ``n - shift``."""
    if not 0 <= ell <= k:
        raise ValueError(f"need 0 <= ell <= k, got ell={ell}, k={k}")
    return falling_factorial_poly(ell + shift, k - ell) * (-2) ** ell


def elementary_symmetric_all(values, one=1):
    """[e_0, e_1, ..., e_m] of ``values`` by expanding prod (1 + x_i t).

    Works for any ring elements supporting + and *; pass ``one`` of the
    right type (e.g. ``RationalPoly.const(1)``) for polynomial inputs.
    """
    e = [one]
    for x in values:
        e.append(e[-1] * x)
        for j in range(len(e) - 2, 0, -1):
            e[j] = e[j] + e[j - 1] * x
    return e


def elementary_symmetric(ell, values):
    values = list(values)
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if ell > len(values):
        return Fraction(0) if any(isinstance(v, Fraction) for v in values) else 0
    return elementary_symmetric_all(values)[ell]


def per_b_closed_form(counts: CountsVector):
    """per(B_{n_1..n_k}) = sum_ell (-2)^ell (n-ell)_{k-ell} e_ell(n_1..n_k)."""
    k, n = counts.k, counts.n
    e = elementary_symmetric_all(counts.entries)
    return sum((-2) ** ell * falling(n - ell, k - ell) * e[ell] for ell in range(k + 1))


def check_mu(mu, k=None):
    mu = [Fraction(m) for m in mu]
    if k is not None and len(mu) != k:
        raise ValueError(f"expected {k} weights, got {len(mu)}")
    if any(m <= 0 for m in mu):
        raise ValueError("weights must be positive")
    if len(set(mu)) != len(mu):
        raise ValueError("weights must be pairwise distinct")
    if sum(mu) != 1:
        raise ValueError(f"weights sum to {sum(mu)}, not 1")
    return mu


def count_polys(mu, n0):
    """n_i(n) = mu_i (n - n0) as polynomials."""
    return [RationalPoly.linear(m, -m * n0) for m in mu]


def p_bar_polys(k, mu, n0):
    """The k minor permanents p_i as polynomials in n for fixed n0.

    p_i is the permanent of the k x (n-1) B-matrix whose counts are
    n_j = mu_j (n - n0) with the ith one decremented.
    """
    mu = check_mu(mu, k)
    base = count_polys(mu, n0)
    alphas = [alpha_poly(ell, k, shift=1) for ell in range(k + 1)]
    one = RationalPoly.const(1)
    out = []
    for i in range(k):
        vals = list(base)
        vals[i] = vals[i] - 1
        e = elementary_symmetric_all(vals, one)
        p = RationalPoly()
        for ell in range(k + 1):
            p = p + alphas[ell] * e[ell]
        out.append(p)
    return out


def p_hat_polys(k, mu, n0):
    """(p_1 - p_i) / (mu_1 - mu_i) for i = 2..k, from the factored form

    sum_{ell=2}^{k} alpha_ell(n-1) (n-n0)^{ell-1} e_{ell-2}(mu minus mu_1, mu_i).
    """
    mu = check_mu(mu, k)
    shifted = RationalPoly.linear(1, -n0)
    terms = {ell: alpha_poly(ell, k, shift=1) * shifted ** (ell - 1) for ell in range(2, k + 1)}
    out = []
    for i in range(1, k):
        rest = mu[1:i] + mu[i + 1 :]
        e = elementary_symmetric_all(rest, Fraction(1))
        p = RationalPoly()
        for ell in range(2, k + 1):
            p = p + terms[ell] * e[ell - 2]
        out.append(p)
    return out


def build_M_matrix(k, mu, n0) -> RationalMatrix:
    """Row i-2 holds the coefficients of n^{k-1}, ..., n^1 of p_hat_i."""
    return [[p.coeff(k - j - 1) for j in range(k - 1)] for p in p_hat_polys(k, mu, n0)]


def r_stack(k, mu) -> RationalMatrix:
    """Rows R_ell (ell = 2..k), entry i = e_{ell-2}(mu_2..mu_k without mu_i)."""
    mu = [Fraction(m) for m in mu]
    cols = []
    for i in range(1, k):
        rest = mu[1:i] + mu[i + 1 :]
        cols.append(elementary_symmetric_all(rest, Fraction(1)))
    return [[cols[i][ell - 2] for i in range(k - 1)] for ell in range(2, k + 1)]


def s_vector(k, n0, ell, a):
    """(S_{ell,a})_j = (-1)^j e_j(n0 repeated ell-1 times, ell+a, ..., k), j < k-a."""
    if a < 1 or not 2 <= ell <= k + 1 - a:
        raise ValueError(f"need a >= 1 and 2 <= ell <= k+1-a, got ell={ell}, a={a}, k={k}")
    vals = [Fraction(n0)] * (ell - 1) + [Fraction(v) for v in range(ell + a, k + 1)]
    e = elementary_symmetric_all(vals, Fraction(1))
    return [(-1) ** j * e[j] for j in range(k - a)]


def s_stack(k, n0, a=1) -> RationalMatrix:
    return [s_vector(k, n0, ell, a) for ell in range(2, k + 2 - a)]


def m_from_decomposition(k, mu, n0) -> RationalMatrix:
    """sum_{ell=2}^{k} (-2)^ell R_ell S_ell^T, built from the two stacks."""
    rs = r_stack(k, mu)
    ss = s_stack(k, n0)
    out = [[Fraction(0)] * (k - 1) for _ in range(k - 1)]
    for t, ell in enumerate(range(2, k + 1)):
        w = (-2) ** ell
        for i in range(k - 1):
            for j in range(k - 1):
                out[i][j] += w * rs[t][i] * ss[t][j]
    return out


def s_recursion_failures(k, n0):
    """(ell, a) pairs where S_{ell+1,a} - S_{ell,a} != (ell+a-n0)(0 * S_{ell,a+1})."""
    bad = []
    for a in range(1, k):
        for ell in range(2, k - a + 1):
            lhs = [x - y for x, y in zip(s_vector(k, n0, ell + 1, a), s_vector(k, n0, ell, a))]
            rhs = [Fraction(0)] + [(ell + a - n0) * v for v in s_vector(k, n0, ell, a + 1)]
            if lhs != rhs:
                bad.append((ell, a))
    return bad


def _rows_of(obj):
    rows = list(obj)
    if rows and isinstance(rows[0], RationalPoly):
        width = max(p.degree for p in rows) + 1
        return [[p.coeff(d) for d in range(width)] for p in rows]
    return [[Fraction(x) for x in r] for r in rows]


def _echelon(rows):
    """Row-reduce in place; returns pivot rows used, in order."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    width = len(m[0])
    r = 0
    pivots = []
    for c in range(width):
        best = max(range(r, len(m)), key=lambda t: abs(m[t][c].numerator), default=None)
        if best is None or m[best][c] == 0:
            continue
        m[r], m[best] = m[best], m[r]
        piv = m[r][c]
        for t in range(r + 1, len(m)):
            f = m[t][c] / piv
            if f:
                m[t] = [x - f * y for x, y in zip(m[t], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_over_Q(rows) -> int:
    """Rank of a rational matrix or of polynomials' coefficient vectors."""
    return len(_echelon(_rows_of(rows))[1])


def determinant(mat: RationalMatrix) -> Fraction:
    m = [[Fraction(x) for x in r] for r in mat]
    size = len(m)
    if any(len(r) != size for r in m):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for c in range(size):
        best = max(range(c, size), key=lambda t: abs(m[t][c].numerator))
        if m[best][c] == 0:
            return Fraction(0)
        if best != c:
            m[c], m[best] = m[best], m[c]
            det = -det
        piv = m[c][c]
        det *= piv
        for t in range(c + 1, size):
            f = m[t][c] / piv
            if f:
                m[t] = [x - f * y for x, y in zip(m[t], m[c])]
    return det


def independent_subset(polys, size):
    """Greedy first-lexicographic index set of ``size`` independent members."""
    chosen = []
    rows = _rows_of(polys)
    for i in range(len(rows)):
        if len(chosen) == size:
            break
        if rank_over_Q([rows[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    return chosen if len(chosen) == size else None


def s_dimension_bound(k, n0, a):
    return k - 1 - a if a <= n0 - 2 else k - a


@dataclass
class LemmaVerdict:
    k: int
    n0: int
    vacuous: bool
    rank_p_hat: int
    rank_p_bar: int
    rank_M: int
    witness: list[int] | None  # 1-based indices into p_1..p_k
    s_dims: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def lemma_holds(self):
        return self.vacuous or (
            self.rank_p_hat >= self.k - 2 and self.witness is not None
        )

    @property
    def case_bound_holds(self):
        return all(dim >= bound for dim, bound in self.s_dims.values())

    @property
    def passed(self):
        return self.lemma_holds and self.case_bound_holds


def verify_main_lemma(k, mu, n0) -> LemmaVerdict:
    """Check that the minor polynomials span a space of dimension >= k-2
    for this fixed n0, and pick the independent witness set I."""
    if k <= 2:
        bars = p_bar_polys(k, mu, n0)
        return LemmaVerdict(k, n0, True, max(k - 1, 0), rank_over_Q(bars), 0, [])
    bars = p_bar_polys(k, mu, n0)
    hats = p_hat_polys(k, mu, n0)
    picked = independent_subset(bars, k - 2)
    s_dims = {
        a: (rank_over_Q(s_stack(k, n0, a)), s_dimension_bound(k, n0, a))
        for a in range(1, k)
    }
    return LemmaVerdict(
        k=k,
        n0=n0,
        vacuous=False,
        rank_p_hat=rank_over_Q(hats),
        rank_p_bar=rank_over_Q(bars),
        rank_M=rank_over_Q(build_M_matrix(k, mu, n0)),
        witness=None if picked is None else [i + 1 for i in picked],
        s_dims=s_dims,
    )


def shifted_product_expansion(k, ell, n0):
    """(n - n0)^{ell-1} (n - ell - 1) ... (n - k), expanded two ways."""
    if not 2 <= ell <= k:
        raise ValueError(f"need 2 <= ell <= k, got ell={ell}, k={k}")
    direct = RationalPoly.linear(1, -n0) ** (ell - 1) * falling_factorial_poly(ell + 1, k - ell)
    vals = [Fraction(n0)] * (ell - 1) + [Fraction(v) for v in range(ell + 1, k + 1)]
    e = elementary_symmetric_all(vals, Fraction(1))
    via_e = RationalPoly()
    for j in range(k):
        via_e = via_e + RationalPoly.monomial(k - j - 1, (-1) ** j * e[j])
    if direct != via_e:
        raise IdentityFailure(f"expansions differ for k={k}, ell={ell}, n0={n0}")
    return direct


@dataclass
class DifferenceReport:
    poly: list[int]  # integer coefficients, lowest degree first
    degree: int
    n: int
    value: int
    bound: Fraction
    within_bound: list[bool]  # |beta_j| <= n/2, j = 0..degree

    @property
    def nonzero(self):
        return self.degree >= 0 and self.value != 0


def difference_poly(x: Sequence[int], y: Sequence[int], p_bar, scale, n) -> DifferenceReport:
    """sum_i (y_i - x_i) * scale * p_bar_i(n) with its coefficient report."""
    if list(x) == list(y):
        raise ValueError("x and y must differ")
    if len(x) != len(p_bar) or len(y) != len(p_bar):
        raise ValueError("lattice points must have one coordinate per polynomial")
    poly = RationalPoly()
    for xi, yi, p in zip(x, y, p_bar):
        if yi != xi:
            poly = poly + p * ((yi - xi) * scale)
    coeffs = poly.int_coeffs()
    bound = Fraction(n, 2)
    return DifferenceReport(
        poly=coeffs,
        degree=poly.degree,
        n=n,
        value=int(poly(n)),
        bound=bound,
        within_bound=[abs(c) <= bound for c in coeffs],
    )
