"""+-1 matrices stored as per-row sets of minus positions.

Text format (one matrix per file)::

    k n
    +-+-...   (k lines, n characters each)

Every line is newline-terminated; the header is two ASCII decimals
separated by a single space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from permrange.errors import MatrixFormatError


@dataclass(frozen=True)
class SignMatrix:
    k: int
    n: int
    minus: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("a sign matrix needs at least one row")
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        if len(self.minus) != self.k:
            raise ValueError("one minus set per row required")
        for row in self.minus:
            for j in row:
                if not 0 <= j < self.n:
                    raise ValueError(f"minus position {j} outside [0, {self.n})")

    @classmethod
    def ones(cls, k, n):
        """J_{k,n}: every entry +1."""
        return cls(k, n, tuple(frozenset() for _ in range(k)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> SignMatrix:
        """Build from explicit +-1 entries."""
        if not rows:
            raise ValueError("empty matrix")
        n = len(rows[0])
        minus = []
        for row in rows:
            if len(row) != n:
                raise ValueError("ragged rows")
            if any(v not in (1, -1) for v in row):
                raise ValueError("entries must be +1 or -1")
            minus.append(frozenset(j for j, v in enumerate(row) if v == -1))
        return cls(len(rows), n, tuple(minus))

    @classmethod
    def from_code(cls, k, n, code):
        """Decode the integer whose bit ``i*n + j`` marks a minus at (i, j)."""
        minus = tuple(
            frozenset(j for j in range(n) if code >> (i * n + j) & 1) for i in range(k)
        )
        return cls(k, n, minus)

    def code(self):
        return sum(1 << (i * self.n + j) for i, row in enumerate(self.minus) for j in row)

    def entry(self, i, j):
        return -1 if j in self.minus[i] else 1

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(-1 if j in row else 1 for j in range(self.n)) for row in self.minus
        )

    def negate_row(self, i) -> SignMatrix:
        flipped = frozenset(range(self.n)) - self.minus[i]
        return SignMatrix(self.k, self.n, self.minus[:i] + (flipped,) + self.minus[i + 1 :])

    def permute(self, row_order: Sequence[int], col_order: Sequence[int]) -> SignMatrix:
        """Row ``r`` of the result is row ``row_order[r]``; likewise for columns."""
        where = {old: new for new, old in enumerate(col_order)}
        return SignMatrix(
            self.k,
            self.n,
            tuple(frozenset(where[j] for j in self.minus[i]) for i in row_order),
        )

    def delete(self, i, j) -> SignMatrix:
        """Remove row ``i`` and column ``j``."""
        if self.k < 2:
            raise ValueError("cannot delete the only row")
        if not (0 <= i < self.k and 0 <= j < self.n):
            raise IndexError(f"({i}, {j}) outside a {self.k}x{self.n} matrix")
        rows = self.minus[:i] + self.minus[i + 1 :]
        return SignMatrix(self.k - 1, self.n - 1, tuple(_drop_col(r, j) for r in rows))

    def drop_column(self, j) -> SignMatrix:
        if not 0 <= j < self.n:
            raise IndexError(f"column {j} outside [0, {self.n})")
        return SignMatrix(self.k, self.n - 1, tuple(_drop_col(r, j) for r in self.minus))

    def column_minus_counts(self):
        counts = [0] * self.n
        for row in self.minus:
            for j in row:
                counts[j] += 1
        return counts

    def __str__(self):
        return render_matrix(self).rstrip("\n")


def _drop_col(row, j):
    return frozenset(c if c < j else c - 1 for c in row if c != j)


@dataclass(frozen=True)
class CountsVector:
    """Minus counts ``(n_1, ..., n_k)`` of a B-matrix inside ``n`` columns."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(c) for c in self.entries))
        if any(c < 0 for c in self.entries):
            raise ValueError("counts must be nonnegative")
        if sum(self.entries) > self.n:
            raise ValueError(f"counts sum {sum(self.entries)} exceeds n={self.n}")

    @property
    def k(self):
        return len(self.entries)

    @property
    def n0(self):
        return self.n - sum(self.entries)


def make_b_matrix(counts: CountsVector) -> SignMatrix:
    """B_{n_1..n_k} in block layout: n_0 all-plus columns first, then n_1
    columns with a minus in row 1 only, then n_2 in row 2 only, and so on."""
    start = counts.n0
    minus = []
    for c in counts.entries:
        minus.append(frozenset(range(start, start + c)))
        start += c
    return SignMatrix(counts.k, counts.n, tuple(minus))


def concat_rows(top: SignMatrix, bottom: SignMatrix) -> SignMatrix:
    if top.n != bottom.n:
        raise ValueError(f"column counts differ: {top.n} vs {bottom.n}")
    if top.k + bottom.k > top.n:
        raise ValueError(f"result would have {top.k + bottom.k} rows > n={top.n}")
    return SignMatrix(top.k + bottom.k, top.n, top.minus + bottom.minus)


def sign_row(entries: Iterable[int]) -> SignMatrix:
    """A single-row matrix from +-1 entries."""
    return SignMatrix.from_rows([list(entries)])


_HEADER = re.compile(r"(0|[1-9][0-9]*) (0|[1-9][0-9]*)")


def parse_matrix(text: str) -> SignMatrix:
    lines = text.split("\n")
    if len(lines) < 2 or lines[-1] != "":
        raise MatrixFormatError("input must be newline-terminated")
    lines = lines[:-1]
    m = _HEADER.fullmatch(lines[0])
    if m is None:
        raise MatrixFormatError(f"malformed header {lines[0]!r}")
    k, n = int(m.group(1)), int(m.group(2))
    if k < 1:
        raise MatrixFormatError("k must be at least 1")
    if k > n:
        raise MatrixFormatError(f"k={k} exceeds n={n}")
    body = lines[1:]
    if len(body) != k:
        raise MatrixFormatError(f"expected {k} rows, found {len(body)}")
    minus = []
    for r, line in enumerate(body, start=1):
        if len(line) != n:
            raise MatrixFormatError(f"row {r} has {len(line)} characters, expected {n}")
        bad = set(line) - {"+", "-"}
        if bad:
            raise MatrixFormatError(f"row {r}: illegal character {sorted(bad)[0]!r}")
        minus.append(frozenset(j for j, ch in enumerate(line) if ch == "-"))
    return SignMatrix(k, n, tuple(minus))


def render_matrix(a: SignMatrix) -> str:
    out = [f"{a.k} {a.n}"]
    for row in a.minus:
        out.append("".join("-" if j in row else "+" for j in range(a.n)))
    return "\n".join(out) + "\n"
