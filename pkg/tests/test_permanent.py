import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from permrange.errors import BudgetExceeded
from permrange.permanent import (
    choose_engine,
    falling,
    laplace_expand,
    permanent,
    permanent_bitmask_dp,
    permanent_injection_sum,
    permanent_minor,
    permanent_ryser,
)
from permrange.sign_matrix import CountsVector, SignMatrix, concat_rows, make_b_matrix, parse_matrix


def random_matrix(rng, k, n):
    return SignMatrix.from_code(k, n, rng.getrandbits(k * n))


def test_injection_sum_examples():
    assert permanent_injection_sum(SignMatrix.ones(2, 2)) == 2
    assert permanent_injection_sum(parse_matrix("2 2\n++\n+-\n")) == 0
    # B_{1,0,0} in 3x3: 6 permutations, the two through the -1 entry cancel two others
    b = make_b_matrix(CountsVector((1, 0, 0), 3))
    assert permanent_injection_sum(b) == 2
    assert falling(3, 3) - 2 * falling(2, 2) == 2


def test_injection_budget():
    with pytest.raises(BudgetExceeded):
        permanent_injection_sum(SignMatrix.ones(8, 8), budget=1000)


def test_dp_examples():
    assert permanent_bitmask_dp(SignMatrix.ones(3, 3)) == 6
    assert permanent_bitmask_dp(SignMatrix.ones(2, 4)) == 12
    rng = random.Random(4)
    a = random_matrix(rng, 4, 6)
    assert permanent_bitmask_dp(a) == permanent_injection_sum(a)


def test_dp_budget():
    with pytest.raises(BudgetExceeded):
        permanent_bitmask_dp(SignMatrix.ones(1, 27))


def test_ryser_examples():
    assert permanent_ryser(SignMatrix.ones(4, 4)) == 24
    a = parse_matrix("3 3\n---\n+-+\n++-\n")
    assert permanent_ryser(a) == -permanent_ryser(a.negate_row(0))
    rng = random.Random(5)
    b = random_matrix(rng, 5, 5)
    assert permanent_ryser(b) == permanent_bitmask_dp(b)
    with pytest.raises(ValueError):
        permanent_ryser(SignMatrix.ones(2, 3))


def test_ryser_partition_matches_serial():
    rng = random.Random(6)
    a = random_matrix(rng, 12, 12)
    assert permanent_ryser(a, workers=2) == permanent_ryser(a) == permanent_bitmask_dp(a)


def test_large_exact_value():
    assert permanent(SignMatrix.ones(20, 20), budget=10**9) == math.factorial(20)


def test_minor_examples():
    assert permanent_minor(SignMatrix.ones(3, 3), 0, 0) == 2
    assert permanent_minor(SignMatrix.ones(2, 4), 0, 0) == 3
    with pytest.raises(IndexError):
        permanent_minor(SignMatrix.ones(2, 4), 0, 4)
    with pytest.raises(ValueError):
        permanent_minor(SignMatrix.ones(1, 4), 0, 0)


def test_laplace_examples():
    assert laplace_expand(SignMatrix.ones(3, 3), 0) == 6
    assert laplace_expand(SignMatrix.ones(2, 4), 0) == 12
    rng = random.Random(7)
    a = random_matrix(rng, 3, 5)
    assert {laplace_expand(a, i) for i in range(3)} == {permanent_injection_sum(a)}


@st.composite
def matrices(draw, max_k=5, max_n=9):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, min(n, max_k)))
    return SignMatrix.from_code(k, n, draw(st.integers(0, (1 << (k * n)) - 1)))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_engines_agree(a):
    want = permanent_injection_sum(a)
    assert permanent_bitmask_dp(a) == want
    assert permanent(a) == want
    if a.k == a.n:
        assert permanent_ryser(a) == want


@settings(max_examples=40, deadline=None)
@given(matrices(max_k=5, max_n=12))
def test_dp_matches_ryser_or_dispatch(a):
    if a.k == a.n:
        assert permanent_bitmask_dp(a) == permanent_ryser(a)
    else:
        assert permanent_bitmask_dp(a) == permanent(a)


@settings(max_examples=80, deadline=None)
@given(matrices(max_k=4, max_n=7), st.data())
def test_row_negation_and_permutation(a, data):
    i = data.draw(st.integers(0, a.k - 1))
    p = permanent(a)
    assert permanent(a.negate_row(i)) == -p
    rows = data.draw(st.permutations(range(a.k)))
    cols = data.draw(st.permutations(range(a.n)))
    assert permanent(a.permute(rows, cols)) == p


@settings(max_examples=60, deadline=None)
@given(matrices(max_k=4, max_n=7))
def test_laplace_every_row(a):
    if a.k < 2:
        return
    want = permanent(a)
    for i in range(a.k):
        assert laplace_expand(a, i) == want


@pytest.mark.parametrize("n", range(1, 9))
def test_padding_identity(n):
    rng = random.Random(n)
    for k in range(1, min(n, 4) + 1):
        for ell in range(k, min(n, 4) + 1):
            if k * n <= 12:
                pool = [SignMatrix.from_code(k, n, c) for c in range(1 << (k * n))]
            else:
                pool = [random_matrix(rng, k, n) for _ in range(30)]
            for a in pool:
                padded = concat_rows(a, SignMatrix.ones(ell - k, n)) if ell > k else a
                assert permanent(padded) == permanent(a) * falling(n - k, ell - k)


def test_dispatch():
    assert choose_engine(SignMatrix.ones(3, 3)) == "injection"
    assert choose_engine(SignMatrix.ones(12, 12)) == "ryser"
    assert choose_engine(SignMatrix.ones(22, 22), budget=10**9) == "ryser"
    assert choose_engine(SignMatrix.ones(6, 20)) == "dp"
    with pytest.raises(BudgetExceeded):
        choose_engine(SignMatrix.ones(12, 12), budget=1000)


def test_exhaustive_small_square():
    for n in (1, 2, 3):
        for code in range(1 << (n * n)):
            a = SignMatrix.from_code(n, n, code)
            brute = sum(
                math.prod(a.entry(i, s[i]) for i in range(n))
                for s in itertools.permutations(range(n))
            )
            assert permanent_ryser(a) == permanent_bitmask_dp(a) == brute
