import random

import pytest
from hypothesis import given, settings, strategies as st

from nilops.gf2 import (
    GF2Matrix,
    GradedVectorSpace,
    Subspace,
    inverse,
    kernel,
    parity,
    preimage,
    row_reduce,
    solve,
    subquotient,
    support,
    unvec,
    vec,
)


def matrices(max_rows=8, max_cols=8):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r).map(
                lambda rows: GF2Matrix(r, c, tuple(rows))
            )
        )
    )


def test_vec_roundtrip():
    assert vec([1, 0, 1, 1]) == 0b1101
    assert unvec(0b1101, 5) == [1, 0, 1, 1, 0]
    assert support(0b101001) == [0, 3, 5]
    assert parity(0b111) == 1


def test_identity_and_product():
    i3 = GF2Matrix.identity(3)
    m = GF2Matrix.from_lists([[1, 1, 0], [0, 1, 1]])
    assert m @ i3 == m
    assert (m + m).is_zero()
    assert m.transpose().transpose() == m
    assert m.apply(0b001) == 0b01


def test_rank_of_known_matrix():
    m = GF2Matrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert m.rank() == 2
    assert len(kernel(m)) == 1
    assert m.apply(kernel(m)[0]) == 0


@given(matrices())
def test_rank_nullity(m):
    assert m.rank() + len(kernel(m)) == m.ncols
    for v in kernel(m):
        assert m.apply(v) == 0


@given(matrices(), st.integers(0, 255))
def test_solve_consistent(m, x):
    x &= (1 << m.ncols) - 1
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_solve_inconsistent_returns_none():
    m = GF2Matrix.from_lists([[1, 0], [1, 0]])
    assert solve(m, 0b01) is None


def test_row_reduce_pivots():
    rank, r, pivots = row_reduce(GF2Matrix.from_lists([[0, 1, 1], [0, 1, 0]]))
    assert rank == 2 and pivots == [1, 2]


def test_inverse():
    rng = random.Random(1)
    for _ in range(30):
        n = rng.randint(1, 6)
        m = GF2Matrix(n, n, tuple(rng.getrandbits(n) for _ in range(n)))
        if m.rank() < n:
            with pytest.raises(ValueError):
                inverse(m)
        else:
            assert m @ inverse(m) == GF2Matrix.identity(n)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 63), max_size=6), st.lists(st.integers(0, 63), max_size=6))
def test_subspace_intersection(a, b):
    sa, sb = Subspace.span(a), Subspace.span(b)
    both = sa.intersection(sb)
    for v in both.basis:
        assert v in sa and v in sb
    total = Subspace.span(a + b)
    assert sa.dim + sb.dim == total.dim + both.dim


def test_preimage():
    cols = [0b01, 0b01, 0b10]
    target = Subspace.span([0b10])
    pre = preimage(cols, target, 2)
    assert pre == Subspace.span([0b011, 0b100])


def test_subquotient_dims():
    sq = subquotient(GradedVectorSpace((3,)), {0: [0b001, 0b010, 0b100]}, {0: [0b011]})
    assert sq.space.dim(0) == 2
    assert sq.project(0, 0b011) == 0
    assert sq.project(0, sq.include(0, 0b10)) == 0b10


def test_subquotient_rejects_relation_outside_generators():
    with pytest.raises(ValueError):
        subquotient(GradedVectorSpace((2,)), {0: [0b01]}, {0: [0b10]})
