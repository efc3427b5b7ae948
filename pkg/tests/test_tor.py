import json

import pytest

from nilops.constructions import algebra_tensor, exterior_algebra, trivial_algebra, truncated_polynomial
from nilops.gf2 import support
from nilops.modules import indecomposables
from nilops.tor import (
    BarComplex,
    bar_tor,
    column_nilpotence,
    entry_key,
    nilpotence_lower_bound,
)


def nonzero(page):
    return {k: e.dim for k, e in page.entries.items() if e.complete and e.dim}


def test_trivial_algebra():
    page = bar_tor(trivial_algebra(), 3, 6)
    assert nonzero(page) == {(0, 0): 1}


def test_exterior_x3():
    page = bar_tor(exterior_algebra(3), 4, 12)
    assert nonzero(page) == {(s, 3 * s): 1 for s in range(5)}


def test_truncated_polynomial_corner():
    page = bar_tor(truncated_polynomial(1, 4), 4, 8)
    nz = nonzero(page)
    assert nz[(1, 1)] == 1 and nz[(2, 4)] == 1
    assert {t for (s, t) in nz if s == 1} == {1}


def test_exterior_two_generators_is_polynomial_dual():
    # Tor over Λ(x1, x2) is the tensor product of the two divided power pages
    page = bar_tor(exterior_algebra(1, 2), 3, 9)
    nz = nonzero(page)
    for s in range(4):
        for t in range(10):
            want = sum(1 for a in range(s + 1) if a + 2 * (s - a) == t)
            assert nz.get((s, t), 0) == want


def test_differential_squares_to_zero():
    bar = BarComplex(algebra_tensor(truncated_polynomial(1, 3), exterior_algebra(2)))
    for s in range(2, 5):
        for t in range(9):
            lower = bar.differential(s - 1, t)
            for col in bar.differential(s, t):
                acc = 0
                for j in support(col):
                    acc ^= lower[j]
                assert acc == 0


@pytest.mark.parametrize(
    "alg",
    [exterior_algebra(3), truncated_polynomial(1, 4), truncated_polynomial(2, 3),
     algebra_tensor(truncated_polynomial(1, 2), truncated_polynomial(1, 3))],
)
def test_first_column_is_indecomposables(alg):
    page = bar_tor(alg, 1, alg.top_degree)
    col = page.column(1)
    q = indecomposables(alg)
    assert list(col.dims) == [q.dim(t) for t in range(col.top_degree + 1)]
    assert col == q or all(
        col.matrix(i, t) == q.matrix(i, t) for i in range(1, q.top_degree + 1) for t in range(q.top_degree + 1 - i)
    )


def test_connectivity_bound():
    page = bar_tor(truncated_polynomial(2, 3), 3, 12)
    conn = page.metadata["connectivity"]
    for (s, t), e in page.entries.items():
        if t < s * (conn + 1):
            assert e.dim == 0


def test_incomplete_marker():
    page = bar_tor(algebra_tensor(exterior_algebra(1, 2), truncated_polynomial(1, 3)), 4, 8, max_dim=20)
    assert any(not e.complete for e in page.entries.values())
    assert "?" in page.to_text()


def test_json_keys_and_roundtrip():
    page = bar_tor(exterior_algebra(3), 2, 6)
    doc = json.loads(page.to_json())
    assert set(doc["entries"]) == {"(0,0)", "(-1,3)", "(-2,6)"}
    assert entry_key(0, 0) == "(0,0)" and entry_key(2, 6) == "(-2,6)"
    assert page.to_json() == bar_tor(exterior_algebra(3), 2, 6).to_json()


def test_column_nilpotence():
    page = bar_tor(exterior_algebra(3), 3, 9)
    assert nilpotence_lower_bound(exterior_algebra(3)) == 3
    for s in range(1, 4):
        res = column_nilpotence(page, s)
        assert res.holds
    res = column_nilpotence(bar_tor(trivial_algebra(), 2, 2), 2)
    assert res.holds and not res.classes


def test_truncated_polynomial_nilpotence_bound():
    # the augmentation ideal sits in degrees >= 1, so it is 1-nilpotent as a module
    assert nilpotence_lower_bound(truncated_polynomial(1, 4)) == 1
