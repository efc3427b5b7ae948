import random

import pytest

from nilops import oracle
from nilops.constructions import (
    change_basis,
    exterior_algebra,
    random_corpus,
    rp_truncation,
    truncated_polynomial,
)
from nilops.modules import (
    AdemError,
    AlgebraError,
    DirectSum,
    FiniteUnstableAlgebra,
    Free,
    InstabilityError,
    ModuleElement,
    NonHomogeneousError,
    RPInfinity,
    ShapeError,
    Submodule,
    Suspension,
    Tensor,
    TruncationError,
    act,
    indecomposables,
    make_finite,
    sq_lower,
    suspend_element,
    to_finite,
    trivial_module,
    verify_algebra,
    verify_instability,
)
from nilops.steenrod import Sq, binom2, full_basis, multiply


def test_suspension_of_f2_is_valid():
    m = trivial_module(1)
    assert m.dims == (0, 1)
    assert verify_instability(m) == []


def test_rp2_is_valid():
    m = make_finite([0, 1, 1], {1: {1: [[1]]}}, name="RP2")
    assert m.act_basis(1, 1, 0) == 1


def test_instability_violation_names_witness():
    with pytest.raises(InstabilityError) as exc:
        make_finite([0, 1, 0, 1], {2: {1: [[1]]}})
    v = exc.value.violation
    assert (v.degree, v.op, v.index) == (1, "Sq2", 0)


def test_adem_violation_names_pair():
    # x in degree 2 with Sq2 Sq2 x != 0 but Sq1 x = 0
    with pytest.raises(AdemError) as exc:
        make_finite([0, 0, 1, 0, 1, 0, 1], {2: {2: [[1]], 4: [[1]]}})
    assert exc.value.violation.op == "Sq2 Sq2"


def test_shape_violation():
    with pytest.raises(ShapeError):
        make_finite([0, 1, 1], {1: {1: [[1, 1]]}})


def test_restriction_violation():
    m = make_finite([1, 1, 1], {1: {1: [[1]]}})
    alg = FiniteUnstableAlgebra(m, {(1, 1): [[0]]}, check=False)
    kinds = {v.kind for v in verify_algebra(alg)}
    assert "restriction" in kinds
    with pytest.raises(AlgebraError):
        FiniteUnstableAlgebra(m, {(1, 1): [[0]]})


def test_truncated_polynomial_in_bad_degree_fails():
    with pytest.raises(AdemError):
        truncated_polynomial(3, 3)


def test_rp_infinity_binomials():
    rp = RPInfinity()
    for k in range(1, 30):
        for i in range(k + 1):
            assert rp.act_basis(i, k, 0) == binom2(k, i)
    x = rp.basis_element(3, 0)
    assert act(rp, Sq(2), x) == rp.basis_element(5, 0)
    assert act(rp, Sq(1), rp.basis_element(1, 0)) == rp.basis_element(2, 0)


def test_rp_infinity_matches_oracle():
    # Sq^i u^k against the Cartan expansion on a single variable
    rp = RPInfinity()
    for k in range(1, 20):
        for i in range(k + 1):
            brute = oracle.sq_on_monomial(i, (k,))
            assert bool(brute) == bool(rp.act_basis(i, k, 0))


def test_free1_is_submodule_of_rp():
    f1 = Free(1, 256)
    rp = RPInfinity()
    for j in range(7):
        d = 1 << j
        for i in range(d + 1):
            assert f1.act_basis(i, d, 0) == rp.act_basis(i, d, 0)
    assert [f1.dim(d) for d in range(10)] == [0, 1, 1, 0, 1, 0, 0, 0, 1, 0]


def test_free_degree_bound_overflow():
    f2 = Free(2, 6)
    x = f2.basis_element(2, 0)
    with pytest.raises(TruncationError):
        act(f2, Sq(4, 2), x)


def test_truncated_window_raises():
    m = to_finite(RPInfinity(), 4, truncated=True)
    with pytest.raises(TruncationError):
        act(m, Sq(4), m.basis_element(4, 0))
    genuine = to_finite(RPInfinity(), 4)
    assert act(genuine, Sq(4), genuine.basis_element(4, 0)).is_zero()


@pytest.mark.parametrize("module", [Free(2, 24), Free(3, 24), Tensor(RPInfinity(), Free(1, 64)), rp_truncation(12)])
def test_action_is_associative(module):
    for d in range(1, 8):
        for j in range(module.dim(d)):
            x = module.basis_element(d, j)
            for da in range(1, 5):
                for db in range(1, 5):
                    if d + da + db > 14:
                        continue
                    for a in full_basis(da):
                        for b in full_basis(db):
                            sa, sb = Sq(*a), Sq(*b)
                            assert act(module, sa, act(module, sb, x)) == act(module, multiply(sa, sb), x)


def test_tensor_of_suspensions():
    s = trivial_module(1)
    t = Tensor(s, s)
    assert t.dim(2) == 1
    assert t.act_basis(1, 2, 0) == 0 and t.act_basis(2, 2, 0) == 0


def test_tensor_with_f1_basis():
    k = make_finite([0, 0, 2])
    t = Tensor(k, Free(1, 64))
    assert t.dim(2 + 8) == 2
    assert {t.label(10, j) for j in range(2)} == {"x2_0⊗u^8", "x2_1⊗u^8"}


@pytest.mark.parametrize(
    "a, b",
    [(rp_truncation(4), rp_truncation(3)), (Free(2, 12), rp_truncation(5)), (trivial_module(2), Free(1, 32))],
)
def test_tensor_tables_are_valid(a, b):
    # Cartan coherence: the tabulated tensor product passes the Adem check
    top = 9
    assert verify_instability(to_finite(Tensor(a, b), top, truncated=True)) == []


def test_direct_sum_and_suspension():
    m = DirectSum(rp_truncation(3), trivial_module(2))
    assert [m.dim(d) for d in range(4)] == [0, 1, 2, 1]
    s = Suspension(rp_truncation(3), 2)
    assert s.act_basis(1, 3, 0) == 1
    assert s.act_basis(2, 3, 0) == 0


def test_sq_lower():
    rp = RPInfinity()
    x = rp.basis_element(3, 0)
    assert sq_lower(rp, 0, x) == rp.basis_element(6, 0)
    assert sq_lower(rp, 3, x) == x
    assert sq_lower(rp, 4, x).is_zero()
    assert sq_lower(rp, -1, x).is_zero()
    with pytest.raises(NonHomogeneousError):
        sq_lower(rp, 0, x + rp.basis_element(4, 0))


def test_suspension_formula_small():
    rp = RPInfinity()
    s = Suspension(rp, 2)
    for d in range(1, 10):
        x = rp.basis_element(d, 0)
        for k in range(-1, d + 1):
            assert sq_lower(s, k + 2, suspend_element(s, x)) == suspend_element(s, sq_lower(rp, k, x))


def test_submodule_of_rp():
    rp = RPInfinity()
    powers = Submodule(rp, lambda d: [1] if d & (d - 1) == 0 and d else [], name="P")
    assert powers.dim(4) == 1 and powers.dim(3) == 0
    assert powers.act_basis(4, 4, 0) == 1


def test_indecomposables_examples():
    q = indecomposables(exterior_algebra(3))
    assert q.dims == (0, 0, 0, 1)
    q = indecomposables(truncated_polynomial(1, 4))
    assert q.dims == (0, 1, 0, 0)
    q = indecomposables(FiniteUnstableAlgebra(trivial_module(0)))
    assert sum(q.dims) == 0


def test_module_element_split():
    rp = RPInfinity()
    x = ModuleElement.from_components(rp, {1: 1, 3: 1})
    assert not x.is_homogeneous()
    assert [y.degree for y in x.split()] == [1, 3]


def test_random_corpus_is_valid_and_seeded():
    a = random_corpus(5, 25, 10, 3)
    b = random_corpus(5, 25, 10, 3)
    assert a == b
    for m in a:
        assert m.top_degree <= 10 and max(m.dims) <= 3
        assert verify_instability(m) == []


def test_change_basis_preserves_validity():
    rng = random.Random(0)
    m = rp_truncation(8)
    c = change_basis(m, rng)
    assert c.dims == m.dims and verify_instability(c) == []
