import random

import pytest

from nilops.constructions import random_corpus, random_finite_module, rp_truncation, truncated_polynomial
from nilops.modules import (
    DirectSum,
    Free,
    ModuleMap,
    RPInfinity,
    Submodule,
    Suspension,
    Tensor,
    make_finite,
    to_finite,
    trivial_module,
)
from nilops.nilfilt import (
    UndeterminedError,
    filtration,
    filtration_layer,
    is_reduced,
    nilpotence_degree,
    rs_layer,
    sq0_saturate,
    sq_lower_kernel,
    strong_f_iso,
    vanishing_subspace,
)


def point(s, dim=1):
    return make_finite([0] * s + [dim])


def test_finite_elements_are_exactly_degree_nilpotent():
    m = rp_truncation(8)
    for d in range(1, 9):
        cert = nilpotence_degree(m, m.basis_element(d, 0), 12)
        assert cert.exact == d
        assert cert.obstruction.tag == "identity"
        assert cert.verify()


def test_zero_element_convention():
    m = rp_truncation(3)
    cert = nilpotence_degree(m, m.element(2, 0), 5)
    assert cert.verdict == "at_least" and cert.at_least == 5


def test_rp_generator_is_not_nilpotent():
    rp = RPInfinity()
    cert = nilpotence_degree(rp, rp.basis_element(1, 0), 4)
    assert cert.exact == 0
    assert cert.obstruction.k == 0 and cert.obstruction.tag == "closed-form"
    assert cert.verify()


def test_tensor_with_f1_certificates():
    m = Tensor(point(2, 1), Free(1, 512))
    x = m.basis_element(2 + 4, 0)
    cert = nilpotence_degree(m, x, 5)
    assert cert.exact == 2 and cert.verify()


def test_unknown_on_truncated_window():
    m = to_finite(RPInfinity(), 6, truncated=True)
    cert = nilpotence_degree(m, m.basis_element(3, 0), 2, c_max=3)
    assert cert.verdict == "unknown"


def test_filtration_of_finite_module_is_degree_filtration():
    for m in random_corpus(11, 20, 8, 3):
        for s in range(m.top_degree + 2):
            layer = filtration_layer(m, s, m.top_degree)
            assert layer.dims() == [m.dim(d) if d >= s else 0 for d in range(m.top_degree + 1)]


def test_layer_zero_is_everything():
    m = Tensor(point(1), Free(1, 256))
    assert filtration_layer(m, 0, 20).dims() == [m.dim(d) for d in range(21)]


def test_rp_layer_one_is_zero():
    assert sum(filtration_layer(RPInfinity(), 1, 40).dims()) == 0


def test_vanishing_subspace_undetermined_on_window():
    m = to_finite(RPInfinity(), 6, truncated=True)
    with pytest.raises(UndeterminedError):
        vanishing_subspace(m, 0, 3, c_max=4)


def test_layers_are_nested():
    m = Tensor(DirectSum(point(1), point(2, 2)), Free(1, 256))
    prev = None
    for s in range(5):
        layer = filtration_layer(m, s, 40)
        if prev is not None:
            for d in range(41):
                assert prev.spaces[d].contains_all(layer.spaces[d])
        prev = layer


def test_rs_of_finite_module_is_degree_slice():
    m = rp_truncation(6)
    for s in range(1, 7):
        r = rs_layer(m, s, 6)
        assert r.dims[0] == 1 and sum(r.dims) == 1


@pytest.mark.parametrize("s, k", [(0, 1), (1, 2), (3, 3)])
def test_rs_of_point_tensor_f1(s, k):
    f1 = Free(1, 1024)
    m = Tensor(point(s, k), f1)
    r = rs_layer(m, s, 64 + s)
    assert [r.dim(e) for e in range(65)] == [k * f1.dim(e) for e in range(65)]
    for t in range(s + 3):
        if t != s:
            assert sum(rs_layer(m, t, 64 + s).dims) == 0


def test_rs_suspension_shift():
    rng = random.Random(4)
    for _ in range(6):
        m = random_finite_module(rng, top=6, max_dim=2)
        sm = to_finite(Suspension(m, 1), m.top_degree + 1)
        assert sum(rs_layer(sm, 0, sm.top_degree).dims) == 0
        for s in range(1, m.top_degree + 2):
            a = rs_layer(sm, s, sm.top_degree).dims
            b = rs_layer(m, s - 1, m.top_degree).dims
            assert list(a[: len(b)]) == list(b[: len(a)])


def test_reducedness():
    assert is_reduced(RPInfinity(), 40)
    assert not is_reduced(trivial_module(1), 1)
    assert is_reduced(Free(2, 20), 10)


def test_strong_f_iso_identity():
    rp = RPInfinity()
    ident = ModuleMap(rp, rp, lambda d, j: 1 << j)
    res = strong_f_iso(ident, 30)
    assert res.verdict == "yes" and res.dims_equal and len(res.dims) == 31


def test_strong_f_iso_tail_of_free1():
    f1 = Free(1, 4096)
    tail = Submodule(f1, lambda d: [1] if d >= 4 and f1.dim(d) else [], name="tail")
    res = strong_f_iso(tail.inclusion(), 64)
    # a strong F-isomorphism that is not onto
    assert res.verdict == "yes" and not res.dims_equal
    assert (2, 0, 1) in res.dims


def test_strong_f_iso_free1_in_rp():
    f1 = Free(1, 4096)
    res = strong_f_iso(ModuleMap(f1, RPInfinity(), lambda d, j: 1), 8)
    assert res.verdict == "no" and res.witness == (3, 1)


def test_strong_f_iso_rejects_non_injective():
    rp = RPInfinity()
    with pytest.raises(ValueError):
        strong_f_iso(ModuleMap(rp, rp, lambda d, j: 0), 4)


def test_sq_lower_kernel_examples():
    sf2 = trivial_module(1)
    assert sq_lower_kernel(sf2, 0).spaces[1].dim == 1
    p4 = truncated_polynomial(1, 4).module
    rep = sq_lower_kernel(p4, 0)
    assert [rep.spaces[d].dim for d in range(4)] == [0, 0, 1, 1]
    assert rep.closed


def test_sq_lower_kernel_large_h_closed():
    for m in random_corpus(3, 30, 8, 3):
        rep = sq_lower_kernel(m, m.top_degree)
        assert rep.closed


def test_saturate_trivial_cases():
    rp = RPInfinity()
    res = sq0_saturate(rp, lambda d: [1] if d else [], 8, 16)
    assert res.k == 0 and res.strong_f_iso.verdict == "yes"
    res = sq0_saturate(rp, lambda d: [], 8, 16)
    assert res.k == 0
    assert all(res.spaces[d].dim == rp.dim(d) for d in range(17))


def test_saturate_diagonal():
    h = DirectSum(Free(1, 4096), Free(1, 4096))
    res = sq0_saturate(h, lambda d: [0b11] if h.dim(d) else [], 8, 32)
    # Sq_0 is injective and preserves the diagonal, so the chain is constant
    assert res.k == 0 and res.strong_f_iso.verdict == "yes"
    assert all(res.spaces[d].dim == h.dim(d) for d in range(33))


def test_saturate_nontrivial_chain():
    # J = submodule generated by u^2 = span{u^(2^i), i >= 1}; Sq_0^{-1}(J) adds u
    rp = RPInfinity()
    res = sq0_saturate(rp, lambda d: [1] if d >= 2 and d & (d - 1) == 0 else [], 8, 16)
    assert res.k == 1
    assert res.chain[0][1].dim == 0 and res.chain[1][1].dim == 1
    # H' = Sq_0(H) + J: the even degrees plus J
    assert [res.spaces[d].dim for d in range(1, 9)] == [0, 1, 0, 1, 0, 1, 0, 1]
    assert res.strong_f_iso.verdict == "yes"


def test_filtration_table_outputs():
    table = filtration(rp_truncation(4), 2, 4)
    text = table.to_text()
    assert "c_max=16" in text and "degree_bound=4" in text
    doc = table.to_dict()
    assert doc["c_max"] == 16
    assert [r["M_s"] for r in doc["rows"] if r["s"] == 2] == [0, 0, 1, 1, 1]
