import json

import pytest
from hypothesis import given, settings, strategies as st

from nilops.constructions import algebra_tensor, exterior_algebra, random_corpus, rp_truncation, truncated_polynomial
from nilops.modules import AdemError, FiniteUnstableAlgebra
from nilops.parser import (
    ParseError,
    SchemaError,
    dumps_module,
    load_module,
    parse_element,
    parse_op,
    print_op,
    save_module,
)
from nilops.steenrod import AdmissibleSum, adem_normalize, full_basis


def test_parse_examples():
    assert parse_op("Sq4 Sq4").terms == ((4, 4),)
    assert parse_op("Sq3 Sq1 + Sq4").terms == ((3, 1), (4,))
    assert parse_op("1").terms == ((),)
    assert parse_op("Sq2Sq1").terms == ((2, 1),)
    assert parse_op("  0 ").terms == ()


@pytest.mark.parametrize(
    "text, pos",
    [("Sq0", 2), ("", 0), ("Sq", 2), ("Sq01", 2), ("Sq1 +", 5), ("Sq1 * Sq2", 4), ("sq1", 0), ("Sq 1", 2),
     ("Sq1234567", 2), ("0 + Sq1", 2)],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_op(text)
    assert exc.value.position == pos
    assert 0 <= exc.value.position <= len(text.encode())


@settings(max_examples=500)
@given(st.binary(max_size=40))
def test_fuzz_never_crashes(data):
    try:
        parse_op(data)
    except ParseError as exc:
        assert 0 <= exc.position <= len(data)


@settings(max_examples=300)
@given(st.text(alphabet="Sq0123456789+ 1", max_size=30))
def test_fuzz_near_grammar(text):
    try:
        e = parse_op(text)
    except ParseError:
        return
    assert adem_normalize(parse_op(print_op(e))) == adem_normalize(e)


def test_canonical_roundtrip_through_degree_12():
    for d in range(13):
        basis = full_basis(d)
        for mask in range(1, 1 << len(basis)):
            x = AdmissibleSum([basis[j] for j in range(len(basis)) if mask >> j & 1])
            assert adem_normalize(parse_op(print_op(x))) == x
            assert print_op(adem_normalize(parse_op(print_op(x)))) == print_op(x)


@pytest.mark.parametrize(
    "obj",
    [rp_truncation(5), truncated_polynomial(1, 4), exterior_algebra(1, 2),
     algebra_tensor(truncated_polynomial(1, 2), exterior_algebra(2))] + random_corpus(2, 10, 8, 3),
)
def test_module_roundtrip(obj):
    doc = save_module(obj)
    loaded = load_module(json.dumps(doc))
    assert save_module(loaded) == doc
    assert dumps_module(load_module(dumps_module(obj))) == dumps_module(obj)
    if isinstance(obj, FiniteUnstableAlgebra):
        assert loaded == obj
    else:
        assert loaded == obj


def test_load_suspension_f2():
    m = load_module('{"top_degree": 1, "dims": [0, 1]}')
    assert m.dims == (0, 1)


def test_load_rp2():
    m = load_module({"top_degree": 2, "dims": [0, 1, 1], "ops": {"Sq1": [[[]], [[1]]]}})
    assert m.act_basis(1, 1, 0) == 1


def test_load_adem_violation():
    doc = {"top_degree": 6, "dims": [0, 0, 1, 0, 1, 0, 1],
           "ops": {"Sq2": [[[]], [], [[1]], [], [[1]]]}}
    with pytest.raises(AdemError) as exc:
        load_module(doc)
    assert "Sq2 Sq2" in str(exc.value)


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"dims": [1]}, "top_degree"),
        ({"top_degree": 1, "dims": [1]}, "dims"),
        ({"top_degree": 1, "dims": [0, 1], "ops": {"Sq0": []}}, "ops.Sq0"),
        ({"top_degree": 2, "dims": [0, 1, 1], "ops": {"Sq1": [[[]], [[2]]]}}, "ops.Sq1[1][0][0]"),
        ({"top_degree": 1, "dims": [0, 1], "bogus": 1}, "bogus"),
        ({"top_degree": 1, "dims": [0, 1], "labels": {"3,0": "x"}}, "labels.3,0"),
        ({"top_degree": 2, "dims": [1, 1, 1], "products": {"1,1": [[[1, 1]]]}}, "products.1,1[0][0]"),
    ],
)
def test_schema_errors_name_field(doc, path):
    with pytest.raises(SchemaError) as exc:
        load_module(doc)
    assert exc.value.path == path


def test_invalid_json():
    with pytest.raises(SchemaError):
        load_module("{not json")


def test_parse_element():
    assert parse_element("1:0 + 2:0,1") == {1: 1, 2: 3}
    assert parse_element("3:0 + 3:0") == {3: 0}
    with pytest.raises(ParseError):
        parse_element("x")
