import json

import pytest
from hypothesis import given, strategies as st

from qpicrystal.cartan import (CATALOG, CartanDatum, check_dominant, depths_of_height, get_datum,
                               osp, pairing, validate)
from qpicrystal.errors import InvalidDatum, NonDominantWeight


def failing(D):
    return {r.condition for r in validate(D) if not r.ok}


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_valid(name):
    assert CATALOG[name].is_valid()


def test_osp14_shape():
    D = osp(2)
    assert D.A == ((2, -2), (-1, 2))
    assert D.parity == (1, 0) and D.d == (1, 2)
    assert D.symmetric_form(0, 1) == D.symmetric_form(1, 0) == -2


@pytest.mark.parametrize("A,p,d,bad", [
    (((2, -1), (-1, 2)), (1, 0), (1, 1), {"d", "f"}),
    (((4, -2), (-1, 2)), (1, 0), (1, 2), {"a"}),
    (((2, 2), (1, 2)), (1, 0), (1, 2), {"b"}),
    (((2, 0), (-1, 2)), (1, 0), (1, 2), {"c", "e"}),
    (((2, -2), (-1, 2)), (1, 0), (2, 4), {"e", "f"}),
    (((2,),), (0,), (1,), {"f", "odd-nonempty"}),
    (((2,),), (0,), (2,), {"e", "odd-nonempty"}),
])
def test_conditions_named(A, p, d, bad):
    assert failing(CartanDatum(A, p, d)) == bad


def test_shape_mismatch():
    assert failing(CartanDatum(((2, -1),), (1,), (1,))) == {"shape"}


def test_require_valid_raises():
    with pytest.raises(InvalidDatum):
        CartanDatum(((2, -1), (-1, 2)), (1, 0), (1, 1)).require_valid()


def test_json_roundtrip(tmp_path):
    D = osp(3)
    assert CartanDatum.from_json(json.dumps(D.to_json())) == D
    path = tmp_path / "d.json"
    path.write_text(json.dumps(D.to_json()))
    assert get_datum(str(path)) == D
    assert get_datum(json.dumps(D.to_json())) == D


@pytest.mark.parametrize("text", ['{"A": [[2]]}', "{not json", "/nonexistent/datum.json"])
def test_bad_json(text):
    with pytest.raises(InvalidDatum):
        get_datum(text)


def test_pairing():
    D = osp(2)
    # <alpha_1^vee, omega_1 - (alpha_1 + alpha_2)> = 1 - 2 + 2
    assert pairing(D, (1, 0), (1, 1), 0) == 1
    assert pairing(D, (1, 0), (1, 1), 1) == -1


def test_dominance():
    D = osp(2)
    assert check_dominant(D, [1, 2]) == (1, 2)
    with pytest.raises(NonDominantWeight):
        check_dominant(D, (1, -1))
    with pytest.raises(NonDominantWeight):
        check_dominant(D, (1,))


@given(st.integers(1, 4), st.integers(0, 6))
def test_depths_of_height(rank, h):
    ds = depths_of_height(rank, h)
    assert ds == sorted(set(ds))
    assert all(len(x) == rank and sum(x) == h and min(x) >= 0 for x in ds)
    from math import comb
    assert len(ds) == comb(h + rank - 1, rank - 1)


@given(st.integers(1, 5))
def test_osp_family_valid(n):
    assert osp(n).is_valid()
