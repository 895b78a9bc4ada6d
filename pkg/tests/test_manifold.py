import json

import pytest

from freeloop.manifold import (ParseError, ValidationError, connected_sum_cp2, form_parity_check, hyperbolic,
                               inverse_intersection, load_manifold, make_manifold, parse_manifold,
                               reference_manifolds, validate)
from freeloop.scalars import FieldSpec, Q


def test_valid_examples():
    m = make_manifold(2, 4, [2, 2, 2], [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert m.u_degrees == (1, 1, 1)
    assert m.generators.equal_degree_flag
    m = make_manifold(3, 6, [3] * 4, [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    assert m.u_degrees == (2, 2, 2, 2)


def test_rank_too_small():
    with pytest.raises(ValidationError) as info:
        make_manifold(2, 4, [2, 2], [[0, 1], [1, 0]])
    assert any("r = 2 < 3" in e for e in info.value.errors)


def test_each_violation_reported():
    with pytest.raises(ValidationError) as info:
        make_manifold(2, 5, [2, 2, 2], [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    errs = info.value.errors
    assert any("3n - 2" in e for e in errs)
    assert any("degree mismatch" in e for e in errs)
    with pytest.raises(ValidationError) as info:
        make_manifold(2, 4, [2, 2, 2], [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    assert any("graded symmetry" in e for e in info.value.errors)
    with pytest.raises(ValidationError) as info:
        make_manifold(2, 4, [2, 2, 2], [[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert any("singular" in e for e in info.value.errors)
    with pytest.raises(ValidationError) as info:
        make_manifold(3, 6, [3, 3, 3, 3], [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert any("diagonal" in e for e in info.value.errors)


def test_inverse_examples():
    assert inverse_intersection(connected_sum_cp2()) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    h = hyperbolic(2)
    assert inverse_intersection(h) == [list(row) for row in h.intersection]
    m = hyperbolic(3)
    inv = inverse_intersection(m)
    assert inv[0][1] == -1 and inv[1][0] == 1


def test_invertible_mod_p():
    m = make_manifold(2, 4, [2, 2, 2], [[3, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValidationError):
        m.with_field(FieldSpec(3))
    assert m.with_field(FieldSpec(5)).c(0, 0) == 3


def test_validate_idempotent():
    for m in reference_manifolds():
        assert validate(m) == m


def test_form_parity():
    for m in reference_manifolds():
        assert form_parity_check(m) is True
    mixed = make_manifold(3, 7, [3, 4, 3, 4], [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert form_parity_check(mixed) is None
    assert not mixed.equal_degree


def test_parse_strict(tmp_path):
    obj = {"name": "x", "n": 2, "d": 4, "degrees": [2, 2, 2], "intersection": [[1, 0, 0], [0, 1, 0], [0, 0, "1/1"]],
           "field": {"Fp": 7}}
    m = validate(parse_manifold(obj))
    assert m.field == FieldSpec(7)
    with pytest.raises(ParseError):
        parse_manifold(dict(obj, extra=1))
    with pytest.raises(ParseError):
        parse_manifold({k: v for k, v in obj.items() if k != "d"})
    with pytest.raises(ParseError):
        parse_manifold(dict(obj, degrees=[2.0, 2, 2]))
    p = tmp_path / "m.json"
    p.write_text(json.dumps(obj))
    assert load_manifold(p, Q).field == Q
    assert load_manifold(p).to_json()["field"] == {"Fp": 7}
    p.write_text("{")
    with pytest.raises(ParseError):
        load_manifold(p)
