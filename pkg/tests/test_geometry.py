import json
import math

import pytest

from quasispec.geometry import (GeometryError, PolygonSpec, ZigzagSpec, classify_angle, decompose,
                                force_angle, load_spec, parse_angle_value, spec_from_dict,
                                zigzag_components)

PI = math.pi


@pytest.mark.parametrize("j, kind, k, parity", [
    (2, "exceptional", 1, -1), (3, "special", 1, -1),
    (4, "exceptional", 2, 1), (5, "special", 2, 1), (6, "exceptional", 3, -1),
])
def test_classification_of_pi_over_j(j, kind, k, parity):
    a = classify_angle(PI / j)
    assert (a.kind, a.k, a.parity) == (kind, k, parity)


def test_special_and_exceptional_trig_values_are_exact():
    third = classify_angle(PI / 3)
    assert third.sin_mu == -1.0 and third.cos_mu == 0.0
    fifth = classify_angle(PI / 5)
    assert fifth.sin_mu == 1.0
    quarter = classify_angle(PI / 4)
    assert quarter.sin_mu == 0.0 and quarter.cos_mu == 1.0
    half = classify_angle(PI / 2)
    assert half.cos_mu == -1.0


def test_generic_angle_uses_mu():
    a = classify_angle(2.0)
    assert a.kind == "generic" and a.parity is None
    mu = PI ** 2 / 4.0
    assert a.sin_mu == pytest.approx(math.sin(mu))
    assert a.tan_half_mu == pytest.approx(math.tan(mu / 2))


def test_tolerance_decides_classification():
    near = PI / 3 + 1e-9
    assert classify_angle(near).kind == "generic"
    assert classify_angle(near, tol_angle=1e-8).kind == "special"


@pytest.mark.parametrize("bad", [0.0, -1.0, PI, 4.0])
def test_angles_outside_range_rejected(bad):
    with pytest.raises(GeometryError):
        classify_angle(bad)


def test_unsafe_angles_allow_reflex():
    assert classify_angle(4.0, unsafe_angles=True).kind == "generic"


def test_force_angle_overrides():
    a = force_angle(1.0, "special", k=1)
    assert a.kind == "special" and a.parity == -1
    assert force_angle(PI / 3, "generic").kind == "generic"
    with pytest.raises(GeometryError):
        force_angle(1.0, "weird")


@pytest.mark.parametrize("text, value", [
    ("pi/3", PI / 3), ("3pi/5", 3 * PI / 5), ("2*pi/3", 2 * PI / 3), ("pi", PI), ("0.5", 0.5), (1.25, 1.25),
])
def test_parse_angle_value(text, value):
    assert parse_angle_value(text) == pytest.approx(value)


def test_parse_angle_value_rejects_garbage():
    with pytest.raises(GeometryError):
        parse_angle_value("tau/2")


def test_polygon_validation():
    with pytest.raises(GeometryError):
        PolygonSpec.from_values([1.0, 1.0], [1.0])
    with pytest.raises(GeometryError):
        PolygonSpec.from_values([1.0], [0.0])
    with pytest.raises(GeometryError):
        PolygonSpec.from_values([1.0], [math.inf])
    p = PolygonSpec.from_values([1.0, 2.0], [0.5, 1.5])
    assert p.n == 2 and p.perimeter == 2.0 and not p.is_exceptional


def test_zigzag_validation():
    with pytest.raises(GeometryError):
        ZigzagSpec.from_values([1.0], [1.0])
    with pytest.raises(GeometryError):
        ZigzagSpec.from_values([], [1.0], "X", "N")
    z = ZigzagSpec.from_values([1.0], [1.0, 2.0], "D", "N")
    assert z.n == 2 and z.length == 3.0


def test_decomposition_covers_every_side_once():
    p = PolygonSpec.from_values([1.0, PI / 2, 2.0, 1.5, PI / 4], [1, 2, 3, 4, 5])
    dec = decompose(p)
    assert dec.K == 2
    sides = []
    for c in dec.components:
        sides += [(c.first_side + i) % p.n for i in range(len(c.lengths))]
        assert len(c.lengths) == len(c.angles) + 1
        assert c.left.is_exceptional and c.right.is_exceptional
    assert sorted(sides) == list(range(p.n))
    # pi/2 is odd, pi/4 even: both components change parity
    assert dec.n_odd == 2


def test_single_exceptional_vertex_gives_one_closed_component():
    p = PolygonSpec.from_values([PI / 2, 1.0, 2.0], [1, 1, 1])
    (comp,) = decompose(p).components
    assert comp.left is comp.right and not comp.odd and comp.length == 3


def test_decompose_rejects_non_exceptional():
    with pytest.raises(GeometryError):
        decompose(PolygonSpec.from_values([1.0], [1.0]))


def test_zigzag_components():
    z = ZigzagSpec.from_values([1.0, PI / 2, 2.0, PI / 4, 1.2], [1, 2, 3, 4, 5, 6])
    first, middle, last = zigzag_components(z)
    assert len(first[1]) == 2 and len(middle) == 1 and len(last[1]) == 2
    assert middle[0].lengths == (3.0, 4.0)


def test_spec_from_dict_and_file(tmp_path):
    data = {"angles": ["pi/3", {"value": 1.0, "force": "special", "k": 1}], "lengths": [1, "pi"]}
    p = spec_from_dict(data)
    assert isinstance(p, PolygonSpec) and p.angles[1].is_special and p.lengths[1] == pytest.approx(PI)
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"angles": [2.0], "lengths": [1, 1], "bc": ["d", "n"]}))
    z = load_spec(path)
    assert isinstance(z, ZigzagSpec) and (z.bc_start, z.bc_end) == ("D", "N")


@pytest.mark.parametrize("bad", [[], {"angles": [1.0]}, {"angles": [1.0], "lengths": [1], "bc": ["N"]}])
def test_spec_from_dict_errors(bad):
    with pytest.raises(GeometryError):
        spec_from_dict(bad)


def test_load_spec_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(GeometryError):
        load_spec(path)
