import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyfix.metric import (
    FiniteMetricSpace,
    InstanceFormatError,
    MetricAxiomError,
    MetricStructureError,
    SelfMap,
    apply_map,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    parse_rational,
    perimeter,
    total_pairwise,
    validate_metric,
)
from polyfix.oracle import random_space

EM21 = [[0, 2, 2, 2], [2, 0, 2, 1], [2, 2, 0, 2], [2, 1, 2, 0]]


def test_em21_matrix_is_valid():
    assert validate_metric(EM21).valid


def test_two_point_space_valid():
    assert validate_metric([[0, 1], [1, 0]]).valid


def test_triangle_violation_reported():
    rep = validate_metric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert not rep.valid
    assert [(v.axiom, v.indices) for v in rep.violations] == [("triangle", (0, 1, 2))]


@pytest.mark.parametrize(
    "matrix, axiom",
    [
        ([[1, 1], [1, 0]], "identity"),
        ([[0, 1], [2, 0]], "symmetry"),
        ([[0, 0], [0, 0]], "positivity"),
    ],
)
def test_each_axiom_detected(matrix, axiom):
    assert axiom in {v.axiom for v in validate_metric(matrix).violations}


@pytest.mark.parametrize("matrix", [[[0, 1]], [[0, 1], [1]], [[0, -1], [-1, 0]], []])
def test_structural_rejection(matrix):
    with pytest.raises(MetricStructureError):
        validate_metric(matrix)


def test_space_constructor_rejects_non_metric():
    with pytest.raises(MetricAxiomError):
        FiniteMetricSpace("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])


@pytest.mark.parametrize("text, value", [("3", 3), ("2/4", Fraction(1, 2)), (7, 7), (" 5 / 3 ", Fraction(5, 3))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1.5", "1/0", "abc", "1/2/3", 1.5, True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(InstanceFormatError):
        parse_rational(bad)


def test_perimeter_examples(em21, ex21):
    s = em21.space
    assert perimeter(s, [0, 1, 3, 2]) == 7
    assert perimeter(s, [1, 1, 1]) == 0
    assert perimeter(ex21.space, range(7)) == 9


def test_total_pairwise_examples(em21):
    s, T = em21.space, em21.map
    assert total_pairwise(s, [0, 1, 2, 3]) == 11
    assert apply_map(T, [0, 1, 2, 3]) == (0, 2, 3, 0)
    assert total_pairwise(s, [0, 2, 3, 0]) == 10
    assert total_pairwise(s, [2, 2]) == 0


def test_apply_map(ex21):
    assert apply_map(ex21.map, [3, 4, 5]) == (4, 5, 3)
    assert apply_map(SelfMap.identity(5), [4, 0, 2]) == (4, 0, 2)


def test_functional_preconditions(em21):
    with pytest.raises(ValueError):
        perimeter(em21.space, [0, 1])
    with pytest.raises(ValueError):
        total_pairwise(em21.space, [0])
    with pytest.raises(IndexError):
        perimeter(em21.space, [0, 1, 9])


def test_selfmap_totality():
    with pytest.raises(ValueError):
        SelfMap([0, 3, 1])
    with pytest.raises(ValueError):
        SelfMap([0, 1], n=3)


def test_scaled_space_keeps_ratios(em21):
    s = em21.space.scaled(Fraction(3, 7))
    assert s.scale == 7
    assert perimeter(s, [0, 1, 3, 2]) == Fraction(3, 7) * 7


# -- instance documents ---------------------------------------------------

def _doc():
    return {"points": ["a", "b", "c"], "distances": [[0, "1/2", 1], ["1/2", 0, "1/2"], [1, "1/2", 0]],
            "map": {"a": "b", "b": "b", "c": "a"}}


def test_instance_round_trip(tmp_path):
    inst = instance_from_dict(_doc())
    assert inst.space.d(0, 1) == Fraction(1, 2)
    assert inst.map.image == (1, 1, 0)
    path = tmp_path / "i.json"
    path.write_text(json.dumps(instance_to_dict(inst.space, inst.map)))
    again = load_instance(path)
    assert again.space == inst.space and again.map == inst.map


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d["map"].pop("c"), "map"),
        (lambda d: d["map"].update(c="z"), "map['c']"),
        (lambda d: d["distances"][0].__setitem__(1, "0.5"), "distances[0][1]"),
        (lambda d: d["distances"].pop(), "distances"),
        (lambda d: d.pop("points"), "$"),
        (lambda d: d["distances"][0].__setitem__(2, 5), "distances"),
    ],
)
def test_instance_rejections(mutate, where):
    doc = _doc()
    mutate(doc)
    with pytest.raises(InstanceFormatError) as exc:
        instance_from_dict(doc)
    assert exc.value.location == where


def test_load_instance_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InstanceFormatError):
        load_instance(path)


# -- properties -----------------------------------------------------------

spaces = st.builds(lambda seed, n: random_space(seed, n), st.integers(0, 2**32), st.integers(3, 7))


@settings(max_examples=60, deadline=None)
@given(spaces, st.data())
def test_perimeter_properties(space, data):
    n = space.n
    k = data.draw(st.integers(3, n))
    t = data.draw(st.permutations(range(n)))[:k]
    p = perimeter(space, t)
    assert p > 0
    rot = data.draw(st.integers(0, k - 1))
    assert perimeter(space, t[rot:] + t[:rot]) == p
    assert perimeter(space, t[::-1]) == p
    s = total_pairwise(space, t)
    assert p <= 2 * s
    if k == 3:
        assert p == s
    shuffled = data.draw(st.permutations(t))
    assert total_pairwise(space, shuffled) == s


@settings(max_examples=40, deadline=None)
@given(spaces, st.data())
def test_repeated_tuples_allowed(space, data):
    t = data.draw(st.lists(st.integers(0, space.n - 1), min_size=3, max_size=6))
    assert perimeter(space, t) <= 2 * total_pairwise(space, t)
