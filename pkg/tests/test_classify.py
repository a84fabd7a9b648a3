from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    ref_banach,
    ref_kannan,
    ref_kannan_perimetric,
    ref_perimetric,
    ref_total_pairwise,
)
from polyfix.classify import (
    BANACH,
    KANNAN,
    KANNAN_PERIMETRIC,
    PAPER_ORDERING,
    PERIMETRIC,
    TOTAL_PAIRWISE,
    banach_coefficient,
    classify_all,
    kannan_coefficient,
    kannan_perimetric_coefficient,
    perimetric_coefficient,
    ratio_for_cycle,
    threshold,
    total_distance_coefficient,
)
from polyfix.metric import FiniteMetricSpace, SelfMap, perimeter
from polyfix.oracle import random_map, random_space

F = Fraction


def test_thresholds():
    assert threshold(BANACH) == 1
    assert threshold(KANNAN) == F(1, 2)
    assert threshold(PERIMETRIC, 4) == threshold(TOTAL_PAIRWISE, 4) == 1
    assert threshold(KANNAN_PERIMETRIC, 5) == F(2, 5)


def test_em21(em21):
    s, T = em21.space, em21.map
    tp = total_distance_coefficient(s, T, 4)
    assert (tp.infimum, tp.member) == (F(10, 11), True)
    p = perimetric_coefficient(s, T, 4)
    assert (p.infimum, p.member) == (F(8, 7), False)
    assert s.names(p.witness) == ["x1", "x2", "x4", "x3"]
    assert (p.lhs, p.rhs) == (8, 7)
    assert banach_coefficient(s, T).infimum == 2
    assert s.names(banach_coefficient(s, T).witness) == ["x2", "x4"]


def test_ex21(ex21):
    s, T = ex21.space, ex21.map
    assert perimetric_coefficient(s, T, 7).infimum == F(7, 9)
    r3 = perimetric_coefficient(s, T, 3)
    assert (r3.infimum, r3.member) == (1, False)
    assert s.names(r3.witness) == ["x4", "x5", "x6"]


def test_em22(em22):
    k = em22.k
    r = perimetric_coefficient(em22.space, em22.map, k)
    assert r.infimum == F(k, k + 2) and r.member


def test_sec3_semantics(sec3):
    s, T = sec3.space, sec3.map
    strict = kannan_perimetric_coefficient(s, T, 5)
    assert (strict.infimum, strict.member) == (F(5, 12), False)
    assert s.names(strict.witness) == ["x1", "x3", "x2", "x4", "x5"]
    assert strict.threshold == F(2, 5)
    one_order = kannan_perimetric_coefficient(s, T, 5, PAPER_ORDERING)
    assert one_order.infimum == F(1, 3) and one_order.member
    g = kannan_coefficient(s, T, 5)
    assert g.infimum == 1 and g.flags["below_inverse_k"] is False


def test_ratio_for_cycle_examples(ex21, sec3):
    assert ratio_for_cycle(ex21.space, ex21.map, range(7), PERIMETRIC) == (6, 9)
    assert ratio_for_cycle(sec3.space, sec3.map, range(5), KANNAN_PERIMETRIC) == (4, 12)
    s = ex21.space
    ident = SelfMap.identity(7)
    cyc = (0, 3, 5)
    assert ratio_for_cycle(s, ident, cyc, PERIMETRIC) == (perimeter(s, cyc), perimeter(s, cyc))
    with pytest.raises(ValueError):
        ratio_for_cycle(s, ident, (0, 0, 1), PERIMETRIC)


def test_constant_map_is_zero(ex21):
    s = ex21.space
    T = SelfMap.constant(7, 2)
    rep = classify_all(s, T, 4)
    for name in (BANACH, KANNAN, PERIMETRIC, TOTAL_PAIRWISE, KANNAN_PERIMETRIC):
        assert rep.results[name].infimum == 0, name
        assert rep.results[name].member


def test_identity_map(ex21):
    s, T = ex21.space, SelfMap.identity(7)
    assert perimetric_coefficient(s, T, 3).infimum == 1
    assert banach_coefficient(s, T).infimum == 1
    kp = kannan_perimetric_coefficient(s, T, 3)
    assert kp.infeasible and not kp.member
    # d(x, Tx) vanishes everywhere while d(Tx, Ty) does not
    assert kannan_coefficient(s, T).infeasible
    # a constant map on a fixed point gives 0/0 only, which is skipped
    assert kannan_coefficient(s, SelfMap.constant(7, 0)).infimum == 0


def test_bad_arguments(em21):
    s, T = em21.space, em21.map
    with pytest.raises(ValueError):
        perimetric_coefficient(s, T, 5)
    with pytest.raises(ValueError):
        perimetric_coefficient(s, T, 2)
    with pytest.raises(ValueError):
        perimetric_coefficient(s, SelfMap([0, 1, 2]), 3)
    with pytest.raises(ValueError):
        perimetric_coefficient(s, T, 3, semantics="loose")


def test_parallel_scan_matches_serial():
    space = random_space(7, 9)
    T = random_map(8, 9)
    for fn in (perimetric_coefficient, kannan_perimetric_coefficient):
        assert fn(space, T, 5, jobs=2) == fn(space, T, 5)


def test_classify_all_alternates(sec3):
    rep = classify_all(sec3.space, sec3.map, 5)
    assert rep.kannan_perimetric_alt.semantics == PAPER_ORDERING
    assert rep.kannan_perimetric_alt.infimum == F(1, 3)
    assert rep.kannan_below_inverse_k is False


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(3, 6), st.sampled_from(["closure", "grid"]))
def test_against_brute_force(seed, n, model):
    space = random_space(seed, n, model)
    T = random_map(seed + 1, n)
    assert banach_coefficient(space, T).infimum == ref_banach(space, T)
    assert kannan_coefficient(space, T).infimum == ref_kannan(space, T)
    for k in range(3, n + 1):
        assert perimetric_coefficient(space, T, k).infimum == ref_perimetric(space, T, k)
        assert kannan_perimetric_coefficient(space, T, k).infimum == ref_kannan_perimetric(space, T, k)
        assert total_distance_coefficient(space, T, k).infimum == ref_total_pairwise(space, T, k)


def test_rational_distances_brute_force():
    space = FiniteMetricSpace("abcd", [[0, F(1, 2), F(2, 3), 1], [F(1, 2), 0, F(1, 3), F(2, 3)],
                                       [F(2, 3), F(1, 3), 0, F(1, 2)], [1, F(2, 3), F(1, 2), 0]])
    T = SelfMap([1, 2, 2, 0])
    for k in (3, 4):
        assert perimetric_coefficient(space, T, k).infimum == ref_perimetric(space, T, k)
        assert kannan_perimetric_coefficient(space, T, k).infimum == ref_kannan_perimetric(space, T, k)
