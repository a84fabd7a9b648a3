"""Shared fixtures and brute-force reference computations.

The reference functions below work directly on Fraction distances over all
*ordered* tuples (itertools.permutations), so they share nothing with the
classifier's canonical-cycle enumeration or its integer scaling.
"""

import itertools
from fractions import Fraction

import pytest

from polyfix.instances import em_2_1, em_2_2, ex_2_1, sec3_example


def ref_perimeter(space, t):
    return sum((space.d(t[i], t[(i + 1) % len(t)]) for i in range(len(t))), Fraction(0))


def ref_total(space, t):
    return sum((space.d(a, b) for a, b in itertools.combinations(t, 2)), Fraction(0))


def _ratio_max(ratios):
    """Max of (num, den) pairs; None (infeasible) if some den == 0 < num."""
    best = None
    for num, den in ratios:
        if den == 0:
            if num > 0:
                return None
            continue
        r = Fraction(num) / den
        best = r if best is None or r > best else best
    return Fraction(0) if best is None else best


def ref_perimetric(space, T, k):
    img = T.image
    return _ratio_max(
        (ref_perimeter(space, [img[x] for x in t]), ref_perimeter(space, t))
        for t in itertools.permutations(range(space.n), k)
    )


def ref_kannan_perimetric(space, T, k):
    img = T.image
    return _ratio_max(
        (ref_perimeter(space, [img[x] for x in t]), sum(space.d(x, img[x]) for x in t))
        for t in itertools.permutations(range(space.n), k)
    )


def ref_total_pairwise(space, T, k):
    img = T.image
    return _ratio_max(
        (ref_total(space, [img[x] for x in t]), ref_total(space, t))
        for t in itertools.combinations(range(space.n), k)
    )


def ref_banach(space, T):
    img = T.image
    return _ratio_max(
        (space.d(img[x], img[y]), space.d(x, y)) for x, y in itertools.permutations(range(space.n), 2)
    )


def ref_kannan(space, T):
    img = T.image
    return _ratio_max(
        (space.d(img[x], img[y]), space.d(x, img[x]) + space.d(y, img[y]))
        for x, y in itertools.combinations(range(space.n), 2)
    )


@pytest.fixture
def em21():
    return em_2_1()


@pytest.fixture
def ex21():
    return ex_2_1()


@pytest.fixture
def sec3():
    return sec3_example()


@pytest.fixture(params=[4, 5, 6])
def em22(request):
    return em_2_2(request.param)


# acceptance verdict lines, echoed in the terminal summary even without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
