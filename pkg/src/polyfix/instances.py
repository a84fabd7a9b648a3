"""Built-in worked examples with their expected exact values.

Each expected entry carries a provenance tag: ``printed`` values appear in
the source text verbatim; ``derived`` values were recomputed by exhaustive
enumeration and carry a note on how.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import classify, dynamics
from .metric import FiniteMetricSpace, SelfMap, apply_map, perimeter, total_pairwise

PRINTED = "printed"
DERIVED = "derived"


@dataclass(frozen=True)
class Expected:
    quantity: str
    value: Any
    provenance: str
    note: str = ""


@dataclass(frozen=True)
class WorkedExample:
    id: str
    k: int
    space: FiniteMetricSpace
    map: SelfMap
    expected: tuple[Expected, ...]
    notes: tuple[str, ...] = field(default=())


def _two_level(n: int, near: int, far: int, prefix: str) -> FiniteMetricSpace:
    """n-1 points at mutual distance ``near``, the last at ``far`` from all."""
    labels = [f"{prefix}{i}" for i in range(1, n + 1)]
    dist = [[0 if i == j else (far if n - 1 in (i, j) else near) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(labels, dist)


def em_2_1() -> WorkedExample:
    labels = ["x1", "x2", "x3", "x4"]
    d = [
        [0, 2, 2, 2],
        [2, 0, 2, 1],
        [2, 2, 0, 2],
        [2, 1, 2, 0],
    ]
    space = FiniteMetricSpace(labels, d)
    T = SelfMap([0, 2, 3, 0])
    F = Fraction
    return WorkedExample(
        "em_2_1", 4, space, T,
        (
            Expected("S(x1,x2,x3,x4)", F(11), PRINTED),
            Expected("S(Tx1,Tx2,Tx3,Tx4)", F(10), PRINTED),
            Expected("P(x1,x2,x4,x3)", F(7), PRINTED),
            Expected("P(Tx1,Tx2,Tx4,Tx3)", F(8), PRINTED),
            Expected("total_pairwise(4).infimum", F(10, 11), DERIVED, "single 4-subset"),
            Expected("total_pairwise(4).member", True, PRINTED),
            Expected("perimetric(4).infimum", F(8, 7), DERIVED, "exhaustive over 3 polygons"),
            Expected("perimetric(4).witness", ("x1", "x2", "x4", "x3"), PRINTED),
            Expected("perimetric(4).member", False, PRINTED),
            Expected("banach.infimum", F(2), DERIVED, "all 6 pairs"),
        ),
    )


def ex_2_1() -> WorkedExample:
    space = _two_level(7, 1, 2, "x")
    T = SelfMap([0, 2, 1, 4, 5, 3, 0])
    F = Fraction
    return WorkedExample(
        "ex_2_1", 7, space, T,
        (
            Expected("P(x1,...,x7)", F(9), PRINTED),
            Expected("P(Tx1,...,Tx7)", F(6), PRINTED),
            Expected("perimetric(7).infimum", F(7, 9), DERIVED, "exhaustive over 360 polygons"),
            Expected("perimetric(7).member", True, PRINTED),
            Expected("perimetric(3).infimum", F(1), DERIVED, "exhaustive over 35 triangles"),
            Expected("perimetric(3).witness", ("x4", "x5", "x6"), PRINTED),
            Expected("perimetric(3).member", False, PRINTED),
            Expected("fixed_points", ("x1",), PRINTED),
            Expected("period_2", ("x2", "x3"), PRINTED),
            Expected("period_3", ("x4", "x5", "x6"), DERIVED, "direct iteration of the map"),
        ),
        notes=(
            "the text lists x5, x6, x7 as the points of prime period 3, but the map as "
            "printed sends x7 to the fixed point x1; the computed period-3 set is {x4, x5, x6}",
        ),
    )


def em_2_2(k: int = 5) -> WorkedExample:
    if k < 3:
        raise ValueError("k must be at least 3")
    space = _two_level(k, 1, 2, "p")
    T = SelfMap(list(range(k - 1)) + [0])
    F = Fraction
    return WorkedExample(
        f"em_2_2:{k}", k, space, T,
        (
            Expected(f"perimetric({k}).infimum", F(k, k + 2), DERIVED,
                     "preimage perimeter is always k+2, image perimeter at most k"),
            Expected(f"perimetric({k}).member", True, PRINTED),
            Expected("theorem.hypotheses_hold", True, PRINTED),
            Expected("fixed_points", tuple(f"p{i}" for i in range(1, k)), DERIVED,
                     "map read as fixing p1..p(k-1), p(k) -> p1"),
            Expected("fixed_point_count", k - 1, DERIVED, "equals the k-1 upper bound"),
        ),
        notes=(
            "the text states the fixed points are {p1, p3, ..., p(k-1)}; the map as written "
            "fixes every point but p(k), giving k-1 fixed points",
        ),
    )


def sec3_example() -> WorkedExample:
    space = _two_level(5, 1, 9, "x")
    T = SelfMap([1, 2, 3, 3, 0])
    F = Fraction
    return WorkedExample(
        "sec3_example", 5, space, T,
        (
            Expected("P(Tx1,...,Tx5)", F(4), PRINTED),
            Expected("sum d(xi,Txi)", F(12), PRINTED),
            Expected("kannan_perimetric(5).paper_ordering", F(1, 3), PRINTED),
            Expected("kannan_perimetric(5).infimum", F(5, 12), DERIVED, "exhaustive over 12 polygons"),
            Expected("kannan_perimetric(5).witness", ("x1", "x3", "x2", "x4", "x5"), DERIVED,
                     "last maximiser in enumeration order"),
            Expected("kannan_perimetric(5).member", False, DERIVED, "5/12 >= 2/5"),
            Expected("fixed_points", ("x4",), PRINTED),
            Expected("kannan.infimum", F(1), DERIVED, "all 10 pairs"),
        ),
        notes=(
            "the text checks one ordering and reports mu = 1/3; the ordering (x1,x3,x2,x4,x5) "
            "gives image perimeter 5, so under the all-orderings reading the map is not a "
            "Kannan-type perimetric contraction on 5-polygons",
        ),
    )


REGISTRY: dict[str, Callable[..., WorkedExample]] = {
    "em_2_1": em_2_1,
    "ex_2_1": ex_2_1,
    "em_2_2": em_2_2,
    "sec3_example": sec3_example,
}


def get_instance(name: str) -> WorkedExample:
    """Look up ``name``; ``em_2_2`` accepts a size suffix, e.g. ``em_2_2:6``."""
    base, _, arg = name.partition(":")
    if base not in REGISTRY:
        raise KeyError(f"unknown instance {name!r}; known: {sorted(REGISTRY)}")
    if arg:
        if base != "em_2_2":
            raise KeyError(f"instance {base!r} takes no parameter")
        return REGISTRY[base](int(arg))
    return REGISTRY[base]()


# Evaluation of expected quantities.  Quantity names form a tiny grammar:
#   S(a,b,...) / P(a,b,...)         functionals on labels; "Ta" means the image of a,
#                                   "a1,...,an" expands to every point in order
#   <class>(k).<infimum|member|witness|paper_ordering>, banach.infimum, kannan.infimum
#   fixed_points, fixed_point_count, period_<p>, theorem.hypotheses_hold, sum d(xi,Txi)

_FUNCTIONAL = re.compile(r"^([SP])\((.*)\)$")
_COEFF = re.compile(r"^(\w+)(?:\((\d+)\))?\.(infimum|member|witness|paper_ordering)$")


def _expand(inst: WorkedExample, args: str) -> list[int]:
    space, T = inst.space, inst.map
    parts = [a.strip() for a in args.split(",")]
    image = parts[0].startswith("T")
    if "..." in parts:
        names = list(space.labels)
    else:
        names = [p[1:] if image else p for p in parts]
    idx = [space.index(nm) for nm in names]
    return list(apply_map(T, idx)) if image else idx


def evaluate(inst: WorkedExample, quantity: str) -> Any:
    space, T, k = inst.space, inst.map, inst.k
    m = _FUNCTIONAL.match(quantity)
    if m:
        fn = total_pairwise if m.group(1) == "S" else perimeter
        return fn(space, _expand(inst, m.group(2)))
    if quantity == "sum d(xi,Txi)":
        return sum((space.d(i, T(i)) for i in range(space.n)), Fraction(0))
    if quantity == "fixed_points":
        return tuple(space.names(sorted(dynamics.fixed_points(T))))
    if quantity == "fixed_point_count":
        return len(dynamics.fixed_points(T))
    if quantity.startswith("period_"):
        p = int(quantity.split("_", 1)[1])
        return tuple(space.names(sorted(dynamics.periodic_points(T, p))))
    if quantity == "theorem.hypotheses_hold":
        return dynamics.fixed_point_theorem_check(space, T, k).hypotheses_hold
    m = _COEFF.match(quantity)
    if not m:
        raise KeyError(f"unknown quantity {quantity!r}")
    kind, kk, attr = m.group(1), m.group(2), m.group(3)
    kk = int(kk) if kk else k
    semantics = classify.PAPER_ORDERING if attr == "paper_ordering" else classify.STRICT
    if kind == classify.BANACH:
        res = classify.banach_coefficient(space, T)
    elif kind == classify.KANNAN:
        res = classify.kannan_coefficient(space, T, kk)
    elif kind == classify.TOTAL_PAIRWISE:
        res = classify.total_distance_coefficient(space, T, kk)
    elif kind == classify.PERIMETRIC:
        res = classify.perimetric_coefficient(space, T, kk, semantics)
    elif kind == classify.KANNAN_PERIMETRIC:
        res = classify.kannan_perimetric_coefficient(space, T, kk, semantics)
    else:
        raise KeyError(f"unknown class {kind!r}")
    if attr in ("infimum", "paper_ordering"):
        return res.infimum
    if attr == "member":
        return res.member
    return tuple(space.names(res.witness))


@dataclass(frozen=True)
class Check:
    expected: Expected
    actual: Any

    @property
    def ok(self) -> bool:
        return self.actual == self.expected.value


def reproduce(inst: WorkedExample) -> list[Check]:
    return [Check(e, evaluate(inst, e.quantity)) for e in inst.expected]
