"""Orbits, fixed points and prime periods of a self-map of a finite set, plus
hypothesis/conclusion checks for the two fixed point theorems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classify import (
    KANNAN_PERIMETRIC,
    PERIMETRIC,
    STRICT,
    CoefficientResult,
    kannan_perimetric_coefficient,
    perimetric_coefficient,
)
from .metric import FiniteMetricSpace, SelfMap


@dataclass(frozen=True)
class OrbitStructure:
    start: int
    tail: tuple[int, ...]
    cycle: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.cycle)


def orbit(T: SelfMap, start: int) -> OrbitStructure:
    """Tail + cycle decomposition of start, T(start), T^2(start), ..."""
    if not 0 <= start < len(T):
        raise IndexError(f"start {start} out of range")
    seen: dict[int, int] = {}
    path: list[int] = []
    x = start
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = T.image[x]
    cut = seen[x]
    return OrbitStructure(start, tuple(path[:cut]), tuple(path[cut:]))


def fixed_points(T: SelfMap) -> frozenset[int]:
    return frozenset(i for i, t in enumerate(T.image) if t == i)


def prime_period(T: SelfMap, x: int) -> int | None:
    """Least p >= 1 with T^p x = x, or None if x is not periodic."""
    y = x
    for p in range(1, len(T) + 1):
        y = T.image[y]
        if y == x:
            return p
    return None


def periodic_points(T: SelfMap, p: int) -> frozenset[int]:
    """Points of prime period exactly p."""
    if p < 1:
        raise ValueError(f"period must be positive, got {p}")
    return frozenset(x for x in range(len(T)) if prime_period(T, x) == p)


def period_table(T: SelfMap) -> dict[int, frozenset[int]]:
    """Prime period -> points, over all periodic points."""
    table: dict[int, set[int]] = {}
    for x in range(len(T)):
        p = prime_period(T, x)
        if p is not None:
            table.setdefault(p, set()).add(x)
    return {p: frozenset(s) for p, s in sorted(table.items())}


def first_periodic_violation(T: SelfMap, k: int) -> tuple[int, int] | None:
    """(point, period) of the first point with prime period in 2..k-1."""
    for x in range(len(T)):
        p = prime_period(T, x)
        if p is not None and 2 <= p <= k - 1:
            return x, p
    return None


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: str
    k: int
    coefficient: CoefficientResult
    class_member: bool
    periodic_free: bool
    periodic_violation: tuple[int, int] | None
    hypotheses_hold: bool
    fixed_points: frozenset[int]
    fixed_bound_ok: bool
    orbits_reach_fixed: bool
    conclusion_verified: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def status(self) -> str:
        if not self.conclusion_verified:
            return "violated"
        if self.hypotheses_hold:
            return "verified"
        if self.class_member:
            return "hypotheses not satisfied; fixed point bound verified"
        return "hypotheses not satisfied"


def theorem_verdict(theorem: str, space: FiniteMetricSpace, T: SelfMap, k: int,
                    coeff: CoefficientResult) -> TheoremVerdict:
    """Combine a class coefficient with the periodic structure of T."""
    member = coeff.member
    bad = first_periodic_violation(T, k)
    periodic_free = bad is None
    hyp = member and periodic_free
    fixed = fixed_points(T)
    bound_ok = len(fixed) <= k - 1
    reach = all(orbit(T, x).period == 1 for x in range(space.n))
    notes = []
    if hyp:
        ok = bool(fixed) and bound_ok and reach
        if not reach:
            long = sorted({orbit(T, x).period for x in range(space.n)} - {1})
            notes.append(f"cycles of length {long} survive the hypotheses")
    elif member:
        # the fixed point count argument only uses membership
        ok = bound_ok
        if fixed:
            notes.append("fixed point exists although the periodic-point hypothesis fails; "
                         "the converse is not claimed")
    else:
        ok = True
    if not bound_ok and member:
        notes.append(f"{len(fixed)} fixed points exceed k-1 = {k - 1}")
    return TheoremVerdict(theorem, k, coeff, member, periodic_free, bad, hyp, fixed, bound_ok,
                          reach, ok, tuple(notes))


def fixed_point_theorem_check(
    space: FiniteMetricSpace, T: SelfMap, k: int, semantics: str = STRICT
) -> TheoremVerdict:
    """Perimetric contraction on k-polygons without prime periods 2..k-1 must
    have between 1 and k-1 fixed points."""
    coeff = perimetric_coefficient(space, T, k, semantics)
    return theorem_verdict(PERIMETRIC, space, T, k, coeff)


def kannan_theorem_check(
    space: FiniteMetricSpace, T: SelfMap, k: int, semantics: str = STRICT
) -> TheoremVerdict:
    """Same shape as fixed_point_theorem_check, with Kannan-type perimetric membership."""
    coeff = kannan_perimetric_coefficient(space, T, k, semantics)
    return theorem_verdict(KANNAN_PERIMETRIC, space, T, k, coeff)
