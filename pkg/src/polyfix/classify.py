"""Exact minimal contraction coefficients on finite metric spaces.

Each coefficient is the largest ratio lhs/rhs over all admissible tuples,
i.e. the least constant for which the class inequality holds.  Ratios are
compared by cross multiplication on the integer-scaled distance matrix, so
no Fraction is built inside the loops.  A ratio with rhs == 0 and lhs > 0
compares above every finite ratio, which is how INFEASIBLE falls out.

Ties between equal ratios go to the candidate that comes *later* in
enumeration order.  The rule only depends on (ratio, rank), so chunked or
parallel reductions agree with the sequential scan.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .metric import FiniteMetricSpace, SelfMap, int_perimeter, int_total_pairwise
from .polygons import k_subsets, position_cycles

BANACH = "banach"
KANNAN = "kannan"
PERIMETRIC = "perimetric"
TOTAL_PAIRWISE = "total_pairwise"
KANNAN_PERIMETRIC = "kannan_perimetric"

STRICT = "strict"
PAPER_ORDERING = "paper-ordering"
SEMANTICS = (STRICT, PAPER_ORDERING)


def threshold(kind: str, k: int | None = None) -> Fraction:
    if kind == BANACH:
        return Fraction(1)
    if kind == KANNAN:
        return Fraction(1, 2)
    if kind in (PERIMETRIC, TOTAL_PAIRWISE):
        return Fraction(1)
    if kind == KANNAN_PERIMETRIC:
        return Fraction(2, k)
    raise ValueError(f"unknown class {kind!r}")


@dataclass(frozen=True)
class CoefficientResult:
    kind: str
    k: int | None
    infimum: Fraction | None  # None means INFEASIBLE
    witness: tuple[int, ...] | None
    lhs: Fraction
    rhs: Fraction
    member: bool
    threshold: Fraction
    semantics: str = STRICT
    flags: dict = field(default_factory=dict, compare=False)

    @property
    def infeasible(self) -> bool:
        return self.infimum is None

    def below(self, bound: Fraction) -> bool:
        """Strictly below ``bound`` (False when infeasible)."""
        return self.infimum is not None and self.infimum < bound


# (lhs, rhs, rank, witness); rank is a tuple so chunk boundaries don't matter
_Best = tuple


def _better(a: _Best | None, b: _Best | None) -> _Best | None:
    if a is None:
        return b
    if b is None:
        return a
    x, y = a[0] * b[1], b[0] * a[1]
    if x != y:
        return a if x > y else b
    return a if a[2] > b[2] else b


def _finish(kind, k, best, space: FiniteMetricSpace, semantics=STRICT, flags=None) -> CoefficientResult:
    thr = threshold(kind, k)
    flags = dict(flags or {})
    if best is None:
        # no admissible tuple with a nonzero denominator
        zero = Fraction(0)
        return CoefficientResult(kind, k, zero, None, zero, zero, zero < thr, thr, semantics, flags)
    lhs_i, rhs_i, _, witness = best
    lhs, rhs = Fraction(lhs_i, space.scale), Fraction(rhs_i, space.scale)
    if rhs_i == 0:
        return CoefficientResult(kind, k, None, witness, lhs, rhs, False, thr, semantics, flags)
    inf = Fraction(lhs_i, rhs_i)
    return CoefficientResult(kind, k, inf, witness, lhs, rhs, inf < thr, thr, semantics, flags)


def _check_n(space: FiniteMetricSpace, T: SelfMap) -> None:
    if len(T) != space.n:
        raise ValueError(f"map has {len(T)} entries for a {space.n}-point space")


def _check_k(space: FiniteMetricSpace, k: int, lo: int) -> None:
    if not lo <= k <= space.n:
        raise ValueError(f"k must satisfy {lo} <= k <= {space.n}, got {k}")


def banach_coefficient(space: FiniteMetricSpace, T: SelfMap) -> CoefficientResult:
    """max over pairs of d(Tx,Ty)/d(x,y)."""
    _check_n(space, T)
    if space.n < 2:
        raise ValueError("need at least two points")
    D, img = space.int_dist, T.image
    best = None
    for rank, (i, j) in enumerate(itertools.combinations(range(space.n), 2)):
        best = _better(best, (D[img[i]][img[j]], D[i][j], (rank,), (i, j)))
    return _finish(BANACH, None, best, space)


def kannan_coefficient(space: FiniteMetricSpace, T: SelfMap, k: int | None = None) -> CoefficientResult:
    """max over pairs of d(Tx,Ty)/(d(x,Tx)+d(y,Ty)); 0/0 pairs are skipped.

    With ``k`` given, ``flags['below_inverse_k']`` records whether the
    coefficient is below 1/k.
    """
    _check_n(space, T)
    if space.n < 2:
        raise ValueError("need at least two points")
    D, img = space.int_dist, T.image
    best = None
    for rank, (i, j) in enumerate(itertools.combinations(range(space.n), 2)):
        num, den = D[img[i]][img[j]], D[i][img[i]] + D[j][img[j]]
        if num == 0 and den == 0:
            continue
        best = _better(best, (num, den, (rank,), (i, j)))
    res = _finish(KANNAN, None, best, space)
    if k is not None:
        res.flags["below_inverse_k"] = res.below(Fraction(1, k))
        res.flags["k"] = k
    return res


def total_distance_coefficient(space: FiniteMetricSpace, T: SelfMap, k: int) -> CoefficientResult:
    """max over k-subsets of S(images)/S(subset)."""
    _check_n(space, T)
    _check_k(space, k, 2)
    D, img = space.int_dist, T.image
    best = None
    for rank, s in enumerate(k_subsets(space.n, k)):
        t = [img[x] for x in s]
        best = _better(best, (int_total_pairwise(D, t), int_total_pairwise(D, s), (rank,), s))
    return _finish(TOTAL_PAIRWISE, k, best, space)


def _scan_polygons(D, img, k, kind, single, chunk) -> _Best | None:
    """Best (lhs, rhs, rank, cycle) over an enumerated chunk of subsets."""
    pats = position_cycles(k)[:1] if single else position_cycles(k)
    best = None
    for srank, s in chunk:
        t = [img[x] for x in s]
        if kind == KANNAN_PERIMETRIC:
            fixed_rhs = sum(D[x][img[x]] for x in s)
        for crank, p in enumerate(pats):
            lhs = D[t[p[-1]]][t[p[0]]]
            for a in range(k - 1):
                lhs += D[t[p[a]]][t[p[a + 1]]]
            if kind == PERIMETRIC:
                rhs = D[s[p[-1]]][s[p[0]]]
                for a in range(k - 1):
                    rhs += D[s[p[a]]][s[p[a + 1]]]
            else:
                rhs = fixed_rhs
            if best is not None:
                x, y = lhs * best[1], best[0] * rhs
                if x < y:
                    continue
            best = (lhs, rhs, (srank, crank), tuple(s[q] for q in p))
    return best


def _scan_worker(args):
    return _scan_polygons(*args)


def _polygon_coefficient(space, T, k, kind, semantics, jobs) -> CoefficientResult:
    _check_n(space, T)
    _check_k(space, k, 3)
    if semantics not in SEMANTICS:
        raise ValueError(f"semantics must be one of {SEMANTICS}, got {semantics!r}")
    single = semantics == PAPER_ORDERING
    D, img = space.int_dist, T.image
    subsets = enumerate(k_subsets(space.n, k))
    if jobs <= 1:
        best = _scan_polygons(D, img, k, kind, single, subsets)
    else:
        chunks = []
        while chunk := list(itertools.islice(subsets, 64)):
            chunks.append((D, img, k, kind, single, chunk))
        best = None
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_scan_worker, chunks):
                best = _better(best, part)
    return _finish(kind, k, best, space, semantics)


def perimetric_coefficient(
    space: FiniteMetricSpace, T: SelfMap, k: int, semantics: str = STRICT, jobs: int = 1
) -> CoefficientResult:
    """max over k-subsets and polygons on them of P(images)/P(polygon).

    Under ``paper-ordering`` only the index-ordered polygon of each subset
    is examined.
    """
    return _polygon_coefficient(space, T, k, PERIMETRIC, semantics, jobs)


def kannan_perimetric_coefficient(
    space: FiniteMetricSpace, T: SelfMap, k: int, semantics: str = STRICT, jobs: int = 1
) -> CoefficientResult:
    """max over k-subsets and polygons of P(images) / sum_i d(x_i, Tx_i).

    INFEASIBLE exactly when k points are fixed (zero denominator).
    """
    return _polygon_coefficient(space, T, k, KANNAN_PERIMETRIC, semantics, jobs)


def ratio_for_cycle(
    space: FiniteMetricSpace, T: SelfMap, cycle: Sequence[int], kind: str
) -> tuple[Fraction, Fraction]:
    """Numerator and denominator the class inequality compares for one ordering."""
    _check_n(space, T)
    if len(set(cycle)) != len(cycle):
        raise ValueError("cycle points must be pairwise distinct")
    D, img = space.int_dist, T.image
    t = [img[x] for x in cycle]
    if kind == PERIMETRIC:
        lhs, rhs = int_perimeter(D, t), int_perimeter(D, cycle)
    elif kind == KANNAN_PERIMETRIC:
        lhs, rhs = int_perimeter(D, t), sum(D[x][img[x]] for x in cycle)
    elif kind == TOTAL_PAIRWISE:
        lhs, rhs = int_total_pairwise(D, t), int_total_pairwise(D, cycle)
    else:
        raise ValueError(f"ratio_for_cycle does not handle class {kind!r}")
    return Fraction(lhs, space.scale), Fraction(rhs, space.scale)


@dataclass(frozen=True)
class ClassificationReport:
    k: int
    semantics: str
    banach: CoefficientResult
    kannan: CoefficientResult
    perimetric: CoefficientResult
    total_pairwise: CoefficientResult
    kannan_perimetric: CoefficientResult
    # the other reading of the polygon classes, for comparison
    perimetric_alt: CoefficientResult
    kannan_perimetric_alt: CoefficientResult

    @property
    def results(self) -> dict[str, CoefficientResult]:
        return {
            BANACH: self.banach,
            KANNAN: self.kannan,
            PERIMETRIC: self.perimetric,
            TOTAL_PAIRWISE: self.total_pairwise,
            KANNAN_PERIMETRIC: self.kannan_perimetric,
        }

    @property
    def kannan_below_inverse_k(self) -> bool:
        return self.kannan.below(Fraction(1, self.k))

    @property
    def perimetric_below_inverse_k_plus_1(self) -> bool:
        return self.perimetric.below(Fraction(1, self.k + 1))


def classify_all(
    space: FiniteMetricSpace, T: SelfMap, k: int, semantics: str = STRICT, jobs: int = 1
) -> ClassificationReport:
    _check_k(space, k, 3)
    other = PAPER_ORDERING if semantics == STRICT else STRICT
    return ClassificationReport(
        k=k,
        semantics=semantics,
        banach=banach_coefficient(space, T),
        kannan=kannan_coefficient(space, T, k),
        perimetric=perimetric_coefficient(space, T, k, semantics, jobs),
        total_pairwise=total_distance_coefficient(space, T, k),
        kannan_perimetric=kannan_perimetric_coefficient(space, T, k, semantics, jobs),
        perimetric_alt=perimetric_coefficient(space, T, k, other, jobs),
        kannan_perimetric_alt=kannan_perimetric_coefficient(space, T, k, other, jobs),
    )

