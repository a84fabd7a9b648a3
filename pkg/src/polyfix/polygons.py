"""Enumeration of point subsets and of polygons (Hamiltonian cycles of the
complete graph) up to rotation and reflection.

Cycles are produced by vertex insertion: starting from the triangle on the
first three vertices, each further vertex is inserted into every edge of
the current cycle, closing edge first.  The first cycle produced is therefore
the identity ordering.  Every cycle is returned in canonical form: the
smallest vertex first and the second vertex smaller than the last.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterator, Sequence


def k_subsets(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-element subsets of range(n), lexicographic order."""
    if k < 2:
        raise ValueError(f"subset size must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"subset size {k} exceeds number of points {n}")
    return itertools.combinations(range(n), k)


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate the minimum to the front, then orient so second < last."""
    c = list(cycle)
    if len(set(c)) != len(c):
        raise ValueError(f"cycle vertices must be distinct: {c}")
    i = c.index(min(c))
    c = c[i:] + c[:i]
    if len(c) > 2 and c[1] > c[-1]:
        c = [c[0]] + c[:0:-1]
    return tuple(c)


def _insertions(cycle: list[int], v: int, k: int) -> Iterator[list[int]]:
    if v == k:
        yield cycle
        return
    for pos in range(len(cycle), 0, -1):
        yield from _insertions(cycle[:pos] + [v] + cycle[pos:], v + 1, k)


def _position_cycles(k: int) -> Iterator[tuple[int, ...]]:
    for c in _insertions([0, 1, 2], 3, k):
        if c[1] > c[-1]:
            c = [c[0]] + c[:0:-1]
        yield tuple(c)


@lru_cache(maxsize=16)
def position_cycles(k: int) -> tuple[tuple[int, ...], ...]:
    """Canonical cycles over positions 0..k-1, in enumeration order.

    This is H(k) patterns, independent of the point subset, so it is cached.
    """
    if k < 3:
        raise ValueError(f"polygons need k >= 3, got {k}")
    return tuple(_position_cycles(k))


def hamiltonian_cycles(subset: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield the (k-1)!/2 polygons on ``subset``, each as a canonical cycle.

    ``subset`` must be sorted for the output to be canonical with respect to
    point indices (k_subsets always yields sorted tuples).
    """
    subset = tuple(subset)
    k = len(subset)
    if k < 3:
        raise ValueError(f"polygons need k >= 3, got {k}")
    if len(set(subset)) != k:
        raise ValueError("subset must contain distinct indices")
    if list(subset) != sorted(subset):
        for pattern in position_cycles(k):
            yield canonical_cycle([subset[p] for p in pattern])
        return
    for pattern in position_cycles(k):
        yield tuple(subset[p] for p in pattern)


def cycle_count(k: int) -> int:
    """H(k) = (k-1)!/2, the number of polygons on k labelled points."""
    if k < 3:
        raise ValueError(f"polygons need k >= 3, got {k}")
    return math.factorial(k - 1) // 2


def edge_frequency(k: int) -> int:
    """E(k) = (k-2)!, how many of those polygons use a given edge."""
    if k < 3:
        raise ValueError(f"polygons need k >= 3, got {k}")
    return math.factorial(k - 2)
