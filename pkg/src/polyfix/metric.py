"""Finite metric spaces with exact rational distances, self-maps and the
two tuple functionals (polygon perimeter and total pairwise distance).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


class MetricStructureError(ValueError):
    """Input cannot be interpreted as a distance matrix at all."""


class MetricAxiomError(ValueError):
    """A well-formed matrix violates one or more metric axioms."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(v.describe() for v in report.violations[:5]))


class InstanceFormatError(ValueError):
    """Malformed instance document; ``location`` points at the offending entry."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


def parse_rational(value: Any, location: str = "value") -> Fraction:
    """Parse an integer or a ``"p/q"`` string into a Fraction.

    Floats and decimal strings are rejected: distances must be exact.
    """
    if isinstance(value, bool):
        raise InstanceFormatError(location, f"expected rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise InstanceFormatError(location, f"malformed rational {value!r}")
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise InstanceFormatError(location, f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise InstanceFormatError(location, f"expected integer or 'p/q' string, got {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Violation:
    axiom: str  # identity | symmetry | positivity | triangle
    indices: tuple[int, ...]
    detail: str = ""

    def describe(self) -> str:
        return f"{self.axiom} violated at {self.indices}" + (f" ({self.detail})" if self.detail else "")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def _as_matrix(candidate: Sequence[Sequence[Any]]) -> list[list[Fraction]]:
    rows = list(candidate)
    n = len(rows)
    if n < 1:
        raise MetricStructureError("distance matrix must have at least one row")
    out = []
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != n:
            raise MetricStructureError(f"row {i} has length {len(row)}, expected {n} (matrix not square)")
        conv = []
        for j, v in enumerate(row):
            q = v if isinstance(v, Fraction) else parse_rational(v, f"distances[{i}][{j}]")
            if q < 0:
                raise MetricStructureError(f"negative entry {q} at ({i}, {j})")
            conv.append(q)
        out.append(conv)
    return out


def validate_metric(candidate: Sequence[Sequence[Any]]) -> ValidationReport:
    """Check the metric axioms on a square matrix of rationals.

    Raises MetricStructureError for non-square or negative input; every axiom
    violation is returned in the report rather than raised.
    """
    d = _as_matrix(candidate)
    n = len(d)
    found: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            found.append(Violation("identity", (i,), f"d={d[i][i]}"))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                found.append(Violation("symmetry", (i, j), f"{d[i][j]} != {d[j][i]}"))
            if d[i][j] == 0 or d[j][i] == 0:
                found.append(Violation("positivity", (i, j)))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3 or i > k:
                    continue
                if d[i][k] > d[i][j] + d[j][k]:
                    found.append(
                        Violation("triangle", (i, j, k), f"{d[i][k]} > {d[i][j]} + {d[j][k]}")
                    )
    return ValidationReport(tuple(found))


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labelled points with an exact distance matrix.

    Points are identified by index; labels are for display only.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __init__(self, labels: Iterable[str], dist: Sequence[Sequence[Any]], check: bool = True):
        labels = tuple(str(x) for x in labels)
        matrix = _as_matrix(dist)
        if len(labels) != len(matrix):
            raise MetricStructureError(f"{len(labels)} labels for a {len(matrix)}x{len(matrix)} matrix")
        if len(set(labels)) != len(labels):
            raise MetricStructureError("point labels must be unique")
        if check:
            report = validate_metric(matrix)
            if not report.valid:
                raise MetricAxiomError(report)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", tuple(tuple(r) for r in matrix))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @cached_property
    def scale(self) -> int:
        """Least common denominator of all distances."""
        return math.lcm(*(q.denominator for row in self.dist for q in row))

    @cached_property
    def int_dist(self) -> tuple[tuple[int, ...], ...]:
        """Distances multiplied by ``scale``; ratios of these are exact ratios of distances."""
        s = self.scale
        return tuple(tuple(q.numerator * (s // q.denominator) for q in row) for row in self.dist)

    def scaled(self, c: Fraction) -> "FiniteMetricSpace":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return FiniteMetricSpace(self.labels, [[c * q for q in row] for row in self.dist], check=False)

    def names(self, indices: Iterable[int]) -> list[str]:
        return [self.labels[i] for i in indices]


@dataclass(frozen=True)
class SelfMap:
    """Total map on point indices; ``image[i]`` is the index of T(i)."""

    image: tuple[int, ...]

    def __init__(self, image: Iterable[int], n: int | None = None):
        image = tuple(int(x) for x in image)
        size = len(image) if n is None else n
        if len(image) != size:
            raise ValueError(f"map has {len(image)} entries for {size} points")
        for i, t in enumerate(image):
            if not 0 <= t < size:
                raise ValueError(f"image of point {i} is {t}, outside 0..{size - 1}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, n: int) -> "SelfMap":
        return cls(range(n))

    @classmethod
    def constant(cls, n: int, c: int) -> "SelfMap":
        return cls([c] * n)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)


def _check_indices(space: FiniteMetricSpace, t: Sequence[int]) -> None:
    for i in t:
        if not 0 <= i < space.n:
            raise IndexError(f"point index {i} out of range for a {space.n}-point space")


def perimeter(space: FiniteMetricSpace, t: Sequence[int]) -> Fraction:
    """Closed-polygon length d(x1,x2) + ... + d(xk,x1); repeats allowed."""
    if len(t) < 3:
        raise ValueError(f"perimeter needs at least 3 points, got {len(t)}")
    _check_indices(space, t)
    d = space.dist
    return sum((d[t[i]][t[i + 1]] for i in range(len(t) - 1)), d[t[-1]][t[0]])


def total_pairwise(space: FiniteMetricSpace, t: Sequence[int]) -> Fraction:
    """Sum of d(x_i, x_j) over all position pairs i < j."""
    if len(t) < 2:
        raise ValueError(f"total pairwise distance needs at least 2 points, got {len(t)}")
    _check_indices(space, t)
    d = space.dist
    return sum((d[t[i]][t[j]] for i in range(len(t)) for j in range(i + 1, len(t))), Fraction(0))


def apply_map(T: SelfMap, t: Sequence[int]) -> tuple[int, ...]:
    return tuple(T.image[i] for i in t)


# Integer-scaled kernels used by the classifier hot loops.

def int_perimeter(D: Sequence[Sequence[int]], t: Sequence[int]) -> int:
    s = D[t[-1]][t[0]]
    for i in range(len(t) - 1):
        s += D[t[i]][t[i + 1]]
    return s


def int_total_pairwise(D: Sequence[Sequence[int]], t: Sequence[int]) -> int:
    s = 0
    for i in range(len(t)):
        row = D[t[i]]
        for j in range(i + 1, len(t)):
            s += row[t[j]]
    return s


# Instance files: {"points": [...], "distances": [[...]], "map": {label: label}}

@dataclass(frozen=True)
class Instance:
    space: FiniteMetricSpace
    map: SelfMap
    meta: dict = field(default_factory=dict, compare=False)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("$", "instance must be a JSON object")
    for key in ("points", "distances", "map"):
        if key not in doc:
            raise InstanceFormatError("$", f"missing key {key!r}")
    points = doc["points"]
    if not isinstance(points, list) or not points:
        raise InstanceFormatError("points", "must be a nonempty list of labels")
    labels = [str(p) for p in points]
    if len(set(labels)) != len(labels):
        raise InstanceFormatError("points", "labels must be unique")
    rows = doc["distances"]
    if not isinstance(rows, list) or len(rows) != len(labels):
        raise InstanceFormatError("distances", f"expected {len(labels)} rows")
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(labels):
            raise InstanceFormatError(f"distances[{i}]", f"expected {len(labels)} entries")
        matrix.append([parse_rational(v, f"distances[{i}][{j}]") for j, v in enumerate(row)])
    mapping = doc["map"]
    if not isinstance(mapping, dict):
        raise InstanceFormatError("map", "must be an object label -> label")
    pos = {lab: i for i, lab in enumerate(labels)}
    for src, dst in mapping.items():
        if src not in pos:
            raise InstanceFormatError(f"map[{src!r}]", "unknown source label")
        if str(dst) not in pos:
            raise InstanceFormatError(f"map[{src!r}]", f"unknown target label {dst!r}")
    missing = [lab for lab in labels if lab not in mapping]
    if missing:
        raise InstanceFormatError("map", f"map is not total; no image for {missing}")
    try:
        space = FiniteMetricSpace(labels, matrix)
    except MetricStructureError as exc:
        raise InstanceFormatError("distances", str(exc)) from exc
    except MetricAxiomError as exc:
        raise InstanceFormatError("distances", f"not a metric: {exc}") from exc
    T = SelfMap([pos[str(mapping[lab])] for lab in labels])
    meta = {k: v for k, v in doc.items() if k not in ("points", "distances", "map")}
    return Instance(space, T, meta)


def instance_to_dict(space: FiniteMetricSpace, T: SelfMap) -> dict:
    return {
        "points": list(space.labels),
        "distances": [[format_rational(q) for q in row] for row in space.dist],
        "map": {space.labels[i]: space.labels[t] for i, t in enumerate(T.image)},
    }


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceFormatError(str(path), f"cannot read file: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return instance_from_dict(doc)
