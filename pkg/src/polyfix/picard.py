"""Picard iteration for built-in maps on R^d with a-priori error bounds.

Everything here is double precision.  Points are 1-D numpy arrays; oracle
maps are vectorised over a leading batch axis.  All domains of the built-in
maps are boxes in R^d, where every point is an accumulation point, and the
reports say so.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

ACCUMULATION_NOTE = "all points of the sampled region are treated as accumulation points"
SANITY_TOL = 1e-12
SLACK_TOL = 1e-9


class NonFiniteIterate(ArithmeticError):
    pass


def euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)


@dataclass(frozen=True)
class MetricOracle:
    name: str
    dimension: int
    map: Callable[[np.ndarray], np.ndarray]
    distance: Callable[[np.ndarray, np.ndarray], np.ndarray] = euclidean
    region: tuple[tuple[float, float], ...] = ()
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        return self.map(np.asarray(x, dtype=float))

    def d(self, x, y) -> float:
        return float(self.distance(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))

    def sanity_check(self, points: np.ndarray) -> bool:
        """Symmetry and identity of the distance on the given points."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        a, b = pts[:, None, :], pts[None, :, :]
        dab, dba = self.distance(a, b), self.distance(b, a)
        return bool(np.all(np.abs(dab - dba) <= SANITY_TOL)
                    and np.all(np.abs(np.diagonal(dab)) <= SANITY_TOL)
                    and np.all(dab >= 0))


def _box(dim: int, lo: float, hi: float) -> tuple[tuple[float, float], ...]:
    return tuple((lo, hi) for _ in range(dim))


def _linear(a: float = 0.5) -> MetricOracle:
    return MetricOracle("linear", 1, lambda x: a * x, region=_box(1, -1, 1), params={"a": a})


def _affine(a: float = 0.5, b: float = 1.0) -> MetricOracle:
    return MetricOracle("affine", 1, lambda x: a * x + b, region=_box(1, -10, 10),
                        params={"a": a, "b": b})


def _cubic() -> MetricOracle:
    return MetricOracle("cubic", 1, lambda x: x - x ** 3 / 3, region=_box(1, -0.5, 0.5))


def _rotation_scaling(s: float = 0.5, theta: float = 0.5) -> MetricOracle:
    m = s * np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    return MetricOracle("rotation_scaling", 2, lambda x: x @ m.T, region=_box(2, -1, 1),
                        params={"s": s, "theta": theta})


def _constant(c: float = 0.0) -> MetricOracle:
    return MetricOracle("constant", 1, lambda x: np.full_like(x, c), region=_box(1, -1, 1),
                        params={"c": c})


def _identity() -> MetricOracle:
    return MetricOracle("identity", 1, lambda x: np.array(x, dtype=float), region=_box(1, -1, 1))


REGISTRY: dict[str, Callable[..., MetricOracle]] = {
    "linear": _linear,
    "affine": _affine,
    "cubic": _cubic,
    "rotation_scaling": _rotation_scaling,
    "constant": _constant,
    "identity": _identity,
}


def register(name: str, factory: Callable[..., MetricOracle]) -> None:
    REGISTRY[name] = factory


def make_oracle(name: str, **params: float) -> MetricOracle:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown map {name!r}; known: {sorted(REGISTRY)}") from None
    return factory(**params)


def _perimeter(oracle: MetricOracle, pts: Sequence[np.ndarray]) -> float:
    k = len(pts)
    return sum(oracle.d(pts[i], pts[(i + 1) % k]) for i in range(k))


@dataclass
class IterationTrace:
    oracle: str
    k: int
    tolerance: float
    points: np.ndarray                 # x_0 .. x_N, shape (N+1, d)
    step_distances: list[float]        # r_n = d(x_n, x_{n+1})
    r0_perimeter: float                # P(x_0, ..., x_{k-1})
    lambda_estimate: float
    bounds: list[float]                # lambda^n r0 / (1 - lambda)
    mu_estimate: float
    rho: float | None
    kannan_R: float | None
    kannan_bounds: list[float | None]  # rho^(n/(k-1) - 1) R for n >= k
    converged: bool
    limit: np.ndarray
    notes: list[str] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    def errors(self) -> list[float]:
        return [float(np.linalg.norm(p - self.limit)) for p in self.points]

    def to_dict(self) -> dict:
        return {
            "schema": "polyfix/1",
            "kind": "iteration_trace",
            "map": self.oracle,
            "k": self.k,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "steps": self.steps,
            "limit": self.limit.tolist(),
            "r0_perimeter": self.r0_perimeter,
            "lambda_estimate": self.lambda_estimate,
            "mu_estimate": self.mu_estimate,
            "rho": self.rho,
            "kannan_R": self.kannan_R,
            "rows": [
                {"step": n, "point": self.points[n].tolist(),
                 "r_n": self.step_distances[n] if n < len(self.step_distances) else None,
                 "bound": self.bounds[n], "kannan_bound": self.kannan_bounds[n]}
                for n in range(len(self.points))
            ],
            "notes": list(self.notes),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dim = self.points.shape[1]
        coords = ["x"] if dim == 1 else [f"x{i}" for i in range(dim)]
        w.writerow(["step", *coords, "r_n", "bound", "kannan_bound"])
        for n, p in enumerate(self.points):
            r = self.step_distances[n] if n < len(self.step_distances) else ""
            kb = self.kannan_bounds[n]
            w.writerow([n, *(repr(float(c)) for c in p), r if r == "" else repr(r),
                        repr(self.bounds[n]), "" if kb is None else repr(kb)])
        return buf.getvalue()


def _window_ratios(oracle, pts, k, floor):
    """Largest observed P(next window)/P(window) and P(next window)/sum of steps."""
    lam = mu = 0.0
    r = [oracle.d(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    for n in range(len(pts) - k):
        before = _perimeter(oracle, pts[n:n + k])
        after = _perimeter(oracle, pts[n + 1:n + k + 1])
        steps = sum(r[n:n + k])
        if before > floor:
            lam = max(lam, after / before)
        if steps > floor:
            mu = max(mu, after / steps)
    return lam, mu


def picard_iterate(
    oracle: MetricOracle,
    x0,
    k: int = 3,
    tolerance: float = 1e-12,
    max_steps: int = 1000,
    lam: float | None = None,
    mu: float | None = None,
) -> IterationTrace:
    """Iterate x_{n+1} = T x_n until d(x_n, x_{n+1}) < tolerance.

    ``lam`` and ``mu`` default to the contraction ratios observed along the
    orbit itself (perimeters of consecutive k-windows), which are lower
    bounds on the true coefficients of the map.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if k < 3:
        raise ValueError("k must be at least 3")
    if max_steps < k:
        raise ValueError(f"max_steps must be at least k = {k}")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    if x.shape != (oracle.dimension,):
        raise ValueError(f"starting point must have dimension {oracle.dimension}")
    pts = [x]
    r: list[float] = []
    converged = False
    while len(r) < max_steps:
        nxt = np.atleast_1d(oracle(pts[-1]))
        if not np.all(np.isfinite(nxt)):
            raise NonFiniteIterate(f"{oracle.name}: non-finite iterate at step {len(pts)}: {nxt}")
        r.append(oracle.d(pts[-1], nxt))
        pts.append(nxt)
        # keep going until there are k points so the first perimeter exists
        if r[-1] < tolerance and len(pts) >= k:
            converged = True
            break
    points = np.array(pts)
    r0 = _perimeter(oracle, pts[:k])
    obs_lam, obs_mu = _window_ratios(oracle, pts, k, 100 * tolerance)
    lam = obs_lam if lam is None else lam
    mu = obs_mu if mu is None else mu

    if lam < 1:
        bounds = [lam ** n * r0 / (1 - lam) for n in range(len(pts))]
    else:
        bounds = [math.inf] * len(pts)

    rho = R = None
    kb: list[float | None] = [None] * len(pts)
    notes = []
    if mu < 2 / k and len(r) >= k:
        rho = (k - 2) * mu / (2 - mu)
        R = max(r[1:k])
        for n in range(k, len(pts)):
            kb[n] = rho ** (n / (k - 1) - 1) * R if rho > 0 else 0.0
    else:
        notes.append("orbit Kannan-type ratio is not below 2/k; no Kannan bound")
    if not converged:
        notes.append(f"no convergence within {max_steps} steps")
    return IterationTrace(oracle.name, k, tolerance, points, r, r0, lam, bounds, mu, rho, R, kb,
                          converged, points[-1].copy(), notes)


BANACH = "banach"
PERIMETRIC = "perimetric"
KANNAN_PERIMETRIC = "kannan_perimetric"


@dataclass
class SampleEstimate:
    kind: str
    k: int | None
    estimate: float
    history: np.ndarray  # running maximum after each accepted sample
    count: int
    rejected: int
    lower_bound: bool = True
    note: str = ACCUMULATION_NOTE

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "estimate": self.estimate, "count": self.count,
                "rejected": self.rejected, "lower_bound_of_supremum": self.lower_bound,
                "note": self.note}


def _draw(rng: np.random.Generator, region, m: int) -> np.ndarray:
    lo = np.array([a for a, _ in region])
    hi = np.array([b for _, b in region])
    return lo + rng.random((m, len(region))) * (hi - lo)


def _sample_tuples(oracle, region, size, seed, count):
    """``count`` tuples of ``size`` points with no two closer than SANITY_TOL."""
    rng = np.random.default_rng(seed)
    out, rejected = [], 0
    while len(out) < count:
        tup = _draw(rng, region, size)
        dd = oracle.distance(tup[:, None, :], tup[None, :, :])
        if np.any(dd[np.triu_indices(size, 1)] < SANITY_TOL):
            rejected += 1
            continue
        out.append(tup)
    return np.array(out), rejected


def sample_coefficient(
    oracle: MetricOracle,
    kind: str,
    k: int = 3,
    seed: int = 0,
    count: int = 1000,
    region: Sequence[tuple[float, float]] | None = None,
) -> SampleEstimate:
    """Largest ratio observed on ``count`` random pairwise-distinct tuples.

    This never exceeds the true supremum; it is reported as a lower bound.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    region = tuple(region or oracle.region)
    if len(region) != oracle.dimension or any(not (math.isfinite(a) and math.isfinite(b) and a < b)
                                               for a, b in region):
        raise ValueError("region must be a bounded box matching the oracle dimension")
    size = 2 if kind == BANACH else k
    if kind not in (BANACH, PERIMETRIC, KANNAN_PERIMETRIC):
        raise ValueError(f"unknown class {kind!r}")
    tuples, rejected = _sample_tuples(oracle, region, size, seed, count)
    images = oracle.map(tuples)
    d = oracle.distance
    if kind == BANACH:
        num = d(images[:, 0], images[:, 1])
        den = d(tuples[:, 0], tuples[:, 1])
    else:
        nxt = np.roll(np.arange(size), -1)
        num = d(images, images[:, nxt]).sum(axis=1)
        if kind == PERIMETRIC:
            den = d(tuples, tuples[:, nxt]).sum(axis=1)
        else:
            den = d(tuples, images).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 0, num / np.where(den > 0, den, 1), np.where(num > 0, np.inf, 0.0))
    history = np.maximum.accumulate(ratios)
    return SampleEstimate(kind, None if kind == BANACH else k, float(history[-1]), history,
                          count, rejected)


@dataclass
class PairwiseCheck:
    lambda_hat: float
    pairs: int
    violations: int
    max_slack: float
    member: bool
    note: str = ACCUMULATION_NOTE

    @property
    def holds(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"lambda_hat": self.lambda_hat, "pairs": self.pairs, "violations": self.violations,
                "max_slack": self.max_slack, "member": self.member, "note": self.note}


def pairwise_contraction_check(
    oracle: MetricOracle,
    lambda_hat: float,
    seed: int = 1,
    count: int = 1000,
    region: Sequence[tuple[float, float]] | None = None,
) -> PairwiseCheck:
    """Check d(Tx,Ty) <= lambda_hat d(x,y) + 1e-9 on fresh random pairs.

    On a space without isolated points a perimetric contraction satisfies
    the pairwise contraction inequality with the same constant; this tests
    that consequence with the sampled polygon coefficient.
    """
    region = tuple(region or oracle.region)
    pairs, _ = _sample_tuples(oracle, region, 2, seed, count)
    images = oracle.map(pairs)
    slack = oracle.distance(images[:, 0], images[:, 1]) - lambda_hat * oracle.distance(pairs[:, 0], pairs[:, 1])
    return PairwiseCheck(lambda_hat, count, int(np.sum(slack > SLACK_TOL)), float(slack.max()),
                      lambda_hat < 1)


@dataclass
class UniquenessReport:
    vacuous: bool
    reason: str
    limit: np.ndarray
    fixed_points_found: list[np.ndarray]
    others: list[np.ndarray]
    grid_spacing: float

    @property
    def unique(self) -> bool:
        return not self.vacuous and len(self.fixed_points_found) == 1 and not self.others

    def to_dict(self) -> dict:
        return {"vacuous": self.vacuous, "reason": self.reason, "limit": self.limit.tolist(),
                "fixed_points_found": [p.tolist() for p in self.fixed_points_found],
                "other_fixed_points": [p.tolist() for p in self.others],
                "grid_spacing": self.grid_spacing, "unique": self.unique}


def uniqueness_check(
    trace: IterationTrace,
    oracle: MetricOracle,
    region: Sequence[tuple[float, float]],
    points_per_axis: int | None = None,
) -> UniquenessReport:
    """Search a grid over ``region`` for fixed points other than the limit.

    Premise: the trace converged and no iterate is itself a fixed point
    (d(x_i, T x_i) == 0 exactly); otherwise the report is vacuous.
    Grid points with residual |Tz - z| below twice the spacing are grouped
    into connected clusters, one per fixed point found.
    """
    limit = trace.limit
    if not trace.converged:
        return UniquenessReport(True, "trace did not converge", limit, [], [], 0.0)
    residual_on_orbit = oracle.distance(oracle.map(trace.points), trace.points)
    if np.any(residual_on_orbit == 0):
        return UniquenessReport(True, "an iterate is already a fixed point (limit equals an iterate)",
                                limit, [], [], 0.0)
    region = tuple(region)
    dim = oracle.dimension
    m = points_per_axis or (2001 if dim == 1 else 201)
    axes = [np.linspace(a, b, m) for a, b in region]
    h = max((b - a) / (m - 1) for a, b in region)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    res = oracle.distance(oracle.map(grid.reshape(-1, dim)), grid.reshape(-1, dim)).reshape(grid.shape[:-1])
    mask = res <= 2 * h * math.sqrt(dim)
    labels, count = ndimage.label(mask)
    found = []
    for lab in range(1, count + 1):
        idx = np.argwhere(labels == lab)
        best = idx[np.argmin(res[tuple(idx.T)])]
        found.append(grid[tuple(best)])
    others = [p for p in found if np.linalg.norm(p - limit) > 10 * h]
    return UniquenessReport(False, "grid search", limit, found, others, h)
