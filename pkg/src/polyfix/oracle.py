"""Random finite instances and implication checks between the contraction
classes, with seed-reproducible reports.

Every trial gets its own sub-seed derived from the run seed by a splitmix64
step, so serial and parallel runs produce identical reports.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import dynamics
from .classify import (
    banach_coefficient,
    kannan_coefficient,
    kannan_perimetric_coefficient,
    perimetric_coefficient,
    total_distance_coefficient,
)
from .metric import FiniteMetricSpace, SelfMap, format_rational, instance_to_dict

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

CLOSURE = "closure"
GRID = "grid"
MODELS = (CLOSURE, GRID)

# implication tags
P_IMPLIES_S = "perimetric_implies_total_pairwise"
S_MONOTONE = "total_pairwise_monotone_in_points"
P_IMPLIES_S_LARGER = "perimetric_implies_total_pairwise_larger_n"
BANACH_NO_CYCLES = "banach_unique_fixed_no_periodic"
P_FIXED = "perimetric_fixed_point"
P_UNIQUE = "perimetric_uniqueness"
KANNAN_IMPLIES_KP = "kannan_implies_kannan_perimetric"
SMALL_P_IMPLIES_KP = "small_perimetric_implies_kannan_perimetric"
KP_FIXED = "kannan_perimetric_fixed_point"
KP_UNIQUE = "kannan_perimetric_uniqueness"

TAGS = (
    P_IMPLIES_S, S_MONOTONE, P_IMPLIES_S_LARGER, BANACH_NO_CYCLES, P_FIXED, P_UNIQUE,
    KANNAN_IMPLIES_KP, SMALL_P_IMPLIES_KP, KP_FIXED, KP_UNIQUE,
)
# violations of these are published as findings and do not fail a run
FINDING_TAGS = frozenset({KANNAN_IMPLIES_KP, SMALL_P_IMPLIES_KP})
# tags whose premise must fire at least COVERAGE_PER_1000 times per 1000 trials
COVERAGE_TAGS = (P_IMPLIES_S, S_MONOTONE, P_FIXED, BANACH_NO_CYCLES)
COVERAGE_PER_1000 = 10


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    return splitmix64((seed + index * GOLDEN) & MASK64)


def random_space(seed: int, n: int, model: str = CLOSURE, max_distance: int = 10,
                 grid_size: int = 6, dim: int = 2) -> FiniteMetricSpace:
    """Random valid metric on n points.

    ``closure``: symmetric integers in 1..max_distance repaired by all-pairs
    shortest paths.  ``grid``: distinct points of a dim-dimensional integer
    grid under the taxicab distance.
    """
    if n < 2:
        raise ValueError("need at least two points")
    rng = random.Random(seed)
    labels = [f"q{i}" for i in range(n)]
    if model == CLOSURE:
        d = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                d[i][j] = d[j][i] = rng.randint(1, max_distance)
        for m in range(n):
            dm = d[m]
            for i in range(n):
                di, dim_ = d[i], d[i][m]
                for j in range(n):
                    if dim_ + dm[j] < di[j]:
                        di[j] = dim_ + dm[j]
    elif model == GRID:
        size = grid_size
        while size ** dim < n:
            size += 1
        cells = rng.sample(range(size ** dim), n)
        pts = []
        for c in cells:
            coords = []
            for _ in range(dim):
                c, r = divmod(c, size)
                coords.append(r)
            pts.append(coords)
        d = [[sum(abs(a - b) for a, b in zip(p, q)) for q in pts] for p in pts]
    else:
        raise ValueError(f"unknown distance model {model!r}; expected one of {MODELS}")
    return FiniteMetricSpace(labels, d, check=False)


def random_map(seed: int, n: int) -> SelfMap:
    """Uniformly random total map on n points."""
    if n < 1:
        raise ValueError("need at least one point")
    rng = random.Random(seed)
    return SelfMap([rng.randrange(n) for _ in range(n)])


@dataclass
class ImplicationResult:
    name: str
    instances_checked: int = 0
    premise_hits: int = 0
    vacuous: bool = False
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _frac(q: Fraction | None) -> str:
    return "INFEASIBLE" if q is None else format_rational(q)


def check_implications(space: FiniteMetricSpace, T: SelfMap, k: int) -> list[ImplicationResult]:
    """Evaluate every implication on one instance.

    Statements that hold as exact coefficient inequalities (perimetric vs
    total pairwise, monotonicity in the number of points) are checked
    unconditionally; ``premise_hits`` counts instances where the class
    membership premise holds, so coverage can be measured.
    """
    n = space.n
    if not 3 <= k <= n:
        raise ValueError(f"k must satisfy 3 <= k <= {n}")
    res = {tag: ImplicationResult(tag, instances_checked=1) for tag in TAGS}

    def fail(tag: str, **details: Any) -> None:
        res[tag].violations.append(details)

    lam_p = perimetric_coefficient(space, T, k)
    lam_kp = kannan_perimetric_coefficient(space, T, k)
    lam_b = banach_coefficient(space, T)
    gamma = kannan_coefficient(space, T, k)
    lam_s = {m: total_distance_coefficient(space, T, m) for m in range(2, n + 1)}
    fixed = dynamics.fixed_points(T)
    table = dynamics.period_table(T)

    # perimetric coefficient dominates total-pairwise coefficient at the same k
    if lam_p.member:
        res[P_IMPLIES_S].premise_hits += 1
    if lam_s[k].infimum > lam_p.infimum:
        fail(P_IMPLIES_S, lambda_s=_frac(lam_s[k].infimum), lambda_p=_frac(lam_p.infimum))

    # total pairwise coefficient is non-increasing in the number of points
    if any(lam_s[m].member for m in range(2, n)):
        res[S_MONOTONE].premise_hits += 1
    for m in range(2, n):
        for n2 in range(m + 1, n + 1):
            if lam_s[n2].infimum > lam_s[m].infimum:
                fail(S_MONOTONE, m=m, n=n2, lambda_m=_frac(lam_s[m].infimum),
                     lambda_n=_frac(lam_s[n2].infimum))

    if lam_p.member and k < n:
        res[P_IMPLIES_S_LARGER].premise_hits += 1
    for n2 in range(k + 1, n + 1):
        if lam_p.member and lam_s[n2].infimum > lam_p.infimum:
            fail(P_IMPLIES_S_LARGER, n=n2, lambda_p=_frac(lam_p.infimum),
                 lambda_s=_frac(lam_s[n2].infimum))

    if lam_b.member:
        res[BANACH_NO_CYCLES].premise_hits += 1
        longer = {p: sorted(s) for p, s in table.items() if p >= 2}
        if longer or len(fixed) != 1:
            fail(BANACH_NO_CYCLES, lambda_b=_frac(lam_b.infimum), fixed=sorted(fixed),
                 periodic={str(p): s for p, s in longer.items()})

    for tag, coeff, theorem in ((P_FIXED, lam_p, "perimetric"), (KP_FIXED, lam_kp, "kannan_perimetric")):
        if not coeff.member:
            continue
        res[tag].premise_hits += 1
        verdict = dynamics.theorem_verdict(theorem, space, T, k, coeff)
        if not verdict.conclusion_verified:
            fail(tag, coefficient=_frac(coeff.infimum), fixed=sorted(fixed),
                 hypotheses_hold=verdict.hypotheses_hold, notes=list(verdict.notes))

    # uniqueness statements need an orbit avoiding its own limit: impossible on a finite set
    for tag in (P_UNIQUE, KP_UNIQUE):
        res[tag].vacuous = True

    if gamma.below(Fraction(1, k)):
        res[KANNAN_IMPLIES_KP].premise_hits += 1
        bound = 2 * gamma.infimum
        if lam_kp.infimum is None or lam_kp.infimum > bound or not lam_kp.member:
            fail(KANNAN_IMPLIES_KP, gamma=_frac(gamma.infimum), mu=_frac(lam_kp.infimum),
                 bound=_frac(bound))

    if lam_p.below(Fraction(1, k + 1)):
        res[SMALL_P_IMPLIES_KP].premise_hits += 1
        lam = lam_p.infimum
        bound = 2 * lam / (1 - lam)
        if lam_kp.infimum is None or lam_kp.infimum > bound or not lam_kp.member:
            fail(SMALL_P_IMPLIES_KP, lambda_p=_frac(lam), mu=_frac(lam_kp.infimum),
                 bound=_frac(bound))

    return [res[t] for t in TAGS]


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 20240607
    trials: int = 1000
    n_points: tuple[int, int] = (3, 8)
    k: tuple[int, int] = (3, 5)
    distance_model: str = CLOSURE
    max_distance: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        (nlo, nhi), (klo, khi) = self.n_points, self.k
        if nlo > nhi or klo > khi:
            raise ValueError("ranges must be nonempty (lo <= hi)")
        if klo < 3:
            raise ValueError("k range must start at 3 or above")
        if klo > nlo:
            raise ValueError("smallest k must not exceed smallest point count")
        if self.distance_model not in MODELS:
            raise ValueError(f"distance model must be one of {MODELS}")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n_points": list(self.n_points),
            "k": list(self.k),
            "distance_model": self.distance_model,
            "max_distance": self.max_distance,
        }


def draw_instance(config: FuzzConfig, index: int) -> tuple[FiniteMetricSpace, SelfMap, int, int]:
    sub = derive_seed(config.seed, index)
    rng = random.Random(sub)
    n = rng.randint(*config.n_points)
    k = rng.randint(config.k[0], min(config.k[1], n))
    space = random_space(rng.getrandbits(64), n, config.distance_model, config.max_distance)
    T = random_map(rng.getrandbits(64), n)
    return space, T, k, sub


def _run_trial(args: tuple[FuzzConfig, int]) -> list[tuple[str, int, bool, list[dict]]]:
    config, index = args
    space, T, k, sub = draw_instance(config, index)
    out = []
    for r in check_implications(space, T, k):
        viols = []
        for v in r.violations:
            viols.append({"trial": index, "trial_seed": sub, "k": k,
                          "instance": {**instance_to_dict(space, T), "k": k}, "details": v})
        out.append((r.name, r.premise_hits, r.vacuous, viols))
    return out


@dataclass
class FuzzReport:
    config: FuzzConfig
    results: dict[str, ImplicationResult]

    @property
    def violations(self) -> list[dict]:
        return [v for t, r in self.results.items() if t not in FINDING_TAGS for v in r.violations]

    @property
    def findings(self) -> list[dict]:
        return [v for t, r in self.results.items() if t in FINDING_TAGS for v in r.violations]

    @property
    def coverage(self) -> dict[str, dict]:
        floor = COVERAGE_PER_1000 * self.config.trials // 1000
        return {
            t: {"premise_hits": self.results[t].premise_hits, "floor": floor,
                "met": self.results[t].premise_hits >= floor}
            for t in COVERAGE_TAGS
        }

    @property
    def coverage_met(self) -> bool:
        return all(c["met"] for c in self.coverage.values())

    def to_dict(self) -> dict:
        return {
            "schema": "polyfix/1",
            "kind": "fuzz_report",
            "config": self.config.to_dict(),
            "tags": {
                t: {
                    "instances_checked": r.instances_checked,
                    "premise_hits": r.premise_hits,
                    "vacuous": r.vacuous,
                    "violations": len(r.violations),
                    "finding": t in FINDING_TAGS,
                }
                for t, r in self.results.items()
            },
            "coverage": self.coverage,
            "coverage_met": self.coverage_met,
            "violations": self.violations,
            "findings": self.findings,
        }


def fuzz(config: FuzzConfig, jobs: int = 1) -> FuzzReport:
    results = {t: ImplicationResult(t) for t in TAGS}
    work = [(config, i) for i in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_trial, work, chunksize=max(1, len(work) // (8 * jobs))))
    else:
        outcomes = [_run_trial(w) for w in work]
    for trial in outcomes:
        for name, hits, vacuous, viols in trial:
            r = results[name]
            r.instances_checked += 1
            r.premise_hits += hits
            r.vacuous = r.vacuous or vacuous
            r.violations.extend(viols)
    return FuzzReport(config, results)
