"""JSON and plain-text rendering of reports.

JSON carries rationals only as exact "p/q" strings; the text form adds a
decimal approximation.  All JSON is dumped with sorted keys so identical
inputs give byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .classify import ClassificationReport, CoefficientResult
from .dynamics import TheoremVerdict, orbit, period_table
from .metric import FiniteMetricSpace, SelfMap, ValidationReport, format_rational
from .oracle import FuzzReport, ImplicationResult

SCHEMA = "polyfix/1"


def q(x: Fraction | None) -> str:
    return "INFEASIBLE" if x is None else format_rational(x)


def qh(x: Fraction | None) -> str:
    if x is None:
        return "INFEASIBLE"
    s = format_rational(x)
    return s if x.denominator == 1 else f"{s} (~{float(x):.6g})"


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def coefficient_dict(space: FiniteMetricSpace, r: CoefficientResult) -> dict:
    d = {
        "class": r.kind,
        "k": r.k,
        "infimum": q(r.infimum),
        "witness": None if r.witness is None else space.names(r.witness),
        "lhs": q(r.lhs),
        "rhs": q(r.rhs),
        "member": r.member,
        "threshold": q(r.threshold),
        "semantics": r.semantics,
    }
    if r.flags:
        d["flags"] = {k: v for k, v in r.flags.items() if k != "k"}
    return d


def classification_dict(space: FiniteMetricSpace, rep: ClassificationReport) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "classification",
        "k": rep.k,
        "semantics": rep.semantics,
        "points": list(space.labels),
        "results": {name: coefficient_dict(space, r) for name, r in rep.results.items()},
        "alternate_ordering": {
            "perimetric": coefficient_dict(space, rep.perimetric_alt),
            "kannan_perimetric": coefficient_dict(space, rep.kannan_perimetric_alt),
        },
        "flags": {
            "kannan_below_inverse_k": rep.kannan_below_inverse_k,
            "perimetric_below_inverse_k_plus_1": rep.perimetric_below_inverse_k_plus_1,
        },
    }


def verdict_dict(space: FiniteMetricSpace, v: TheoremVerdict) -> dict:
    return {
        "theorem": v.theorem,
        "k": v.k,
        "coefficient": coefficient_dict(space, v.coefficient),
        "class_member": v.class_member,
        "periodic_free": v.periodic_free,
        "periodic_violation": None if v.periodic_violation is None else {
            "point": space.labels[v.periodic_violation[0]], "period": v.periodic_violation[1]},
        "hypotheses_hold": v.hypotheses_hold,
        "fixed_points": space.names(sorted(v.fixed_points)),
        "fixed_bound_ok": v.fixed_bound_ok,
        "orbits_reach_fixed": v.orbits_reach_fixed,
        "conclusion_verified": v.conclusion_verified,
        "status": v.status,
        "notes": list(v.notes),
    }


def dynamics_dict(space: FiniteMetricSpace, T: SelfMap, verdicts: list[TheoremVerdict],
                  notes: list[str] = ()) -> dict:
    orbits = []
    for x in range(space.n):
        o = orbit(T, x)
        orbits.append({"start": space.labels[x], "tail": space.names(o.tail),
                       "cycle": space.names(o.cycle)})
    return {
        "schema": SCHEMA,
        "kind": "dynamics",
        "points": list(space.labels),
        "orbits": orbits,
        "fixed_points": space.names(sorted(i for i, t in enumerate(T.image) if i == t)),
        "prime_periods": {str(p): space.names(sorted(s)) for p, s in period_table(T).items()},
        "verdicts": [verdict_dict(space, v) for v in verdicts],
        "notes": list(notes),
    }


def validation_dict(labels: list[str], rep: ValidationReport) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "validation",
        "valid": rep.valid,
        "violations": [
            {"axiom": v.axiom, "points": [labels[i] for i in v.indices], "detail": v.detail}
            for v in rep.violations
        ],
    }


def implications_dict(space: FiniteMetricSpace, k: int, results: list[ImplicationResult]) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "implications",
        "k": k,
        "points": list(space.labels),
        "results": {
            r.name: {"premise_holds": r.premise_hits > 0, "vacuous": r.vacuous,
                     "violations": r.violations, "passed": r.passed}
            for r in results
        },
    }


# -- text rendering -------------------------------------------------------

def classification_text(space: FiniteMetricSpace, rep: ClassificationReport) -> str:
    lines = [f"k = {rep.k}, semantics = {rep.semantics}"]
    for name, r in rep.results.items():
        w = "-" if r.witness is None else "(" + ",".join(space.names(r.witness)) + ")"
        verdict = "member" if r.member else "not member"
        lines.append(f"  {name:<18} {qh(r.infimum):<22} {verdict:<11} threshold {q(r.threshold)}  witness {w}")
    for r in (rep.perimetric_alt, rep.kannan_perimetric_alt):
        lines.append(f"  [{r.semantics}] {r.kind}: {qh(r.infimum)}")
    lines.append(f"  kannan < 1/k: {rep.kannan_below_inverse_k}; "
                 f"perimetric < 1/(k+1): {rep.perimetric_below_inverse_k_plus_1}")
    return "\n".join(lines)


def dynamics_text(doc: dict) -> str:
    lines = ["orbits:"]
    for o in doc["orbits"]:
        lines.append(f"  {o['start']}: tail {o['tail']} cycle {o['cycle']}")
    lines.append(f"fixed points: {doc['fixed_points']}")
    for p, pts in doc["prime_periods"].items():
        lines.append(f"prime period {p}: {pts}")
    for v in doc["verdicts"]:
        c = v["coefficient"]
        lines.append(f"{v['theorem']} (k={v['k']}): coefficient {c['infimum']}, member {v['class_member']}, "
                     f"periodic-free {v['periodic_free']} -> {v['status']}")
        lines.extend(f"  note: {n}" for n in v["notes"])
    lines.extend(f"note: {n}" for n in doc["notes"])
    return "\n".join(lines)


def fuzz_text(rep: FuzzReport) -> str:
    doc = rep.to_dict()
    lines = [f"seed {rep.config.seed}, {rep.config.trials} trials, model {rep.config.distance_model}"]
    for tag, t in doc["tags"].items():
        kind = "finding" if t["finding"] else "theorem"
        extra = " (vacuous on finite spaces)" if t["vacuous"] else ""
        lines.append(f"  {tag:<46} premise hits {t['premise_hits']:>5}  violations {t['violations']:>3}  [{kind}]{extra}")
    for tag, c in doc["coverage"].items():
        if not c["met"]:
            lines.append(f"  coverage floor unmet: {tag} fired {c['premise_hits']} < {c['floor']}")
    return "\n".join(lines)
