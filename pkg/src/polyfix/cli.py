"""Command line interface.

Exit status: 0 success, 1 negative verdict (e.g. not a member), 2 violation
or mismatch found, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report
from .classify import (
    BANACH, KANNAN, KANNAN_PERIMETRIC, PERIMETRIC, SEMANTICS, STRICT, TOTAL_PAIRWISE, classify_all,
)
from .dynamics import fixed_point_theorem_check, kannan_theorem_check
from .instances import get_instance, reproduce
from .metric import (
    InstanceFormatError, MetricStructureError, format_rational, load_instance, validate_metric,
)
from .oracle import MODELS, FuzzConfig, check_implications, fuzz
from .picard import NonFiniteIterate, make_oracle, picard_iterate, uniqueness_check

OK, NEGATIVE, VIOLATION, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN..MAX, got {text!r}") from None
    return a, b


def _load(path: str, k: int | None):
    inst = load_instance(path)
    if k is None:
        k = inst.meta.get("k")
        if k is None:
            raise InputError("--k is required (the instance file carries no 'k')")
    if not 3 <= int(k) <= inst.space.n:
        raise InputError(f"k must satisfy 3 <= k <= {inst.space.n}, got {k}")
    return inst, int(k)


def _emit(args, doc: dict, text: str) -> None:
    print(report.dumps(doc) if args.json else text)


def cmd_validate(args) -> int:
    try:
        doc = json.loads(Path(args.file).read_text())
    except OSError as exc:
        raise InputError(f"{args.file}: cannot read file: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.file}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "distances" not in doc:
        raise InputError(f"{args.file}: missing 'distances'")
    labels = doc.get("points") or [str(i) for i in range(len(doc["distances"]))]
    try:
        rep = validate_metric(doc["distances"])
    except MetricStructureError as exc:
        raise InputError(f"{args.file}: distances: {exc}") from exc
    out = report.validation_dict([str(x) for x in labels], rep)
    text = "valid metric" if rep.valid else "\n".join(
        f"{v['axiom']} violated at {v['points']} {v['detail']}" for v in out["violations"])
    _emit(args, out, text)
    return OK if rep.valid else NEGATIVE


def cmd_classify(args) -> int:
    inst, k = _load(args.file, args.k)
    rep = classify_all(inst.space, inst.map, k, args.semantics, args.jobs)
    _emit(args, report.classification_dict(inst.space, rep), report.classification_text(inst.space, rep))
    return OK if rep.results[args.cls].member else NEGATIVE


def cmd_dynamics(args) -> int:
    inst, k = _load(args.file, args.k)
    verdicts = [fixed_point_theorem_check(inst.space, inst.map, k, args.semantics),
                kannan_theorem_check(inst.space, inst.map, k, args.semantics)]
    doc = report.dynamics_dict(inst.space, inst.map, verdicts)
    _emit(args, doc, report.dynamics_text(doc))
    if not all(v.conclusion_verified for v in verdicts):
        return VIOLATION
    return OK if verdicts[0].hypotheses_hold else NEGATIVE


def cmd_theorems(args) -> int:
    inst, k = _load(args.file, args.k)
    results = check_implications(inst.space, inst.map, k)
    doc = report.implications_dict(inst.space, k, results)
    text = "\n".join(
        f"{r.name:<46} {'vacuous' if r.vacuous else ('premise holds' if r.premise_hits else 'premise fails'):<14}"
        f" {'ok' if r.passed else 'VIOLATED'}"
        for r in results)
    _emit(args, doc, text)
    return OK if all(r.passed for r in results) else VIOLATION


def cmd_fuzz(args) -> int:
    try:
        cfg = FuzzConfig(seed=args.seed, trials=args.trials, n_points=args.n, k=args.k,
                         distance_model=args.model)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep = fuzz(cfg, args.jobs)
    doc = rep.to_dict()
    if args.out:
        Path(args.out).write_text(report.dumps(doc) + "\n")
    _emit(args, doc, report.fuzz_text(rep))
    if rep.violations:
        return VIOLATION
    return OK if rep.coverage_met else NEGATIVE


def _params(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        try:
            if not sep:
                raise ValueError
            out[key.strip()] = float(val)
        except ValueError:
            raise InputError(f"--param expects NAME=VALUE, got {item!r}") from None
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_iterate(args) -> int:
    try:
        oracle = make_oracle(args.map, **_params(args.param))
    except (KeyError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    try:
        trace = picard_iterate(oracle, _floats(args.x0), args.k, args.tol, args.max_steps)
    except NonFiniteIterate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VIOLATION
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    doc = trace.to_dict()
    if args.uniqueness_region:
        bounds = [_floats(part.replace(":", ",")) for part in args.uniqueness_region.split(";")]
        uq = uniqueness_check(trace, oracle, [tuple(b) for b in bounds])
        doc["uniqueness"] = uq.to_dict()
    if args.csv:
        Path(args.csv).write_text(trace.to_csv())
    text = (f"{oracle.name}: {'converged' if trace.converged else 'did not converge'} after "
            f"{trace.steps} steps, limit {trace.limit.tolist()}\n"
            f"r0 = {trace.r0_perimeter:.6g}, lambda (orbit) = {trace.lambda_estimate:.6g}, "
            f"mu (orbit) = {trace.mu_estimate:.6g}")
    if "uniqueness" in doc:
        u = doc["uniqueness"]
        text += f"\nuniqueness: {u['reason']}, fixed points found {u['fixed_points_found']}"
    _emit(args, doc, text)
    return OK if trace.converged else NEGATIVE


def cmd_repro(args) -> int:
    names = ["em_2_1", "ex_2_1", "em_2_2:4", "em_2_2:5", "em_2_2:6", "sec3_example"] \
        if args.instance == "all" else [args.instance]
    docs, lines, bad = [], [], 0
    for name in names:
        try:
            inst = get_instance(name)
        except (KeyError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        checks = reproduce(inst)
        lines.append(f"{inst.id}:")
        entries = []
        for c in checks:
            fmt = report.qh if hasattr(c.actual, "denominator") and not isinstance(c.actual, (bool, int)) else str
            lines.append(f"  {c.expected.quantity:<38} {fmt(c.actual):<28} [{c.expected.provenance}] "
                         f"{'ok' if c.ok else 'MISMATCH expected ' + str(c.expected.value)}")
            bad += not c.ok
            entries.append({"quantity": c.expected.quantity, "provenance": c.expected.provenance,
                            "expected": _jsonable(c.expected.value), "actual": _jsonable(c.actual),
                            "ok": c.ok, "note": c.expected.note})
        lines.extend(f"  note: {n}" for n in inst.notes)
        docs.append({"id": inst.id, "k": inst.k, "checks": entries, "notes": list(inst.notes)})
    _emit(args, {"schema": report.SCHEMA, "kind": "repro", "instances": docs}, "\n".join(lines))
    return VIOLATION if bad else OK


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if hasattr(v, "denominator") and not isinstance(v, (bool, int)):
        return format_rational(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyfix", description="Contraction classes and fixed points of self-maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, k=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if k:
            sp.add_argument("--k", type=int, help="polygon size (defaults to the file's 'k')")

    sp = sub.add_parser("validate", help="check the metric axioms of an instance file")
    sp.add_argument("file")
    common(sp, k=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("classify", help="contraction coefficients for all five classes")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--semantics", choices=SEMANTICS, default=STRICT)
    sp.add_argument("--class", dest="cls", default=PERIMETRIC,
                    choices=(BANACH, KANNAN, PERIMETRIC, TOTAL_PAIRWISE, KANNAN_PERIMETRIC),
                    help="class whose membership decides the exit status")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("dynamics", help="orbits, prime periods and fixed point theorem verdicts")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--semantics", choices=SEMANTICS, default=STRICT)
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("theorems", help="check every implication on one instance")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_theorems)

    sp = sub.add_parser("fuzz", help="randomised implication checking")
    sp.add_argument("--seed", type=int, default=FuzzConfig.seed)
    sp.add_argument("--trials", type=int, default=FuzzConfig.trials)
    sp.add_argument("--n", type=_range, default=FuzzConfig.n_points, metavar="MIN..MAX")
    sp.add_argument("--k", type=_range, default=FuzzConfig.k, metavar="MIN..MAX")
    sp.add_argument("--model", choices=MODELS, default=FuzzConfig.distance_model)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="write the JSON report here")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("iterate", help="Picard iteration on a built-in map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    sp.add_argument("--x0", required=True, help="comma-separated coordinates")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--max-steps", type=int, default=1000)
    sp.add_argument("--csv", help="write the trace as CSV")
    sp.add_argument("--uniqueness-region", metavar="LO:HI[;LO:HI]",
                    help="grid-search this box for other fixed points")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("repro", help="recompute a built-in example and compare expected values")
    sp.add_argument("instance", help="em_2_1 | ex_2_1 | em_2_2[:k] | sec3_example | all")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InstanceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
