"""Command-line interface: ``tcc <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget
exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .aut import BudgetExhausted, automorphism_search, is_schurian
from .fusion import DEFAULT_NODE_LIMIT, EnumerationJob, budget_seconds, enumerate_fusions
from .permgroup import make_named_group
from .pipeline import SUITES, Report, UnsupportedPrime, _record, theorem_checks
from .schemas import validate
from .schur import (
    CyclicCarrier,
    NotSchurError,
    classify_lemma33,
    cyclotomic_partition,
    enumerate_schur_partitions,
    make_schur_partition,
    radical,
)
from . import suites as lemma_suites
from .tensor import (
    TensorConfig,
    is_ast,
    orb_coloring,
    project,
    residue,
    wl_close_rounds,
)

log = logging.getLogger("ternarycc")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

SUITE_ALIASES = {
    "thm11": "thm-1.1", "thm-1.1": "thm-1.1",
    "thm51": "thm-5.1", "thm-5.1": "thm-5.1",
    "probe": "exception-probe", "exception-probe": "exception-probe",
}
LEMMA_SUITES = ("lemma41", "lemma42", "lemma61", "wl3", "starred", "lemma33", "tau-claim")


class InputError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _classes(text: str) -> list[tuple[int, ...]]:
    """``"1|2,3|4"`` -> ``[(1,), (2, 3), (4,)]``."""
    return [_ints(part) for part in text.split("|")]


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _load_config(path: str) -> TensorConfig:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        data = json.loads(text)
        validate("config", data)
        return TensorConfig.from_dict(data)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise InputError(f"cannot read configuration {path}: {exc}") from None
    except Exception as exc:  # jsonschema.ValidationError
        raise InputError(f"configuration {path} does not match the schema: {exc}") from None


def _config_from_args(args) -> TensorConfig:
    if getattr(args, "input", None):
        return _load_config(args.input)
    if getattr(args, "group", None):
        return orb_coloring(make_named_group(args.group), args.arity)
    raise InputError("give either --group or --input")


def _emit(doc: dict, kind: str, out: str | None) -> None:
    validate(kind, doc)
    text = json.dumps(doc, indent=None if kind == "config" else 2, separators=None)
    if out is None:
        return
    if out == "-":
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _summary(cfg: TensorConfig) -> str:
    s = f"{cfg.num_classes} classes"
    if cfg.m == 3:
        s += f", AST: {'true' if is_ast(cfg) else 'false'}"
    return s


# ---------------------------------------------------------------------------
# subcommands


def cmd_orb(args) -> int:
    cfg = orb_coloring(make_named_group(args.group), args.arity)
    _emit(cfg.to_dict(), "config", args.out)
    print(_summary(cfg))
    return EXIT_OK


def cmd_wl_close(args) -> int:
    cfg = _load_config(args.input)
    out, rounds = wl_close_rounds(cfg)
    _emit(out.to_dict(), "config", args.out)
    print(f"{out.num_classes} classes, stable after {rounds} refining rounds")
    return EXIT_OK


def cmd_project(args) -> int:
    cfg = _config_from_args(args)
    out = project(cfg, args.coords)
    _emit(out.to_dict(), "config", args.out)
    print(f"{out.num_classes} classes")
    return EXIT_OK


def cmd_residue(args) -> int:
    cfg = _config_from_args(args)
    out = residue(cfg, args.tuple, args.coords)
    _emit(out.to_dict(), "config", args.out)
    print(f"{out.num_classes} classes")
    return EXIT_OK


def cmd_aut(args) -> int:
    cfg = _config_from_args(args)
    res = automorphism_search(cfg, node_limit=args.node_limit, time_limit=budget_seconds(args.time_limit))
    A = res.group
    print(f"order {A.order}")
    print(f"two-transitive: {'true' if A.is_two_transitive() else 'false'}")
    for g in A.generators:
        print(f"  {g}")
    return EXIT_OK


def cmd_schurian(args) -> int:
    cfg = _config_from_args(args)
    v = is_schurian(cfg, node_limit=args.node_limit, time_limit=budget_seconds(args.time_limit))
    print(f"schurian: {'true' if v.schurian else 'false'}, witness order {v.witness.order}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.input:
        base, label = _load_config(args.input), args.input
    else:
        base, label = orb_coloring(make_named_group(args.base), args.arity), args.base
    job = EnumerationJob(base, ast_only=args.ast_only, node_limit=args.node_limit,
                         time_limit=budget_seconds(args.time_limit), jobs=args.jobs)
    enumerate_fusions(job)
    circulant = label.startswith(("cyclic:", "cyclotomic:", "agl1:"))
    records = [_record(label, r.config, circulant=circulant) for r in job.results]
    report = Report("enumerate", base.n, job.complete, job.complete, records,
                    [{"base": label, "base_classes": base.num_classes, "ast_only": args.ast_only,
                      "complete": job.complete, "fusions": len(job.results), "nodes": job.nodes}])
    doc = report.to_dict()
    _emit(doc, "report", args.out)
    state = "complete" if job.complete else "partial"
    print(f"{len(job.results)} results, {state} ({job.nodes} nodes)")
    for r in doc["results"]:
        print(f"  {r['classes']} classes, AST: {str(r['ast']).lower()}, aut order {r['aut_order']}"
              f" ({r['aut_matches'] or '-'}), schurian: {str(r['schurian']).lower()}")
    return EXIT_OK if job.complete else EXIT_BUDGET


def cmd_verify(args) -> int:
    name = args.suite
    if name in SUITE_ALIASES:
        if args.p is None:
            raise InputError(f"suite {name} needs --p")
        report = theorem_checks(args.p, SUITE_ALIASES[name], node_limit=args.node_limit,
                                time_limit=budget_seconds(args.time_limit), jobs=args.jobs)
        doc = report.to_dict()
        complete, passed = report.complete, report.passed
        print(f"{doc['suite']} p={args.p}: {'PASS' if passed else 'FAIL'}, "
              f"{len(doc['results'])} configurations, complete: {str(complete).lower()}")
    else:
        if name == "lemma41":
            rep = lemma_suites.lemma41_sweep(args.max_p or 10_000)
        elif name == "lemma42":
            rep = lemma_suites.lemma42_random(args.samples, args.max_p or 61, args.seed)
        elif name == "lemma61":
            rep = lemma_suites.lemma61_sweep(args.max_p or 31)
        elif name == "wl3":
            rep = lemma_suites.wl3_sweep(args.max_p or 13)
        elif name == "starred":
            rep = lemma_suites.starred_suite({args.group: None} if args.group else None)
        elif name == "lemma33":
            rep = lemma_suites.lemma33_sweep(args.max_n)
        else:
            rep = lemma_suites.tau_claim_sweep(args.max_p or 13)
        doc = rep.to_dict()
        complete, passed = True, rep.passed
        print(f"{name}: {'PASS' if passed else 'FAIL'} ({rep.checked} checked)")
        if name == "starred":
            for item in rep.items:
                print(f"  {item['group']}: starred classes: {item['starred']}")
    _emit(doc, "report", args.out)
    if not complete:
        return EXIT_BUDGET
    return EXIT_OK if passed else EXIT_FAIL


def cmd_schur(args) -> int:
    carrier = CyclicCarrier.parse(args.carrier)
    if args.action == "enumerate":
        parts = enumerate_schur_partitions(carrier)
        print(f"{len(parts)} Schur partitions of {carrier}")
        for pi in parts:
            print("  " + " | ".join(",".join(map(str, sorted(X))) for X in pi.classes))
        return EXIT_OK
    if args.action == "radical":
        if args.set is None:
            raise InputError("radical needs --set")
        print(",".join(map(str, sorted(radical(carrier, args.set)))))
        return EXIT_OK
    if args.action == "cyclotomic":
        if args.K is None:
            raise InputError("cyclotomic needs --K")
        pi = cyclotomic_partition(carrier, args.K)
        _emit(pi.to_dict(), "partition", args.out)
        print(" | ".join(",".join(map(str, sorted(X))) for X in pi.classes))
        return EXIT_OK
    if args.classes is None:
        raise InputError(f"{args.action} needs --classes")
    try:
        pi = make_schur_partition(carrier, args.classes)
    except NotSchurError as exc:
        print(f"not a Schur partition: {exc}")
        return EXIT_FAIL
    if args.action == "check":
        print("Schur partition")
        _emit(pi.to_dict(), "partition", args.out)
        return EXIT_OK
    res = classify_lemma33(pi)
    if res.case == "a":
        print("case (a): every highest class has a nontrivial radical")
    else:
        desc = " x ".join(f"C_{f.order} [{'/'.join(f.labels)}]" for f in res.factors)
        print(f"case (b), k={len(res.factors)}: {desc}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--group", help="catalog group, e.g. agl1:7, psl:2:11, file:gens.txt")
    src.add_argument("--input", help="configuration JSON ('-' for stdin)")
    p.add_argument("--arity", type=int, default=3, choices=(1, 2, 3))


def _add_budget(p: argparse.ArgumentParser, nodes: int) -> None:
    p.add_argument("--node-limit", type=_positive, default=nodes)
    p.add_argument("--time-limit", type=float, default=3600.0,
                   help="wall limit in seconds (TCC_BUDGET_SECONDS overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orb", help="orbit configuration of a catalog group")
    p.add_argument("--group", required=True)
    p.add_argument("--arity", type=int, default=3, choices=(1, 2, 3))
    p.add_argument("--out")
    p.set_defaults(func=cmd_orb)

    p = sub.add_parser("wl-close", help="coarsest coherent refinement")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_wl_close)

    p = sub.add_parser("project", help="projection to a coordinate subset")
    _add_source(p)
    p.add_argument("--coords", type=_ints, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("residue", help="residue at a fixed tuple")
    _add_source(p)
    p.add_argument("--tuple", type=_ints, required=True)
    p.add_argument("--coords", type=_ints, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_residue)

    for name, fn, helptext in (("aut", cmd_aut, "automorphism group"),
                               ("schurian", cmd_schurian, "schurity test")):
        p = sub.add_parser(name, help=helptext)
        _add_source(p)
        _add_budget(p, 10**7)
        p.set_defaults(func=fn)

    p = sub.add_parser("enumerate", help="coherent fusions of a base configuration")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--base", help="catalog group whose orbit configuration is the base")
    src.add_argument("--input", help="base configuration JSON")
    p.add_argument("--arity", type=int, default=3, choices=(2, 3))
    p.add_argument("--ast-only", action="store_true")
    _add_budget(p, DEFAULT_NODE_LIMIT)
    p.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(set(SUITE_ALIASES) | set(LEMMA_SUITES)))
    p.add_argument("--p", type=int)
    p.add_argument("--max-p", type=int)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--group")
    p.add_argument("--samples", type=_positive, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _add_budget(p, DEFAULT_NODE_LIMIT)
    p.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("schur", help="Schur partitions over cyclic groups")
    p.add_argument("action", choices=("check", "classify", "enumerate", "radical", "cyclotomic"))
    p.add_argument("--carrier", required=True, help="zmod:N or fstar:P")
    p.add_argument("--classes", type=_classes, help='e.g. "1|2,3|4"')
    p.add_argument("--set", type=_ints)
    p.add_argument("--K", type=_ints)
    p.add_argument("--out")
    p.set_defaults(func=cmd_schur)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, UnsupportedPrime, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
