"""Structural checks on ternary configurations over prime fields, and the
theorem-level suites that combine enumeration with schurity tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .aut import automorphism_group, is_schurian, preserves_colors
from .fusion import DEFAULT_NODE_LIMIT, EnumerationJob, budget_seconds, enumerate_fusions
from .permgroup import (
    PermGroup,
    Permutation,
    catalog_order,
    catalog_specs,
    is_member,
    make_named_group,
)
from .primes import is_prime, quadratic_class
from .schur import (
    Classes,
    CyclicCarrier,
    NotSchurError,
    SchurPartition,
    canonical_classes,
    is_tau_closed,
    make_schur_partition,
)
from .tensor import TensorConfig, is_ast, orb_coloring, require_coherent, residue, validate_cc

SUITES = ("thm-1.1", "thm-5.1", "exception-probe")
MAX_SUITE_PRIME = 13


class NotInvariantError(ValueError):
    """A permutation required by a precondition does not preserve the coloring."""


class UnsupportedPrime(ValueError):
    pass


def translation(p: int) -> Permutation:
    return Permutation.from_function(p, lambda x: (x + 1) % p)


def affine_generators(p: int) -> list[Permutation]:
    from .primes import primitive_roots

    g = primitive_roots(p)[0]
    return [translation(p), Permutation.from_function(p, lambda x: g * x % p)]


def _require_prime_ternary(cfg: TensorConfig) -> int:
    if cfg.m != 3:
        raise ValueError("a ternary configuration is required")
    if not is_prime(cfg.n) or cfg.n < 3:
        raise ValueError(f"degree {cfg.n} is not an odd prime")
    return cfg.n


# ---------------------------------------------------------------------------
# the partition of F_p^x read off the residue at (0, 1)


def pi_classes(cfg: TensorConfig) -> Classes:
    """Classes of the residue at ``(0, 1)`` other than ``{0}``."""
    p = _require_prime_ternary(cfg)
    require_coherent(cfg)
    if not preserves_colors(cfg, translation(p)):
        raise NotInvariantError("the configuration is not invariant under x -> x + 1")
    res = residue(cfg, (0, 1))
    blocks = [frozenset(int(v) for v in res.members(X)) for X in range(res.num_classes)]
    for point in (0, 1):
        if frozenset({point}) not in blocks:
            raise ValueError(f"residue at (0, 1) lacks the singleton class {{{point}}}")
    return canonical_classes(B for B in blocks if B != frozenset({0}))


def pi_partition(cfg: TensorConfig) -> SchurPartition:
    """The Schur partition of ``F_p^x`` carried by a translation-invariant configuration."""
    return make_schur_partition(CyclicCarrier("fstar", cfg.n), pi_classes(cfg))


@dataclass(frozen=True)
class PiVerdict:
    p: int
    classes: Classes
    schur: bool
    tau_closed: bool
    discrete_or_trivial: bool | None  # None when p is +-1 mod 8

    @property
    def ok(self) -> bool:
        return self.schur and self.tau_closed and self.discrete_or_trivial is not False


def verify_lemma_020925a(cfg: TensorConfig) -> PiVerdict:
    """Schur, tau-closure and (for p = +-3 mod 8) discrete-or-trivial checks of Pi."""
    p = _require_prime_ternary(cfg)
    for g in affine_generators(p):
        if not preserves_colors(cfg, g):
            raise NotInvariantError(f"x -> {g} does not preserve the coloring; not AGL_1({p})-invariant")
    classes = pi_classes(cfg)
    try:
        pi = make_schur_partition(CyclicCarrier("fstar", p), classes)
    except NotSchurError:
        return PiVerdict(p, classes, False, False, None)
    tau = is_tau_closed(pi)
    dt = None
    if abs(quadratic_class(p).signed_residue) == 3:
        dt = pi.is_discrete() or pi.is_trivial()
    return PiVerdict(p, classes, True, tau, dt)


# ---------------------------------------------------------------------------
# starred classes


@dataclass(frozen=True)
class StarredClasses:
    classes: tuple[int, ...]
    nonstarred_are_orbits: bool | None  # None when no group was supplied

    def __len__(self) -> int:
        return len(self.classes)


def starred_classes(cfg: TensorConfig, group: PermGroup | None = None) -> StarredClasses:
    """Classes of pairwise-distinct triples, with the orbit check for a 2-transitive group."""
    if cfg.m != 3:
        raise ValueError("starred classes are defined for ternary configurations")
    require_coherent(cfg)
    starred = tuple(X for X, pat in enumerate(cfg.class_patterns) if pat.count == 3)
    check = None
    if group is not None:
        if group.degree != cfg.n:
            raise ValueError("group degree differs from the configuration degree")
        orbits = orb_coloring(group, 3).colors
        check = True
        for X in range(cfg.num_classes):
            if X in starred:
                continue
            members = cfg.members(X)
            labels = np.unique(orbits[members])
            if len(labels) != 1 or np.count_nonzero(orbits == labels[0]) != len(members):
                check = False
                break
    return StarredClasses(starred, check)


# ---------------------------------------------------------------------------
# reports


def aut_matches(A: PermGroup, candidates: Iterable[str] | None = None) -> str | None:
    """First catalog descriptor whose group has A's order and lies inside A."""
    specs = catalog_specs(A.degree) if candidates is None else candidates
    for spec in specs:
        if catalog_order(spec) != A.order:
            continue
        G = make_named_group(spec)
        if all(is_member(A, g) for g in G.generators):
            return spec
    return None


@dataclass
class ResultRecord:
    base: str
    config: TensorConfig
    ast: bool
    aut: PermGroup
    schurian: bool
    matches: str | None
    witness_ok: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "base": self.base,
            "classes": self.config.num_classes,
            "ast": self.ast,
            "aut_order": self.aut.order,
            "aut_matches": self.matches,
            "schurian": self.schurian,
            "two_transitive": self.aut.is_two_transitive(),
            "contains_translation": is_member(self.aut, translation(self.config.n))
            if is_prime(self.config.n) else None,
            "witness_ok": self.witness_ok,
        }
        out.update(self.extra)
        return out


@dataclass
class Report:
    suite: str
    p: int
    complete: bool
    passed: bool
    results: list[ResultRecord]
    bases: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        entries = sorted((r.to_dict() for r in self.results),
                         key=lambda d: (d["base"], d["classes"], d["aut_order"], str(d["aut_matches"])))
        return {
            "suite": self.suite,
            "p": self.p,
            "complete": self.complete,
            "passed": self.passed,
            "bases": self.bases,
            "results": entries,
            "notes": self.notes,
        }


def _record(base: str, cfg: TensorConfig, circulant: bool, extra: dict | None = None) -> ResultRecord:
    seeds = [translation(cfg.n)] if circulant else []
    verdict = is_schurian(cfg, seeds=seeds)
    A = verdict.witness
    # the witness backs the verdict: its orbits equal cfg exactly when schurian
    witness_ok = all(preserves_colors(cfg, g) for g in A.generators) and \
        ((orb_coloring(A, cfg.m) == cfg) == verdict.schurian)
    return ResultRecord(base, cfg, cfg.m == 3 and is_ast(cfg), A, verdict.schurian, aut_matches(A), witness_ok,
                        extra or {})


def _enumerate(spec: str, ast_only: bool, node_limit: int, time_limit: float, jobs: int) -> EnumerationJob:
    base = orb_coloring(make_named_group(spec), 3)
    job = EnumerationJob(base, ast_only=ast_only, node_limit=node_limit, time_limit=time_limit, jobs=jobs)
    return enumerate_fusions(job)


def _base_entry(spec: str, job: EnumerationJob) -> dict:
    return {"base": spec, "base_classes": job.base.num_classes, "ast_only": job.ast_only,
            "complete": job.complete, "fusions": len(job.results)}


def theorem_checks(p: int, suite: str, node_limit: int = DEFAULT_NODE_LIMIT,
                   time_limit: float | None = None, jobs: int = 1) -> Report:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    if not is_prime(p) or p < 5 or p > MAX_SUITE_PRIME:
        raise UnsupportedPrime(f"suite {suite} runs for primes 5..{MAX_SUITE_PRIME}, got {p}")
    r8 = abs(quadratic_class(p).signed_residue)
    if suite == "thm-5.1" and r8 != 3:
        raise UnsupportedPrime(f"thm-5.1 needs p = +-3 mod 8, got {p}")
    if suite == "exception-probe" and r8 != 1:
        raise UnsupportedPrime(f"exception-probe needs p = +-1 mod 8, got {p}")
    if time_limit is None:
        time_limit = budget_seconds()
    deadline = time.monotonic() + time_limit

    def remaining() -> float:
        return max(1e-3, deadline - time.monotonic())

    if suite == "thm-1.1":
        spec = f"cyclic:{p}"
        job = _enumerate(spec, False, node_limit, remaining(), jobs)
        records = [_record(spec, r.config, circulant=True) for r in job.results]
        passed = job.complete and all(r.schurian for r in records if not r.ast)
        return Report(suite, p, job.complete, passed, records, [_base_entry(spec, job)])

    if suite == "thm-5.1":
        spec = f"agl1:{p}"
        job = _enumerate(spec, False, node_limit, remaining(), jobs)
        records = []
        for r in job.results:
            pv = verify_lemma_020925a(r.config)
            records.append(_record(spec, r.config, circulant=True, extra={
                "pi_classes": [sorted(X) for X in pv.classes],
                "pi_schur": pv.schur, "pi_tau_closed": pv.tau_closed,
                "pi_discrete_or_trivial": pv.discrete_or_trivial,
            }))
        expected = {orb_coloring(make_named_group(f"agl1:{p}"), 3),
                    orb_coloring(make_named_group(f"sym:{p}"), 3)}
        found = {r.config for r in records}
        lemmas = all(r.extra["pi_schur"] and r.extra["pi_tau_closed"] and r.extra["pi_discrete_or_trivial"]
                     for r in records)
        passed = job.complete and len(records) == 2 and found == expected and lemmas
        return Report(suite, p, job.complete, passed, records, [_base_entry(spec, job)])

    # exception-probe: AST fusions of orb_3(C_p : C_d) for every d | p - 1
    specs = [f"cyclic:{p}"] + [f"cyclotomic:{p}:{d}" for d in range(2, p - 1) if (p - 1) % d == 0] \
        + [f"agl1:{p}"]
    records, bases, complete = [], [], True
    for spec in specs:
        job = _enumerate(spec, True, node_limit, remaining(), jobs)
        complete &= job.complete
        bases.append(_base_entry(spec, job))
        records += [_record(spec, r.config, circulant=True) for r in job.results]
    consistent = all(
        validate_cc(r.config) is None and r.witness_ok and is_member(r.aut, translation(p)) and r.ast
        for r in records)
    notes = []
    odd = [r for r in records if not r.schurian]
    notes.append(f"{len(odd)} nonschurian AST configuration(s) found" if odd
                 else "no nonschurian AST configuration found")
    return Report(suite, p, complete, complete and consistent, records, bases, notes)


__all__ = [
    "NotInvariantError", "UnsupportedPrime", "PiVerdict", "StarredClasses", "Report", "ResultRecord",
    "SUITES", "aut_matches", "automorphism_group", "is_schurian", "pi_classes", "pi_partition",
    "starred_classes", "theorem_checks", "translation", "verify_lemma_020925a",
]
