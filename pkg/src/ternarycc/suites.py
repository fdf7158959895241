"""Finite-range checks of the number-theoretic and structural statements.

Each function returns a :class:`SuiteReport`; ``items`` holds one entry per
checked instance that failed (or per instance when the suite is small).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .permgroup import make_named_group
from .primes import divisors, lemma41_witness, lemma42_check, log_table, primes_up_to
from .schur import CyclicCarrier, classify_lemma33, is_tau_closed, schur_partitions
from .tensor import one_point_extension, orb_coloring, residue, wl3_of_binary
from .pipeline import starred_classes


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    checked: int
    items: list[dict] = field(default_factory=list)
    p: int | None = None

    def to_dict(self) -> dict:
        return {"suite": self.suite, "p": self.p, "complete": True, "passed": self.passed,
                "checked": self.checked, "items": self.items, "results": []}


def lemma41_sweep(max_p: int = 10_000) -> SuiteReport:
    """A primitive root ``x`` with ``1 - x`` primitive, for every odd prime up to ``max_p``."""
    missing = [p for p in primes_up_to(max_p) if p > 2 and lemma41_witness(p) is None]
    return SuiteReport("lemma41", not missing, len(primes_up_to(max_p)) - 1,
                       [{"p": p, "witness": None} for p in missing])


def _random_subset(rng: random.Random, p: int) -> frozenset[int]:
    """Mix of uniform subsets and unions of cosets of a random subgroup.

    Uniform subsets almost never have a nontrivial radical, so a third of
    the draws are coset unions to exercise the radical and group-type cases.
    """
    if rng.random() < 1 / 3:
        t = log_table(p)
        d = rng.choice(t.divisors)
        H = t.from_mask(t.subgroup_mask(d))
        cosets = {frozenset(h * t.exp[e] % p for h in H) for e in range(t.order)}
        chosen = [C for C in sorted(cosets, key=min) if rng.random() < 0.5]
        X = frozenset().union(*chosen) - {1} if chosen else frozenset()
    else:
        X = frozenset(x for x in range(2, p) if rng.random() < 0.5)
    if not X:
        X = frozenset({rng.randrange(2, p)})
    return X


def lemma42_random(samples: int = 100_000, max_p: int = 61, seed: int = 0) -> SuiteReport:
    rng = random.Random(seed)
    primes = [p for p in primes_up_to(max_p) if p >= 5]
    bad = []
    for _ in range(samples):
        p = rng.choice(primes)
        rec = lemma42_check(p, _random_subset(rng, p))
        if not rec.ok:
            bad.append({"p": p, "X": sorted(rec.X), "violations": list(rec.violations)})
    return SuiteReport("lemma42", not bad, samples, bad[:20])


def cyclotomic_specs(p: int, nontrivial: bool = True) -> list[str]:
    """``C_p : K`` for every ``K <= F_p^x``; without the 2-transitive one when ``nontrivial``."""
    out = [f"cyclic:{p}"] + [f"cyclotomic:{p}:{d}" for d in divisors(p - 1) if 1 < d < p - 1]
    if not nontrivial:
        out.append(f"agl1:{p}")
    return out


def lemma61_sweep(max_p: int = 31) -> SuiteReport:
    """Discrete residues of the one-point extension at 0, at every y != 0."""
    items, checked, ok = [], 0, True
    for p in primes_up_to(max_p):
        if p < 3:
            continue
        for spec in cyclotomic_specs(p):
            cfg2 = orb_coloring(make_named_group(spec), 2)
            if cfg2.num_classes <= 2:
                continue
            ext = one_point_extension(cfg2, 0)
            bad = [y for y in range(1, p) if residue(ext, (y,)).num_classes != p]
            checked += 1
            if bad:
                ok = False
                items.append({"group": spec, "nondiscrete_at": bad})
    return SuiteReport("lemma61", ok, checked, items)


def wl3_sweep(max_p: int = 13) -> SuiteReport:
    items, checked, ok = [], 0, True
    for p in primes_up_to(max_p):
        if p < 3:
            continue
        for spec in cyclotomic_specs(p):
            G = make_named_group(spec)
            cfg2 = orb_coloring(G, 2)
            if cfg2.num_classes <= 2:
                continue
            same = wl3_of_binary(cfg2) == orb_coloring(G, 3)
            checked += 1
            ok &= same
            items.append({"group": spec, "equal": same})
    return SuiteReport("wl3", ok, checked, items)


STARRED_EXPECTED = {"psl:2:11": 2, "pgl:3:2": 2, "pgl:3:3": 2,
                    "sym:5": 1, "sym:7": 1, "sym:11": 1, "sym:13": 1}


def starred_suite(groups: dict[str, int] | None = None) -> SuiteReport:
    groups = STARRED_EXPECTED if groups is None else groups
    items, ok = [], True
    for spec, want in groups.items():
        G = make_named_group(spec)
        st = starred_classes(orb_coloring(G, 3), G if G.is_two_transitive() else None)
        good = (want is None or len(st) == want) and st.nonstarred_are_orbits is not False
        ok &= good
        items.append({"group": spec, "starred": len(st), "expected": want,
                      "nonstarred_are_orbits": st.nonstarred_are_orbits})
    return SuiteReport("starred", ok, len(groups), items)


def lemma33_sweep(max_n: int = 12) -> SuiteReport:
    items, checked = [], 0
    for n in range(1, max_n + 1):
        for pi in schur_partitions(CyclicCarrier("zmod", n)):
            checked += 1
            try:
                classify_lemma33(pi)
            except AssertionError:
                items.append(pi.to_dict())
    return SuiteReport("lemma33", not items, checked, items)


def tau_claim_sweep(max_p: int = 13) -> SuiteReport:
    """tau-closed Schur partitions of F_p^x with a singleton other than {1} are discrete."""
    items, checked = [], 0
    for p in primes_up_to(max_p):
        if p < 3:
            continue
        for pi in schur_partitions(CyclicCarrier("fstar", p)):
            if not is_tau_closed(pi):
                continue
            if not any(len(X) == 1 and 1 not in X for X in pi.classes):
                continue
            checked += 1
            if not pi.is_discrete():
                items.append(pi.to_dict())
    return SuiteReport("tau-claim", not items, checked, items)
