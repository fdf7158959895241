"""Schur partitions over cyclic groups.

A carrier is either the additive group ``Z_n`` or the multiplicative group
``F_p^x``.  Both are handled through an element list and an operation table
indexed by element position, so every routine below is presentation-free
except :func:`tau_image`, which mixes field addition with the group.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .primes import is_prime, prime_factors, primitive_roots

Classes = tuple[frozenset[int], ...]

MAX_ENUM_ORDER = 16


class NotSchurError(ValueError):
    """The partition fails one of the Schur partition conditions."""


@dataclass(frozen=True)
class CyclicCarrier:
    kind: str  # "zmod" or "fstar"
    modulus: int

    def __post_init__(self):
        if self.kind not in ("zmod", "fstar"):
            raise ValueError(f"unknown carrier kind {self.kind!r}")
        if self.kind == "fstar" and not is_prime(self.modulus):
            raise ValueError(f"fstar needs a prime, got {self.modulus}")
        if self.modulus < 1:
            raise ValueError("modulus must be positive")

    @classmethod
    def parse(cls, text: str) -> CyclicCarrier:
        kind, _, num = text.partition(":")
        if not num.isdigit():
            raise ValueError(f"malformed carrier {text!r}")
        return cls(kind, int(num))

    def __str__(self) -> str:
        return f"{self.kind}:{self.modulus}"

    @cached_property
    def elements(self) -> tuple[int, ...]:
        if self.kind == "zmod":
            return tuple(range(self.modulus))
        return tuple(range(1, self.modulus))

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0 if self.kind == "zmod" else 1

    def op(self, x: int, y: int) -> int:
        if self.kind == "zmod":
            return (x + y) % self.modulus
        return x * y % self.modulus

    def inverse(self, x: int) -> int:
        if self.kind == "zmod":
            return -x % self.modulus
        return pow(x, -1, self.modulus)

    def power(self, x: int, e: int) -> int:
        if self.kind == "zmod":
            return x * e % self.modulus
        return pow(x, e, self.modulus)

    @cached_property
    def index(self) -> dict[int, int]:
        return {x: i for i, x in enumerate(self.elements)}

    @cached_property
    def table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``elements[i] * elements[j]``."""
        els = self.elements
        return np.array([[self.index[self.op(a, b)] for b in els] for a in els], dtype=np.int64)

    @cached_property
    def generators(self) -> frozenset[int]:
        if self.kind == "zmod":
            return frozenset(x for x in self.elements if gcd(x, self.modulus) == 1) if self.modulus > 1 \
                else frozenset({0})
        return frozenset(primitive_roots(self.modulus)) if self.modulus > 2 else frozenset({1})

    def element_order(self, x: int) -> int:
        e, y = 1, x
        while y != self.identity:
            y = self.op(y, x)
            e += 1
        return e

    def subgroup(self, d: int) -> frozenset[int]:
        """The unique subgroup of order ``d``."""
        if self.order % d:
            raise ValueError(f"{d} does not divide the group order {self.order}")
        g = min(self.generators)
        h = self.power(g, self.order // d)
        return frozenset(self.power(h, e) for e in range(d))

    @cached_property
    def automorphism_exponents(self) -> tuple[int, ...]:
        """Exponents ``a`` coprime to the order; ``x -> x^a`` is an automorphism."""
        n = self.order
        return tuple(a for a in range(1, max(n, 2)) if gcd(a, n) == 1)


@dataclass(frozen=True)
class SchurPartition:
    carrier: CyclicCarrier
    classes: Classes
    constants: np.ndarray = field(compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, x: int) -> int:
        for i, X in enumerate(self.classes):
            if x in X:
                return i
        raise KeyError(x)

    def constant(self, X: int, Y: int, Z: int) -> int:
        """Coefficient of any ``z in Z`` in the product of class sums ``X * Y``."""
        return int(self.constants[X, Y, Z])

    def is_discrete(self) -> bool:
        return all(len(X) == 1 for X in self.classes)

    def is_trivial(self) -> bool:
        return len(self.classes) <= 2

    def to_dict(self) -> dict:
        return {"carrier": str(self.carrier), "classes": [sorted(X) for X in self.classes]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def canonical_classes(classes: Iterable[Iterable[int]]) -> Classes:
    return tuple(sorted((frozenset(X) for X in classes), key=lambda X: (min(X), len(X))))


def _check_partition(carrier: CyclicCarrier, classes: Classes) -> None:
    seen: set[int] = set()
    for X in classes:
        if not X:
            raise ValueError("empty class")
        if seen & X:
            raise ValueError("classes overlap")
        seen |= X
    if seen != set(carrier.elements):
        raise ValueError(f"classes do not cover the carrier {carrier}")


def _class_vector(carrier: CyclicCarrier, classes: Classes) -> np.ndarray:
    lab = np.empty(carrier.order, dtype=np.int64)
    for i, X in enumerate(classes):
        for x in X:
            lab[carrier.index[x]] = i
    return lab


def _product_counts(carrier: CyclicCarrier, lab: np.ndarray, k: int) -> np.ndarray:
    """``out[X, Y, z]`` = number of pairs ``(x, y) in X x Y`` with ``xy = z``."""
    n = carrier.order
    out = np.zeros((k, k, n), dtype=np.int64)
    tab = carrier.table
    xs = np.repeat(np.arange(n), n)
    ys = np.tile(np.arange(n), n)
    np.add.at(out, (lab[xs], lab[ys], tab[xs, ys]), 1)
    return out


def make_schur_partition(carrier: CyclicCarrier, classes: Iterable[Iterable[int]]) -> SchurPartition:
    """Validate ``classes`` and attach structure constants; raises :class:`NotSchurError`."""
    classes = canonical_classes(classes)
    _check_partition(carrier, classes)
    if frozenset({carrier.identity}) not in classes:
        raise NotSchurError("{identity} is not a class")
    for X in classes:
        if frozenset(carrier.inverse(x) for x in X) not in classes:
            raise NotSchurError(f"inverse of {sorted(X)} is not a class")
    k = len(classes)
    lab = _class_vector(carrier, classes)
    counts = _product_counts(carrier, lab, k)
    constants = np.zeros((k, k, k), dtype=np.int64)
    for Z, cls in enumerate(classes):
        idx = [carrier.index[z] for z in cls]
        block = counts[:, :, idx]
        if np.any(block != block[:, :, :1]):
            X, Y = map(int, np.argwhere(np.any(block != block[:, :, :1], axis=2))[0])
            raise NotSchurError(
                f"{sorted(classes[X])} * {sorted(classes[Y])} is not constant on {sorted(cls)}")
        constants[:, :, Z] = block[:, :, 0]
    return SchurPartition(carrier, classes, constants)


def is_schur_partition(carrier: CyclicCarrier, classes: Iterable[Iterable[int]]) -> bool:
    try:
        make_schur_partition(carrier, classes)
    except NotSchurError:
        return False
    return True


def radical(carrier: CyclicCarrier, X: Iterable[int]) -> frozenset[int]:
    """``{y : yX = X}`` (the carrier is abelian, so left and right agree)."""
    X = frozenset(X)
    if not X:
        raise ValueError("radical of the empty set")
    return frozenset(y for y in carrier.elements if frozenset(carrier.op(y, x) for x in X) == X)


def highest_classes(pi: SchurPartition) -> list[frozenset[int]]:
    gens = pi.carrier.generators
    return [X for X in pi.classes if X & gens]


def is_group_type(p: int, X: Iterable[int]) -> bool:
    X = frozenset(x % p for x in X)
    if not X or 1 in X or 0 in X:
        raise ValueError("X must be a nonempty subset of F_p^x without 1")
    H = X | {1}
    return all(a * b % p in H for a in H for b in H)


def tau_image(p: int, X: Iterable[int]) -> frozenset[int]:
    return frozenset((1 - x) % p for x in X)


def is_tau_closed(pi: SchurPartition) -> bool:
    """Every class other than ``{1}`` is sent by ``X -> 1 - X`` to a class."""
    if pi.carrier.kind != "fstar":
        raise ValueError("the tau map is defined on F_p^x only")
    p = pi.carrier.modulus
    cls = set(pi.classes)
    return all(tau_image(p, X) in cls for X in pi.classes if 1 not in X)


def orbit_partition(carrier: CyclicCarrier, K: Iterable[int]) -> Classes:
    """Orbits of the automorphisms ``x -> x^a``, ``a in K``."""
    K = frozenset(K)
    n = carrier.order
    for a in K:
        if gcd(a, n) != 1:
            raise ValueError(f"{a} is not a unit modulo {n}")
    if any(a * b % n not in {c % n for c in K} for a in K for b in K) and n > 1:
        raise ValueError(f"{sorted(K)} is not closed under multiplication modulo {n}")
    seen, out = set(), []
    for x in carrier.elements:
        if x in seen:
            continue
        orb = frozenset(carrier.power(x, a) for a in K | {1})
        seen |= orb
        out.append(orb)
    return canonical_classes(out)


def cyclotomic_partition(carrier: CyclicCarrier, K: Iterable[int]) -> SchurPartition:
    return make_schur_partition(carrier, orbit_partition(carrier, K))


def discrete_partition(carrier: CyclicCarrier) -> SchurPartition:
    return make_schur_partition(carrier, [[x] for x in carrier.elements])


def trivial_partition(carrier: CyclicCarrier) -> SchurPartition:
    rest = [x for x in carrier.elements if x != carrier.identity]
    return make_schur_partition(carrier, [[carrier.identity]] + ([rest] if rest else []))


# ---------------------------------------------------------------------------
# enumeration by Schur closure


def schur_closure(carrier: CyclicCarrier, classes: Iterable[Iterable[int]]) -> Classes:
    """Coarsest Schur partition refining the given partition."""
    n = carrier.order
    idx = carrier.index
    lab = [0] * n
    for i, X in enumerate(canonical_classes(classes)):
        for x in X:
            lab[idx[x]] = i + 1
    lab[idx[carrier.identity]] = 0
    inv = [idx[carrier.inverse(x)] for x in carrier.elements]
    quot = _quotient_table(carrier)
    lab, k = _relabel([(c,) for c in lab])
    while True:
        onehot = np.eye(k, dtype=np.int64)[lab]
        counts = np.einsum("xa,xzb->zab", onehot, onehot[quot]).reshape(n, k * k)
        rows = [(lab[z], lab[inv[z]], *counts[z].tolist()) for z in range(n)]
        new, k2 = _relabel(rows)
        if k2 == k:
            break
        lab, k = new, k2
    groups: dict[int, list[int]] = {}
    for i, c in enumerate(lab):
        groups.setdefault(c, []).append(carrier.elements[i])
    return canonical_classes(groups.values())


@lru_cache(maxsize=None)
def _quotient_cached(kind: str, modulus: int) -> np.ndarray:
    carrier = CyclicCarrier(kind, modulus)
    idx = carrier.index
    return np.array([[idx[carrier.op(carrier.inverse(x), z)] for z in carrier.elements]
                     for x in carrier.elements], dtype=np.int64)


def _quotient_table(carrier: CyclicCarrier) -> np.ndarray:
    """``q[x, z]`` is the index of ``x^-1 z``."""
    return _quotient_cached(carrier.kind, carrier.modulus)


def _relabel(rows: list[tuple]) -> tuple[list[int], int]:
    codes: dict[tuple, int] = {}
    out = [codes.setdefault(r, len(codes)) for r in rows]
    return out, len(codes)


def _meet(a: Classes, b: Classes) -> Classes:
    out = [X & Y for X in a for Y in b if X & Y]
    return canonical_classes(out)


def enumerate_schur_partitions(carrier: CyclicCarrier, max_order: int = MAX_ENUM_ORDER) -> list[SchurPartition]:
    """All Schur partitions of the carrier, sorted by class count then classes.

    Every Schur ring is the join of the rings generated by its basic sets, and
    the ring generated by one set ``T`` is the closure of ``{1}, T, rest``.
    Seeds are taken up to complement and carrier automorphisms; the images of
    each closure under the automorphisms are added back.
    """
    if carrier.order > max_order:
        raise ValueError(f"order {carrier.order} exceeds the enumeration bound {max_order}")
    ident = carrier.identity
    others = [x for x in carrier.elements if x != ident]
    bit = {x: 1 << i for i, x in enumerate(others)}
    full = (1 << len(others)) - 1
    perms = [[bit[carrier.power(x, a)] for x in others] for a in carrier.automorphism_exponents]

    def image(mask: int, perm: list[int]) -> int:
        out = 0
        for i, b in enumerate(perm):
            if mask >> i & 1:
                out |= b
        return out

    def as_classes(mask: int) -> list[list[int]]:
        inside = [x for x in others if bit[x] & mask]
        outside = [x for x in others if not bit[x] & mask]
        return [[ident]] + [p for p in (inside, outside) if p]

    found: set[Classes] = set()
    for mask in range(full + 1):
        orbit = {image(mask, perm) for perm in perms}
        if min(min(orbit), min(full ^ m for m in orbit)) < mask:
            continue  # another seed in the same class gives an image of this closure
        closed = schur_closure(carrier, as_classes(mask))
        for a in carrier.automorphism_exponents:
            found.add(canonical_classes(frozenset(carrier.power(x, a) for x in X) for X in closed))
    frontier = list(found)
    while frontier:
        new = []
        current = list(found)
        for a in frontier:
            for b in current:
                c = schur_closure(carrier, _meet(a, b))
                if c not in found:
                    found.add(c)
                    new.append(c)
        frontier = new
    ordered = sorted(found, key=lambda cl: (len(cl), [sorted(X) for X in cl]))
    return [make_schur_partition(carrier, cl) for cl in ordered]


# ---------------------------------------------------------------------------
# the radical / decomposition dichotomy


@dataclass(frozen=True)
class Factor:
    order: int
    elements: frozenset[int]
    classes: Classes
    labels: tuple[str, ...]  # subset of ("trivial", "orbit")


@dataclass(frozen=True)
class Lemma33Result:
    case: str  # "a" or "b"
    highest: tuple[frozenset[int], ...]
    radicals: tuple[frozenset[int], ...]
    factors: tuple[Factor, ...] = ()


def _set_partitions(items: Sequence):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _factor_labels(carrier: CyclicCarrier, elements: frozenset[int], classes: Classes) -> tuple[str, ...]:
    labels = []
    if len(classes) <= 2:
        labels.append("trivial")
    # an orbit partition is the orbit set of the automorphisms fixing every class
    d = len(elements)
    units = [a for a in range(1, max(d, 2)) if gcd(a, d) == 1]
    cls = set(classes)
    kstar = [a for a in units if all(frozenset(carrier.power(x, a) for x in X) == X for X in classes)]
    orbits = set()
    for x in elements:
        orbits.add(frozenset(carrier.power(x, a) for a in kstar))
    if orbits == cls:
        labels.append("orbit")
    return tuple(labels)


def classify_lemma33(pi: SchurPartition) -> Lemma33Result:
    """Report case (a) if every highest class has a nontrivial radical, else a decomposition."""
    carrier = pi.carrier
    high = tuple(highest_classes(pi))
    rads = tuple(radical(carrier, X) for X in high)
    ident = carrier.identity
    if high and all(len(r) > 1 for r in rads):
        return Lemma33Result("a", high, rads)
    n = carrier.order
    prime_powers = [p ** _valuation(n, p) for p in prime_factors(n)] if n > 1 else []
    cls = set(pi.classes)
    for blocks in sorted(_set_partitions(prime_powers), key=lambda b: (-len(b), b)):
        orders = [int(np.prod(b)) for b in blocks] or [1]
        subgroups = [carrier.subgroup(d) for d in orders]
        factor_classes = [canonical_classes(X & H for X in pi.classes if X & H) for H in subgroups]
        product = set()
        for combo in itertools.product(*factor_classes):
            s = frozenset([ident])
            for part in combo:
                s = frozenset(carrier.op(a, b) for a in s for b in part)
            product.add(s)
        if product != cls:
            continue
        factors = tuple(
            Factor(d, H, fc, _factor_labels(carrier, H, fc))
            for d, H, fc in zip(orders, subgroups, factor_classes)
        )
        if not all(f.labels for f in factors):
            continue
        if sum(1 for f in factors if "trivial" not in f.labels) > 1:
            continue
        return Lemma33Result("b", high, rads, factors)
    raise AssertionError(f"no case of the dichotomy applies to {[sorted(X) for X in pi.classes]}")


def _valuation(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def _cached_enumeration(kind: str, modulus: int) -> tuple[SchurPartition, ...]:
    return tuple(enumerate_schur_partitions(CyclicCarrier(kind, modulus)))


def schur_partitions(carrier: CyclicCarrier) -> tuple[SchurPartition, ...]:
    """Memoized :func:`enumerate_schur_partitions`."""
    return _cached_enumeration(carrier.kind, carrier.modulus)
