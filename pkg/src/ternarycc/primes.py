"""Number theory of prime fields.

Subsets of ``F_p^x`` are handled in two forms: as Python sets of residues for
the public API, and internally as bitmasks over discrete logarithms with
respect to the smallest primitive root.  In log form multiplication by a
subgroup generator is a bit rotation, which keeps the radical and
group-type tests cheap enough for large random sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_up_to(limit: int) -> list[int]:
    return [p for p in range(2, limit + 1) if is_prime(p)]


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _check_odd_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def is_primitive_root(x: int, p: int) -> bool:
    x %= p
    if x == 0:
        return False
    return all(pow(x, (p - 1) // q, p) != 1 for q in prime_factors(p - 1))


@lru_cache(maxsize=None)
def primitive_roots(p: int) -> tuple[int, ...]:
    """All generators of ``F_p^x`` in increasing order."""
    if p == 2:
        return (1,)
    _check_odd_prime(p)
    return tuple(x for x in range(1, p) if is_primitive_root(x, p))


def multiplicative_order(x: int, p: int) -> int:
    x %= p
    if x == 0:
        raise ValueError("0 has no multiplicative order")
    for d in divisors(p - 1):
        if pow(x, d, p) == 1:
            return d
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class QuadraticClass:
    p: int
    residue_mod8: int  # one of 1, 3, 5, 7
    two_is_square: bool

    @property
    def signed_residue(self) -> int:
        """The residue written as +-1 or +-3."""
        return self.residue_mod8 if self.residue_mod8 <= 4 else self.residue_mod8 - 8


def quadratic_class(p: int) -> QuadraticClass:
    _check_odd_prime(p)
    two_is_square = pow(2, (p - 1) // 2, p) == 1
    r = p % 8
    if (r in (1, 7)) != two_is_square:
        raise AssertionError(f"mod-8 criterion for 2 fails at p={p}")
    return QuadraticClass(p, r, two_is_square)


def lemma41_witness(p: int) -> int | None:
    """Smallest ``x`` with ``x`` and ``1 - x`` both primitive roots mod ``p``."""
    _check_odd_prime(p)
    qs = prime_factors(p - 1)

    def prim(x: int) -> bool:
        return x != 0 and all(pow(x, (p - 1) // q, p) != 1 for q in qs)

    for x in range(2, p):
        if prim(x) and prim((1 - x) % p):
            return x
    return None


# ---------------------------------------------------------------------------
# log-domain subsets of F_p^x


class LogTable:
    """Discrete logarithms in ``F_p^x`` with respect to its least primitive root."""

    def __init__(self, p: int):
        _check_odd_prime(p)
        self.p = p
        self.order = p - 1
        g = primitive_roots(p)[0]
        self.exp = [1] * self.order
        for e in range(1, self.order):
            self.exp[e] = self.exp[e - 1] * g % p
        self.log = {x: e for e, x in enumerate(self.exp)}
        self.full = (1 << self.order) - 1
        self.divisors = divisors(self.order)

    def to_mask(self, xs: Iterable[int]) -> int:
        m = 0
        for x in xs:
            m |= 1 << self.log[x % self.p]
        return m

    def from_mask(self, mask: int) -> frozenset[int]:
        return frozenset(self.exp[e] for e in range(self.order) if mask >> e & 1)

    def rotate(self, mask: int, s: int) -> int:
        w = self.order
        s %= w
        return ((mask << s) | (mask >> (w - s))) & self.full

    def radical_order(self, mask: int) -> int:
        """Order of the largest subgroup ``H`` with ``H * X = X``."""
        best = 1
        for d in self.divisors[1:]:
            if self.rotate(mask, self.order // d) == mask:
                best = best * d // _gcd(best, d)
        return best

    def subgroup_mask(self, d: int) -> int:
        step = self.order // d
        m = 0
        for e in range(0, self.order, step):
            m |= 1 << e
        return m

    def is_group_type(self, mask: int) -> bool:
        """``X ∪ {1}`` is a subgroup; ``mask`` must exclude ``1`` (log 0)."""
        if mask & 1 or mask == 0:
            return False
        size = bin(mask).count("1") + 1
        if self.order % size:
            return False
        return (mask | 1) == self.subgroup_mask(size)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=None)
def log_table(p: int) -> LogTable:
    return LogTable(p)


def radical_mod_p(p: int, X: Iterable[int]) -> frozenset[int]:
    """Radical of ``X ⊆ F_p^x``: all ``y`` with ``yX = X``."""
    t = log_table(p)
    d = t.radical_order(t.to_mask(X))
    return t.from_mask(t.subgroup_mask(d))


def is_group_type(p: int, X: Iterable[int]) -> bool:
    X = frozenset(x % p for x in X)
    if not X or 1 in X or 0 in X:
        raise ValueError("X must be a nonempty subset of F_p^x without 1")
    t = log_table(p)
    return t.is_group_type(t.to_mask(X))


def one_minus(p: int, X: Iterable[int]) -> frozenset[int]:
    return frozenset((1 - x) % p for x in X)


@dataclass(frozen=True)
class Lemma42Record:
    p: int
    X: frozenset[int]
    radical_X: frozenset[int]
    radical_one_minus_X: frozenset[int]
    X_group_type: bool
    one_minus_X_group_type: bool
    sum_identity: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def lemma42_check(p: int, X: Iterable[int]) -> Lemma42Record:
    """Evaluate the radical, group-type and sum statements for one subset."""
    _check_odd_prime(p)
    X = frozenset(x % p for x in X)
    if not X or 0 in X or 1 in X:
        raise ValueError("X must be a nonempty subset of F_p^x not containing 1")
    t = log_table(p)
    Y = one_minus(p, X)
    mx, my = t.to_mask(X), t.to_mask(Y)
    rx, ry = t.radical_order(mx), t.radical_order(my)
    gx, gy = t.is_group_type(mx), t.is_group_type(my)
    sums = (sum(X) + sum(Y)) % p == len(X) % p
    violations = []
    if rx > 1 and ry > 1:
        violations.append("statement (1)")
    if gx and gy and len(X) != p - 2:
        violations.append("statement (2)")
    if not sums:
        violations.append("sum identity")
    return Lemma42Record(
        p, X, t.from_mask(t.subgroup_mask(rx)), t.from_mask(t.subgroup_mask(ry)),
        gx, gy, sums, tuple(violations),
    )
