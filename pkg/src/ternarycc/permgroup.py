"""Permutations, permutation groups and the named group catalog.

Permutations act on the right: ``x^(fg) = (x^f)^g``.  A :class:`Permutation`
stores the image of ``i`` at position ``i``, so ``f * g`` first applies ``f``
and then ``g``.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from math import prod
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .primes import is_prime, primitive_roots

log = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 31
DEFAULT_MAX_TUPLES = 31**3


class DegreeError(ValueError):
    """Raised when permutations or groups of different degree are mixed."""


class SizeBoundError(ValueError):
    """Raised when a tuple space exceeds the configured memory bound."""


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_function(cls, n: int, fn) -> Permutation:
        return cls(tuple(fn(i) for i in range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
        images = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        if other.n != self.n:
            raise DegreeError(f"degrees differ: {self.n} != {other.n}")
        g = other.images
        return Permutation(tuple(g[i] for i in self.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def __pow__(self, k: int) -> Permutation:
        result = Permutation.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(self.n):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles()) or "()"


def act_on_tuple(f: Permutation, x: Sequence[int]) -> tuple[int, ...]:
    """Componentwise image ``x^f``."""
    for xi in x:
        if not 0 <= xi < f.n:
            raise DegreeError(f"point {xi} outside 0..{f.n - 1}")
    return tuple(f.images[xi] for xi in x)


def _mul(a: tuple, b: tuple) -> tuple:
    return tuple(b[i] for i in a)


def _inv(a: tuple) -> tuple:
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


class _Chain:
    """Stabilizer chain built by Knuth's variant of Schreier-Sims.

    ``base`` lists every point; level ``l`` holds the pointwise stabilizer of
    ``base[:l]``, its strong generators ``gens[l]`` and a transversal mapping
    each orbit point ``j`` of ``base[l]`` to an element sending ``base[l]`` to ``j``.
    """

    def __init__(self, n: int, base: Sequence[int]):
        self.n = n
        self.base = list(base)
        self.ident = tuple(range(n))
        self.gens: list[list[tuple]] = [[] for _ in self.base]
        self.trans: list[dict[int, tuple]] = [{b: self.ident} for b in self.base]

    def sift(self, g: tuple, level: int = 0) -> tuple[tuple, int]:
        for lev in range(level, len(self.base)):
            j = g[self.base[lev]]
            rep = self.trans[lev].get(j)
            if rep is None:
                return g, lev
            if j != self.base[lev]:
                g = _mul(g, _inv(rep))
        return g, len(self.base)

    def contains(self, g: tuple, level: int = 0) -> bool:
        h, lev = self.sift(g, level)
        return lev == len(self.base) and h == self.ident

    def add(self, level: int, g: tuple) -> None:
        if self.contains(g, level):
            return
        self.gens[level].append(g)
        for rep in list(self.trans[level].values()):
            self._close(level, _mul(rep, g))

    def _close(self, level: int, g: tuple) -> None:
        stack = [g]
        while stack:
            g = stack.pop()
            j = g[self.base[level]]
            rep = self.trans[level].get(j)
            if rep is not None:
                h = _mul(g, _inv(rep))
                if h != self.ident:
                    self.add(level + 1, h)
            else:
                self.trans[level][j] = g
                stack.extend(_mul(g, s) for s in self.gens[level])

    def order(self) -> int:
        return prod(len(t) for t in self.trans)


class PermGroup:
    """A permutation group given by generators, with an exact stabilizer chain.

    ``base`` optionally fixes the leading points of the chain's base; the
    remaining points follow in increasing order.
    """

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None,
                 base: Sequence[int] = (), name: str | None = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise DegreeError("degree is required for an empty generating set")
            degree = gens[0].n
        for g in gens:
            if g.n != degree:
                raise DegreeError(f"generator of degree {g.n} in a group of degree {degree}")
        self.degree = degree
        self.generators = [g for g in gens if not g.is_identity()]
        self.name = name
        prefix = list(dict.fromkeys(int(b) for b in base))
        for b in prefix:
            if not 0 <= b < degree:
                raise DegreeError(f"base point {b} outside 0..{degree - 1}")
        full_base = prefix + [i for i in range(degree) if i not in set(prefix)]
        self._prefix_len = len(prefix)
        self._chain = _Chain(degree, full_base)
        for g in self.generators:
            self._chain.add(0, g.images)

    @property
    def order(self) -> int:
        return self._chain.order()

    @property
    def base(self) -> list[int]:
        return list(self._chain.base)

    def __contains__(self, f: Permutation) -> bool:
        return is_member(self, f)

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} order={self.order}>"

    def strong_generators(self, level: int = 0) -> list[Permutation]:
        """Generators of the pointwise stabilizer of ``base[:level]``."""
        out = []
        for lev in range(level, len(self._chain.gens)):
            out.extend(Permutation(g) for g in self._chain.gens[lev])
        return out

    def basic_orbit(self, level: int) -> list[int]:
        return sorted(self._chain.trans[level])

    def elements(self) -> Iterable[Permutation]:
        """Enumerate all elements; only sensible for small groups."""
        reps = [list(t.values()) for t in self._chain.trans]
        for combo in itertools.product(*reversed(reps)):
            g = self._chain.ident
            for r in combo:
                g = _mul(g, r)
            yield Permutation(g)

    def orbit(self, point: int) -> set[int]:
        seen, stack = {point}, [point]
        while stack:
            x = stack.pop()
            for g in self.generators:
                y = g.images[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def is_two_transitive(self) -> bool:
        if not self.is_transitive():
            return False
        if self.degree <= 1:
            return True
        stab = stabilizer_of_tuple(self, (0,))
        return len(stab.orbit(1)) == self.degree - 1


def group_from_generators(gens: Sequence[Permutation], degree: int | None = None) -> PermGroup:
    return PermGroup(gens, degree=degree)


def is_member(G: PermGroup, f: Permutation) -> bool:
    if f.n != G.degree:
        raise DegreeError(f"permutation of degree {f.n} tested against group of degree {G.degree}")
    return G._chain.contains(f.images)


def stabilizer_of_tuple(G: PermGroup, y: Sequence[int]) -> PermGroup:
    """Pointwise stabilizer ``G_y`` of the entries of ``y``."""
    for v in y:
        if not 0 <= v < G.degree:
            raise DegreeError(f"point {v} outside 0..{G.degree - 1}")
    rebased = PermGroup(G.generators, degree=G.degree, base=y)
    level = rebased._prefix_len
    return PermGroup(rebased.strong_generators(level), degree=G.degree)


def groups_equal(G: PermGroup, H: PermGroup) -> bool:
    if G.degree != H.degree:
        raise DegreeError(f"degrees differ: {G.degree} != {H.degree}")
    if G.order != H.order:
        return False
    return all(is_member(H, g) for g in G.generators) and all(is_member(G, h) for h in H.generators)


# ---------------------------------------------------------------------------
# tuple spaces and orbits


def tuple_rank(x: Sequence[int], n: int) -> int:
    r = 0
    for xi in x:
        r = r * n + xi
    return r


def tuple_unrank(r: int, n: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        r, d = divmod(r, n)
        out.append(d)
    return tuple(reversed(out))


def all_tuples(n: int, m: int) -> np.ndarray:
    """Array of shape ``(n**m, m)`` listing Omega^m in rank order."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * m).reshape(m, -1).T
    return grids.astype(np.int64)


def image_ranks(f: Permutation | Sequence[int], n: int, m: int) -> np.ndarray:
    """Rank of ``x^f`` for every tuple ``x`` in rank order."""
    images = np.asarray(f.images if isinstance(f, Permutation) else f, dtype=np.int64)
    tuples = images[all_tuples(n, m)]
    weights = n ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return tuples @ weights


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel so identifiers appear as 0, 1, 2, ... in first-occurrence order."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    return relabel[inverse.reshape(-1)].astype(np.int32)


def orbits_on_m_tuples(G: PermGroup, m: int, max_tuples: int = DEFAULT_MAX_TUPLES) -> np.ndarray:
    """Orbit identifier of every m-tuple, canonical by first occurrence in rank order."""
    if m < 1:
        raise ValueError("arity must be at least 1")
    n = G.degree
    size = n**m
    if size > max_tuples:
        raise SizeBoundError(f"{n}^{m} = {size} tuples exceeds the bound {max_tuples}")
    if not G.generators:
        return np.arange(size, dtype=np.int32)
    src = np.tile(np.arange(size, dtype=np.int64), len(G.generators))
    dst = np.concatenate([image_ranks(g, n, m) for g in G.generators])
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return canonical_labels(labels)


# ---------------------------------------------------------------------------
# named groups


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    params: tuple[int, ...] = ()
    path: str | None = None
    text: str = ""

    @property
    def degree(self) -> int | None:
        k, p = self.kind, self.params
        if k in ("cyclic", "cyclotomic", "agl1", "sym", "alt"):
            return p[0]
        if k == "psl":
            return 11
        if k == "pgl":
            d, q = p
            return (q**d - 1) // (q - 1)
        return None

    @property
    def flags(self) -> list[str]:
        deg = self.degree
        if self.kind == "pgl" and deg is not None and not is_prime(deg):
            return [f"degree {deg} is not prime"]
        return []


_SPEC_RE = re.compile(r"^(cyclic|cyclotomic|agl1|sym|alt|psl|pgl)((?::\d+)+)$")


def parse_group_spec(text: str, max_degree: int = DEFAULT_MAX_DEGREE) -> GroupSpec:
    text = text.strip()
    if text.startswith("file:"):
        return GroupSpec("file", (), text[5:], text)
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"malformed group spec {text!r}")
    kind = m.group(1)
    params = tuple(int(v) for v in m.group(2)[1:].split(":"))
    arity = {"cyclic": 1, "cyclotomic": 2, "agl1": 1, "sym": 1, "alt": 1, "psl": 2, "pgl": 2}[kind]
    if len(params) != arity:
        raise ValueError(f"{kind} takes {arity} parameter(s), got {text!r}")
    if kind in ("cyclic", "cyclotomic", "agl1"):
        p = params[0]
        if kind != "cyclic" and not is_prime(p):
            raise ValueError(f"{kind} needs a prime, got {p}")
        if p < 1:
            raise ValueError(f"degree must be positive in {text!r}")
        if kind == "cyclotomic" and (params[1] < 1 or (p - 1) % params[1]):
            raise ValueError(f"cyclotomic:{p}:{params[1]} requires d | p-1")
    elif kind in ("sym", "alt"):
        if params[0] < 1:
            raise ValueError(f"degree must be positive in {text!r}")
    elif kind == "psl":
        if params != (2, 11):
            raise ValueError("only psl:2:11 (degree 11) is in the catalog")
    elif kind == "pgl":
        d, q = params
        if d < 2 or _prime_power(q) is None:
            raise ValueError(f"pgl needs d >= 2 and a prime power q, got {text!r}")
    spec = GroupSpec(kind, params, None, text)
    if spec.degree is not None and spec.degree > max_degree:
        raise ValueError(f"degree {spec.degree} exceeds the catalog bound {max_degree}")
    return spec


# Exceptional 2-transitive action of PSL_2(11) on 11 points (ATLAS generators,
# 0-based).  In this labeling the group contains x -> x+1.
_PSL_2_11 = (
    (0, 9, 3, 2, 8, 6, 5, 7, 4, 1, 10),
    (1, 10, 4, 3, 9, 7, 6, 8, 5, 2, 0),
)


def _affine(p: int, a: int, b: int) -> Permutation:
    return Permutation(tuple((a * x + b) % p for x in range(p)))


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    for r in range(2, q + 1):
        if q % r == 0:
            k, v = 0, q
            while v % r == 0:
                v //= r
                k += 1
            return (r, k) if v == 1 else None
    return None


class GF:
    """Arithmetic tables for the finite field of order ``q = r**k``.

    Elements are integers ``0..q-1`` whose base-``r`` digits are polynomial
    coefficients modulo a fixed monic irreducible of degree ``k``.
    """

    def __init__(self, q: int):
        rk = _prime_power(q)
        if rk is None:
            raise ValueError(f"{q} is not a prime power")
        self.q, (self.r, self.k) = q, rk
        r, k = self.r, self.k
        modulus = self._irreducible() if k > 1 else None

        def digits(a):
            return [(a // r**i) % r for i in range(k)]

        def number(ds):
            return sum(d * r**i for i, d in enumerate(ds))

        self.add = np.zeros((q, q), dtype=np.int64)
        self.mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            da = digits(a)
            for b in range(q):
                db = digits(b)
                self.add[a, b] = number([(x + y) % r for x, y in zip(da, db)])
                prod_ = [0] * (2 * k - 1)
                for i, x in enumerate(da):
                    for j, y in enumerate(db):
                        prod_[i + j] = (prod_[i + j] + x * y) % r
                if modulus is not None:
                    for deg in range(2 * k - 2, k - 1, -1):
                        c = prod_[deg]
                        if c:
                            for i, mc in enumerate(modulus):
                                prod_[deg - k + i] = (prod_[deg - k + i] - c * mc) % r
                self.mul[a, b] = number(prod_[:k])
        self.primitive = next(a for a in range(1, q) if self._order(a) == q - 1)

    def _irreducible(self) -> list[int]:
        r, k = self.r, self.k
        for coeffs in itertools.product(range(r), repeat=k):
            poly = list(coeffs) + [1]
            if coeffs[0] and not self._has_factor(poly):
                return poly
        raise RuntimeError("no irreducible polynomial found")

    def _has_factor(self, poly: list[int]) -> bool:
        r, k = self.r, self.k
        for deg in range(1, k // 2 + 1):
            for coeffs in itertools.product(range(r), repeat=deg):
                div = list(coeffs) + [1]
                rem = poly[:]
                for shift in range(len(rem) - len(div), -1, -1):
                    c = rem[shift + len(div) - 1]
                    if c:
                        for i, dc in enumerate(div):
                            rem[shift + i] = (rem[shift + i] - c * dc) % r
                if not any(rem):
                    return True
        return False

    def _order(self, a: int) -> int:
        x, e = a, 1
        while x != 1:
            x = int(self.mul[x, a])
            e += 1
        return e


def projective_points(d: int, field: GF) -> list[tuple[int, ...]]:
    """Normalized projective points (first nonzero coordinate 1), lexicographic."""
    q = field.q
    pts = [v for v in itertools.product(range(q), repeat=d)
           if any(v) and v[next(i for i, c in enumerate(v) if c)] == 1]
    return sorted(pts)


def _pgl_generators(d: int, q: int) -> list[Permutation]:
    field = GF(q)
    pts = projective_points(d, field)
    index = {v: i for i, v in enumerate(pts)}
    inverse = {a: next(b for b in range(1, q) if field.mul[a, b] == 1) for a in range(1, q)}

    def normalize(v):
        lead = next(c for c in v if c)
        s = inverse[lead]
        return tuple(int(field.mul[c, s]) for c in v)

    def act(matrix):
        images = []
        for v in pts:
            w = []
            for j in range(d):
                acc = 0
                for i in range(d):
                    acc = int(field.add[acc, field.mul[v[i], matrix[i][j]]])
                w.append(acc)
            images.append(index[normalize(w)])
        return Permutation(tuple(images))

    def ident():
        return [[1 if i == j else 0 for j in range(d)] for i in range(d)]

    mats = []
    basis, x = [], 1
    for _ in range(field.k):
        basis.append(x)
        x = int(field.mul[x, field.primitive])
    for i in range(d):
        for j in range(d):
            if i != j:
                for lam in basis:
                    e = ident()
                    e[i][j] = lam
                    mats.append(e)
    diag = ident()
    diag[0][0] = field.primitive
    mats.append(diag)
    return [act(mx) for mx in mats]


def _sym_generators(n: int) -> list[Permutation]:
    if n < 2:
        return []
    gens = [Permutation.from_cycles(n, [(0, 1)])]
    if n > 2:
        gens.append(Permutation.from_cycles(n, [tuple(range(n))]))
    return gens


def _alt_generators(n: int) -> list[Permutation]:
    if n < 3:
        return []
    gens = [Permutation.from_cycles(n, [(0, 1, 2)])]
    if n > 3:
        cyc = tuple(range(n)) if n % 2 else tuple(range(1, n))
        gens.append(Permutation.from_cycles(n, [cyc]))
    return gens


def read_generator_file(path: str | Path) -> list[Permutation]:
    gens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            gens.append(Permutation(tuple(int(t) for t in line.split())))
    if not gens:
        raise ValueError(f"no permutations in {path}")
    return gens


def make_named_group(spec: GroupSpec | str, max_degree: int = DEFAULT_MAX_DEGREE) -> PermGroup:
    if isinstance(spec, str):
        spec = parse_group_spec(spec, max_degree=max_degree)
    k, p = spec.kind, spec.params
    if k == "file":
        gens = read_generator_file(spec.path)
        if gens[0].n > max_degree:
            raise ValueError(f"degree {gens[0].n} exceeds the catalog bound {max_degree}")
        return PermGroup(gens, name=spec.text)
    for flag in spec.flags:
        log.warning("%s: %s", spec.text, flag)
    if k == "cyclic":
        gens = [Permutation.from_function(p[0], lambda x: (x + 1) % p[0])]
    elif k == "cyclotomic":
        q, d = p
        g = primitive_roots(q)[0] if q > 2 else 1
        a = pow(g, (q - 1) // d, q)
        gens = [_affine(q, 1, 1), _affine(q, a, 0)]
    elif k == "agl1":
        q = p[0]
        g = primitive_roots(q)[0] if q > 2 else 1
        gens = [_affine(q, 1, 1), _affine(q, g, 0)]
    elif k == "sym":
        gens = _sym_generators(p[0])
    elif k == "alt":
        gens = _alt_generators(p[0])
    elif k == "psl":
        gens = [Permutation(g) for g in _PSL_2_11]
    elif k == "pgl":
        gens = _pgl_generators(*p)
    else:  # pragma: no cover - parse_group_spec rejects other kinds
        raise ValueError(spec.text)
    return PermGroup(gens, degree=spec.degree, name=spec.text)


def catalog_order(spec: GroupSpec | str) -> int | None:
    """Textbook order of a catalog group (None for file specs)."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    k, p = spec.kind, spec.params
    if k == "cyclic":
        return p[0]
    if k == "cyclotomic":
        return p[0] * p[1]
    if k == "agl1":
        return p[0] * (p[0] - 1)
    if k == "sym":
        return prod(range(1, p[0] + 1))
    if k == "alt":
        return max(1, prod(range(1, p[0] + 1)) // 2)
    if k == "psl":
        return 660
    if k == "pgl":
        d, q = p
        return q ** (d * (d - 1) // 2) * prod(q**i - 1 for i in range(2, d + 1))
    return None


def catalog_specs(p: int) -> list[str]:
    """Every catalog descriptor of degree ``p`` (``p`` prime)."""
    out = ["cyclic:%d" % p]
    if is_prime(p):
        out += [f"cyclotomic:{p}:{d}" for d in range(2, p - 1) if (p - 1) % d == 0]
        out.append(f"agl1:{p}")
    out += [f"alt:{p}", f"sym:{p}"]
    if p == 11:
        out.append("psl:2:11")
    for d in range(2, 6):
        for q in range(2, p):
            if _prime_power(q) and (q**d - 1) // (q - 1) == p:
                out.append(f"pgl:{d}:{q}")
    return out
