"""Colorings of Omega^m and m-ary coherent configurations.

Tuples are ranked row-major, ``rank(x) = sum_i x_i * n**(m-1-i)``, and a
configuration stores one class identifier per rank.  Identifiers are always
canonical: classes are numbered in order of their first tuple.  Coordinates
are 0-based throughout.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .permgroup import (
    DEFAULT_MAX_TUPLES,
    PermGroup,
    SizeBoundError,
    all_tuples,
    canonical_labels,
    orbits_on_m_tuples,
    tuple_rank,
    tuple_unrank,
)


class CoherenceError(ValueError):
    """An operation needed a coherent configuration and got something else."""

    def __init__(self, violation: Violation | str):
        self.violation = violation if isinstance(violation, Violation) else None
        super().__init__(str(violation))


# ---------------------------------------------------------------------------
# patterns and coordinate maps


@dataclass(frozen=True)
class EquivPattern:
    """Coordinate-coincidence partition of a tuple as a restricted growth string."""

    labels: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(set(self.labels))

    @property
    def blocks(self) -> tuple[frozenset[int], ...]:
        out: dict[int, set[int]] = {}
        for i, lab in enumerate(self.labels):
            out.setdefault(lab, set()).add(i)
        return tuple(frozenset(out[k]) for k in sorted(out))

    def __str__(self) -> str:
        return "|".join("".join(str(i + 1) for i in sorted(b)) for b in self.blocks)


def rho_pattern(x: Sequence[int]) -> EquivPattern:
    seen: dict[int, int] = {}
    return EquivPattern(tuple(seen.setdefault(v, len(seen)) for v in x))


@lru_cache(maxsize=None)
def all_patterns(m: int) -> tuple[EquivPattern, ...]:
    """Every equivalence pattern on m coordinates, sorted by labels."""
    pats = {rho_pattern(t) for t in itertools.product(range(m), repeat=m)}
    return tuple(sorted(pats, key=lambda p: p.labels))


@lru_cache(maxsize=None)
def sigma_maps(m: int) -> tuple[tuple[int, ...], ...]:
    """All maps M -> M as image tuples, in lexicographic order (m**m of them)."""
    return tuple(itertools.product(range(m), repeat=m))


def apply_sigma(x: Sequence[int], sigma: Sequence[int]) -> tuple[int, ...]:
    """``x^sigma = (x_{sigma(0)}, ..., x_{sigma(m-1)})``."""
    return tuple(x[s] for s in sigma)


@lru_cache(maxsize=32)
def _tuples(n: int, m: int) -> np.ndarray:
    t = all_tuples(n, m)
    t.setflags(write=False)
    return t


def _weights(n: int, m: int) -> np.ndarray:
    return n ** np.arange(m - 1, -1, -1, dtype=np.int64)


@lru_cache(maxsize=32)
def pattern_ids(n: int, m: int) -> np.ndarray:
    """Index into :func:`all_patterns` of the pattern of every tuple."""
    pats = {p.labels: i for i, p in enumerate(all_patterns(m))}
    t = _tuples(n, m)
    eq = [(t[:, i] == t[:, j]) for i in range(m) for j in range(i + 1, m)]
    key = np.zeros(len(t), dtype=np.int64)
    for bit in eq:
        key = key * 2 + bit
    # map coincidence bit-vectors to pattern indices via one representative each
    lookup = {}
    for labels, idx in pats.items():
        bits = 0
        for i in range(m):
            for j in range(i + 1, m):
                bits = bits * 2 + (labels[i] == labels[j])
        lookup[bits] = idx
    out = np.vectorize(lookup.__getitem__, otypes=[np.int32])(key) if len(key) else key
    out = np.asarray(out, dtype=np.int32)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def sigma_ranks(n: int, m: int) -> np.ndarray:
    """``out[s, r]`` is the rank of ``x^sigma`` for the s-th map and tuple rank r."""
    t = _tuples(n, m)
    w = _weights(n, m)
    out = np.stack([t[:, list(s)] @ w for s in sigma_maps(m)]) if m else np.zeros((1, 1), np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def substitution_ranks(n: int, m: int) -> np.ndarray:
    """``out[r, a, i]`` is the rank of ``x_{i <- a}`` for the tuple of rank r."""
    t = _tuples(n, m)
    w = _weights(n, m)
    base = t @ w
    alpha = np.arange(n, dtype=np.int64)
    out = np.empty((len(t), n, m), dtype=np.int64)
    for i in range(m):
        out[:, :, i] = (base - t[:, i] * w[i])[:, None] + alpha[None, :] * w[i]
    out.setflags(write=False)
    return out


def _check_size(n: int, m: int, max_tuples: int = DEFAULT_MAX_TUPLES) -> None:
    if n**m > max_tuples:
        raise SizeBoundError(f"{n}^{m} = {n**m} tuples exceeds the bound {max_tuples}")


def relabel_rows(*columns: np.ndarray) -> np.ndarray:
    """Canonical labels for the rows formed by stacking the given columns."""
    if len(columns) == 1 and columns[0].ndim == 1:
        return canonical_labels(columns[0])
    mat = np.column_stack([c if c.ndim == 2 else c[:, None] for c in columns])
    mat = np.ascontiguousarray(mat.astype(np.int64))
    view = mat.view(np.dtype((np.void, mat.dtype.itemsize * mat.shape[1]))).ravel()
    return canonical_labels(view)


# ---------------------------------------------------------------------------
# the configuration type


class TensorConfig:
    """A partition of Omega^m given by a dense array of class identifiers.

    ``coherent`` is True when validated (or coherent by construction), False
    when known to violate an axiom and None when unknown.
    """

    __slots__ = ("n", "m", "colors", "coherent", "meta", "__dict__")

    def __init__(self, n: int, m: int, colors: Iterable[int] | np.ndarray,
                 coherent: bool | None = None, meta: Mapping | None = None,
                 max_tuples: int = DEFAULT_MAX_TUPLES):
        if n < 1 or m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        _check_size(n, m, max_tuples)
        arr = np.asarray(colors, dtype=np.int64).reshape(-1)
        if arr.size != n**m:
            raise ValueError(f"expected {n**m} colors, got {arr.size}")
        labels = canonical_labels(arr)
        labels.setflags(write=False)
        self.n, self.m, self.colors = n, m, labels
        self.coherent = coherent
        self.meta = dict(meta or {})

    # -- basic queries --------------------------------------------------------

    @cached_property
    def num_classes(self) -> int:
        return int(self.colors.max()) + 1

    def __len__(self) -> int:
        return self.num_classes

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.colors, minlength=self.num_classes)

    @cached_property
    def representatives(self) -> list[tuple[int, ...]]:
        """Minimal-rank tuple of every class."""
        _, first = np.unique(self.colors, return_index=True)
        return [tuple_unrank(int(r), self.n, self.m) for r in first]

    @cached_property
    def rep_ranks(self) -> np.ndarray:
        _, first = np.unique(self.colors, return_index=True)
        return first

    @cached_property
    def class_patterns(self) -> list[EquivPattern]:
        return [rho_pattern(x) for x in self.representatives]

    def class_of(self, x: Sequence[int]) -> int:
        if len(x) != self.m or any(not 0 <= v < self.n for v in x):
            raise ValueError(f"{tuple(x)} is not a tuple of Omega^{self.m} with n={self.n}")
        return int(self.colors[tuple_rank(x, self.n)])

    def members(self, X: int) -> np.ndarray:
        return np.flatnonzero(self.colors == X)

    def member_tuples(self, X: int) -> list[tuple[int, ...]]:
        return [tuple_unrank(int(r), self.n, self.m) for r in self.members(X)]

    def classes_by_pattern(self) -> dict[EquivPattern, list[int]]:
        out: dict[EquivPattern, list[int]] = {}
        for X, pat in enumerate(self.class_patterns):
            out.setdefault(pat, []).append(X)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorConfig):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(self.colors, other.colors)

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.colors.tobytes()))

    def __repr__(self) -> str:
        return f"<TensorConfig n={self.n} m={self.m} classes={self.num_classes}>"

    def grid(self) -> np.ndarray:
        return self.colors.reshape((self.n,) * self.m)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "colors": self.colors.tolist(),
            "meta": self.meta,
            "classes": [
                {"id": X, "size": int(self.sizes[X]), "pattern": str(self.class_patterns[X]),
                 "representative": list(self.representatives[X])}
                for X in range(self.num_classes)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> TensorConfig:
        try:
            n, m, colors = int(data["n"]), int(data["m"]), data["colors"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed configuration: {exc}") from None
        if not isinstance(colors, list) or not all(isinstance(c, int) for c in colors):
            raise ValueError("colors must be a list of integers")
        return cls(n, m, colors, meta=data.get("meta") or {})

    @classmethod
    def from_json(cls, text: str) -> TensorConfig:
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# constructors


def orb_coloring(G: PermGroup, m: int, max_tuples: int = DEFAULT_MAX_TUPLES) -> TensorConfig:
    labels = orbits_on_m_tuples(G, m, max_tuples=max_tuples)
    meta = {"source": f"orb_{m}({G.name})"} if G.name else {}
    return TensorConfig(G.degree, m, labels, coherent=True, meta=meta, max_tuples=max_tuples)


def pattern_coloring(n: int, m: int) -> TensorConfig:
    """Coloring of Omega^m by equivalence pattern alone."""
    return TensorConfig(n, m, pattern_ids(n, m))


def discrete_coloring(n: int, m: int) -> TensorConfig:
    return TensorConfig(n, m, np.arange(n**m))


# ---------------------------------------------------------------------------
# axioms


@dataclass(frozen=True)
class Violation:
    condition: str
    cls: int
    tuples: tuple[tuple[int, ...], ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.condition} violated at class {self.cls}: {self.detail} {list(self.tuples)}"


def counting_rows(colors: np.ndarray, n: int, m: int) -> np.ndarray:
    """Per tuple, the sorted codes of ``(c(x_{1<-a}), ..., c(x_{m<-a}))`` over a."""
    k = int(colors.max()) + 1
    sub = substitution_ranks(n, m)
    c = np.asarray(colors, dtype=np.int64)[sub]  # (N, n, m)
    code = np.zeros(c.shape[:2], dtype=np.int64)
    for i in range(m):
        code = code * k + c[:, :, i]
    code.sort(axis=1)
    return code


def intersection_number(cfg: TensorConfig, X: int, Xs: Sequence[int], x: Sequence[int]) -> int:
    """``|{a : x_{i<-a} in Xs[i] for all i}|`` for a representative ``x`` of ``X``."""
    if len(Xs) != cfg.m:
        raise ValueError(f"need {cfg.m} classes, got {len(Xs)}")
    if cfg.class_of(x) != X:
        raise ValueError(f"{tuple(x)} is not in class {X}")
    count = 0
    for a in range(cfg.n):
        if all(cfg.class_of(tuple(a if j == i else x[j] for j in range(cfg.m))) == Xs[i]
               for i in range(cfg.m)):
            count += 1
    return count


def validate_cc(cfg: TensorConfig) -> Violation | None:
    """None if ``cfg`` satisfies C1-C3, otherwise the first violation found."""
    n, m, colors = cfg.n, cfg.m, cfg.colors
    k = cfg.num_classes

    # C1: one pattern per class
    pats = pattern_ids(n, m)
    rep_pat = pats[cfg.rep_ranks]
    bad = np.flatnonzero(pats != rep_pat[colors])
    if bad.size:
        r = int(bad[0])
        X = int(colors[r])
        return Violation("C1", X, (cfg.representatives[X], tuple_unrank(r, n, m)),
                         "tuples of different equivalence pattern share a class")

    # C2: every image X^sigma is a whole class
    sizes = cfg.sizes
    for s, sigma in enumerate(sigma_maps(m)):
        img = sigma_ranks(n, m)[s]
        img_col = colors[img]
        target = img_col[cfg.rep_ranks]
        bad = np.flatnonzero(img_col != target[colors])
        if bad.size:
            r = int(bad[0])
            X = int(colors[r])
            return Violation("C2", X, (cfg.representatives[X], tuple_unrank(r, n, m)),
                             f"sigma={sigma} sends the class into two classes")
        distinct = np.unique(colors.astype(np.int64) * n**m + img)
        counts = np.bincount(distinct // n**m, minlength=k)
        short = np.flatnonzero(counts != sizes[target])
        if short.size:
            X = int(short[0])
            return Violation("C2", X, (cfg.representatives[X],),
                             f"sigma={sigma} image is a proper part of class {int(target[X])}")

    # C3: substitution counts constant on classes
    rows = counting_rows(colors, n, m)
    rep_rows = rows[cfg.rep_ranks]
    diff = np.flatnonzero(np.any(rows != rep_rows[colors], axis=1))
    if diff.size:
        r = int(diff[0])
        X = int(colors[r])
        return Violation("C3", X, (cfg.representatives[X], tuple_unrank(r, n, m)),
                         "intersection numbers depend on the representative")
    return None


def is_coherent(cfg: TensorConfig) -> bool:
    if cfg.coherent is None:
        cfg.coherent = validate_cc(cfg) is None
    return cfg.coherent


def require_coherent(cfg: TensorConfig) -> None:
    if cfg.coherent is True:
        return
    v = validate_cc(cfg)
    cfg.coherent = v is None
    if v is not None:
        raise CoherenceError(v)


def sigma_image(cfg: TensorConfig, X: int, sigma: Sequence[int]) -> int:
    """Class equal to ``X^sigma``; raises :class:`CoherenceError` if there is none."""
    sigma = tuple(sigma)
    if len(sigma) != cfg.m or any(not 0 <= s < cfg.m for s in sigma):
        raise ValueError(f"invalid coordinate map {sigma} for arity {cfg.m}")
    if not 0 <= X < cfg.num_classes:
        raise ValueError(f"no class {X}")
    s = sigma_maps(cfg.m).index(sigma)
    img = sigma_ranks(cfg.n, cfg.m)[s][cfg.members(X)]
    image_set = np.unique(img)
    targets = np.unique(cfg.colors[image_set])
    if len(targets) != 1 or cfg.sizes[targets[0]] != len(image_set):
        rep = cfg.representatives[X]
        raise CoherenceError(Violation("C2", X, (rep,), f"sigma={sigma} image is not a class"))
    return int(targets[0])


# ---------------------------------------------------------------------------
# WL closure


def _sigma_refine(colors: np.ndarray, n: int, m: int) -> np.ndarray:
    img = sigma_ranks(n, m)
    return relabel_rows(colors, colors[img].T)


def _count_refine(colors: np.ndarray, n: int, m: int) -> np.ndarray:
    return relabel_rows(colors, counting_rows(colors, n, m))


def wl_close_rounds(cfg: TensorConfig) -> tuple[TensorConfig, int]:
    """Coarsest coherent refinement of ``cfg`` and the number of refining alternations."""
    n, m = cfg.n, cfg.m
    # tuples of different equality pattern never share a class
    colors = relabel_rows(cfg.colors, pattern_ids(n, m))
    k = int(colors.max()) + 1
    rounds = int(k > cfg.num_classes)
    while True:
        c1 = _sigma_refine(colors, n, m)
        c2 = _count_refine(c1, n, m)
        k2 = int(c2.max()) + 1
        if k2 == k:
            break
        colors, k = c2, k2
        rounds += 1
    out = TensorConfig(n, m, colors, coherent=True, meta=cfg.meta)
    return out, rounds


def wl_close(cfg: TensorConfig) -> TensorConfig:
    return wl_close_rounds(cfg)[0]


# ---------------------------------------------------------------------------
# projections, residues, fibers


def _check_indices(I: Sequence[int], m: int) -> tuple[int, ...]:
    I = tuple(I)
    if not I or len(set(I)) != len(I) or any(not 0 <= i < m for i in I):
        raise ValueError(f"invalid coordinate subset {I} for arity {m}")
    return tuple(sorted(I))


def project(cfg: TensorConfig, I: Sequence[int]) -> TensorConfig:
    """``pr_I`` of a coherent configuration (coordinates of ``I`` kept in order)."""
    I = _check_indices(I, cfg.m)
    n, k = cfg.n, len(I)
    t = _tuples(n, cfg.m)
    pr = t[:, list(I)] @ _weights(n, k)
    pairs = np.unique(cfg.colors.astype(np.int64) * n**k + pr)
    cols, prs = pairs // n**k, pairs % n**k
    claims: dict[int, list[int]] = {}
    for c, r in zip(cols.tolist(), prs.tolist()):
        claims.setdefault(r, []).append(c)
    key = [tuple(claims[r]) for r in range(n**k)]
    index: dict[tuple, int] = {}
    labels = np.array([index.setdefault(kk, len(index)) for kk in key], dtype=np.int64)
    # equal-or-disjoint projections: each class sees exactly one claim set
    per_class = np.unique(cols * len(index) + labels[prs])
    if len(per_class) != cfg.num_classes:
        X = int(np.flatnonzero(np.bincount(per_class // len(index)) > 1)[0])
        raise CoherenceError(Violation("projection", X, (cfg.representatives[X],),
                                       f"projections to {I} overlap without being equal"))
    return TensorConfig(n, k, labels, coherent=True if cfg.coherent else None, meta=cfg.meta)


def residue(cfg: TensorConfig, u: Sequence[int], I: Sequence[int] | None = None) -> TensorConfig:
    """Residue ``{X_u}`` on the coordinates outside ``I`` (default: the first ``len(u)``)."""
    u = tuple(u)
    if I is None:
        I = tuple(range(len(u)))
    I = tuple(I)
    if len(I) != len(u) or len(set(I)) != len(I) or any(not 0 <= i < cfg.m for i in I):
        raise ValueError(f"invalid coordinate subset {I} for tuple {u}")
    if len(I) >= cfg.m:
        raise ValueError("a residue needs at least one free coordinate")
    if any(not 0 <= v < cfg.n for v in u):
        raise ValueError(f"{u} has entries outside 0..{cfg.n - 1}")
    index: list = [slice(None)] * cfg.m
    for i, v in zip(I, u):
        index[i] = v
    sub = cfg.grid()[tuple(index)].reshape(-1)
    return TensorConfig(cfg.n, cfg.m - len(I), sub,
                        coherent=True if cfg.coherent else None, meta=cfg.meta)


def fibers(cfg: TensorConfig) -> list[frozenset[int]]:
    pr = project(cfg, (0,)) if cfg.m > 1 else cfg
    return [frozenset(int(v) for v in pr.members(X)) for X in range(pr.num_classes)]


def restrict_to_fiber(cfg: TensorConfig, delta: Iterable[int]) -> TensorConfig:
    delta = frozenset(delta)
    if delta not in fibers(cfg):
        raise ValueError(f"{sorted(delta)} is not a fiber")
    pts = np.array(sorted(delta), dtype=np.int64)
    sub = cfg.grid()[np.ix_(*([pts] * cfg.m))].reshape(-1)
    return TensorConfig(len(pts), cfg.m, sub, coherent=True if cfg.coherent else None,
                        meta={**cfg.meta, "points": pts.tolist()})


# ---------------------------------------------------------------------------
# order and fusion


def leq(coarse: TensorConfig, fine: TensorConfig) -> bool:
    """True iff every class of ``coarse`` is a union of classes of ``fine``."""
    if (coarse.n, coarse.m) != (fine.n, fine.m):
        raise ValueError("configurations live on different tuple spaces")
    pairs = np.unique(fine.colors.astype(np.int64) * coarse.num_classes + coarse.colors)
    return len(pairs) == fine.num_classes


@dataclass(frozen=True)
class FusionSpec:
    """Merge map from base class identifiers to fused identifiers."""

    mapping: tuple[int, ...]

    @classmethod
    def from_blocks(cls, k: int, blocks: Iterable[Iterable[int]]) -> FusionSpec:
        mapping = list(range(k))
        for block in blocks:
            block = sorted(block)
            for X in block:
                mapping[X] = block[0]
        return cls(tuple(canonical_labels(np.array(mapping)).tolist()))

    @classmethod
    def identity(cls, k: int) -> FusionSpec:
        return cls(tuple(range(k)))


def fuse(cfg: TensorConfig, spec: FusionSpec | Sequence[int] | Mapping[int, int]) -> TensorConfig:
    k = cfg.num_classes
    if isinstance(spec, FusionSpec):
        mapping = list(spec.mapping)
    elif isinstance(spec, Mapping):
        mapping = [spec[X] for X in range(k)]
    else:
        mapping = list(spec)
    if len(mapping) != k:
        raise ValueError(f"fusion map covers {len(mapping)} of {k} classes")
    used = sorted(set(mapping))
    if used != list(range(len(used))):
        raise ValueError("fusion map must be onto 0..k'-1")
    seen: dict[int, EquivPattern] = {}
    for X, F in enumerate(mapping):
        pat = cfg.class_patterns[X]
        if seen.setdefault(F, pat) != pat:
            raise ValueError(f"fusion merges classes of patterns {seen[F]} and {pat}")
    fused = np.asarray(mapping, dtype=np.int64)[cfg.colors]
    return TensorConfig(cfg.n, cfg.m, fused, meta=cfg.meta)


def is_ast(cfg: TensorConfig) -> bool:
    """Association scheme on triples: the projection to two coordinates is trivial."""
    if cfg.m != 3:
        raise ValueError("is_ast needs a ternary configuration")
    t = _tuples(cfg.n, 3)
    pr = t[:, 0] * cfg.n + t[:, 1]
    pairs = np.unique(cfg.colors.astype(np.int64) * cfg.n**2 + pr)
    # number of projected classes = number of distinct claim sets over pairs
    claims: dict[int, list[int]] = {}
    for v in pairs.tolist():
        claims.setdefault(v % cfg.n**2, []).append(v // cfg.n**2)
    return len({tuple(c) for c in claims.values()}) <= 2


# ---------------------------------------------------------------------------
# derived binary and ternary closures


def one_point_extension(cfg2: TensorConfig, omega: int) -> TensorConfig:
    """Minimal coherent refinement of a binary configuration making {(w, w)} a class."""
    if cfg2.m != 2:
        raise ValueError("one_point_extension needs a binary configuration")
    if not 0 <= omega < cfg2.n:
        raise ValueError(f"point {omega} outside 0..{cfg2.n - 1}")
    require_coherent(cfg2)
    mark = np.zeros(cfg2.n**2, dtype=np.int64)
    mark[omega * cfg2.n + omega] = 1
    seed = TensorConfig(cfg2.n, 2, relabel_rows(cfg2.colors, mark), meta=cfg2.meta)
    return wl_close(seed)


def wl3_of_binary(cfg2: TensorConfig) -> TensorConfig:
    """Minimal ternary coherent configuration whose binary projection is ``cfg2``."""
    if cfg2.m != 2:
        raise ValueError("wl3_of_binary needs a binary configuration")
    require_coherent(cfg2)
    n = cfg2.n
    _check_size(n, 3)
    t = _tuples(n, 3)
    c2 = cfg2.colors.astype(np.int64)
    seed = relabel_rows(
        pattern_ids(n, 3).astype(np.int64),
        c2[t[:, 0] * n + t[:, 1]], c2[t[:, 1] * n + t[:, 2]], c2[t[:, 0] * n + t[:, 2]],
    )
    out = wl_close(TensorConfig(n, 3, seed, meta=cfg2.meta))
    if project(out, (0, 1)) != cfg2:
        raise AssertionError("binary projection of the ternary closure differs from the input")
    return out
