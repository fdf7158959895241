"""Color-preserving permutations of a configuration.

The search walks a stabilizer chain from the bottom up.  For level ``i`` with
base prefix ``b_0..b_{i-1}`` fixed, every candidate image ``g`` of ``b_i``
that the group found so far does not already reach gets one backtracking
search for an automorphism fixing the prefix and sending ``b_i`` to ``g``.
Once all levels are done the found generators carry a stabilizer chain whose
basic orbits are complete, so the group order is exact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .permgroup import PermGroup, Permutation, _Chain, image_ranks
from .tensor import TensorConfig, orb_coloring, require_coherent

DEFAULT_NODE_LIMIT = 10**7


class BudgetExhausted(RuntimeError):
    """The search hit its node or time limit before finishing."""


@dataclass
class AutSearchState:
    """Partial point map of one extension search and its running statistics."""

    domain: list[int] = field(default_factory=list)
    image: list[int] = field(default_factory=list)
    nodes: int = 0
    rejected: int = 0

    def push(self, x: int, y: int) -> None:
        self.domain.append(x)
        self.image.append(y)

    def pop(self) -> None:
        self.domain.pop()
        self.image.pop()


def preserves_colors(cfg: TensorConfig, f: Permutation | Sequence[int]) -> bool:
    images = f.images if isinstance(f, Permutation) else tuple(f)
    if len(images) != cfg.n:
        return False
    return bool(np.array_equal(cfg.colors[image_ranks(images, cfg.n, cfg.m)], cfg.colors))


def _consistent(C: np.ndarray, m: int, dom: list[int], img: list[int], x: int, y: int) -> bool:
    """Do tuples over ``dom + [x]`` that contain ``x`` keep their colors under the map?"""
    D = np.array(dom + [x])
    I = np.array(img + [y])
    for axis in range(m):
        src = np.take(C, x, axis=axis)
        dst = np.take(C, y, axis=axis)
        if m == 1:
            if src != dst:
                return False
            continue
        if not np.array_equal(src[np.ix_(*([D] * (m - 1)))], dst[np.ix_(*([I] * (m - 1)))]):
            return False
    return True


def _base_order(C: np.ndarray, m: int, n: int) -> list[int]:
    """Points ordered so that each next one has the rarest color signature."""
    order: list[int] = []
    rest = list(range(n))
    while rest:
        sigs = {}
        for x in rest:
            P = np.array(order + [x])
            parts = []
            for axis in range(m):
                s = np.take(C, x, axis=axis)
                parts.append(s[np.ix_(*([P] * (m - 1)))].tobytes() if m > 1 else bytes([int(s) % 256]))
            sigs[x] = b"|".join(parts)
        counts: dict[bytes, int] = {}
        for s in sigs.values():
            counts[s] = counts.get(s, 0) + 1
        best = min(rest, key=lambda x: (counts[sigs[x]], x))
        order.append(best)
        rest.remove(best)
    return order


class _Search:
    def __init__(self, cfg: TensorConfig, node_limit: int, time_limit: float | None):
        self.cfg = cfg
        self.n, self.m = cfg.n, cfg.m
        self.C = cfg.grid()
        self.node_limit = node_limit
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.state = AutSearchState()
        self.searches = 0

    def _tick(self) -> None:
        self.state.nodes += 1
        if self.state.nodes > self.node_limit:
            raise BudgetExhausted(f"automorphism search exceeded {self.node_limit} nodes")
        if self.deadline is not None and self.state.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExhausted("automorphism search exceeded its time limit")

    def extend(self, base: list[int], level: int, target: int) -> tuple | None:
        """An automorphism fixing ``base[:level]`` and sending ``base[level]`` to ``target``."""
        self.searches += 1
        st = self.state
        st.domain, st.image = [], []
        for b in base[:level]:
            st.push(b, b)
        if not _consistent(self.C, self.m, st.domain, st.image, base[level], target):
            return None
        st.push(base[level], target)
        used = set(st.image)
        return self._descend(base, level + 1, used)

    def _descend(self, base: list[int], pos: int, used: set[int]) -> tuple | None:
        st = self.state
        if pos == len(base):
            perm = [0] * self.n
            for x, y in zip(st.domain, st.image):
                perm[x] = y
            return tuple(perm)
        x = base[pos]
        for y in range(self.n):
            if y in used:
                continue
            self._tick()
            if not _consistent(self.C, self.m, st.domain, st.image, x, y):
                st.rejected += 1
                continue
            st.push(x, y)
            used.add(y)
            found = self._descend(base, pos + 1, used)
            used.discard(y)
            st.pop()
            if found is not None:
                return found
        return None


@dataclass
class AutResult:
    group: PermGroup
    nodes: int
    searches: int


def automorphism_search(cfg: TensorConfig, seeds: Iterable[Permutation] = (),
                        node_limit: int = DEFAULT_NODE_LIMIT,
                        time_limit: float | None = None) -> AutResult:
    require_coherent(cfg)
    n = cfg.n
    search = _Search(cfg, node_limit, time_limit)
    base = _base_order(search.C, cfg.m, n)
    chain = _Chain(n, base)
    gens: list[tuple] = []
    for s in seeds:
        if not preserves_colors(cfg, s):
            raise ValueError(f"seed {s} does not preserve the coloring")
        gens.append(s.images)
        chain.add(0, s.images)
    for level in range(n - 1, -1, -1):
        failed: set[int] = set()
        for target in range(n):
            if target in chain.trans[level] or target in failed:
                continue
            g = search.extend(base, level, target)
            if g is None:
                failed |= _orbit_at(chain, level, target)
                continue
            gens.append(g)
            chain.add(0, g)
    group = PermGroup([Permutation(g) for g in gens], degree=n, name=None)
    if group.order != chain.order():
        raise AssertionError("stabilizer chain order disagrees with the rebuilt group")
    return AutResult(group, search.state.nodes, search.searches)


def _orbit_at(chain: _Chain, level: int, point: int) -> set[int]:
    gens = [g for lev in range(level, len(chain.gens)) for g in chain.gens[lev]]
    seen, stack = {point}, [point]
    while stack:
        x = stack.pop()
        for g in gens:
            if g[x] not in seen:
                seen.add(g[x])
                stack.append(g[x])
    return seen


def automorphism_group(cfg: TensorConfig, seeds: Iterable[Permutation] = (),
                       node_limit: int = DEFAULT_NODE_LIMIT,
                       time_limit: float | None = None) -> PermGroup:
    """Full color-preserving group of a coherent configuration."""
    return automorphism_search(cfg, seeds, node_limit, time_limit).group


@dataclass(frozen=True)
class SchurityVerdict:
    schurian: bool
    witness: PermGroup

    def __bool__(self) -> bool:
        return self.schurian


def is_schurian(cfg: TensorConfig, seeds: Iterable[Permutation] = (),
                node_limit: int = DEFAULT_NODE_LIMIT,
                time_limit: float | None = None) -> SchurityVerdict:
    """Compare ``cfg`` with the orbit partition of its automorphism group."""
    A = automorphism_group(cfg, seeds, node_limit, time_limit)
    return SchurityVerdict(orb_coloring(A, cfg.m) == cfg, A)
