"""Pure-Python fusion search kernel.

This is the reference implementation of the compiled ``_core`` module and is
used when the extension is not built or ``TCC_PURE_PYTHON`` is set.  Both
expose the same functions with the same semantics.

State of a search node:

``parent``
    union-find forest over base classes (int32, roots are block minima)
``sep``
    uint8 matrix; ``sep[a, b]`` for roots ``a != b`` means the two blocks
    may never be merged

Inputs shared by all nodes:

``img``
    ``img[s, X]`` is the base class equal to ``X^sigma_s``
``alpha``
    ``alpha[X, a, i]`` is the class of ``x_{i<-a}`` for a representative ``x``
"""

from __future__ import annotations

import time

import numpy as np


def find(parent, x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def union(parent, sep, a: int, b: int) -> int:
    """Merge roots ``a`` and ``b``; the smaller index becomes the root."""
    if a > b:
        a, b = b, a
    parent[b] = a
    sep[a, :] |= sep[b, :]
    sep[:, a] |= sep[:, b]
    return a


def roots_of(parent) -> np.ndarray:
    k = len(parent)
    return np.array([find(parent, x) for x in range(k)], dtype=np.int32)


def _matchable(sep, R, ta, tb) -> bool:
    """Perfect matching between substitution lists under the non-separation relation."""
    n, m = ta.shape
    ra = [[int(R[ta[i, c]]) for c in range(m)] for i in range(n)]
    rb = [[int(R[tb[j, c]]) for c in range(m)] for j in range(n)]
    adj = [[j for j in range(n) if all(not sep[ra[i][c], rb[j][c]] for c in range(m))]
           for i in range(n)]
    match = [-1] * n

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match[j] < 0 or augment(match[j], seen):
                    match[j] = i
                    return True
        return False

    for i in range(n):
        if not adj[i] or not augment(i, [False] * n):
            return False
    return True


def propagate(parent, sep, img, alpha) -> bool:
    """Apply the forced merges and separations; False on contradiction."""
    k = len(parent)
    S = img.shape[0]
    while True:
        changed = False
        for X in range(k):
            r = find(parent, X)
            if r == X:
                continue
            for s in range(S):
                a = find(parent, int(img[s, X]))
                b = find(parent, int(img[s, r]))
                if a != b:
                    if sep[a, b]:
                        return False
                    union(parent, sep, a, b)
                    changed = True
        if changed:
            continue
        R = roots_of(parent)
        roots = [x for x in range(k) if R[x] == x]
        for i, a in enumerate(roots):
            for b in roots[i + 1:]:
                if sep[a, b]:
                    continue
                cut = False
                for s in range(S):
                    if sep[R[img[s, a]], R[img[s, b]]]:
                        cut = True
                        break
                if not cut and not _matchable(sep, R, alpha[a], alpha[b]):
                    cut = True
                if cut:
                    sep[a, b] = sep[b, a] = 1
                    changed = True
        for X in range(k):
            if R[X] != X and not _matchable(sep, R, alpha[X], alpha[R[X]]):
                return False
        if not changed:
            return True


def next_pair(parent, sep) -> tuple[int, int]:
    k = len(parent)
    R = roots_of(parent)
    for a in range(k):
        if R[a] != a:
            continue
        for b in range(a + 1, k):
            if R[b] == b and not sep[a, b]:
                return a, b
    return -1, -1


def leaf_check(parent, img, alpha) -> bool:
    """Exact coherence test of the fusion given by ``parent``."""
    k = len(parent)
    S = img.shape[0]
    R = roots_of(parent)
    size = np.bincount(R, minlength=k)
    for s in range(S):
        images: dict[int, set[int]] = {}
        for X in range(k):
            images.setdefault(int(R[X]), set()).add(int(img[s, X]))
        for targets in images.values():
            if len({int(R[t]) for t in targets}) != 1:
                return False
            if len(targets) != size[R[next(iter(targets))]]:
                return False
    sig: dict[int, list] = {}
    for X in range(k):
        key = sorted(tuple(int(v) for v in row) for row in R[alpha[X]])
        if sig.setdefault(int(R[X]), key) != key:
            return False
    return True


def search(parent, sep, img, alpha, node_limit: int, time_limit: float):
    """Depth-first enumeration of coherent fusions below one state.

    Returns ``(results, nodes, complete)`` where each result is the root
    array of a coherent fusion, in depth-first order (merge branch first).
    """
    img = np.ascontiguousarray(img, dtype=np.int32)
    alpha = np.ascontiguousarray(alpha, dtype=np.int32)
    stack = [(np.array(parent, dtype=np.int32), np.array(sep, dtype=np.uint8))]
    results = []
    nodes = 0
    start = time.monotonic()
    while stack:
        if nodes >= node_limit or (nodes % 64 == 0 and time.monotonic() - start > time_limit):
            return results, nodes, False
        par, sp = stack.pop()
        nodes += 1
        if not propagate(par, sp, img, alpha):
            continue
        a, b = next_pair(par, sp)
        if a < 0:
            if leaf_check(par, img, alpha):
                results.append(roots_of(par))
            continue
        p2, s2 = par.copy(), sp.copy()
        s2[a, b] = s2[b, a] = 1
        stack.append((p2, s2))
        p1, s1 = par.copy(), sp.copy()
        union(p1, s1, a, b)
        stack.append((p1, s1))
    return results, nodes, True
