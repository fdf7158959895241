# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fusion search kernel; see ``_core_py`` for the reference semantics."""

import time

import numpy as np
cimport numpy as cnp

ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8


cdef inline int _find(i32[::1] parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef int _union(i32[::1] parent, u8[:, ::1] sep, int a, int b) noexcept nogil:
    cdef int t, j, k = parent.shape[0]
    if a > b:
        t = a; a = b; b = t
    parent[b] = a
    for j in range(k):
        sep[a, j] |= sep[b, j]
        sep[j, a] |= sep[j, b]
    return a


def find(parent, int x):
    cdef i32[::1] p = parent
    return _find(p, x)


def union(parent, sep, int a, int b):
    cdef i32[::1] p = parent
    cdef u8[:, ::1] s = sep
    return _union(p, s, a, b)


def roots_of(parent):
    cdef i32[::1] p = parent
    cdef int k = p.shape[0], x
    out = np.empty(k, dtype=np.int32)
    cdef i32[::1] o = out
    for x in range(k):
        o[x] = _find(p, x)
    return out


cdef bint _augment(int i, int n, u8[:, ::1] adj, i32[::1] match, u8[::1] seen) noexcept nogil:
    cdef int j
    for j in range(n):
        if adj[i, j] and not seen[j]:
            seen[j] = 1
            if match[j] < 0 or _augment(match[j], n, adj, match, seen):
                match[j] = i
                return True
    return False


cdef bint _matchable(u8[:, ::1] sep, i32[::1] R, i32[:, :, ::1] alpha, int X, int Y,
                     u8[:, ::1] adj, i32[::1] match, u8[::1] seen) noexcept nogil:
    cdef int n = alpha.shape[1], m = alpha.shape[2]
    cdef int i, j, c, any_edge
    cdef bint ok
    for i in range(n):
        any_edge = 0
        for j in range(n):
            ok = True
            for c in range(m):
                if sep[R[alpha[X, i, c]], R[alpha[Y, j, c]]]:
                    ok = False
                    break
            adj[i, j] = ok
            any_edge |= ok
        if not any_edge:
            return False
    for j in range(n):
        match[j] = -1
    for i in range(n):
        for j in range(n):
            seen[j] = 0
        if not _augment(i, n, adj, match, seen):
            return False
    return True


cdef bint _propagate(i32[::1] parent, u8[:, ::1] sep, i32[:, ::1] img, i32[:, :, ::1] alpha,
                     i32[::1] R, u8[:, ::1] adj, i32[::1] match, u8[::1] seen) noexcept nogil:
    cdef int k = parent.shape[0], S = img.shape[0]
    cdef int X, r, s, a, b
    cdef bint changed, cut
    while True:
        changed = False
        for X in range(k):
            r = _find(parent, X)
            if r == X:
                continue
            for s in range(S):
                a = _find(parent, img[s, X])
                b = _find(parent, img[s, r])
                if a != b:
                    if sep[a, b]:
                        return False
                    _union(parent, sep, a, b)
                    changed = True
        if changed:
            continue
        for X in range(k):
            R[X] = _find(parent, X)
        for a in range(k):
            if R[a] != a:
                continue
            for b in range(a + 1, k):
                if R[b] != b or sep[a, b]:
                    continue
                cut = False
                for s in range(S):
                    if sep[R[img[s, a]], R[img[s, b]]]:
                        cut = True
                        break
                if not cut and not _matchable(sep, R, alpha, a, b, adj, match, seen):
                    cut = True
                if cut:
                    sep[a, b] = 1
                    sep[b, a] = 1
                    changed = True
        for X in range(k):
            if R[X] != X and not _matchable(sep, R, alpha, X, R[X], adj, match, seen):
                return False
        if not changed:
            return True


def _scratch(int k, int n):
    return (np.empty(k, dtype=np.int32), np.empty((n, n), dtype=np.uint8),
            np.empty(n, dtype=np.int32), np.empty(n, dtype=np.uint8))


def propagate(parent, sep, img, alpha):
    img = np.ascontiguousarray(img, dtype=np.int32)
    alpha = np.ascontiguousarray(alpha, dtype=np.int32)
    R, adj, match, seen = _scratch(len(parent), alpha.shape[1])
    return bool(_propagate(parent, sep, img, alpha, R, adj, match, seen))


def next_pair(parent, sep):
    cdef i32[::1] p = parent
    cdef u8[:, ::1] s = sep
    cdef int k = p.shape[0], a, b
    for a in range(k):
        if _find(p, a) != a:
            continue
        for b in range(a + 1, k):
            if _find(p, b) == b and not s[a, b]:
                return a, b
    return -1, -1


def leaf_check(parent, img, alpha):
    from ._core_py import leaf_check as _leaf
    return _leaf(parent, img, alpha)


def search(parent, sep, img, alpha, long long node_limit, double time_limit):
    """Depth-first enumeration of coherent fusions below one state."""
    img = np.ascontiguousarray(img, dtype=np.int32)
    alpha = np.ascontiguousarray(alpha, dtype=np.int32)
    cdef int k = len(parent)
    R, adj, match, seen = _scratch(k, alpha.shape[1])
    stack = [(np.array(parent, dtype=np.int32), np.array(sep, dtype=np.uint8))]
    results = []
    cdef long long nodes = 0
    start = time.monotonic()
    while stack:
        if nodes >= node_limit or (nodes % 64 == 0 and time.monotonic() - start > time_limit):
            return results, int(nodes), False
        par, sp = stack.pop()
        nodes += 1
        if not _propagate(par, sp, img, alpha, R, adj, match, seen):
            continue
        a, b = next_pair(par, sp)
        if a < 0:
            if leaf_check(par, img, alpha):
                results.append(roots_of(par))
            continue
        p2, s2 = par.copy(), sp.copy()
        s2[a, b] = 1
        s2[b, a] = 1
        stack.append((p2, s2))
        p1, s1 = par.copy(), sp.copy()
        _union(p1, s1, a, b)
        stack.append((p1, s1))
    return results, int(nodes), True
