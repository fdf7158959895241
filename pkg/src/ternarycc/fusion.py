"""Exhaustive enumeration of coherent fusions of a coherent configuration.

A fusion merges base classes of equal equivalence pattern.  The search
decides, for the lowest-index undecided pair of same-pattern blocks, whether
to merge them (tried first) or keep them apart.  After every decision the
kernel propagates:

* merges through every coordinate map ``sigma`` (merged classes must have
  merged images),
* separations backwards through ``sigma``,
* separations of blocks whose substitution lists admit no perfect matching
  under the current non-separation relation,

and each leaf is tested exactly at class level.  Propagation only discards
states that contain no coherent fusion, so a run that finishes within budget
has found all of them.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .kernels import core
from .permgroup import canonical_labels
from .tensor import (
    FusionSpec,
    TensorConfig,
    fuse,
    is_ast,
    pattern_ids,
    require_coherent,
    sigma_ranks,
    substitution_ranks,
    validate_cc,
)

DEFAULT_NODE_LIMIT = 10**8
DEFAULT_TIME_LIMIT = 3600.0


def budget_seconds(default: float = DEFAULT_TIME_LIMIT) -> float:
    """Wall limit, overridable through ``TCC_BUDGET_SECONDS``."""
    raw = os.environ.get("TCC_BUDGET_SECONDS")
    if raw is None or raw == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"TCC_BUDGET_SECONDS must be a number, got {raw!r}") from None
    if value <= 0:
        raise ValueError("TCC_BUDGET_SECONDS must be positive")
    return value


@dataclass(frozen=True)
class FusionResult:
    spec: FusionSpec
    config: TensorConfig

    @property
    def num_classes(self) -> int:
        return self.config.num_classes

    def key(self) -> tuple:
        return (self.num_classes, self.spec.mapping)


@dataclass
class EnumerationJob:
    base: TensorConfig
    ast_only: bool = False
    node_limit: int = DEFAULT_NODE_LIMIT
    time_limit: float = field(default_factory=budget_seconds)
    jobs: int = 1
    results: list[FusionResult] = field(default_factory=list)
    complete: bool = False
    nodes: int = 0
    elapsed: float = 0.0


def search_inputs(cfg: TensorConfig, ast_only: bool = False):
    """Initial ``(parent, sep, img, alpha)`` arrays for the kernel."""
    n, m, k = cfg.n, cfg.m, cfg.num_classes
    reps = cfg.rep_ranks
    img = np.ascontiguousarray(cfg.colors[sigma_ranks(n, m)[:, reps]], dtype=np.int32)
    alpha = np.ascontiguousarray(cfg.colors[substitution_ranks(n, m)[reps]], dtype=np.int32)
    pats = pattern_ids(n, m)[reps]
    sep = np.ascontiguousarray(pats[:, None] != pats[None, :], dtype=np.uint8)
    parent = np.arange(k, dtype=np.int32)
    if ast_only:
        if m != 3:
            raise ValueError("the ast-only constraint needs a ternary base")
        for X in range(k):
            if cfg.class_patterns[X].count > 2:
                continue
            for Y in range(X):
                if pats[X] == pats[Y]:
                    a, b = core.find(parent, X), core.find(parent, Y)
                    if a != b:
                        core.union(parent, sep, a, b)
    return parent, sep, img, alpha


def _frontier(parent, sep, img, alpha, want: int):
    """Split the search tree into independent subtrees, leaves included."""
    layer = [(parent, sep)]
    leaves = []
    while layer and len(layer) < want:
        nxt = []
        for par, sp in layer:
            par, sp = par.copy(), sp.copy()
            if not core.propagate(par, sp, img, alpha):
                continue
            a, b = core.next_pair(par, sp)
            if a < 0:
                leaves.append((par, sp))
                continue
            p1, s1 = par.copy(), sp.copy()
            core.union(p1, s1, a, b)
            p2, s2 = par.copy(), sp.copy()
            s2[a, b] = s2[b, a] = 1
            nxt += [(p1, s1), (p2, s2)]
        if not nxt:
            break
        layer = nxt
    return layer + leaves


def _run_subtree(args):
    parent, sep, img, alpha, node_limit, time_limit = args
    return core.search(parent, sep, img, alpha, node_limit, time_limit)


def enumerate_fusions(job: EnumerationJob) -> EnumerationJob:
    """Fill ``job.results`` with every coherent fusion found within budget."""
    base = job.base
    require_coherent(base)
    start = time.monotonic()
    parent, sep, img, alpha = search_inputs(base, job.ast_only)
    if job.jobs > 1:
        parts = _frontier(parent, sep, img, alpha, 4 * job.jobs)
        share = max(1, job.node_limit // max(1, len(parts)))
        tasks = [(p, s, img, alpha, share, job.time_limit) for p, s in parts]
        with ProcessPoolExecutor(max_workers=job.jobs) as pool:
            outs = list(pool.map(_run_subtree, tasks))
    else:
        outs = [core.search(parent, sep, img, alpha, job.node_limit, job.time_limit)]
    seen: dict[tuple, FusionResult] = {}
    for roots, nodes, complete in outs:
        job.nodes += nodes
        for r in roots:
            spec = FusionSpec(tuple(canonical_labels(np.asarray(r)).tolist()))
            if spec.mapping not in seen:
                cfg = fuse(base, spec)
                violation = validate_cc(cfg)
                if violation is not None:
                    raise AssertionError(f"search emitted an incoherent fusion: {violation}")
                cfg.coherent = True
                seen[spec.mapping] = FusionResult(spec, cfg)
    job.complete = all(c for _, _, c in outs)
    job.results = sorted(seen.values(), key=FusionResult.key)
    if job.ast_only:
        job.results = [r for r in job.results if is_ast(r.config)]
    job.elapsed = time.monotonic() - start
    return job
