import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ternarycc import _core_py
from ternarycc.fusion import EnumerationJob, budget_seconds, enumerate_fusions, search_inputs
from ternarycc.kernels import BACKEND, core
from ternarycc.permgroup import make_named_group
from ternarycc.schur import CyclicCarrier, enumerate_schur_partitions
from ternarycc.tensor import FusionSpec, fuse, is_ast, orb_coloring, validate_cc


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def brute_fusions(cfg):
    """Every pattern-respecting merge of classes that passes validate_cc."""
    groups = list(cfg.classes_by_pattern().values())
    found = set()
    for choice in itertools.product(*(list(set_partitions(g)) for g in groups)):
        blocks = [b for part in choice for b in part]
        spec = FusionSpec.from_blocks(cfg.num_classes, blocks)
        if validate_cc(fuse(cfg, spec)) is None:
            found.add(spec.mapping)
    return found


def run(cfg, **kw):
    return enumerate_fusions(EnumerationJob(cfg, **kw))


@pytest.mark.parametrize("spec", ["cyclic:3", "agl1:5", "cyclotomic:5:2", "cyclic:4"])
def test_brute_force_oracle(spec):
    cfg = orb_coloring(make_named_group(spec), 3)
    job = run(cfg)
    assert job.complete
    assert {r.spec.mapping for r in job.results} == brute_fusions(cfg)


@pytest.mark.parametrize("spec", ["cyclic:3", "cyclotomic:5:2", "cyclic:5"])
def test_ast_only_filters(spec):
    cfg = orb_coloring(make_named_group(spec), 3)
    full = {r.spec.mapping for r in run(cfg).results if is_ast(r.config)}
    ast = {r.spec.mapping for r in run(cfg, ast_only=True).results}
    assert ast == full


@pytest.mark.parametrize("n", range(2, 9))
def test_binary_circulant_fusions_are_schur_partitions(n):
    """Coherent fusions of orb_2(C_n) correspond to Schur partitions of Z_n."""
    cfg = orb_coloring(make_named_group(f"cyclic:{n}"), 2)
    job = run(cfg)
    assert job.complete
    found = set()
    for r in job.results:
        out = r.config
        # class of (0, d) determines the partition of Z_n
        labels = [int(out.colors[d]) for d in range(n)]
        blocks = {}
        for d, lab in enumerate(labels):
            blocks.setdefault(lab, set()).add(d)
        found.add(frozenset(frozenset(b) for b in blocks.values()))
    want = {frozenset(pi.classes) for pi in enumerate_schur_partitions(CyclicCarrier("zmod", n))}
    assert found == want


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("spec, ast_only", [
    ("agl1:5", False), ("cyclic:5", False), ("cyclic:7", True), ("cyclotomic:7:3", False),
])
def test_backends_agree(spec, ast_only):
    cfg = orb_coloring(make_named_group(spec), 3)
    args = search_inputs(cfg, ast_only)
    res_c = core.search(*(a.copy() for a in args), 10**7, 600.0)
    res_p = _core_py.search(*(a.copy() for a in args), 10**7, 600.0)
    assert res_c[1] == res_p[1] and res_c[2] == res_p[2]
    assert [r.tolist() for r in res_c[0]] == [r.tolist() for r in res_p[0]]


@given(st.data())
@settings(max_examples=40)
def test_leaf_check_agrees_with_validate(data):
    cfg = orb_coloring(make_named_group("cyclotomic:7:3"), 3)
    parent = np.arange(cfg.num_classes, dtype=np.int32)
    for group in cfg.classes_by_pattern().values():
        labels = data.draw(st.lists(st.integers(0, 2), min_size=len(group), max_size=len(group)))
        for lab in set(labels):
            block = [X for X, l2 in zip(group, labels) if l2 == lab]
            for X in block:
                parent[X] = min(block)
    _, _, img, alpha = search_inputs(cfg)
    spec = FusionSpec.from_blocks(cfg.num_classes, [[X for X in range(len(parent)) if parent[X] == r]
                                                    for r in set(parent.tolist())])
    want = validate_cc(fuse(cfg, spec)) is None
    assert bool(_core_py.leaf_check(parent.copy(), img, alpha)) == want
    assert bool(core.leaf_check(parent.copy(), img, alpha)) == want


def test_results_sorted_and_unique():
    job = run(orb_coloring(make_named_group("cyclic:5"), 3))
    keys = [r.key() for r in job.results]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert all(validate_cc(r.config) is None for r in job.results)


def test_node_limit_marks_incomplete():
    job = run(orb_coloring(make_named_group("cyclic:7"), 3), ast_only=True, node_limit=10)
    assert not job.complete
    assert job.nodes <= 10


def test_parallel_matches_serial():
    cfg = orb_coloring(make_named_group("cyclic:5"), 3)
    a = [r.spec.mapping for r in run(cfg).results]
    b = [r.spec.mapping for r in run(cfg, jobs=2).results]
    assert a == b


def test_agl_p5():
    job = run(orb_coloring(make_named_group("agl1:5"), 3))
    got = {r.config for r in job.results}
    assert got == {orb_coloring(make_named_group("agl1:5"), 3), orb_coloring(make_named_group("sym:5"), 3)}


def test_ast_only_needs_ternary():
    with pytest.raises(ValueError):
        search_inputs(orb_coloring(make_named_group("cyclic:5"), 2), ast_only=True)


@pytest.mark.parametrize("raw, want", [(None, 3600.0), ("12.5", 12.5)])
def test_budget_env(monkeypatch, raw, want):
    if raw is None:
        monkeypatch.delenv("TCC_BUDGET_SECONDS", raising=False)
    else:
        monkeypatch.setenv("TCC_BUDGET_SECONDS", raw)
    assert budget_seconds() == want


@pytest.mark.parametrize("raw", ["abc", "-1"])
def test_budget_env_rejects(monkeypatch, raw):
    monkeypatch.setenv("TCC_BUDGET_SECONDS", raw)
    with pytest.raises(ValueError):
        budget_seconds()


def test_pure_python_fallback_selected():
    import os
    import subprocess
    import sys
    env = {**os.environ, "TCC_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "from ternarycc.kernels import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
