import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ternarycc.aut import BudgetExhausted, automorphism_group, automorphism_search, is_schurian, preserves_colors
from ternarycc.permgroup import Permutation, PermGroup, is_member, make_named_group, stabilizer_of_tuple
from ternarycc.tensor import FusionSpec, fuse, leq, orb_coloring, project, validate_cc


def brute_aut_order(cfg):
    return sum(preserves_colors(cfg, p) for p in itertools.permutations(range(cfg.n)))


@pytest.mark.parametrize("spec, m", [
    ("cyclic:5", 3), ("agl1:5", 3), ("sym:5", 3), ("cyclic:5", 2), ("cyclotomic:5:2", 3), ("alt:5", 3),
])
def test_matches_brute_force(spec, m):
    cfg = orb_coloring(make_named_group(spec), m)
    assert automorphism_group(cfg).order == brute_aut_order(cfg)


@given(st.data())
@settings(max_examples=25)
def test_random_coherent_fusions_brute_force(data):
    base = orb_coloring(make_named_group("cyclic:5"), 2)
    k = base.num_classes
    mapping = data.draw(st.lists(st.integers(0, k - 1), min_size=k, max_size=k))
    from ternarycc.tensor import wl_close, TensorConfig
    import numpy as np
    cfg = wl_close(TensorConfig(5, 2, np.asarray(mapping)[base.colors]))
    assert automorphism_group(cfg).order == brute_aut_order(cfg)


@pytest.mark.parametrize("spec, order", [
    ("cyclic:7", 7), ("cyclotomic:7:3", 21), ("agl1:13", 156), ("cyclic:13", 13),
    ("psl:2:11", 660), ("pgl:3:2", 168), ("pgl:3:3", 5616),
])
def test_orbit_configs(spec, order):
    G = make_named_group(spec)
    A = automorphism_group(orb_coloring(G, 3))
    assert A.order == order
    assert all(is_member(A, g) for g in G.generators)


def test_two_transitive_binary():
    A = automorphism_group(orb_coloring(make_named_group("psl:2:11"), 2))
    assert A.order == 39916800


@pytest.mark.parametrize("spec", ["agl1:7", "cyclotomic:11:5", "pgl:3:2"])
def test_galois_closure(spec):
    """orb(aut(orb(G))) = orb(G) and G <= aut(orb(G))."""
    G = make_named_group(spec)
    cfg = orb_coloring(G, 3)
    A = automorphism_group(cfg)
    assert orb_coloring(A, 3) == cfg
    assert is_schurian(cfg).schurian


def test_seeds_give_same_group():
    cfg = orb_coloring(make_named_group("agl1:11"), 3)
    shift = Permutation.from_function(11, lambda x: (x + 1) % 11)
    a = automorphism_search(cfg)
    b = automorphism_search(cfg, seeds=[shift])
    assert a.group.order == b.group.order == 110


def test_bad_seed():
    cfg = orb_coloring(make_named_group("cyclic:5"), 3)
    with pytest.raises(ValueError):
        automorphism_group(cfg, seeds=[Permutation.from_function(5, lambda x: 2 * x % 5)])


def test_budget():
    cfg = orb_coloring(make_named_group("cyclic:13"), 2)
    with pytest.raises(BudgetExhausted):
        automorphism_group(cfg, node_limit=3)


def test_monotone_under_fusion():
    cfg = orb_coloring(make_named_group("agl1:5"), 3)
    starred = [X for X, pat in enumerate(cfg.class_patterns) if pat.count == 3]
    coarse = fuse(cfg, FusionSpec.from_blocks(cfg.num_classes, [starred]))
    assert validate_cc(coarse) is None and leq(coarse, cfg)
    A, B = automorphism_group(cfg), automorphism_group(coarse)
    assert all(is_member(B, g) for g in A.generators)


def test_aut_of_projection_contains_aut():
    cfg = orb_coloring(make_named_group("cyclotomic:7:3"), 3)
    A = automorphism_group(cfg)
    P = automorphism_group(project(cfg, (0, 1)))
    assert all(is_member(P, g) for g in A.generators)


def test_point_stabilizer_witness():
    stab = stabilizer_of_tuple(make_named_group("sym:4"), (0,))
    verdict = is_schurian(orb_coloring(stab, 2))
    assert verdict.schurian
    assert verdict.witness.order == stab.order


def test_incoherent_rejected():
    from ternarycc.tensor import CoherenceError, TensorConfig
    with pytest.raises(CoherenceError):
        automorphism_group(TensorConfig(4, 2, [0] * 16))


def test_preserves_colors_wrong_degree():
    cfg = orb_coloring(make_named_group("cyclic:5"), 2)
    assert not preserves_colors(cfg, (0, 1, 2))


def test_witness_group_degree():
    A = automorphism_group(orb_coloring(make_named_group("cyclic:5"), 3))
    assert isinstance(A, PermGroup) and A.degree == 5
