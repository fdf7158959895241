import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy.combinatorics import Permutation as SymPerm, PermutationGroup

from ternarycc.permgroup import (
    DegreeError,
    Permutation,
    PermGroup,
    SizeBoundError,
    act_on_tuple,
    all_tuples,
    canonical_labels,
    catalog_order,
    catalog_specs,
    group_from_generators,
    groups_equal,
    is_member,
    make_named_group,
    orbits_on_m_tuples,
    parse_group_spec,
    read_generator_file,
    stabilizer_of_tuple,
    tuple_rank,
    tuple_unrank,
)


def affine(p, a, b):
    return Permutation.from_function(p, lambda x: (a * x + b) % p)


def sympy_group(G: PermGroup) -> PermutationGroup:
    gens = [SymPerm(list(g.images)) for g in G.generators] or [SymPerm(list(range(G.degree)))]
    return PermutationGroup(gens)


permutations = st.integers(2, 8).flatmap(
    lambda n: st.permutations(list(range(n))).map(lambda p: Permutation(tuple(p))))


class TestPermutation:
    @pytest.mark.parametrize("f, x, want", [
        (Permutation.identity(5), (0, 1, 2), (0, 1, 2)),
        (affine(5, 1, 1), (0, 1, 2), (1, 2, 3)),
        (affine(5, 2, 0), (0, 1, 4), (0, 2, 3)),
    ])
    def test_act_on_tuple(self, f, x, want):
        assert act_on_tuple(f, x) == want

    def test_act_on_tuple_degree_mismatch(self):
        with pytest.raises(DegreeError):
            act_on_tuple(Permutation.identity(3), (0, 5))

    def test_right_action(self):
        f, g = affine(7, 2, 0), affine(7, 1, 1)
        for x in range(7):
            assert (f * g)(x) == g(f(x))

    @given(permutations)
    def test_inverse(self, f):
        assert (f * f.inverse()).is_identity()
        assert (f.inverse() * f).is_identity()

    @given(permutations)
    def test_cycles_roundtrip(self, f):
        assert Permutation.from_cycles(f.n, f.cycles()) == f

    def test_power(self):
        f = Permutation.from_cycles(5, [(0, 1, 2, 3, 4)])
        assert (f**5).is_identity()
        assert f**-1 == f.inverse()


class TestGroups:
    @pytest.mark.parametrize("gens, degree, order", [
        ([Permutation.from_cycles(5, [(0, 1, 2, 3, 4)])], 5, 5),
        ([affine(5, 1, 1), affine(5, 2, 0)], 5, 20),
        ([], 4, 1),
    ])
    def test_group_from_generators(self, gens, degree, order):
        assert group_from_generators(gens, degree=degree).order == order

    def test_inconsistent_degrees(self):
        with pytest.raises(DegreeError):
            group_from_generators([Permutation.identity(3), Permutation.identity(4)])

    def test_membership(self):
        agl = make_named_group("agl1:5")
        c5 = make_named_group("cyclic:5")
        assert is_member(agl, affine(5, 2, 0))
        assert not is_member(c5, Permutation.from_cycles(5, [(0, 1)]))
        assert is_member(c5, Permutation.identity(5))
        with pytest.raises(DegreeError):
            is_member(c5, Permutation.identity(4))

    @given(st.lists(permutations, min_size=1, max_size=3).filter(
        lambda gs: len({g.n for g in gs}) == 1))
    def test_order_matches_sympy(self, gens):
        G = PermGroup(gens)
        assert G.order == sympy_group(G).order()

    @given(st.lists(permutations, min_size=1, max_size=2), permutations)
    def test_membership_matches_sympy(self, gens, f):
        n = gens[0].n
        gens = [g for g in gens if g.n == n]
        if f.n != n:
            f = Permutation.identity(n) if f.n < n else f
        if f.n != n:
            return
        G = PermGroup(gens)
        assert is_member(G, f) == sympy_group(G).contains(SymPerm(list(f.images)))

    def test_elements_small(self):
        G = make_named_group("agl1:5")
        elems = set(g.images for g in G.elements())
        assert len(elems) == 20
        assert elems == {tuple((a * x + b) % 5 for x in range(5)) for a in range(1, 5) for b in range(5)}

    @pytest.mark.parametrize("spec, y, order", [
        ("agl1:5", (0,), 4),
        ("agl1:5", (0, 1), 1),
        ("sym:5", (0, 1), 6),
        ("psl:2:11", (0, 1, 2), 1),
    ])
    def test_stabilizer(self, spec, y, order):
        G = make_named_group(spec)
        S = stabilizer_of_tuple(G, y)
        assert S.order == order
        assert all(g(v) == v for g in S.generators for v in y)

    def test_stabilizer_matches_sympy(self):
        G = make_named_group("pgl:3:2")
        S = stabilizer_of_tuple(G, (0,))
        assert S.order == sympy_group(G).stabilizer(0).order()

    def test_groups_equal(self):
        assert not groups_equal(make_named_group("alt:5"), make_named_group("sym:5"))
        assert groups_equal(make_named_group("agl1:5"), group_from_generators([affine(5, 1, 1), affine(5, 2, 0)]))
        a = Permutation.from_cycles(5, [(0, 1, 2, 3, 4)])
        b = Permutation.from_cycles(5, [(0, 2, 4, 1, 3)])
        assert groups_equal(PermGroup([a]), PermGroup([b]))
        with pytest.raises(DegreeError):
            groups_equal(make_named_group("sym:4"), make_named_group("sym:5"))

    def test_transitivity(self):
        assert make_named_group("psl:2:11").is_two_transitive()
        assert make_named_group("agl1:7").is_two_transitive()
        assert not make_named_group("cyclotomic:7:3").is_two_transitive()
        assert make_named_group("cyclotomic:7:3").is_transitive()


class TestCatalog:
    @pytest.mark.parametrize("spec, degree, order", [
        ("psl:2:11", 11, 660),
        ("pgl:3:2", 7, 168),
        ("agl1:7", 7, 42),
        ("pgl:3:3", 13, 5616),
        ("cyclotomic:7:3", 7, 21),
        ("pgl:2:4", 5, 60),
        ("alt:5", 5, 60),
        ("sym:6", 6, 720),
        ("cyclic:9", 9, 9),
    ])
    def test_named_group(self, spec, degree, order):
        G = make_named_group(spec)
        assert (G.degree, G.order) == (degree, order)
        assert catalog_order(spec) == order

    @pytest.mark.parametrize("spec", ["pgl:3:2", "pgl:3:3", "psl:2:11", "pgl:2:4"])
    def test_sympy_oracle_order(self, spec):
        G = make_named_group(spec)
        assert sympy_group(G).order() == G.order
        assert sympy_group(G).is_transitive()

    def test_psl_contains_translation(self):
        assert is_member(make_named_group("psl:2:11"), affine(11, 1, 1))

    @pytest.mark.parametrize("text", ["agl1:6", "cyclotomic:7:4", "psl:2:7", "foo:3", "sym", "pgl:3:6", "sym:40"])
    def test_malformed_specs(self, text):
        with pytest.raises(ValueError):
            parse_group_spec(text)

    def test_nonprime_pgl_flagged(self, caplog):
        spec = parse_group_spec("pgl:2:8")
        assert spec.degree == 9 and spec.flags
        with caplog.at_level("WARNING"):
            G = make_named_group(spec)
        assert G.order == catalog_order("pgl:2:8") == 504

    def test_catalog_specs(self):
        specs = catalog_specs(7)
        assert {"cyclic:7", "cyclotomic:7:2", "cyclotomic:7:3", "agl1:7", "sym:7", "pgl:3:2"} <= set(specs)
        assert "psl:2:11" in catalog_specs(11)
        assert "pgl:3:3" in catalog_specs(13)
        for spec in catalog_specs(13):
            assert make_named_group(spec).order == catalog_order(spec)

    def test_generator_file(self, tmp_path):
        path = tmp_path / "gens.txt"
        path.write_text("1 2 3 4 0\n# comment\n0 2 4 1 3\n")
        assert len(read_generator_file(path)) == 2
        assert make_named_group(f"file:{path}").order == 20


class TestTuples:
    @given(st.integers(1, 6), st.integers(1, 3), st.data())
    def test_rank_bijection(self, n, m, data):
        r = data.draw(st.integers(0, n**m - 1))
        x = tuple_unrank(r, n, m)
        assert tuple_rank(x, n) == r
        assert all(0 <= v < n for v in x)

    def test_all_tuples_row_major(self):
        t = all_tuples(3, 2)
        assert t.tolist() == [list(x) for x in itertools.product(range(3), repeat=2)]

    def test_canonical_labels(self):
        assert canonical_labels(np.array([7, 7, 3, 9, 3])).tolist() == [0, 0, 1, 2, 1]

    @pytest.mark.parametrize("spec, m, count", [
        ("cyclic:5", 3, 25), ("agl1:5", 3, 7), ("sym:5", 3, 5), ("sym:5", 2, 2), ("agl1:13", 3, 15),
    ])
    def test_orbit_counts(self, spec, m, count):
        labels = orbits_on_m_tuples(make_named_group(spec), m)
        assert labels.max() + 1 == count

    def test_orbits_brute_force(self):
        G = make_named_group("agl1:5")
        labels = orbits_on_m_tuples(G, 3)
        elems = list(G.elements())
        for r, x in enumerate(itertools.product(range(5), repeat=3)):
            orbit = {tuple_rank(act_on_tuple(g, x), 5) for g in elems}
            assert {int(labels[s]) for s in orbit} == {int(labels[r])}
            assert int(np.count_nonzero(labels == labels[r])) == len(orbit)

    def test_size_bound(self):
        with pytest.raises(SizeBoundError):
            orbits_on_m_tuples(make_named_group("cyclic:31"), 3, max_tuples=1000)
