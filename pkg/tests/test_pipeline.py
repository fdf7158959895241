import pytest

from ternarycc.permgroup import make_named_group
from ternarycc.pipeline import (
    NotInvariantError,
    UnsupportedPrime,
    aut_matches,
    pi_classes,
    pi_partition,
    starred_classes,
    theorem_checks,
    verify_lemma_020925a,
)
from ternarycc.schemas import validate
from ternarycc.schur import is_schur_partition
from ternarycc.tensor import orb_coloring


def orb(spec, m=3):
    return orb_coloring(make_named_group(spec), m)


class TestPi:
    def test_sym(self):
        pi = pi_partition(orb("sym:5"))
        assert set(pi.classes) == {frozenset({1}), frozenset({2, 3, 4})}
        assert pi.is_trivial()

    @pytest.mark.parametrize("p", [5, 7])
    def test_agl_discrete(self, p):
        assert pi_partition(orb(f"agl1:{p}")).is_discrete()

    def test_cyclotomic_is_schur(self):
        pi = pi_partition(orb("cyclotomic:13:4"))
        assert is_schur_partition(pi.carrier, pi.classes)

    def test_needs_translation_invariance(self):
        with pytest.raises(NotInvariantError):
            pi_classes(orb("pgl:3:2"))

    def test_needs_ternary(self):
        with pytest.raises(ValueError):
            pi_classes(orb("sym:5", 2))


class TestLemma020925a:
    def test_sym7_tau_fixed(self):
        v = verify_lemma_020925a(orb("sym:7"))
        assert v.ok and frozenset({2, 3, 4, 5, 6}) in v.classes
        assert v.discrete_or_trivial is None  # 7 = -1 mod 8

    def test_agl7(self):
        v = verify_lemma_020925a(orb("agl1:7"))
        assert v.schur and v.tau_closed

    @pytest.mark.parametrize("p", [5, 11, 13])
    def test_discrete_or_trivial(self, p):
        for spec in (f"agl1:{p}", f"sym:{p}"):
            v = verify_lemma_020925a(orb(spec))
            assert v.ok and v.discrete_or_trivial

    def test_cyclic_not_invariant(self):
        with pytest.raises(NotInvariantError):
            verify_lemma_020925a(orb("cyclic:5"))


class TestStarred:
    @pytest.mark.parametrize("spec, count", [
        ("psl:2:11", 2), ("pgl:3:2", 2), ("pgl:3:3", 2), ("sym:5", 1), ("sym:7", 1), ("agl1:5", 3),
    ])
    def test_counts(self, spec, count):
        G = make_named_group(spec)
        st = starred_classes(orb_coloring(G, 3), G)
        assert len(st) == count
        assert st.nonstarred_are_orbits

    def test_without_group(self):
        assert starred_classes(orb("cyclic:5")).nonstarred_are_orbits is None

    def test_binary_rejected(self):
        with pytest.raises(ValueError):
            starred_classes(orb("sym:5", 2))


class TestAutMatches:
    @pytest.mark.parametrize("spec", ["agl1:7", "cyclotomic:7:3", "psl:2:11"])
    def test_catalog_groups_match(self, spec):
        G = make_named_group(spec)
        assert aut_matches(G) is not None
        assert make_named_group(aut_matches(G)).order == G.order


class TestTheoremChecks:
    @pytest.mark.parametrize("p", [5, 11, 13])
    def test_thm51(self, p):
        rep = theorem_checks(p, "thm-5.1")
        assert rep.complete and rep.passed and len(rep.results) == 2
        validate("report", rep.to_dict())

    def test_thm11_p5(self):
        rep = theorem_checks(5, "thm-1.1")
        assert rep.complete and rep.passed
        doc = rep.to_dict()
        validate("report", doc)
        assert all(r["contains_translation"] for r in doc["results"])
        orders = sorted(r["aut_order"] for r in doc["results"])
        assert {5, 10, 20, 120} <= set(orders)

    @pytest.mark.parametrize("p, suite", [(7, "thm-5.1"), (5, "exception-probe"), (9, "thm-1.1"), (17, "thm-1.1")])
    def test_unsupported(self, p, suite):
        with pytest.raises(UnsupportedPrime):
            theorem_checks(p, suite)

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            theorem_checks(5, "thm-9")

    def test_report_is_deterministic(self):
        a = theorem_checks(5, "thm-1.1").to_dict()
        b = theorem_checks(5, "thm-1.1").to_dict()
        assert a == b
