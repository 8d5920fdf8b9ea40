"""Ledger rules, consistency guards, and script replays."""

import pytest

from multlab.abelian import AbelianGroup
from multlab.bounds import (
    KIND_CAPABLE,
    KIND_EXACT,
    KIND_LOWER,
    KIND_UPPER,
    Ledger,
    LedgerError,
    MissingPremiseError,
    Provenance,
    ReplayAssertionError,
    replay_script,
    rule_class_bound,
    rule_extraspecial,
    rule_green,
    rule_jones,
    rule_transgression_lower,
    squeeze_exact,
)
from multlab.compute import Computer
from multlab.dsl import load_presentation
from multlab.pcgroup import structure_report
from multlab.report import CatalogResolver, load_script

ES_P3 = "gen a p\ngen a1 p\ngen a2 p\ncomm a1 a = a2"
PHI3_14 = ("gen a p\ngen a1 p\ngen a2 p\ngen a3 p\npow a1 = a3^-cp3\n"
           "comm a1 a = a2\ncomm a2 a = a3")


@pytest.fixture
def resolver(catalog, computer):
    return CatalogResolver(catalog, computer)


class TestLedger:
    def test_bounds_must_nest(self):
        led = Ledger()
        led.add("G", KIND_LOWER, 3, exponent=4, provenance=Provenance.assumed("x"))
        with pytest.raises(LedgerError, match="exceeds"):
            led.add("G", KIND_UPPER, 3, exponent=3, provenance=Provenance.assumed("y"))

    def test_exact_in_range(self):
        led = Ledger()
        led.add("G", KIND_UPPER, 3, exponent=3, provenance=Provenance.assumed("x"))
        with pytest.raises(LedgerError, match="escapes"):
            led.add("G", KIND_EXACT, 3, exponent=5, provenance=Provenance.assumed("y"))

    def test_monotone_aggregates(self):
        led = Ledger()
        uppers, lowers = [], []
        for e_up, e_lo in [(10, 0), (8, 2), (9, 4), (7, 4)]:
            led.add("G", KIND_UPPER, 3, exponent=e_up, provenance=Provenance.assumed("u"))
            led.add("G", KIND_LOWER, 3, exponent=e_lo, provenance=Provenance.assumed("l"))
            uppers.append(led.best_upper("G").exponent)
            lowers.append(led.best_lower("G").exponent)
        assert uppers == sorted(uppers, reverse=True)
        assert lowers == sorted(lowers)

    def test_trace_replays_premises(self):
        led = Ledger()
        a = led.add("G", KIND_LOWER, 3, exponent=2, provenance=Provenance.assumed("a"))
        b = led.add("G", KIND_UPPER, 3, exponent=2, provenance=Provenance.assumed("b"))
        ex = squeeze_exact(led, "G", 3)
        chain = led.trace(ex)
        assert [f.fact_id for f in chain] == [a.fact_id, b.fact_id, ex.fact_id]


class TestRules:
    def test_green(self):
        led = Ledger()
        assert rule_green(led, "G", 3, 6).exponent == 15
        assert rule_green(led, "H", 3, 1).exponent == 0

    def test_green_plus_exact_gives_t6(self):
        led = Ledger()
        rule_green(led, "G", 3, 6)
        led.add("G", KIND_EXACT, 3, exponent=9,
                provenance=Provenance.computed("kunneth"))
        n, m = 6, led.exact("G").exponent
        assert n * (n - 1) // 2 - m == 6

    def test_jones_tight_on_es(self, computer):
        pres = load_presentation(ES_P3, 3)
        st = structure_report(pres)
        led = Ledger()
        prem = led.add("G/Z", KIND_EXACT, 3, exponent=1,
                       provenance=Provenance.computed("abelian"))
        fact = rule_jones(led, "G", pres, st.center, prem)
        assert fact.exponent == 2

    def test_jones_missing_premise(self):
        pres = load_presentation(ES_P3, 3)
        st = structure_report(pres)
        with pytest.raises(MissingPremiseError, match="M\\(G/K\\)"):
            rule_jones(Ledger(), "G", pres, st.center, None)

    def test_jones_on_whole_abelian_group(self):
        # K = G abelian reproduces exterior-square exactness
        pres = load_presentation("gen x p\ngen y p^2", 3)
        from multlab.pcgroup import Subgroup
        led = Ledger()
        prem = led.add("G/G", KIND_EXACT, 3, exponent=0,
                       provenance=Provenance.computed("abelian"))
        fact = rule_jones(led, "G", pres, Subgroup.whole(pres), prem)
        assert fact.exponent == 1  # |M(Z_p x Z_{p^2})| = p

    def test_class_bound_es(self, computer):
        pres = load_presentation(ES_P3, 3)
        led = Ledger()
        prem = led.add("Q", KIND_EXACT, 3, exponent=1,
                       provenance=Provenance.computed("abelian"))
        assert rule_class_bound(led, "G", pres, prem).exponent == 2

    def test_class_bound_needs_class_2(self):
        pres = load_presentation("gen a p\ngen b p", 3)
        with pytest.raises(LedgerError, match="class"):
            rule_class_bound(Ledger(), "G", pres,
                             Ledger().add("Q", KIND_EXACT, 3, exponent=0,
                                          provenance=Provenance.assumed("c")))

    def test_class_bound_phi3_14(self, computer):
        # premise |M(G/gamma_3)| computed by the oracle at order 27
        pres = load_presentation(PHI3_14, 3)
        st = structure_report(pres)
        from multlab.pcgroup import central_quotient
        quot = central_quotient(pres, st.lower_central[2])
        led = Ledger()
        res = computer.compute(quot)
        prem = led.add("Q", KIND_EXACT, 3, exponent=res.order_exponent,
                       provenance=Provenance.computed(res.method))
        fact = rule_class_bound(led, "G", pres, prem)
        assert fact.exponent == 3  # true but not tight (exact is p^2)

    def test_extraspecial_cases(self):
        for text, p, want in [
            (ES_P3, 3, 2),
            ("gen a p\ngen a1 p\ngen a2 p\npow a = a2\ncomm a1 a = a2", 3, 0),
            ("gen a 2\ngen b 4\ncomm b a = b^2", 2, 1),              # dihedral
            ("gen b 2\ngen a 4\npow b = a^2\ncomm a b = a^2", 2, 0),  # quaternion
        ]:
            led = Ledger()
            fact = rule_extraspecial(led, "G", load_presentation(text, p))
            assert fact.exponent == want
        led = Ledger()
        big = load_presentation(
            "gen a1 p\ngen a2 p\ngen a3 p\ngen a4 p\ngen b p\n"
            "comm a2 a1 = b\ncomm a4 a3 = b", 3)
        assert rule_extraspecial(led, "G", big).exponent == 5

    def test_extraspecial_rejects_phi3(self):
        with pytest.raises(LedgerError, match="extraspecial"):
            rule_extraspecial(Ledger(), "G", load_presentation(PHI3_14, 3))

    def test_transgression_refuses_without_capability(self, catalog):
        pres = catalog.instantiate("Phi7_15", 3)
        st = structure_report(pres)
        led = Ledger()
        prem = led.add("Q", KIND_EXACT, 3, exponent=4,
                       provenance=Provenance.computed("kunneth"))
        with pytest.raises(MissingPremiseError, match="capab"):
            rule_transgression_lower(led, "G", pres, st.center, None, prem)

    def test_transgression_es_with_assumed_capability(self):
        pres = load_presentation(ES_P3, 3)
        st = structure_report(pres)
        led = Ledger()
        cap = led.add("G", KIND_CAPABLE, 3, provenance=Provenance.assumed("cap"))
        prem = led.add("Q", KIND_EXACT, 3, exponent=1,
                       provenance=Provenance.computed("abelian"))
        fact = rule_transgression_lower(led, "G", pres, st.center, cap, prem)
        assert fact.exponent == 1  # valid lower bound below the exact p^2


class TestReplay:
    def test_phi7_squeeze(self, resolver):
        res = replay_script(load_script("phi7_15_squeeze.script"), 3, resolver)
        exact = res.final_exact()
        assert exact is not None and exact.exponent == 4
        assert len(res.assumed_bounds()) == 1
        assert len(res.assumed_capabilities()) == 1
        # the derivation trace of the exact fact contains exactly one
        # assumed order fact
        chain = res.ledger.trace(exact)
        assumed_orders = [f for f in chain if f.provenance.tag == "assumed"
                          and f.kind != KIND_CAPABLE]
        assert len(assumed_orders) == 1

    def test_es_class_bound_script(self, resolver):
        res = replay_script(load_script("es_p3_class_bound.script"), 3, resolver)
        assert res.final_exact().exponent == 2
        assert not res.assumed

    def test_jones_script(self, resolver):
        res = replay_script(load_script("phi2_2111c_jones.script"), 3, resolver)
        assert res.ledger.best_upper("T6_viii").exponent == 5
        assert res.final_exact().exponent == 4
        assert not res.assumed

    def test_deliberate_failure_names_step(self, resolver):
        with pytest.raises(ReplayAssertionError) as exc:
            replay_script(load_script("d8_wrong_upper.script"), 2, resolver)
        assert "expect upper p^1" in str(exc.value)
        assert "p^3" in str(exc.value)

    def test_wrong_order_value_fails(self, resolver):
        script = "use ESp_p3\napply class_bound\nexpect upper p^9"
        with pytest.raises(ReplayAssertionError, match="p\\^2"):
            replay_script(script, 3, resolver)

    def test_replay_is_deterministic(self, resolver):
        first = replay_script(load_script("phi7_15_squeeze.script"), 3, resolver)
        second = replay_script(load_script("phi7_15_squeeze.script"), 3, resolver)
        assert first.trace == second.trace
        assert [f.describe() for f in first.ledger.facts] == \
            [f.describe() for f in second.ledger.facts]
