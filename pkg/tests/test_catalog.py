"""Catalog integrity, method auto-selection, suites, and report formats."""

import json

import pytest

from multlab.abelian import AbelianGroup, exterior_square
from multlab.compute import Computer, NoApplicableMethod, compute_t
from multlab.dsl import DslError
from multlab.entries import Catalog, CatalogError, ConstraintError, load_group_dsl
from multlab.pcgroup import abelianization, check_consistency
from multlab.report import (
    ODD_PART,
    TWO_PART,
    Report,
    emit_report,
    parse_report_jsonl,
    verify_entry,
)
from multlab.results import METHOD_BE, METHOD_KUNNETH, METHOD_ORACLE


def _primes_for(entry):
    if entry.constraint == "two":
        return (2,)
    if entry.constraint == "odd":
        return (3, 5)
    return (2, 3, 5)


class TestCatalogIntegrity:
    def test_every_entry_consistent_at_two_primes(self, catalog):
        for eid in catalog.ids():
            entry = catalog[eid]
            if entry.is_disabled:
                continue
            for p in _primes_for(entry)[:2]:
                pres = catalog.instantiate(eid, p)
                assert check_consistency(pres).ok, (eid, p)

    def test_constraint_violations(self, catalog):
        with pytest.raises(ConstraintError):
            catalog.instantiate("ESp_p3", 2)
        with pytest.raises(ConstraintError):
            catalog.instantiate("D8", 3)
        with pytest.raises(ConstraintError):
            catalog.instantiate("Zp", 4)

    def test_disabled_entry_rejected(self, catalog):
        with pytest.raises(CatalogError, match="disabled"):
            catalog.instantiate("T6_xix", 2)

    def test_unknown_entry(self, catalog):
        with pytest.raises(CatalogError, match="no catalog entry"):
            catalog.instantiate("Phi99", 3)

    def test_xiv_order_determined_by_checker(self, catalog):
        # no order is declared for this entry; consistency certifies 2^6
        pres = catalog.instantiate("T6_xiv", 2)
        assert pres.order_exponent == 6

    def test_xvi_core_order_determined_by_checker(self, catalog):
        assert catalog.instantiate("T6_xvi_core", 2).order_exponent == 5

    def test_parts_cover_the_classification(self, catalog):
        assert len(ODD_PART) == 12 and len(TWO_PART) == 12
        for eid in ODD_PART + TWO_PART:
            assert eid in catalog.entries


class TestLoadGroupDsl:
    def test_parse_error_carries_line(self):
        with pytest.raises(DslError, match="line 3"):
            load_group_dsl("gen a 2\ngen b 2\ncomm a = b", 2)

    def test_inconsistent_text_rejected(self):
        with pytest.raises(DslError, match="inconsistent"):
            load_group_dsl("gen a 2\ngen b 2\ncomm b a = b", 2)

    def test_loads_phi2_211b(self):
        pres = load_group_dsl(
            "gen a p\ngen a1 p\ngen g p\ngen a2 p\ncomm a1 a = a2\npow g = a2", 3)
        assert pres.order_exponent == 4


class TestExpectedMultipliers:
    def test_all_declared_multipliers_match(self, catalog, computer):
        # every entry with a literature-tagged multiplier reproduces it
        for eid in catalog.ids():
            entry = catalog[eid]
            if entry.is_disabled:
                continue
            wants = [e for e in entry.expects if e.kind == "multiplier"]
            if not wants:
                continue
            for p in _primes_for(entry)[:1]:
                pres = catalog.instantiate(eid, p)
                if pres.group_order() > 300 and not (
                        catalog.resolve_recipe(eid).is_product):
                    continue  # the big direct ones are covered by suites
                try:
                    res = computer.compute(eid, p)
                except NoApplicableMethod:
                    continue
                for want in wants:
                    assert res.invariants == want.multiplier_at(p), (eid, p)


class TestAutoSelection:
    def test_es2_runs_be_and_oracle(self, computer):
        res = computer.compute("ESp2_p3", 3)
        assert res.method == METHOD_BE
        assert any("oracle" in line for line in res.trace)
        assert any("agree" in line for line in res.trace)

    def test_products_prefer_kunneth(self, computer):
        assert computer.compute("T6_ix", 3).method == METHOD_KUNNETH

    def test_phi5_via_be(self, computer):
        res = computer.compute("Phi5_214b", 3)
        assert res.method == METHOD_BE
        assert res.order_exponent == 9

    def test_no_method_reports_reasons(self, computer):
        with pytest.raises(NoApplicableMethod) as exc:
            computer.compute("Phi2_211c", 5)
        reasons = exc.value.reasons
        assert "oracle" in reasons and "blackburn_evens" in reasons
        assert "625" in reasons["oracle"]

    def test_forced_method_error(self, computer, catalog):
        from multlab.blackburn_evens import BePreconditionError
        with pytest.raises(BePreconditionError, match="class"):
            computer.compute("Phi7_15", 3, method=METHOD_BE)


class TestComputeT:
    def test_es_p3(self, catalog, computer):
        pres = catalog.instantiate("ESp_p3", 3)
        assert compute_t(pres, computer.compute("ESp_p3", 3)) == 1

    def test_part_i(self, catalog, computer):
        pres = catalog.instantiate("T6_i", 3)
        res = computer.compute("T6_i", 3)
        assert res.order_exponent == 22
        assert compute_t(pres, res) == 6

    def test_zp(self, catalog, computer):
        pres = catalog.instantiate("Zp", 3)
        assert compute_t(pres, computer.compute("Zp", 3)) == 0


class TestGreenSanity:
    def test_t_nonnegative_across_catalog(self, catalog, computer):
        for eid in ("D8", "Q8", "Q16", "QD16", "ESp_p3", "Phi2_31", "Phi2_22",
                    "Phi3_14", "Zp", "Zp2"):
            entry = catalog[eid]
            p = _primes_for(entry)[0]
            pres = catalog.instantiate(eid, p)
            assert compute_t(pres, computer.compute(eid, p)) >= 0

    def test_elementary_abelian_meets_green(self, computer, catalog):
        # rank-k elementary abelian: |M| = p^{k(k-1)/2}, so t = 0
        from multlab.pcgroup import direct_product
        pres = catalog.instantiate("Zp", 3)
        for _ in range(3):
            pres = direct_product(pres, catalog.instantiate("Zp", 3))
        res = computer.compute(pres)
        assert compute_t(pres, res) == 0


class TestReports:
    def test_jsonl_round_trip(self, catalog, computer):
        rep = verify_entry(catalog, computer, "D8", 2)
        text = emit_report([rep], "jsonl")
        back = parse_report_jsonl(text)
        assert len(back) == 1
        assert back[0].as_record() == rep.as_record()
        keys = list(json.loads(text.splitlines()[0]).keys())
        assert keys == ["group", "p", "n", "method", "multiplier", "t",
                        "status", "assumed", "trace", "millis"]

    def test_empty_report_has_header(self):
        out = emit_report([], "table")
        assert out.splitlines()[0].startswith("group")
        assert emit_report([], "jsonl") == ""

    def test_unknown_format(self):
        with pytest.raises(ValueError, match="format"):
            emit_report([], "xml")

    def test_table_contains_status(self, catalog, computer):
        rep = verify_entry(catalog, computer, "Q8", 2)
        out = emit_report([rep], "table")
        assert "PASS" in out and "Q8" in out

    def test_single_d8_row(self, catalog, computer):
        # n = 3 and |M| = 2 give corank 3 - 1 = 2
        rep = verify_entry(catalog, computer, "D8", 2)
        out = emit_report([rep], "table")
        assert len(out.splitlines()) == 3  # header, rule, one row
        assert rep.t == 2


class TestCli:
    def test_compute_verb(self, capsys):
        from multlab.cli import main
        assert main(["compute", "--group", "ESp2_p3", "--p", "3"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out

    def test_check_verb(self, capsys):
        from multlab.cli import main
        assert main(["check", "--group", "T6_xiv", "--p", "2"]) == 0
        assert "order 2^6" in capsys.readouterr().out

    def test_verify_theorem_bad_prime(self, capsys):
        from multlab.cli import main
        assert main(["verify-theorem", "--p", "4", "--part", "odd"]) == 1
        assert "not prime" in capsys.readouterr().err

    def test_replay_verb(self, capsys):
        from multlab.cli import main
        assert main(["replay", "--script", "es_p3_class_bound.script", "--p", "3"]) == 0
        assert "OK" in capsys.readouterr().out

    def test_forced_inapplicable_method(self, capsys):
        from multlab.cli import main
        assert main(["compute", "--group", "Phi7_15", "--p", "3",
                     "--method", "be"]) == 1
        assert "class" in capsys.readouterr().err
