import pytest

from foldn.library import Library, LoadError, read_manifest, verify_manifest

LIB = Library()


class TestUnits:
    def test_nat_unit(self):
        u = LIB.load("nat")
        # =, sum x2, < x2, <= x2: seven clauses over four predicates
        assert len(u.defn.clauses) == 7
        assert {c.pred for c in u.defn.clauses} == {"=", "sum", "<", "<="}
        assert all(u.defn.sig.levels[p] == 0 for p in ("=", "sum", "<", "<="))
        assert "z_le" in u.proofs

    def test_intuit_unit_levels(self):
        u = LIB.load("intuit")
        assert u.defn.sig.levels["prog"] == 0
        assert u.defn.sig.levels["seq"] == 1
        assert {c.label for c in u.defn.clauses if c.pred == "seq"} \
            == {f"seq#{k}" for k in range(1, 7)}

    def test_negative_fixture_fails_with_level_violation(self):
        with pytest.raises(LoadError) as e:
            LIB.load("natded_bad")
        assert "LevelViolation" in str(e.value)

    def test_import_merging_keeps_clause_order(self):
        lam = LIB.load("lambda")
        nat = LIB.load("nat")
        # per-predicate clause order survives the merge
        for pred in ("=", "sum", "<", "<="):
            assert [lam.defn.clauses[i].label for i in lam.defn.by_pred[pred]] \
                == [nat.defn.clauses[i].label for i in nat.defn.by_pred[pred]]

    def test_imported_theorems_usable_as_lemmas(self):
        lam = LIB.load("lambda")
        assert "seq_cut" in lam.proofs and "z_le" in lam.proofs

    def test_statement_only_units(self):
        u = LIB.load("pcf_meta")
        assert "pcf_unicity_of_typing" in u.unchecked
        assert "pcf_unicity_of_typing" not in u.proofs

    def test_unknown_unit(self):
        with pytest.raises(LoadError):
            LIB.load("definitely_not_a_unit")


class TestManifest:
    def test_manifest_lists_every_unit(self):
        man = read_manifest(LIB.paths)
        assert {"nat", "list", "intuit", "lambda", "pcf", "linear", "pcfref",
                "intuit_hypconc", "intuit_expl_seq", "intuit_expl_ev",
                "evlists", "evars", "natded_bad"} <= set(man)

    def test_manifest_verifies(self):
        assert verify_manifest(Library()) == []

    def test_script_inventory(self):
        man = read_manifest(LIB.paths)
        green = {n for n, (_, status, _) in man.items() if status == "green"}
        for unit_name, thm in (("nat", "z_le"), ("list", "split_nil"),
                               ("intuit_expl_seq", "impl_example"),
                               ("intuit_expl_seq", "equiv_example"),
                               ("intuit_expl_ev", "expl_ev_example"),
                               ("lambda", "subject_reduction")):
            assert unit_name in green
            assert thm in LIB.load(unit_name).proofs
