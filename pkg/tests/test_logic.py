import pytest

from foldn.logic import (
    And, Atom, Bot, Exists, Forall, FormulaAbs, Imp, NatAtom, Or, Top,
    UnknownPredicate, abstract_clause, check_clause, formula_level,
    infer_levels, typecheck_formula, QuantifierOverO,
)
from foldn.term import (
    NT, O, Arrow, Base, Bound, Const, Evar, FoldnError, Signature, Z, arrow, mk_app,
)

from fixtures import nat_signature

PRP = Base("prp")


def two_level_sig():
    sig = Signature()
    sig.declare_sort("nt")
    sig.declare_const("z", NT)
    sig.declare_const("s", Arrow(NT, NT))
    sig.declare_sort("prp")
    sig.declare_const("imp", arrow([PRP, PRP], PRP))
    sig.declare_pred("hyp", Arrow(PRP, O), 0)
    sig.declare_pred("conc", arrow([NT, PRP], O), 1)
    return sig


class TestLevels:
    def test_hyp_imp_conc_has_level_one(self):
        sig = two_level_sig()
        b = Evar("b", 1, PRP)
        i = Evar("i", 2, NT)
        f = Imp(Atom("hyp", (b,)), Atom("conc", (i, b)))
        assert formula_level(sig, f) == 1

    def test_top_is_level_zero(self):
        assert formula_level(two_level_sig(), Top()) == 0

    def test_quantifier_transparent(self):
        sig = nat_signature()
        sig.declare_pred("p", Arrow(NT, O), 2)
        f = Forall(NT, Atom("p", (Bound(0),)))
        assert formula_level(sig, f) == 2

    def test_monotone_in_assignment(self):
        sig = two_level_sig()
        b = Evar("b", 1, PRP)
        f = Imp(Atom("hyp", (b,)), Atom("conc", (Z, b)))
        lo = formula_level(sig, f)
        sig.levels["hyp"] = 3
        assert formula_level(sig, f) >= lo


class TestCheckClause:
    def test_free_variable_violation(self):
        sig = nat_signature()
        sig.declare_pred("p", Arrow(NT, O), 0)
        sig.declare_pred("q", arrow([NT, NT], O), 0)
        X = Evar("X", -1, NT)
        Y = Evar("Y", -2, NT)
        c = abstract_clause("p#1", [("X", NT), ("Y", NT)], "p", [X],
                            Atom("q", (X, Y)), [X, Y])
        kinds = {v.kind for v in check_clause(sig, c)}
        assert "FreeVariableViolation" in kinds

    def test_eq_clause_ok(self):
        sig = nat_signature()
        I = Evar("I", -1, NT)
        c = abstract_clause("eq#1", [("I", NT)], "=", [I, I], Top(), [I])
        assert check_clause(sig, c) == []

    def test_level_violation_for_every_level(self):
        for lvl in range(0, 11):
            sig = Signature()
            sig.declare_sort("prp")
            sig.declare_const("imp", arrow([PRP, PRP], PRP))
            sig.declare_pred("prove", Arrow(PRP, O), lvl)
            B, C = Evar("B", -1, PRP), Evar("C", -2, PRP)
            head = mk_app(Const("imp", arrow([PRP, PRP], PRP)), [B, C])
            c = abstract_clause("prove#1", [("B", PRP), ("C", PRP)], "prove",
                                [head], Imp(Atom("prove", (B,)), Atom("prove", (C,))), [B, C])
            assert any(v.kind == "LevelViolation" for v in check_clause(sig, c))

    def test_non_pattern_head_is_warning(self):
        sig = Signature()
        sig.declare_sort("prp")
        sig.declare_sort("i")
        i = Base("i")
        sig.declare_pred("prove", Arrow(PRP, O), 0)
        sig.declare_const("wedge", Arrow(Arrow(i, PRP), PRP))
        B = Evar("B", -1, Arrow(i, PRP))
        X = Evar("X", -2, i)
        c = abstract_clause("prove#5", [("B", Arrow(i, PRP)), ("X", i)], "prove",
                            [mk_app(B, [X])], Atom("prove", (Const("wedge", Arrow(Arrow(i, PRP), PRP)),)) if False
                            else Top(), [B, X])
        vs = check_clause(sig, c)
        assert any(v.kind == "NonPatternHead" and v.warning for v in vs)

    def test_infer_levels_least_assignment(self):
        sig = two_level_sig()
        del sig.levels["conc"]
        b = Evar("B", -1, PRP)
        i = Evar("I", -2, NT)
        c = abstract_clause("conc#2", [("B", PRP), ("I", NT)], "conc",
                            [mk_app(Const("s", Arrow(NT, NT)), [i]), b],
                            Imp(Atom("hyp", (b,)), Atom("conc", (i, b))), [b, i])
        levels = infer_levels(sig, [c], {"conc"})
        assert levels == {"conc": 1}

    def test_infer_levels_fails_when_none_exists(self):
        sig = Signature()
        sig.declare_sort("prp")
        sig.declare_const("imp", arrow([PRP, PRP], PRP))
        sig.declare_pred("prove", Arrow(PRP, O), 0)
        del sig.levels["prove"]
        B, C = Evar("B", -1, PRP), Evar("C", -2, PRP)
        head = mk_app(Const("imp", arrow([PRP, PRP], PRP)), [B, C])
        c = abstract_clause("prove#1", [("B", PRP), ("C", PRP)], "prove",
                            [head], Imp(Atom("prove", (B,)), Atom("prove", (C,))), [B, C])
        with pytest.raises(FoldnError):
            infer_levels(sig, [c], {"prove"})


class TestTypecheckFormula:
    def test_prop4_statement(self):
        sig = nat_signature()
        f = Forall(NT, Imp(NatAtom(Bound(0)), Atom("<=", (Z, Bound(0)))), "i")
        typecheck_formula(sig, (), f)

    def test_quantifier_over_o_rejected(self):
        sig = nat_signature()
        with pytest.raises(QuantifierOverO):
            typecheck_formula(sig, (), Exists(O, Top(), "p"))

    def test_nat_expects_nt(self):
        sig = nat_signature()
        sig.declare_sort("lst")
        sig.declare_const("nil", Base("lst"))
        from foldn.term import TypeMismatch
        with pytest.raises(TypeMismatch):
            typecheck_formula(sig, (), NatAtom(Const("nil", Base("lst"))))

    def test_unknown_predicate(self):
        with pytest.raises(UnknownPredicate):
            typecheck_formula(nat_signature(), (), Atom("mystery", ()))
