import pytest

from foldn.logic import Atom, Definition, Exists, Forall, Imp, NatAtom, check_clause
from foldn.syntax import (
    ElabCtx, NameEnv, ParseError, Parser, PrintOptions, DefineBlock, TheoremDecl,
    elaborate_clause, elaborate_formula, elaborate_term,
    print_formula, print_sequent, print_term,
)
from foldn.term import NT, Arrow, Base, Evar, Signature, arrow

from fixtures import list_signature, nat_signature

EVS = Base("evs")
I = Base("i")


def parse_formula_text(sig, text, evars=None, macros=None):
    ctx = ElabCtx(sig, evars=dict(evars or {}), macros=dict(macros or {}))
    return elaborate_formula(ctx, Parser(text).parse_formula())


def parse_term_text(sig, text, expected=None, evars=None):
    ctx = ElabCtx(sig, evars=dict(evars or {}))
    return elaborate_term(ctx, Parser(text).parse_term(), expected)


class TestParseFile:
    def test_define_sum(self):
        text = ("Define sum : nt -> nt -> nt -> o level 0 by "
                "sum z J J := nat J; sum (s I) J (s K) := sum I J K.")
        decls = Parser(text).parse_file()
        assert len(decls) == 1
        blk = decls[0]
        assert isinstance(blk, DefineBlock)
        assert len(blk.clauses) == 2
        sig = nat_signature()
        ctx = ElabCtx(sig, allow_clause_vars=True)
        c1 = elaborate_clause(ctx, blk.clauses[0])
        assert c1.pred == "sum" and c1.nvars == 1
        assert isinstance(c1.body, NatAtom)
        c2 = elaborate_clause(ctx, blk.clauses[1])
        assert c2.nvars == 3

    def test_theorem_decl(self):
        decls = Parser("Theorem p4 : forall i, nat i => z <= i.").parse_file()
        [d] = decls
        assert isinstance(d, TheoremDecl) and d.name == "p4"
        f = parse_formula_text(nat_signature(), "forall i, nat i => z <= i")
        assert isinstance(f, Forall) and f.ty == NT
        assert isinstance(f.body, Imp)

    def test_empty_define_rejected(self):
        with pytest.raises(ParseError):
            Parser("Define p : o by").parse_file()

    def test_duplicate_free_clause_labels(self):
        text = "Define p : nt -> o level 0 by p z; p (s I) := p I."
        [blk] = Parser(text).parse_file()
        labels = [c.label for c in blk.clauses]
        assert len(set(labels)) == 2


class TestParseTerm:
    def test_cons_application(self):
        sig = list_signature()
        x = Evar("x", 1, Base("item"))
        l = Evar("l", 2, Base("lst"))
        t = parse_term_text(sig, "cons x l", evars={"x": x, "l": l})
        assert t.head.name == "cons"

    def test_infix_cons(self):
        sig = list_signature()
        x = Evar("x", 1, Base("item"))
        t = parse_term_text(sig, "x :: x :: nil", evars={"x": x})
        assert t.head.name == "cons"
        assert t.args[1].head.name == "cons"

    def test_evs_lambda(self):
        sig = Signature()
        sig.declare_sort("evs")
        sig.declare_sort("i")
        sig.declare_const("fst", Arrow(EVS, I))
        sig.declare_const("rst", Arrow(EVS, EVS))
        t = parse_term_text(sig, "l\\ fst (rst l)", expected=Arrow(EVS, I))
        t2 = parse_term_text(sig, "\\l. fst (rst l)", expected=Arrow(EVS, I))
        assert t == t2

    def test_type_error_located(self):
        sig = nat_signature()
        with pytest.raises(ParseError):
            parse_term_text(sig, "s s", expected=NT)

    def test_unbound_identifier(self):
        with pytest.raises(ParseError) as e:
            parse_term_text(nat_signature(), "mystery")
        assert "unbound" in str(e.value)


class TestPrint:
    def test_sequent_rendering(self):
        from foldn.kernel import mk_sequent
        sig = nat_signature()
        i = Evar("i", 1, NT)
        s = mk_sequent((NatAtom(i),), Atom("<=", (__import__("foldn.term", fromlist=["Z"]).Z, i)))
        out = print_sequent(s, sig=sig)
        assert out == "H1 : nat i\n|- z <= i"

    def test_empty_hyps(self):
        from foldn.kernel import mk_sequent
        from foldn.logic import Top
        assert print_sequent(mk_sequent((), Top()), sig=nat_signature()) == "|- top"

    def test_unicode_option(self):
        from foldn.kernel import mk_sequent
        from foldn.logic import Top
        out = print_sequent(mk_sequent((), Top()), sig=nat_signature(),
                            opts=PrintOptions(unicode=True))
        assert out == "⊢ ⊤"


class TestRoundTrip:
    CASES = [
        "forall (i : nt), nat i => z <= i",
        "forall (i : nt) (j : nt), i < j => exists (k : nt), sum i k j /\\ top",
        "top \\/ bot => top",
        "forall (i : nt), (nat i /\\ top) => (z = i \\/ z < i)",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_formula_round_trip(self, text):
        sig = nat_signature()
        f = parse_formula_text(sig, text)
        printed = print_formula(f, NameEnv(sig))
        f2 = parse_formula_text(sig, printed)
        assert f == f2

    def test_sequent_round_trip_with_eigenvariables(self):
        from foldn.kernel import mk_sequent
        sig = nat_signature()
        i = Evar("i", 3, NT)
        j = Evar("j", 5, NT)
        s = mk_sequent((NatAtom(i), Atom("<", (i, j))), Atom("<=", (i, j)))
        names = NameEnv(sig)
        out = print_sequent(s, names=names, sig=sig)
        # reparse each hypothesis against the same name environment
        evars = {n: Evar(n, ts, NT) for n, ts in names.by_name.items()}
        line1 = out.splitlines()[0].split(" : ", 1)[1]
        f = parse_formula_text(sig, line1, evars=evars)
        assert f == s.hyps[0]


class TestAbbrev:
    def test_macro_expansion(self):
        sig = nat_signature()
        sig.declare_pred("even", Arrow(NT, O_()), 0)
        [ab] = Parser("Abbrev both X Y := even X /\\ even Y.").parse_file()
        macros = {ab.name: (ab.params, ab.body)}
        f = parse_formula_text(sig, "both z (s z)", macros=macros)
        from foldn.logic import And
        assert isinstance(f, And)


def O_():
    from foldn.term import O
    return O


class TestClauseChecks:
    def test_clause_side_conditions_via_parser(self):
        sig = nat_signature()
        sig.declare_pred("p", Arrow(NT, O_()), 0)
        sig.declare_pred("q", arrow([NT, NT], O_()), 0)
        text = "Define p : nt -> o level 0 by p X := q X Y."
        [blk] = Parser(text).parse_file()
        ctx = ElabCtx(sig, allow_clause_vars=True)
        c = elaborate_clause(ctx, blk.clauses[0])
        violations = check_clause(sig, c)
        assert any(v.kind == "FreeVariableViolation" for v in violations)


# ----------------------------------------------------------------------
# Property: parse(print(x)) is alpha-equal to x for random well-typed values


from hypothesis import given, settings, strategies as hst

from foldn.logic import And, Bot, Exists, Forall, Imp, NatAtom, Or, Top
from foldn.term import Bound, Z, mk_app, Const as C_


def _terms_nt(depth_vars):
    base = [hst.just(Z)]
    base += [hst.just(Bound(k)) for k in range(depth_vars)]
    return hst.recursive(
        hst.one_of(base),
        lambda t: t.map(lambda x: mk_app(C_("s", Arrow(NT, NT)), [x])),
        max_leaves=4)


def _formulas(depth_vars=0, depth=3):
    atoms = [
        _terms_nt(depth_vars).map(NatAtom),
        hst.tuples(_terms_nt(depth_vars), _terms_nt(depth_vars)).map(
            lambda p: __import__("foldn.logic", fromlist=["Atom"]).Atom("<=", p)),
        hst.just(Top()), hst.just(Bot()),
    ]
    if depth <= 0:
        return hst.one_of(atoms)
    sub = _formulas(depth_vars, depth - 1)
    subq = _formulas(depth_vars + 1, depth - 1)
    return hst.one_of(atoms + [
        hst.tuples(sub, sub).map(lambda p: And(*p)),
        hst.tuples(sub, sub).map(lambda p: Or(*p)),
        hst.tuples(sub, sub).map(lambda p: Imp(*p)),
        subq.map(lambda b: Forall(NT, b, "x")),
        subq.map(lambda b: Exists(NT, b, "y")),
    ])


@given(_formulas())
@settings(max_examples=200, deadline=None)
def test_print_parse_round_trip_property(f):
    from foldn.logic import normalize_formula
    sig = nat_signature()
    printed = print_formula(f, NameEnv(sig))
    reparsed = parse_formula_text(sig, printed)
    assert reparsed == normalize_formula(f)
