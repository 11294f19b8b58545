import pytest
from hypothesis import given, settings, strategies as st

from foldn.term import (
    NT, O, App, Arrow, Base, Bound, Const, Evar, Lam, S, Signature, Substitution, Z,
    PredicateUsedAsTerm, TypeMismatch, UnknownConstant,
    alpha_equal, apply_subst, arrow, free_evars, mk_app, normalize, num,
    quantifiable, term_size, type_of, typecheck_term,
)

I = Base("i")
EVS = Base("evs")
ATM = Base("atm")
ATMLST = Base("atmlst")


def sig_nat():
    sig = Signature()
    sig.declare_sort("nt")
    sig.declare_const("z", NT)
    sig.declare_const("s", Arrow(NT, NT))
    return sig


def nameless(t, depth=0, binders=None):
    # independent oracle: convert to nested tuples ignoring every name
    if binders is None:
        binders = []
    match t:
        case Bound(k):
            return ("b", k)
        case Const(n, _):
            return ("c", n)
        case Evar(_, ts, _):
            return ("e", ts)
        case App(h, args):
            return ("a", nameless(h), tuple(nameless(a) for a in args))
        case Lam(_, b):
            return ("l", nameless(b))


class TestTypecheck:
    def test_z_has_type_nt(self):
        assert typecheck_term(sig_nat(), (), Z) == NT

    def test_evs_abstraction(self):
        # \l. cons (A l) (L l)  at  evs -> atmlst
        sig = Signature()
        for s_ in ("evs", "atm", "atmlst"):
            sig.declare_sort(s_)
        sig.declare_const("cons", arrow([ATM, ATMLST], ATMLST))
        a = Evar("A", 1, Arrow(EVS, ATM))
        l_ = Evar("L", 2, Arrow(EVS, ATMLST))
        t = Lam(EVS, mk_app(Const("cons", arrow([ATM, ATMLST], ATMLST)),
                            [App(a, (Bound(0),)), App(l_, (Bound(0),))]), "l")
        assert typecheck_term(sig, (), t) == Arrow(EVS, ATMLST)

    def test_ill_typed_application(self):
        sig = sig_nat()
        sig.declare_sort("tm")
        tm = Base("tm")
        sig.declare_const("abs", Arrow(Arrow(tm, tm), tm))
        bad = App(Const("abs", Arrow(Arrow(tm, tm), tm)), (Z,))
        with pytest.raises(TypeMismatch):
            typecheck_term(sig, (), bad)

    def test_unknown_constant(self):
        with pytest.raises(UnknownConstant):
            typecheck_term(Signature(), (), Const("mystery", NT))

    def test_predicate_in_term_position(self):
        sig = sig_nat()
        sig.declare_pred("sum", arrow([NT, NT, NT], O), 0)
        with pytest.raises(PredicateUsedAsTerm):
            typecheck_term(sig, (), Const("sum", arrow([NT, NT, NT], O)))


class TestNormalize:
    def test_identity_redex(self):
        a = Const("a", I)
        t = App(Lam(I, Bound(0)), (a,))
        assert normalize(t) == a

    def test_rst_redex(self):
        # (\l'. L (rst l')) l0  -->  L (rst l0)
        rst = Const("rst", Arrow(EVS, EVS))
        L = Evar("L", 1, Arrow(EVS, I))
        l0 = Evar("l0", 2, EVS)
        t = App(Lam(EVS, App(L, (App(rst, (Bound(0),)),))), (l0,))
        assert normalize(t) == App(L, (App(rst, (l0,)),))

    def test_eta_long_fixed_point(self):
        f = Const("f", Arrow(I, I))
        assert normalize(Lam(I, App(f, (Bound(0),)))) == normalize(f)
        assert normalize(f) == Lam(I, App(f, (Bound(0),)))

    def test_quantifiable(self):
        assert quantifiable(Arrow(EVS, I))
        assert not quantifiable(Arrow(I, O))


class TestAlphaEqual:
    def test_renaming(self):
        f = Const("f", arrow([I, I], I))
        t1 = Lam(I, mk_app(f, [Bound(0), Bound(0)]), "x")
        t2 = Lam(I, mk_app(f, [Bound(0), Bound(0)]), "y")
        assert alpha_equal(t1, t2)

    def test_distinct_binders(self):
        p = Const("p", Arrow(I, I))
        t1 = Lam(I, Lam(I, App(p, (Bound(1),))))
        t2 = Lam(I, Lam(I, App(p, (Bound(0),))))
        assert not alpha_equal(t1, t2)

    def test_abs_lambda_oracle(self):
        # abs (\n. n) vs abs (\m. m): frozen via the nameless oracle
        tm = Base("tm")
        absc = Const("abs", Arrow(Arrow(tm, tm), tm))
        t1 = App(absc, (Lam(tm, Bound(0), "n"),))
        t2 = App(absc, (Lam(tm, Bound(0), "m"),))
        assert nameless(normalize(t1)) == nameless(normalize(t2))
        assert alpha_equal(t1, t2)


class TestSubstitution:
    def test_empty_subst_is_identity(self):
        t = S(S(Z))
        assert apply_subst(Substitution(), t) == normalize(t)

    def test_prop5_style_subst(self):
        # [cons x' l'/l, i'/j] applied to length l (s i'):
        # the image mentions fresh variables in an older variable's image.
        lst = Base("lst")
        item = Base("item")
        cons = Const("cons", arrow([item, lst], lst))
        length = Const("lengthf", arrow([lst, NT], lst))  # stand-in constant head
        l = Evar("l", 1, lst)
        i1 = Evar("i'", 2, NT)
        x1 = Evar("x'", 3, item)
        l1 = Evar("l'", 4, lst)
        j = Evar("j", 5, NT)
        theta = Substitution().bind(l, mk_app(cons, [x1, l1])).bind(j, i1)
        t = mk_app(length, [l, S(i1)])
        assert apply_subst(theta, t) == mk_app(length, [mk_app(cons, [x1, l1]), S(i1)])

    def test_no_capture(self):
        # [N/n] under binder r: substitution grafts a closed image under Lam
        tm = Base("tm")
        r = Evar("r", 1, Arrow(tm, tm))
        n = Evar("n", 2, tm)
        N = Evar("N", 3, tm)
        body = Lam(tm, App(r, (App(Evar("n", 2, tm), ()) if False else n,)))
        theta = Substitution().bind(n, N)
        out = apply_subst(theta, body)
        assert out == normalize(Lam(tm, App(r, (N,))))

    def test_idempotent(self):
        a = Const("a", I)
        x = Evar("x", 1, I)
        y = Evar("y", 2, I)
        theta = Substitution().bind(y, x).bind(x, a)
        t = mk_app(Const("g", arrow([I, I], I)), [x, y])
        assert apply_subst(theta, apply_subst(theta, t)) == apply_subst(theta, t)
        # composing made the map idempotent
        assert theta.lookup(y) == a


# ----------------------------------------------------------------------
# Property tests: random well-typed terms


TYPES = [I, Arrow(I, I), arrow([I, I], I), Arrow(Arrow(I, I), I)]


def term_strategy(env, ty, depth):
    opts = []
    for k, ety in enumerate(env):
        if ety == ty:
            opts.append(st.just(Bound(k)))
    base_consts = {I: [Const("a", I), Const("b", I)],
                   Arrow(I, I): [Const("f", Arrow(I, I))],
                   arrow([I, I], I): [Const("g", arrow([I, I], I))],
                   Arrow(Arrow(I, I), I): [Const("h", Arrow(Arrow(I, I), I))]}
    for c in base_consts.get(ty, []):
        opts.append(st.just(c))
    if depth > 0:
        if isinstance(ty, Arrow):
            opts.append(
                term_strategy((ty.dom,) + env, ty.cod, depth - 1).map(lambda b, d=ty.dom: Lam(d, b)))
        # applications via a constant head of known type
        if ty == I:
            opts.append(
                term_strategy(env, I, depth - 1).map(lambda t: App(Const("f", Arrow(I, I)), (t,))))
            opts.append(
                st.tuples(term_strategy(env, Arrow(I, I), depth - 1),
                          term_strategy(env, I, depth - 1)).map(lambda p: mk_app(p[0], [p[1]])))
    return st.one_of(opts) if opts else st.just(Const("a", I))


@given(st.sampled_from(TYPES).flatmap(lambda ty: st.tuples(st.just(ty), term_strategy((), ty, 4))))
@settings(max_examples=150, deadline=None)
def test_normalize_idempotent_and_type_preserving(pair):
    ty, t = pair
    nt1 = normalize(t)
    assert normalize(nt1) == nt1
    assert type_of(t) == ty
    assert type_of(nt1) == ty  # subject reduction of the term layer


@given(st.sampled_from(TYPES).flatmap(lambda ty: st.tuples(st.just(ty), term_strategy((), ty, 4))))
@settings(max_examples=80, deadline=None)
def test_subst_commutes_with_normalize(pair):
    _, t = pair
    a = Const("a", I)
    theta = Substitution({100: a})
    lhs = normalize(apply_subst(theta, t))
    rhs = apply_subst(theta, normalize(t))
    assert lhs == rhs
