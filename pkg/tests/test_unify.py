import itertools

import pytest

from foldn.term import (
    NT, App, Arrow, Base, Bound, Const, Evar, Lam, S, Z,
    alpha_equal, apply_subst, arrow, mk_app, normalize,
)
from foldn.unify import (
    Failure, NotPattern, Success, UnifProblem, match_head, unify_pattern,
)

I = Base("i")
a = Const("a", I)
b = Const("b", I)
c = Const("c", I)
f = Const("f", Arrow(I, I))
g = Const("g", arrow([I, I], I))


def solve(pairs, flex):
    return unify_pattern(UnifProblem(list(pairs), dict(flex)))


def test_flex_applied_to_distinct_bounds():
    # under binders x,y:  F x y =?= g x   ~~>   F := \x \y. g x
    F = Evar("F", 1, arrow([I, I], I))
    lhs = Lam(I, Lam(I, mk_app(F, [Bound(1), Bound(0)])))
    rhs = Lam(I, Lam(I, App(g, (Bound(1), Bound(1)))))
    out = solve([(lhs, rhs)], {1: None})
    assert isinstance(out, Success)
    # verify by substitution + alpha-compare (the derived oracle)
    assert alpha_equal(apply_subst(out.theta, lhs), apply_subst(out.theta, rhs))
    assert out.theta.lookup(F) == Lam(I, Lam(I, App(g, (Bound(1), Bound(1)))))


def test_occurs_check():
    F = Evar("F", 1, NT)
    out = solve([(F, S(F))], {1: None})
    assert isinstance(out, Failure) and "occurs" in out.reason


def test_timestamp_scope_violation():
    # X =?= s y where y is a rigid eigenvariable newer than X's ceiling
    X = Evar("X", 3, NT)
    y = Evar("y", 7, NT)
    out = solve([(X, S(y))], {3: 3})
    assert isinstance(out, Failure) and "scope" in out.reason


def test_scope_ok_when_older():
    X = Evar("X", 9, NT)
    y = Evar("y", 7, NT)
    out = solve([(X, S(y))], {9: 9})
    assert isinstance(out, Success)
    assert out.theta.lookup(X) == S(y)


def test_rigid_rigid_clash():
    out = solve([(a, b)], {})
    assert isinstance(out, Failure) and "clash" in out.reason


def test_flex_flex_zero_arity_binds_newer_to_older():
    t2 = Evar("t2", 2, I)
    t3 = Evar("t3", 3, I)
    p = Const("p", arrow([I, I], I))
    lhs = mk_app(p, [a, t3])
    rhs = mk_app(p, [a, t2])
    out = solve([(lhs, rhs)], {2: None, 3: None})
    assert isinstance(out, Success)
    assert out.theta.lookup(t3) == t2
    assert out.theta.lookup(t2) is None


def test_flex_flex_same_head():
    F = Evar("F", 1, arrow([I, I], I))
    lhs = Lam(I, Lam(I, mk_app(F, [Bound(1), Bound(0)])))
    rhs = Lam(I, Lam(I, mk_app(F, [Bound(0), Bound(1)])))
    out = solve([(lhs, rhs)], {1: None})
    assert isinstance(out, Success)
    assert alpha_equal(apply_subst(out.theta, lhs), apply_subst(out.theta, rhs))


def test_pruning():
    # \x \y. F x =?= \x \y. f (G y):  G may not depend on y, gets pruned
    F = Evar("F", 1, Arrow(I, I))
    G = Evar("G", 2, Arrow(I, I))
    lhs = Lam(I, Lam(I, App(F, (Bound(1),))))
    rhs = Lam(I, Lam(I, App(f, (App(G, (Bound(0),)),))))
    out = solve([(lhs, rhs)], {1: None, 2: None})
    assert isinstance(out, Success)
    assert alpha_equal(apply_subst(out.theta, lhs), apply_subst(out.theta, rhs))


def test_non_pattern_detected():
    F = Evar("F", 1, Arrow(I, I))
    lhs = App(F, (App(f, (a,)),))  # flex applied to a non-variable
    out = solve([(lhs, a)], {1: None})
    assert isinstance(out, NotPattern)


def test_repeated_bound_args_not_pattern():
    F = Evar("F", 1, arrow([I, I], I))
    lhs = Lam(I, mk_app(F, [Bound(0), Bound(0)]))
    rhs = Lam(I, App(f, (Bound(0),)))
    out = solve([(lhs, rhs)], {1: None})
    assert isinstance(out, NotPattern)


def test_bound_variable_escape_fails():
    # \x. F =?= \x. f x:  F (applied to nothing) cannot mention x
    F = Evar("F", 1, I)
    out = solve([(Lam(I, F), Lam(I, App(f, (Bound(0),))))], {1: None})
    assert isinstance(out, Failure)


class TestMatchHead:
    def test_le_refl_clause(self):
        # head I <= I matched against goal z <= z gives I := z
        Iv = Evar("I", 100, NT)
        out = match_head([Iv, Iv], [Z, Z], {100: None})
        assert isinstance(out, Success)
        assert out.theta.lookup(Iv) == Z

    def test_equality_clause_does_not_apply(self):
        # head X == X against distinct rigid goal arguments fails
        X = Evar("X", 100, I)
        t2 = Evar("t2", 2, I)
        t3 = Evar("t3", 3, I)
        out = match_head([X, X], [t2, t3], {100: None})
        assert isinstance(out, Failure)

    def test_first_order_match(self):
        X = Evar("X", 100, I)
        out = match_head([X], [c], {100: None})
        assert isinstance(out, Success) and out.theta.lookup(X) == c

    def test_goal_side_never_instantiated(self):
        X = Evar("x_goal", 5, I)  # rigid goal eigenvariable
        Y = Evar("Y", 100, I)
        out = match_head([a], [X], {100: None})
        assert isinstance(out, Failure)
        out2 = match_head([Y], [X], {100: None})
        assert isinstance(out2, Success) and out2.theta.lookup(Y) == X


# ----------------------------------------------------------------------
# First-order most-generality against a brute-force enumeration


def ground_terms(depth):
    terms = [a, b, c]
    for _ in range(depth):
        terms = [a, b, c] + [App(f, (t,)) for t in terms] \
            + [mk_app(g, [t1, t2]) for t1 in terms[:3] for t2 in terms[:3]]
    return terms


def enumerate_unifiers(t1, t2, variables, universe):
    for images in itertools.product(universe, repeat=len(variables)):
        mapping = {v.ts: img for v, img in zip(variables, images)}
        from foldn.term import Substitution
        rho = Substitution(mapping)
        if apply_subst(rho, t1) == apply_subst(rho, t2):
            yield rho


def test_first_order_mgu_most_general():
    X = Evar("X", 1, I)
    Y = Evar("Y", 2, I)
    t1 = mk_app(g, [X, App(f, (Y,))])
    t2 = mk_app(g, [App(f, (Y,)), X])
    out = solve([(t1, t2)], {1: None, 2: None})
    assert isinstance(out, Success)
    theta = out.theta
    universe = ground_terms(1)
    found = 0
    for rho in enumerate_unifiers(t1, t2, [X, Y], universe):
        found += 1
        # rho factors through theta:  rho(v) == rho(theta(v)) for all v
        for v in (X, Y):
            img = theta.lookup(v)
            if img is None:
                img = v
            assert apply_subst(rho, img) == apply_subst(rho, v)
    assert found > 0
