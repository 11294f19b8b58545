"""Programmatic copies of the core definition tables, used by tests that
must not depend on the concrete-syntax layer."""

from foldn.logic import And, Atom, Definition, Exists, NatAtom, Top, abstract_clause
from foldn.term import (
    NT, O, Arrow, Base, Bound, Const, Evar, Signature, Z, arrow, mk_app,
)

ITEM = Base("item")
LST = Base("lst")

NIL = Const("nil", LST)
CONS = Const("cons", arrow([ITEM, LST], LST))


def cons(x, l):
    return mk_app(CONS, [x, l])


def S_(t):
    return mk_app(Const("s", Arrow(NT, NT)), [t])


def ph(name, ts, ty):
    return Evar(name, ts, ty)


def nat_signature() -> Signature:
    sig = Signature()
    sig.declare_sort("nt")
    sig.declare_const("z", NT)
    sig.declare_const("s", Arrow(NT, NT))
    for p in ("=", "<", "<="):
        sig.declare_pred(p, arrow([NT, NT], O), 0)
    sig.declare_pred("sum", arrow([NT, NT, NT], O), 0)
    return sig


def list_signature(sig=None) -> Signature:
    sig = sig or nat_signature()
    sig.declare_sort("item")
    sig.declare_sort("lst")
    sig.declare_const("nil", LST)
    sig.declare_const("cons", arrow([ITEM, LST], LST))
    sig.declare_pred("length", arrow([LST, NT], O), 0)
    sig.declare_pred("list", arrow([LST], O), 0)
    sig.declare_pred("element", arrow([ITEM, LST], O), 0)
    sig.declare_pred("split", arrow([LST, LST, LST], O), 0)
    sig.declare_pred("permute", arrow([LST, LST], O), 0)
    return sig


def nat_clauses():
    I = ph("I", -1, NT)
    J = ph("J", -2, NT)
    K = ph("K", -3, NT)
    return [
        abstract_clause("eq_refl", [("I", NT)], "=", [I, I], Top(), [I]),
        abstract_clause("sum_z", [("J", NT)], "sum", [Z, J, J], NatAtom(J), [J]),
        abstract_clause("sum_s", [("I", NT), ("J", NT), ("K", NT)], "sum",
                        [S_(I), J, S_(K)], Atom("sum", (I, J, K)), [I, J, K]),
        abstract_clause("lt_z", [("J", NT)], "<", [Z, S_(J)], NatAtom(J), [J]),
        abstract_clause("lt_s", [("I", NT), ("J", NT)], "<",
                        [S_(I), S_(J)], Atom("<", (I, J)), [I, J]),
        abstract_clause("le_refl", [("I", NT)], "<=", [I, I], Top(), [I]),
        abstract_clause("le_lt", [("I", NT), ("J", NT)], "<=",
                        [I, J], Atom("<", (I, J)), [I, J]),
    ]


def list_clauses():
    X = ph("X", -1, ITEM)
    Y = ph("Y", -2, ITEM)
    L = ph("L", -3, LST)
    L1 = ph("L1", -4, LST)
    L2 = ph("L2", -5, LST)
    L3 = ph("L3", -6, LST)
    I = ph("I", -7, NT)
    return [
        abstract_clause("length_nil", [], "length", [NIL, Z], Top(), []),
        abstract_clause("length_cons", [("X", ITEM), ("L", LST), ("I", NT)], "length",
                        [cons(X, L), S_(I)], Atom("length", (L, I)), [X, L, I]),
        abstract_clause("list_def", [("L", LST)], "list", [L],
                        Exists(NT, And(NatAtom(Bound(0)), Atom("length", (L, Bound(0)))), "i"),
                        [L]),
        abstract_clause("element_here", [("X", ITEM), ("L", LST)], "element",
                        [X, cons(X, L)], Top(), [X, L]),
        abstract_clause("element_there", [("X", ITEM), ("Y", ITEM), ("L", LST)], "element",
                        [X, cons(Y, L)], Atom("element", (X, L)), [X, Y, L]),
        abstract_clause("split_nil", [], "split", [NIL, NIL, NIL], Top(), []),
        abstract_clause("split_left", [("X", ITEM), ("L1", LST), ("L2", LST), ("L3", LST)],
                        "split", [cons(X, L1), cons(X, L2), L3],
                        Atom("split", (L1, L2, L3)), [X, L1, L2, L3]),
        abstract_clause("split_right", [("X", ITEM), ("L1", LST), ("L2", LST), ("L3", LST)],
                        "split", [cons(X, L1), L2, cons(X, L3)],
                        Atom("split", (L1, L2, L3)), [X, L1, L2, L3]),
        abstract_clause("permute_nil", [], "permute", [NIL, NIL], Top(), []),
        abstract_clause("permute_cons", [("X", ITEM), ("L1", LST), ("L2", LST)], "permute",
                        [cons(X, L1), L2],
                        Exists(LST, And(Atom("split", (L2, cons(X, NIL), Bound(0))),
                                        Atom("permute", (L1, Bound(0)))), "l22"),
                        [X, L1, L2]),
    ]


def nat_definition() -> Definition:
    return Definition(nat_signature(), nat_clauses())


def list_definition() -> Definition:
    return Definition(list_signature(), nat_clauses() + list_clauses())
