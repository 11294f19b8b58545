"""Tactics, derived rules expanded to primitive steps, goal-directed
search over definitions, and script execution.

The engine is untrusted: every finished proof is re-checked by the
kernel, so a bug here can lose a proof but never create a theorem.

Derived rules (case analysis on naturals, complete induction, induction
on lists by length) expand to primitive steps; the weakening moves the
expansions need are realized as cuts whose left premise is an identity
tree, so the expected subgoals come out exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .kernel import (
    KernelError, ProofTree, Rule, Sequent, check_proof, mk_sequent, premises_of,
)
from .logic import (
    And, Atom, Bot, Definition, DefinitionalClause, Exists, Forall, Formula,
    FormulaAbs, Imp, NatAtom, Or, Top, alpha_equal_formula, apply_subst_formula,
    free_evars_formula, normalize_formula, replace_evars_formula, shift_formula,
    typecheck_formula,
)
from .term import (
    NT, App, Arrow, Base, Bound, Const, Evar, FoldnError, Lam, Signature,
    Substitution, Term, Z, arrow, free_evars, mk_app, normalize, replace_evars,
    spine_type,
)
from . import unify as U


class TacticError(FoldnError):
    pass


# ---------------------------------------------------------------------------
# Tactic values (arguments are already elaborated)


@dataclass(frozen=True)
class Tactic:
    name: str
    hyp: int | None = None
    term: Term | None = None
    terms: tuple = ()
    formula: Formula | None = None
    fabs: FormulaAbs | None = None
    clause: str | None = None
    depth: int | None = None
    split: tuple[int, ...] = ()
    lemma: str | None = None
    count: int | None = None


# ---------------------------------------------------------------------------
# Proof states


class ProofState:
    """A partial proof: a tree with holes plus the ordered open subgoals."""

    def __init__(self, defn: Definition, theorem: str, root: Sequent,
                 lemmas: dict[str, tuple[Formula, ProofTree]] | None = None):
        self.defn = defn
        self.theorem = theorem
        self.root_sequent = root
        self.nodes: dict[int, tuple[Rule, tuple[int, ...]]] = {}
        self.holes: dict[int, Sequent] = {0: root}
        self.order: list[int] = [0]
        self.next_id = 1
        self.lemmas = dict(lemmas or {})

    def copy(self) -> "ProofState":
        st = ProofState.__new__(ProofState)
        st.defn = self.defn
        st.theorem = self.theorem
        st.root_sequent = self.root_sequent
        st.nodes = dict(self.nodes)
        st.holes = dict(self.holes)
        st.order = list(self.order)
        st.next_id = self.next_id
        st.lemmas = self.lemmas
        return st

    @property
    def done(self) -> bool:
        return not self.holes

    def subgoals(self) -> list[Sequent]:
        return [self.holes[h] for h in self.order]

    def focused(self) -> tuple[int, Sequent]:
        if not self.order:
            raise TacticError("no subgoals remain")
        h = self.order[0]
        return h, self.holes[h]

    def apply_rule_at(self, hole: int, rule: Rule) -> list[int]:
        s = self.holes[hole]
        try:
            prems = premises_of(self.defn, s, rule)
        except (KernelError, U.NotInPatternFragment) as e:
            raise TacticError(str(e))
        ids = []
        for p in prems:
            self.holes[self.next_id] = p
            ids.append(self.next_id)
            self.next_id += 1
        self.nodes[hole] = (rule, tuple(ids))
        del self.holes[hole]
        pos = self.order.index(hole)
        self.order[pos:pos + 1] = ids
        return ids

    def graft_at(self, hole: int, tree: ProofTree):
        """Splice a closed proof tree into a hole (checked later by the kernel)."""
        def intern(t: ProofTree) -> int:
            ids = tuple(intern(c) for c in t.children)
            nid = self.next_id
            self.next_id += 1
            self.nodes[nid] = (t.rule, ids)
            return nid

        ids = tuple(intern(c) for c in tree.children)
        self.nodes[hole] = (tree.rule, ids)
        del self.holes[hole]
        self.order.remove(hole)

    def to_tree(self) -> ProofTree:
        if self.holes:
            raise TacticError(f"{len(self.holes)} subgoals remain open")

        def build(nid: int) -> ProofTree:
            rule, kids = self.nodes[nid]
            return ProofTree(rule, tuple(build(k) for k in kids))

        return build(0)


class Cursor:
    """Driver for derived-rule expansions: applies primitive rules at a
    specific hole and hands back cursors for the premises."""

    def __init__(self, st: ProofState, hole: int):
        self.st = st
        self.hole = hole

    @property
    def s(self) -> Sequent:
        return self.st.holes[self.hole]

    def rule(self, tag: str, **kw) -> list["Cursor"]:
        ids = self.st.apply_rule_at(self.hole, Rule(tag, **kw))
        return [Cursor(self.st, i) for i in ids]

    def chain(self, tag: str, **kw) -> "Cursor":
        out = self.rule(tag, **kw)
        if len(out) != 1:
            raise TacticError(f"{tag}: expected one premise, got {len(out)}")
        return out[0]

    def graft(self, tree: ProofTree):
        self.st.graft_at(self.hole, tree)

    def identity(self, i: int):
        self.graft(identity_tree(self.st.defn, self.s, i))

    def init(self, i: int | None = None):
        if i is None:
            i = self.find(lambda f: alpha_equal_formula(f, self.s.goal))
        self.rule("init", hyp=i)

    def find(self, pred) -> int:
        for i, h in enumerate(self.s.hyps):
            if pred(h):
                return i
        raise TacticError("no matching hypothesis")

    def find_atom(self, name: str, nth: int = 0) -> int:
        seen = 0
        for i, h in enumerate(self.s.hyps):
            if isinstance(h, Atom) and h.pred == name or \
                    (name == "nat" and isinstance(h, NatAtom)):
                if seen == nth:
                    return i
                seen += 1
        raise TacticError(f"no hypothesis with head {name}")

    def new_evars(self, parent: Sequent) -> list[Evar]:
        old = {e.ts for e in parent.evars()}
        return [e for e in self.s.evars() if e.ts not in old]


# ---------------------------------------------------------------------------
# Identity trees: eta-expanded proofs of F, Gamma |- F


def inhabitant(sig: Signature, ty, fuel: int = 3) -> Term | None:
    """A closed term of the given type built from signature constants."""
    if isinstance(ty, Arrow):
        body = inhabitant(sig, ty.cod, fuel)
        return Lam(ty.dom, body) if body is not None else None
    if ty == NT:
        return Z
    if fuel <= 0:
        return None
    for name, cty in sig.consts.items():
        doms, base = spine_type(cty)
        if base != ty:
            continue
        args = []
        ok = True
        for d in doms:
            a = inhabitant(sig, d, fuel - 1)
            if a is None:
                ok = False
                break
            args.append(a)
        if ok:
            return mk_app(Const(name, cty), args)
    return None


def identity_tree(defn: Definition, s: Sequent, i: int) -> ProofTree:
    """A derivation of s whose hypothesis i is alpha-equal to the goal."""
    st = ProofState(defn, "_id", s)
    _identity(Cursor(st, 0), i)
    return st.to_tree()


def _identity(c: Cursor, i: int):
    s = c.s
    f = s.goal
    if not alpha_equal_formula(s.hyps[i], f):
        raise TacticError("identity: hypothesis does not match goal")
    match f:
        case Atom() | NatAtom():
            c.rule("init", hyp=i)
        case Top():
            c.rule("top_r")
        case Bot():
            c.rule("bot_l", hyp=i)
        case And(_, _):
            l, r = c.rule("and_r")
            _identity(l.chain("and_l1", hyp=i), i)
            _identity(r.chain("and_l2", hyp=i), i)
        case Or(_, _):
            l, r = c.rule("or_l", hyp=i)
            _identity(l.chain("or_r1"), i)
            _identity(r.chain("or_r2"), i)
        case Imp(_, _):
            c1 = c.chain("imp_r")  # antecedent appended at the end
            n = len(c1.s.hyps) - 1
            left, right = c1.rule("imp_l", hyp=i)
            _identity(left, n - 1)  # the antecedent, after dropping hyp i
            _identity(right, i)
        case Forall(ty, _, _):
            c1 = c.chain("forall_r")
            new = c1.new_evars(s)
            if new:
                w: Term = new[0]
            else:
                w = inhabitant(c.st.defn.sig, ty)
                if w is None:
                    raise TacticError(
                        f"identity over a vacuous quantifier at uninhabited type {ty!r}")
            _identity(c1.chain("forall_l", hyp=i, witness=w), i)
        case Exists(ty, _, _):
            c1 = c.chain("exists_l", hyp=i)
            new = c1.new_evars(s)
            if new:
                w = new[0]
            else:
                w = inhabitant(c.st.defn.sig, ty)
                if w is None:
                    raise TacticError(
                        f"identity over a vacuous quantifier at uninhabited type {ty!r}")
            _identity(c1.chain("exists_r", witness=w), i)
        case _:
            raise TacticError(f"identity: cannot handle {f!r}")




# ---------------------------------------------------------------------------
# Derived rules (expansions to primitive steps)


def _s_term(t: Term) -> Term:
    return mk_app(Const("s", Arrow(NT, NT)), [t])


def _conj_invariant(b: FormulaAbs) -> FormulaAbs:
    # \i. nat i /\ B i
    return FormulaAbs(NT, And(NatAtom(Bound(0)), b.body), b.hint)


def _destruct_pair(c: Cursor, i: int) -> Cursor:
    r"""Split hypothesis i = A /\ B into A at i and B at the end."""
    c = c.chain("c_l", hyp=i)
    n = len(c.s.hyps) - 1
    c = c.chain("and_l1", hyp=i)
    return c.chain("and_l2", hyp=n)


def expand_nat_case(c: Cursor, hyp: int, b: FormulaAbs) -> list[Cursor]:
    """Case analysis on naturals: induction that ignores its hypothesis,
    with invariant \\i. nat i /\\ B i."""
    if not isinstance(c.s.hyps[hyp], NatAtom):
        raise TacticError("nat_case: hypothesis is not a nat atom")
    p1, p2, p3 = c.rule("nat_l", hyp=hyp, invariant=_conj_invariant(b))
    # base: |- nat z /\ B z
    zl, zr = p1.rule("and_r")
    zl.rule("nat_r_z")
    # step: nat i' /\ B i' |- nat (s i') /\ B (s i'); the first conjunct
    # of the hypothesis suffices
    q = p2.chain("and_l1", hyp=0)
    sl, sr = q.rule("and_r")
    sl.chain("nat_r_s").init(0)
    # relevance: nat I /\ B I, Gamma |- C
    rest = p3.chain("and_l2", hyp=hyp)
    return [zr, sr, rest]


def expand_list_induction(c: Cursor, hyp: int, b: FormulaAbs,
                          list_pred="list", length_pred="length") -> list[Cursor]:
    """Induction on lists via the length measure: unfold the finiteness
    witness, induct on it with invariant \\i. forall l (length l i => B l),
    and realize the two implicit weakenings as cuts whose left premise is
    an identity tree."""
    s = c.s
    h = s.hyps[hyp]
    if not (isinstance(h, Atom) and h.pred == list_pred and len(h.args) == 1):
        raise TacticError(f"list_induction: hypothesis is not a {list_pred} atom")
    if length_pred not in c.st.defn.sig.preds:
        raise TacticError(f"list_induction: no {length_pred} predicate")
    L = h.args[0]
    lst_ty = b.ty
    [c1] = c.rule("def_l", hyp=hyp)           # exists i (nat i /\ length L i)
    c2 = c1.chain("exists_l", hyp=hyp)
    c5 = _destruct_pair(c2, hyp)              # nat i at hyp, length L i at end
    w = FormulaAbs(
        NT,
        Forall(lst_ty, Imp(Atom(length_pred, (Bound(0), Bound(1))), b.body), "l"),
        "i")
    q1, q2, q3 = c5.rule("nat_l", hyp=hyp, invariant=w)

    # base: |- forall l (length l z => B l); the only list of length zero is nil
    b1 = q1.chain("forall_r").chain("imp_r")
    [b2] = b1.rule("def_l", hyp=0)
    user_base, right = b2.rule("cut", cut_formula=b2.s.goal, cut_split=())
    right.identity(len(right.s.hyps) - 1)

    # step: forall l (length l j => B l) |- forall l (length l (s j) => B l)
    s1 = q2.chain("forall_r").chain("imp_r")
    [s2] = s1.rule("def_l", hyp=1)            # singleton CSU: l := x'::l', j' := j
    lnew = _last_evar(s2.s, lst_ty)
    s3 = s2.chain("forall_l", hyp=0, witness=lnew)
    sa, sb = s3.rule("imp_l", hyp=0)
    sa.init(0)
    left2, user_step = sb.rule("cut", cut_formula=b.apply(lnew), cut_split=(0, 1))
    left2.identity(0)

    # relevance: forall l (length l i => B l), Gamma, length L i |- C
    r1 = q3.chain("forall_l", hyp=hyp, witness=L)
    ra, rb = r1.rule("imp_l", hyp=hyp)
    ra.init(len(ra.s.hyps) - 1)
    length_idx = len(rb.s.hyps) - 1
    left3, user_rel = rb.rule("cut", cut_formula=b.apply(L), cut_split=(hyp, length_idx))
    left3.identity(0)
    return [user_base, user_step, user_rel]


def _last_evar(s: Sequent, ty) -> Evar:
    cands = [e for e in s.evars() if e.ty == ty]
    if not cands:
        raise TacticError("expected a fresh eigenvariable")
    return max(cands, key=lambda e: e.ts)


def complete_induction_statement(b: FormulaAbs) -> Formula:
    """forall j (nat j => (forall k (nat k => k < j => B k)) => B j)."""
    ih = Forall(NT, Imp(NatAtom(Bound(0)),
                        Imp(Atom("<", (Bound(0), Bound(1))),
                            b.body)), "k")
    return Forall(NT, Imp(NatAtom(Bound(0)), Imp(ih, b.body)), "j")


def expand_complete_induction(c: Cursor, hyp: int, b: FormulaAbs) -> list[Cursor]:
    """Complete (strong) induction, derived from the primitive induction
    rule.  The induction statement becomes a cut formula F1 so it can be
    instantiated at several points; the invariant is
    \\w. F1 => nat w /\\ forall k (nat k => k <= w => B k)."""
    defn = c.st.defn
    s = c.s
    if not isinstance(s.hyps[hyp], NatAtom):
        raise TacticError("complete_induction: hypothesis is not a nat atom")
    _require_order_clauses(defn)
    f1 = complete_induction_statement(b)
    user1_parent, right = c.rule("cut", cut_formula=f1, cut_split=())
    user1 = user1_parent.chain("forall_r").chain("imp_r").chain("imp_r")

    le_all = Forall(NT, Imp(NatAtom(Bound(0)),
                            Imp(Atom("<=", (Bound(0), Bound(1))),
                                b.body)), "k")
    w = FormulaAbs(NT, Imp(f1, And(NatAtom(Bound(0)), le_all)), "w")
    n1, n2, n3 = right.rule("nat_l", hyp=hyp, invariant=w)

    _ci_base(n1, defn)
    _ci_step(n2, defn)

    # relevance: W I, Gamma, F1 |- C
    left, cont = n3.rule("imp_l", hyp=hyp)
    _identity(left, len(left.s.hyps) - 1)
    cont = _destruct_pair(cont, hyp)          # nat I at hyp, Hle at end
    hle = len(cont.s.hyps) - 1
    i_term = cont.s.hyps[hyp].arg
    cont = cont.chain("forall_l", hyp=hle, witness=i_term)
    pa, cont = cont.rule("imp_l", hyp=hle)
    pa.init(hyp)
    pb, cont = cont.rule("imp_l", hyp=hle)
    pb.chain("def_r", clause=_order_clause(defn, "<=", "refl")).rule("top_r")
    # drop the auxiliary hypotheses: cut B I against exactly {B I, nat I, F1}
    b_idx = hle
    split = tuple(sorted({b_idx, hyp, _find_hyp(cont.s, f1)}))
    left4, user3 = cont.rule("cut", cut_formula=cont.s.hyps[b_idx], cut_split=split)
    left4.identity(split.index(b_idx))
    return [user1, user3]


def _find_hyp(s: Sequent, f: Formula) -> int:
    for i, h in enumerate(s.hyps):
        if alpha_equal_formula(h, f):
            return i
    raise TacticError("internal: expected hypothesis not found")


def _ci_base(c: Cursor, defn: Definition):
    """|- W z: the bound k <= z forces k = z, where F1 applies vacuously."""
    c = c.chain("imp_r")                      # F1 @0
    zl, zr = c.rule("and_r")
    zl.rule("nat_r_z")
    k = zr.chain("forall_r").chain("imp_r").chain("imp_r")
    # hyps: F1 @0, nat k @1, k <= z @2
    for cc in k.rule("def_l", hyp=2):
        if isinstance(cc.s.hyps[2], Top):     # k := z
            cc = cc.chain("forall_l", hyp=0, witness=Z)
            pa, cc = cc.rule("imp_l", hyp=0)
            pa.rule("nat_r_z")
            pb, cc = cc.rule("imp_l", hyp=0)
            kk = pb.chain("forall_r").chain("imp_r").chain("imp_r")
            if kk.rule("def_l", hyp=len(kk.s.hyps) - 1):
                raise TacticError("internal: k' < z should have no cases")
            cc.identity(0)
        else:
            if cc.rule("def_l", hyp=2):       # k < z: no unifiers
                raise TacticError("internal: k < z should have no cases")


def _ci_step(c: Cursor, defn: Definition):
    """W j0 |- W (s j0)."""
    c = c.chain("imp_r")                      # hyps: W j0 @0, F1 @1
    left, c = c.rule("imp_l", hyp=0)
    _identity(left, len(left.s.hyps) - 1)
    c = _destruct_pair(c, 0)                  # nat j0 @0, F1 @1, Hle @2
    gl, gr = c.rule("and_r")
    gl.chain("nat_r_s").init(0)
    k = gr.chain("forall_r").chain("imp_r").chain("imp_r")
    # hyps: nat j0 @0, F1 @1, Hle @2, nat k @3, k <= s j0 @4
    for cc in k.rule("def_l", hyp=4):
        if isinstance(cc.s.hyps[4], Top):
            _ci_step_eq(cc, defn)
        else:
            _b_from_hle(cc, defn, hle=2, natk=3, lt=4)


def _ci_step_eq(c: Cursor, defn: Definition):
    """k := s j0: establish B (s j0) by applying F1 at s j0; its induction
    hypothesis follows from Hle via the inversion a < s b => a <= b."""
    # hyps: nat j0 @0, F1 @1, Hle @2, nat (s j0) @3, T @4
    j0 = c.s.hyps[0].arg
    c = c.chain("forall_l", hyp=1, witness=_s_term(j0))
    pa, c = c.rule("imp_l", hyp=1)
    pa.init()
    pb, c = c.rule("imp_l", hyp=1)
    c.identity(1)
    # pb: nat j0 @0, Hle @1, nat (s j0) @2, T @3 |- forall k2 (...)
    kk = pb.chain("forall_r").chain("imp_r").chain("imp_r")
    _b_from_hle(kk, defn, hle=1, natk=4, lt=5)


def _b_from_hle(c: Cursor, defn: Definition, hle: int, natk: int, lt: int):
    """Close ... Hle: forall k (nat k => k <= j0 => B k) ...,
    nat k* @natk, k* < s j0 @lt |- B k*."""
    kstar = c.s.hyps[natk].arg
    j0 = c.s.hyps[0].arg
    lemma_f, lemma_tree = _canned_lt_s_inv(defn)
    left, c = c.rule("cut", cut_formula=lemma_f, cut_split=())
    left.graft(lemma_tree)
    li = len(c.s.hyps) - 1
    c = c.chain("forall_l", hyp=li, witness=j0)
    pa, c = c.rule("imp_l", hyp=li)
    pa.init()
    c = c.chain("forall_l", hyp=li, witness=kstar)
    pb, c = c.rule("imp_l", hyp=li)
    pb.init()
    # hyp li is now k* <= j0
    c = c.chain("forall_l", hyp=hle, witness=kstar)
    pc, c = c.rule("imp_l", hyp=hle)
    pc.init()
    pd, c = c.rule("imp_l", hyp=hle)
    pd.init()
    c.identity(hle)


# -- the canned order lemma used by complete induction ----------------------

_canned_cache: dict[int, tuple[Formula, ProofTree]] = {}


def _order_clause(defn: Definition, pred: str, which: str) -> tuple[str, int]:
    """Locate the standard order clauses by shape."""
    for ordinal, (i, cl) in enumerate(defn.clauses_for(pred)):
        if pred == "<":
            if which == "z" and isinstance(cl.body, NatAtom) and cl.nvars == 1:
                return (pred, ordinal)
            if which == "s" and isinstance(cl.body, Atom) and cl.body.pred == "<":
                return (pred, ordinal)
        if pred == "<=":
            if which == "refl" and isinstance(cl.body, Top) and cl.nvars == 1:
                return (pred, ordinal)
            if which == "lt" and isinstance(cl.body, Atom) and cl.body.pred == "<":
                return (pred, ordinal)
    raise TacticError(
        f"complete induction needs the standard order clauses; missing {which} for {pred}")


def _require_order_clauses(defn: Definition):
    for pred, which in (("<", "z"), ("<", "s"), ("<=", "refl"), ("<=", "lt")):
        _order_clause(defn, pred, which)


def _canned_lt_s_inv(defn: Definition) -> tuple[Formula, ProofTree]:
    """forall b (nat b => forall a (a < s b => a <= b)), proved once per
    definition by ordinary induction and cached."""
    key = id(defn)
    if key in _canned_cache:
        return _canned_cache[key]
    _require_order_clauses(defn)
    le_refl = _order_clause(defn, "<=", "refl")
    le_lt = _order_clause(defn, "<=", "lt")
    lt_z = _order_clause(defn, "<", "z")
    lt_s = _order_clause(defn, "<", "s")

    def lt(x, y):
        return Atom("<", (x, y))

    def le(x, y):
        return Atom("<=", (x, y))

    stmt = Forall(NT, Imp(NatAtom(Bound(0)),
                          Forall(NT, Imp(lt(Bound(0), _s_term(Bound(1))),
                                         le(Bound(0), Bound(1))), "a")), "b")
    st = ProofState(defn, "_lt_s_inv", mk_sequent((), stmt))
    c = Cursor(st, 0).chain("forall_r").chain("imp_r")
    inner = FormulaAbs(NT, Forall(NT, Imp(lt(Bound(0), _s_term(Bound(1))),
                                          le(Bound(0), Bound(1))), "a"), "w")
    p1, p2, p3 = c.rule("nat_l", hyp=0, invariant=_conj_invariant(inner))

    # base: |- nat z /\ forall a (a < s z => a <= z)
    bl, br = p1.rule("and_r")
    bl.rule("nat_r_z")
    a0 = br.chain("forall_r").chain("imp_r")
    for cc in a0.rule("def_l", hyp=0):
        if isinstance(cc.s.hyps[0], NatAtom):
            # a := z, J := z: nat z |- z <= z
            cc.chain("def_r", clause=le_refl).rule("top_r")
        else:
            # a := s a', body a' < z: no unifiers remain
            if cc.rule("def_l", hyp=0):
                raise TacticError("internal: a' < z should have no cases")

    # step: nat b' /\ IH |- nat (s b') /\ forall a (a < s (s b') => a <= s b')
    q = _destruct_pair(p2, 0)                 # nat b' @0, IH @1
    sl, sr = q.rule("and_r")
    sl.chain("nat_r_s").init(0)
    a1 = sr.chain("forall_r").chain("imp_r")
    # hyps: nat b' @0, IH @1, a < s (s b') @2
    for cc in a1.rule("def_l", hyp=2):
        if isinstance(cc.s.hyps[2], NatAtom):
            # a := z: nat b' , IH, nat (s b') |- z <= s b'
            cc = cc.chain("def_r", clause=le_lt)
            cc = cc.chain("def_r", clause=lt_z)
            cc.init(0)
        else:
            # a := s a', body a' < s b': use IH at a'
            aprime = cc.s.hyps[2].args[0]
            cc = cc.chain("forall_l", hyp=1, witness=aprime)
            pa, cc = cc.rule("imp_l", hyp=1)
            pa.init(1)
            # hyp 1 is now a' <= b'
            for dd in cc.rule("def_l", hyp=1):
                if isinstance(dd.s.hyps[1], Top):
                    # a' := b': |- s b' <= s b'
                    dd.chain("def_r", clause=le_refl).rule("top_r")
                else:
                    # a' < b': |- s a' <= s b'
                    dd = dd.chain("def_r", clause=le_lt)
                    dd = dd.chain("def_r", clause=lt_s)
                    dd.init(1)

    # relevance: nat b /\ IH_b |- forall a (a < s b => a <= b)
    p3.chain("and_l2", hyp=0).identity(0)

    tree = st.to_tree()
    check_proof(defn, mk_sequent((), stmt), tree)
    _canned_cache[key] = (stmt, tree)
    return stmt, tree


# ---------------------------------------------------------------------------
# Tactic application


def apply_tactic(state: ProofState, t: Tactic) -> ProofState:
    """Apply a tactic to the first subgoal.  Transactional: on failure the
    input state is unchanged."""
    st = state.copy()
    hole, s = st.focused()
    c = Cursor(st, hole)
    match t.name:
        case "intros":
            n = 0
            while t.count is None or n < t.count:
                g = c.s.goal
                if isinstance(g, Forall):
                    c = c.chain("forall_r")
                elif isinstance(g, Imp):
                    c = c.chain("imp_r")
                else:
                    break
                n += 1
            if n == 0:
                raise TacticError("intros: nothing to introduce")
        case "case":
            c.rule("def_l", hyp=_hyp_index(s, t.hyp))
        case "destruct":
            _destruct(c, _hyp_index(s, t.hyp))
        case "unfold":
            _unfold(c, t.clause)
        case "init" | "apply_init":
            c.init(None if t.hyp is None else _hyp_index(s, t.hyp))
        case "assumption":
            i = c.find(lambda f: alpha_equal_formula(f, c.s.goal))
            if isinstance(c.s.goal, (Atom, NatAtom)):
                c.rule("init", hyp=i)
            else:
                c.identity(i)
        case "split":
            c.rule("and_r")
        case "left":
            c.rule("or_r1")
        case "right":
            c.rule("or_r2")
        case "exists":
            c.rule("exists_r", witness=t.term)
        case "top_r":
            c.rule("top_r")
        case "bot_l":
            c.rule("bot_l", hyp=_hyp_index(s, t.hyp))
        case "nat_r":
            g = c.s.goal
            if not isinstance(g, NatAtom):
                raise TacticError("nat_r: goal is not a nat atom")
            arg = normalize(g.arg)
            if arg == Z:
                c.rule("nat_r_z")
            else:
                c.rule("nat_r_s")
        case "imp_l":
            c.rule("imp_l", hyp=_hyp_index(s, t.hyp))
        case "forall_l":
            c.rule("forall_l", hyp=_hyp_index(s, t.hyp), witness=t.term)
        case "exists_l":
            c.rule("exists_l", hyp=_hyp_index(s, t.hyp))
        case "and_l1":
            c.rule("and_l1", hyp=_hyp_index(s, t.hyp))
        case "and_l2":
            c.rule("and_l2", hyp=_hyp_index(s, t.hyp))
        case "or_l":
            c.rule("or_l", hyp=_hyp_index(s, t.hyp))
        case "contract":
            c.rule("c_l", hyp=_hyp_index(s, t.hyp))
        case "induction":
            c.rule("nat_l", hyp=_hyp_index(s, t.hyp), invariant=t.fabs)
        case "nat_case":
            expand_nat_case(c, _hyp_index(s, t.hyp), t.fabs)
        case "complete_induction":
            expand_complete_induction(c, _hyp_index(s, t.hyp), t.fabs)
        case "list_induction":
            expand_list_induction(c, _hyp_index(s, t.hyp), t.fabs)
        case "cut" | "assert" | "cut_lemma":
            c.rule("cut", cut_formula=t.formula,
                   cut_split=tuple(_hyp_index(s, h) for h in t.split))
        case "weaken":
            _weaken(c, _hyp_index(s, t.hyp))
        case "lemma":
            _lemma(c, t.lemma)
        case "apply":
            _apply_hyp(c, _hyp_index(s, t.hyp), list(t.terms))
        case "search":
            _search_tactic(c, t.depth if t.depth is not None else 6)
        case _:
            raise TacticError(f"unknown tactic {t.name}")
    return st


def _hyp_index(s: Sequent, h) -> int:
    if h is None:
        raise TacticError("tactic needs a hypothesis argument")
    if isinstance(h, str):
        if not (h.startswith("H") and h[1:].isdigit()):
            raise TacticError(f"bad hypothesis name {h!r}")
        h = int(h[1:]) - 1
    if not 0 <= h < len(s.hyps):
        raise TacticError(f"no hypothesis H{h + 1}")
    return h


def _destruct(c: Cursor, i: int) -> Cursor:
    """Fully decompose an exists/and hypothesis into its components."""
    f = c.s.hyps[i]
    match f:
        case Exists(_, _, _):
            return _destruct(c.chain("exists_l", hyp=i), i)
        case And(_, _):
            c2 = c.chain("c_l", hyp=i)
            n = len(c2.s.hyps) - 1
            c2 = c2.chain("and_l1", hyp=i)
            c2 = c2.chain("and_l2", hyp=n)
            c2 = _destruct(c2, n)
            return _destruct(c2, i)
        case _:
            return c


def _weaken(c: Cursor, i: int):
    """Drop hypothesis i: cut the goal against everything else, closing
    the residue with an identity tree."""
    s = c.s
    split = tuple(k for k in range(len(s.hyps)) if k != i)
    user, resid = c.rule("cut", cut_formula=s.goal, cut_split=split)
    resid.identity(len(resid.s.hyps) - 1)


def _lemma(c: Cursor, name: str):
    if name not in c.st.lemmas:
        raise TacticError(f"unknown lemma {name!r}")
    f, tree = c.st.lemmas[name]
    left, _ = c.rule("cut", cut_formula=f, cut_split=())
    left.graft(tree)


def _unfold(c: Cursor, clause):
    g = c.s.goal
    if not isinstance(g, Atom):
        raise TacticError("unfold: goal is not an atom")
    defn = c.st.defn
    candidates = defn.clauses_for(g.pred)
    if not candidates:
        raise TacticError(f"unfold: no clauses define {g.pred}")
    if clause is not None:
        if isinstance(clause, int) or (isinstance(clause, str) and clause.isdigit()):
            k = int(clause) - 1
            if not 0 <= k < len(candidates):
                raise TacticError(f"unfold: {g.pred} has no clause number {clause}")
            c.rule("def_r", clause=(g.pred, k))
            return
        for ordinal, (idx, cl) in enumerate(candidates):
            if cl.label == clause:
                c.rule("def_r", clause=(g.pred, ordinal))
                return
        raise TacticError(f"unfold: no clause labelled {clause!r} for {g.pred}")
    last = None
    for ordinal in range(len(candidates)):
        try:
            c.rule("def_r", clause=(g.pred, ordinal))
            return
        except TacticError as e:
            last = e
    raise TacticError(f"unfold: no clause for {g.pred} matches the goal ({last})")


def _spine(f: Formula):
    """The alternating quantifier/antecedent spine of a hypothesis:
    items are ('q', Forall) and ('a', antecedent), plus the conclusion."""
    items = []
    body = f
    while True:
        if isinstance(body, Forall):
            items.append(("q", body))
            body = body.body
        elif isinstance(body, Imp):
            items.append(("a", body.left))
            body = body.right
        else:
            return items, body


def _apply_hyp(c: Cursor, i: int, witnesses: list[Term | None]):
    """Instantiate a hypothesis with the given witnesses (in quantifier
    order, interleaved quantifiers allowed) and chain through its
    antecedents, which become subgoals; when the conclusion matches the
    goal it is closed.  A witness given as _ is inferred by matching the
    atomic conclusion against the goal."""
    s = c.s
    f = s.hyps[i]
    items, _ = _spine(f)
    nq = sum(1 for k, _ in items if k == "q")
    if len(witnesses) > nq:
        raise TacticError(f"apply: hypothesis quantifies {nq} variables")
    witnesses = witnesses + [None] * (nq - len(witnesses))
    if any(w is None for w in witnesses):
        witnesses = _infer_witnesses(c, f, witnesses)
    wit = iter(witnesses)
    sides = []
    for kind, _ in items:
        if kind == "q":
            c = c.chain("forall_l", hyp=i, witness=next(wit))
        else:
            pa, c = c.rule("imp_l", hyp=i)
            sides.append(pa)
    if alpha_equal_formula(c.s.hyps[i], c.s.goal):
        if isinstance(c.s.goal, (Atom, NatAtom)):
            c.rule("init", hyp=i)
        else:
            c.identity(i)
    # side premises already available as hypotheses close on the spot
    for pa in sides:
        for k, h in enumerate(pa.s.hyps):
            if alpha_equal_formula(h, pa.s.goal):
                if isinstance(pa.s.goal, (Atom, NatAtom)):
                    pa.rule("init", hyp=k)
                else:
                    pa.identity(k)
                break


def _infer_witnesses(c: Cursor, f: Formula, witnesses):
    base = 10_000_000 + c.st.next_id * 97
    flex = {}
    anons = []
    body = f
    k = 0
    from .logic import subst_bound_formula
    wit = iter(witnesses)
    while True:
        if isinstance(body, Forall):
            w = next(wit)
            if w is None:
                v = Evar(body.hint, base + k, body.ty)
                flex[v.ts] = None
                anons.append(v)
                inst = v
            else:
                inst = w
            body = subst_bound_formula(body.body, 0, inst)
            k += 1
        elif isinstance(body, Imp):
            body = body.right
        else:
            break
    pairs = _formula_match_pairs(body, c.s.goal)
    if pairs is None:
        raise TacticError("apply: conclusion does not match the goal; give witnesses")
    out = U.unify_pattern(U.UnifProblem(pairs, flex, fresh_start=base + 64))
    if not isinstance(out, U.Success):
        raise TacticError("apply: cannot infer witnesses; give them explicitly")
    resolved = []
    j = 0
    for w in witnesses:
        if w is None:
            img = out.theta.lookup(anons[j])
            j += 1
            if img is None or any(e.ts >= 10_000_000 for e in free_evars(img)):
                raise TacticError("apply: witness underdetermined; give it explicitly")
            resolved.append(img)
        else:
            resolved.append(w)
    return resolved


def _formula_match_pairs(b: Formula, goal: Formula):
    match b, goal:
        case (Atom(p1, a1), Atom(p2, a2)) if p1 == p2 and len(a1) == len(a2):
            return list(zip(a1, a2))
        case (NatAtom(t1), NatAtom(t2)):
            return [(t1, t2)]
    return None


# ---------------------------------------------------------------------------
# Goal-directed search


@dataclass
class Query:
    """A search goal in the positive fragment (atoms, top, bottom,
    conjunction, disjunction, existentials) plus a depth bound counting
    backchaining steps."""
    goal: Formula
    depth: int

    def __post_init__(self):
        _check_goal_shape(self.goal)


def _check_goal_shape(f: Formula, depth=0):
    match f:
        case Top() | Bot() | Atom(_, _) | NatAtom(_):
            return
        case And(l, r) | Or(l, r):
            _check_goal_shape(l)
            _check_goal_shape(r)
        case Exists(_, b, _):
            _check_goal_shape(b)
        case _:
            raise TacticError(f"not a goal formula: {f!r}")


class _Search:
    """Depth-first search with iterative deepening; the bound counts
    definition unfoldings (and successor steps on flexible nat goals).
    Answer variables are resolved by unification and reified to explicit
    witnesses before the kernel sees the tree."""

    def __init__(self, defn: Definition, allow_hyps=False, allow_intro=False):
        self.defn = defn
        self.allow_hyps = allow_hyps
        self.allow_intro = allow_intro

    def run(self, s: Sequent, depth: int):
        self.base = 20_000_000
        for d in range(depth + 1):
            self.next_flex = self.base
            self.next_rigid = 15_000_000
            self.flex = {}
            for sigma, trace in self.prove(list(s.hyps), s.goal, d, Substitution()):
                try:
                    tree = self.replay(s, trace, sigma)
                except (KernelError, TacticError, U.NotInPatternFragment):
                    continue
                return sigma, tree
        return None

    def mint_flex(self, ty, hint="X"):
        v = Evar(hint, self.next_flex, ty)
        self.next_flex += 1
        self.flex[v.ts] = None
        return v

    def mint_rigid(self, hint, ty):
        v = Evar(hint, self.next_rigid, ty)
        self.next_rigid += 1
        return v

    def unify1(self, t1, t2, sigma):
        out = U.unify_pattern(U.UnifProblem(
            [(sigma.apply(t1), sigma.apply(t2))], dict(self.flex),
            fresh_start=self.next_flex + 1000))
        if not isinstance(out, U.Success):
            return None
        self.flex.update(out.fresh)
        composed = {ts: out.theta.apply(img) for ts, img in sigma.mapping.items()}
        composed.update(out.theta.mapping)
        return Substitution(composed)

    def prove(self, hyps, goal, d, sigma):
        goal = apply_subst_formula(sigma, goal)
        match goal:
            case Top():
                yield sigma, ("top",)
            case Bot():
                return
            case And(l, r):
                for s1, t1 in self.prove(hyps, l, d, sigma):
                    for s2, t2 in self.prove(hyps, r, d, s1):
                        yield s2, ("and", t1, t2)
            case Or(l, r):
                for s1, t1 in self.prove(hyps, l, d, sigma):
                    yield s1, ("or1", t1)
                for s1, t1 in self.prove(hyps, r, d, sigma):
                    yield s1, ("or2", t1)
            case Exists(ty, b, hint):
                v = self.mint_flex(ty, hint.upper() or "X")
                from .logic import subst_bound_formula
                inner = subst_bound_formula(b, 0, v)
                for s1, t1 in self.prove(hyps, inner, d, sigma):
                    yield s1, ("exists", v, t1)
            case Forall(ty, b, hint) if self.allow_intro:
                y = self.mint_rigid(hint, ty)
                from .logic import subst_bound_formula
                inner = subst_bound_formula(b, 0, y)
                for s1, t1 in self.prove(hyps, inner, d, sigma):
                    yield s1, ("forall", y, t1)
            case Imp(l, r) if self.allow_intro:
                for s1, t1 in self.prove(hyps + [l], r, d, sigma):
                    yield s1, ("imp", t1)
            case NatAtom(t):
                if self.allow_hyps:
                    for i, h in enumerate(hyps):
                        h2 = apply_subst_formula(sigma, h)
                        if isinstance(h2, NatAtom):
                            s1 = self.unify1(h2.arg, t, sigma)
                            if s1 is not None:
                                yield s1, ("init", i)
                t = sigma.apply(t)
                s1 = self.unify1(t, Z, sigma)
                if s1 is not None:
                    yield s1, ("natz",)
                if d > 0:
                    v = self.mint_flex(NT, "N")
                    s1 = self.unify1(t, _s_term(v), sigma)
                    if s1 is not None:
                        for s2, t2 in self.prove(hyps, NatAtom(v), d - 1, s1):
                            yield s2, ("nats", t2)
            case Atom(p, args):
                if self.allow_hyps:
                    for i, h in enumerate(hyps):
                        h2 = apply_subst_formula(sigma, h)
                        pairs = _formula_match_pairs(h2, goal)
                        if pairs is not None:
                            s1 = self._unify_pairs(pairs, sigma)
                            if s1 is not None:
                                yield s1, ("init", i)
                if d <= 0:
                    return
                for ordinal, (idx, cl) in enumerate(self.defn.clauses_for(p)):
                    fresh = [self.mint_flex(cl.var_types[k], cl.var_names[k].lower())
                             for k in range(cl.nvars)]
                    head_args, body = cl.instantiate(fresh)
                    s1 = self._unify_pairs(list(zip(head_args, args)), sigma)
                    if s1 is None:
                        continue
                    for s2, t2 in self.prove(hyps, body, d - 1, s1):
                        yield s2, ("defr", (p, ordinal), t2)

    def _unify_pairs(self, pairs, sigma):
        out = sigma
        for a, b in pairs:
            out = self.unify1(a, b, out)
            if out is None:
                return None
        return out

    # -- replay: build the kernel tree with reified witnesses ------------

    def replay(self, s: Sequent, trace, sigma) -> ProofTree:
        """Rebuild the derivation through the kernel's premise computation,
        renaming search-time eigenvariables to the kernel's fresh ones and
        substituting resolved answers into explicit witnesses."""
        ren: dict[int, Term] = {}

        def node(rule, *kids):
            return ProofTree(rule, tuple(kids))

        def reify(t: Term) -> Term:
            w = sigma.apply(t)
            if ren:
                w = normalize(replace_evars(w, ren))
            for e in free_evars(w):
                if e.ts >= 10_000_000:
                    raise TacticError("unresolved answer variable in witness")
            return w

        def go(s: Sequent, tr) -> ProofTree:
            tag = tr[0]
            if tag == "top":
                return node(Rule("top_r"))
            if tag == "and":
                [p1, p2] = premises_of(self.defn, s, Rule("and_r"))
                return node(Rule("and_r"), go(p1, tr[1]), go(p2, tr[2]))
            if tag in ("or1", "or2"):
                rule = Rule("or_r1" if tag == "or1" else "or_r2")
                [p] = premises_of(self.defn, s, rule)
                return node(rule, go(p, tr[1]))
            if tag == "exists":
                rule = Rule("exists_r", witness=reify(tr[1]))
                [p] = premises_of(self.defn, s, rule)
                return node(rule, go(p, tr[2]))
            if tag == "forall":
                rule = Rule("forall_r")
                [p] = premises_of(self.defn, s, rule)
                old = {e.ts for e in s.evars()}
                new = [e for e in p.evars() if e.ts not in old]
                if new:
                    ren[tr[1].ts] = new[0]
                return node(rule, go(p, tr[2]))
            if tag == "imp":
                rule = Rule("imp_r")
                [p] = premises_of(self.defn, s, rule)
                return node(rule, go(p, tr[1]))
            if tag == "natz":
                return node(Rule("nat_r_z"))
            if tag == "nats":
                rule = Rule("nat_r_s")
                [p] = premises_of(self.defn, s, rule)
                return node(rule, go(p, tr[1]))
            if tag == "init":
                return node(Rule("init", hyp=tr[1]))
            if tag == "defr":
                rule = Rule("def_r", clause=tr[1])
                [p] = premises_of(self.defn, s, rule)
                return node(rule, go(p, tr[2]))
            raise TacticError(f"bad trace node {tag}")

        goal = apply_subst_formula(sigma, s.goal)
        for e in free_evars_formula(goal):
            if e.ts >= 10_000_000:
                raise TacticError("unresolved variable in reified goal")
        return go(mk_sequent(s.hyps, goal), trace)


def search_goal(defn: Definition, q: Query):
    """Run goal-directed search: on success returns (answers, tree) where
    the tree uses only right rules, the nat rules and backchaining, and
    answers instantiate the query's top-level existentials.  Universal
    goals and implications arise from clause bodies in the hereditary
    Harrop style; they are handled by goal introduction, which keeps the
    derivation free of case analysis and induction."""
    searcher = _Search(defn, allow_hyps=True, allow_intro=True)
    res = searcher.run(mk_sequent((), q.goal), q.depth)
    if res is None:
        return None
    sigma, tree = res
    check_proof(defn, mk_sequent((), apply_subst_formula(sigma, q.goal)), tree)
    answers = {}
    body = q.goal
    k = 0
    while isinstance(body, Exists):
        # answer variables were minted in order at the top of the search
        answers[body.hint or f"X{k}"] = None
        body = body.body
        k += 1
    return _collect_answers(q.goal, sigma, searcher), tree


def _collect_answers(goal: Formula, sigma: Substitution, searcher: _Search):
    """Top-level existentials get their reified instantiations, in order."""
    out = []
    body = goal
    ts = searcher.base
    while isinstance(body, Exists):
        img = sigma.mapping.get(ts)
        out.append((body.hint or "?", img))
        body = body.body
        ts += 1
    return out


def _search_tactic(c: Cursor, depth: int):
    searcher = _Search(c.st.defn, allow_hyps=True, allow_intro=True)
    res = searcher.run(c.s, depth)
    if res is None:
        raise TacticError(f"search: exhausted at depth {depth}")
    _, tree = res
    c.graft(tree)


# ---------------------------------------------------------------------------
# Scripts


def start_proof(defn: Definition, name: str, theorem: Formula,
                lemmas=None) -> ProofState:
    typecheck_formula(defn.sig, (), theorem)
    if free_evars_formula(theorem):
        raise TacticError("theorem statements must be closed")
    return ProofState(defn, name, mk_sequent((), theorem), lemmas)


def run_script(defn: Definition, theorem: Formula, tactics, name="theorem",
               lemmas=None) -> ProofTree:
    """Run the tactic list and re-check the result with the kernel: the
    engine is untrusted, the kernel has the last word."""
    st = start_proof(defn, name, theorem, lemmas)
    for k, t in enumerate(tactics):
        try:
            st = apply_tactic(st, t)
        except TacticError as e:
            raise TacticError(
                f"{name}: step {k + 1} ({t.name}) failed: {e}\n"
                f"subgoal:\n{_render(st)}") from e
    if not st.done:
        raise TacticError(f"{name}: {len(st.holes)} subgoals remain open\n{_render(st)}")
    tree = st.to_tree()
    check_proof(defn, st.root_sequent, tree)
    return tree


def _render(st: ProofState) -> str:
    from .syntax import print_sequent
    if st.done:
        return "(no subgoals)"
    return print_sequent(st.subgoals()[0], sig=st.defn.sig)


# ---------------------------------------------------------------------------
# Raw tactic elaboration (scripts reference the printed subgoal)


def elaborate_tactic(state: ProofState, raw, macros=None) -> Tactic:
    """Turn a parsed tactic into an applicable one, resolving eigenvariable
    names and hypothesis handles against the focused subgoal."""
    from .syntax import ElabCtx, NameEnv, RTName, elaborate_formula, elaborate_term
    _, s = state.focused()
    sig = state.defn.sig
    names = NameEnv(sig)
    names.assign_sequent(s)
    evars = {n: e for e in s.evars() for n in [names.name_of(e)]}

    def ctx():
        return ElabCtx(sig, evars=dict(evars), macros=dict(macros or {}))

    name = raw.name
    args = list(raw.args)

    def term_arg(a, expected=None):
        kind, val = a
        if kind != "term":
            raise TacticError(f"{name}: expected a term argument")
        return elaborate_term(ctx(), val, expected)

    def hyp_arg(a):
        kind, val = a
        if kind == "term" and isinstance(val, RTName):
            return val.name
        raise TacticError(f"{name}: expected a hypothesis handle")

    match name:
        case "intros":
            count = args[0] if args and isinstance(args[0], int) else None
            return Tactic("intros", count=count)
        case "case" | "destruct" | "bot_l" | "imp_l" | "exists_l" | "and_l1" \
                | "and_l2" | "or_l" | "contract" | "weaken":
            return Tactic(name, hyp=hyp_arg(args[0]))
        case "init" | "assumption" | "apply_init":
            h = hyp_arg(args[0]) if args else None
            return Tactic("init" if name == "apply_init" else name, hyp=h)
        case "split" | "left" | "right" | "top_r" | "nat_r":
            return Tactic(name)
        case "exists":
            return Tactic("exists", term=term_arg(args[0]))
        case "forall_l":
            return Tactic("forall_l", hyp=hyp_arg(args[0]), term=term_arg(args[1]))
        case "unfold":
            if not args:
                return Tactic("unfold")
            a = args[0]
            if isinstance(a, int):
                return Tactic("unfold", clause=a)
            return Tactic("unfold", clause=hyp_arg_name(a))
        case "induction" | "nat_case" | "complete_induction" | "list_induction":
            h = hyp_arg(args[0])
            fa = _fabs_arg(state, args[1], ctx())
            return Tactic(name, hyp=h, fabs=fa)
        case "cut" | "assert" | "cut_lemma":
            kind, val = args[0]
            if kind != "formula":
                raise TacticError("cut: expected a parenthesized formula")
            f = elaborate_formula(ctx(), val)
            split = tuple(hyp_arg(a) for a in args[1:])
            return Tactic("cut", formula=f, split=split)
        case "lemma":
            return Tactic("lemma", lemma=hyp_arg_name(args[0]))
        case "apply":
            h = hyp_arg(args[0])
            terms = []
            for a in args[1:]:
                kind, val = a
                if kind == "term" and isinstance(val, RTName) and val.name == "_":
                    terms.append(None)
                else:
                    terms.append(term_arg(a))
            return Tactic("apply", hyp=h, terms=tuple(terms))
        case "search":
            d = args[0] if args and isinstance(args[0], int) else None
            return Tactic("search", depth=d)
    raise TacticError(f"unknown tactic {name!r}")


def hyp_arg_name(a):
    from .syntax import RTName
    kind, val = a
    if kind == "term" and isinstance(val, RTName):
        return val.name
    raise TacticError("expected a name argument")


def _fabs_arg(state: ProofState, a, ctx) -> FormulaAbs:
    from .syntax import RFQuant, elaborate_formula
    if not (isinstance(a, tuple) and a[0] == "fabs"):
        raise TacticError("expected an invariant (x\\ formula)")
    _, binder, rf = a
    # elaborate as forall binder, formula; then strip the quantifier
    wrapped = elaborate_formula(ctx, RFQuant("forall", [(binder, None)], rf))
    if not isinstance(wrapped, Forall):
        raise TacticError("invalid invariant")
    return FormulaAbs(wrapped.ty, wrapped.body, binder)
