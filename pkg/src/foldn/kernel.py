"""Sequents, the primitive inference rules, and whole-proof checking.

This module is the only trusted code: everything the engine produces is
re-checked here.  Proof trees store rules only; premise sequents are
recomputed deterministically, so a tree is a certificate, not a trace.

Freshness of eigenvariables is local: a rule that introduces one mints
the smallest timestamp above everything in its conclusion sequent.
That makes checking order-independent across branches and lets closed
lemma trees be grafted anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logic import (
    And, Atom, Bot, CsuEntry, Definition, Exists, Forall, Formula, FormulaAbs,
    Imp, NatAtom, Or, Top, alpha_equal_formula, apply_subst_formula, csu,
    free_evars_formula, normalize_formula, typecheck_formula,
)
from .term import (
    NT, App, Const, Evar, FoldnError, Substitution, Term, Z, free_evars,
    normalize, typecheck_term,
)
from . import unify as U


class KernelError(FoldnError):
    def __init__(self, reason: str, path: tuple[int, ...] = ()):
        self.reason = reason
        self.path = path
        loc = "/".join(str(i) for i in path) or "root"
        super().__init__(f"[{loc}] {reason}")


class RuleNotApplicable(KernelError):
    pass


class NonAtomicInit(KernelError):
    pass


class StaleWitness(KernelError):
    pass


class HypNotNat(KernelError):
    pass


class InvariantIllTyped(KernelError):
    pass


class NotDefinedPredicate(KernelError):
    pass


class NoMatch(KernelError):
    pass


class GoalNotAtom(KernelError):
    pass


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequent:
    hyps: tuple[Formula, ...]
    goal: Formula

    def evars(self) -> list[Evar]:
        acc: dict[int, Evar] = {}
        for f in self.hyps + (self.goal,):
            for e in free_evars_formula(f):
                acc[e.ts] = e
        return [acc[ts] for ts in sorted(acc)]

    def max_ts(self) -> int:
        ts = [e.ts for e in self.evars()]
        return max(ts) if ts else 0


def mk_sequent(hyps, goal) -> Sequent:
    return Sequent(tuple(normalize_formula(h) for h in hyps), normalize_formula(goal))


RULE_TAGS = (
    "bot_l top_r and_l1 and_l2 and_r or_l or_r1 or_r2 imp_l imp_r "
    "forall_l forall_r exists_l exists_r init c_l cut "
    "nat_r_z nat_r_s nat_l def_r def_l"
).split()


@dataclass(frozen=True)
class Rule:
    tag: str
    hyp: int | None = None
    witness: Term | None = None
    invariant: FormulaAbs | None = None
    clause: tuple[str, int] | None = None  # (predicate, ordinal among its clauses)
    cut_formula: Formula | None = None
    cut_split: tuple[int, ...] = ()


@dataclass(frozen=True)
class ProofTree:
    rule: Rule
    children: tuple["ProofTree", ...] = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def _hyp(s: Sequent, r: Rule, path) -> Formula:
    if r.hyp is None or not (0 <= r.hyp < len(s.hyps)):
        raise RuleNotApplicable(f"{r.tag}: bad hypothesis index {r.hyp}", path)
    return s.hyps[r.hyp]


def _replace(s: Sequent, i: int, fs: list[Formula], goal=None) -> Sequent:
    hyps = s.hyps[:i] + tuple(fs) + s.hyps[i + 1:]
    return mk_sequent(hyps, s.goal if goal is None else goal)


def _check_witness(defn: Definition, s: Sequent, t: Term, ty, path) -> Term:
    try:
        typecheck_term(defn.sig, (), t, expected=ty)
    except FoldnError as e:
        raise StaleWitness(f"witness ill-typed: {e}", path)
    scope = {e.ts for e in s.evars()}
    for e in free_evars(t):
        if e.ts not in scope:
            raise StaleWitness(f"witness mentions out-of-scope eigenvariable {e.name}@{e.ts}", path)
    return normalize(t)


def _is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, NatAtom))


def premises_of(defn: Definition, s: Sequent, r: Rule,
                path: tuple[int, ...] = ()) -> list[Sequent]:
    """Premise sequents of rule r applied to s, read bottom-up."""
    match r.tag:
        case "bot_l":
            if not isinstance(_hyp(s, r, path), Bot):
                raise RuleNotApplicable("bot_l: hypothesis is not bottom", path)
            return []
        case "top_r":
            if not isinstance(s.goal, Top):
                raise RuleNotApplicable("top_r: goal is not top", path)
            return []
        case "init":
            h = _hyp(s, r, path)
            if not _is_atomic(h):
                raise NonAtomicInit("init: hypothesis is not atomic", path)
            if not alpha_equal_formula(h, s.goal):
                raise RuleNotApplicable("init: hypothesis does not match goal", path)
            return []
        case "and_l1":
            h = _hyp(s, r, path)
            if not isinstance(h, And):
                raise RuleNotApplicable("and_l1: hypothesis is not a conjunction", path)
            return [_replace(s, r.hyp, [h.left])]
        case "and_l2":
            h = _hyp(s, r, path)
            if not isinstance(h, And):
                raise RuleNotApplicable("and_l2: hypothesis is not a conjunction", path)
            return [_replace(s, r.hyp, [h.right])]
        case "and_r":
            if not isinstance(s.goal, And):
                raise RuleNotApplicable("and_r: goal is not a conjunction", path)
            return [mk_sequent(s.hyps, s.goal.left), mk_sequent(s.hyps, s.goal.right)]
        case "or_l":
            h = _hyp(s, r, path)
            if not isinstance(h, Or):
                raise RuleNotApplicable("or_l: hypothesis is not a disjunction", path)
            return [_replace(s, r.hyp, [h.left]), _replace(s, r.hyp, [h.right])]
        case "or_r1":
            if not isinstance(s.goal, Or):
                raise RuleNotApplicable("or_r1: goal is not a disjunction", path)
            return [mk_sequent(s.hyps, s.goal.left)]
        case "or_r2":
            if not isinstance(s.goal, Or):
                raise RuleNotApplicable("or_r2: goal is not a disjunction", path)
            return [mk_sequent(s.hyps, s.goal.right)]
        case "imp_l":
            h = _hyp(s, r, path)
            if not isinstance(h, Imp):
                raise RuleNotApplicable("imp_l: hypothesis is not an implication", path)
            rest = s.hyps[:r.hyp] + s.hyps[r.hyp + 1:]
            return [mk_sequent(rest, h.left), _replace(s, r.hyp, [h.right])]
        case "imp_r":
            if not isinstance(s.goal, Imp):
                raise RuleNotApplicable("imp_r: goal is not an implication", path)
            return [mk_sequent(s.hyps + (s.goal.left,), s.goal.right)]
        case "forall_l":
            h = _hyp(s, r, path)
            if not isinstance(h, Forall):
                raise RuleNotApplicable("forall_l: hypothesis is not universal", path)
            w = _check_witness(defn, s, r.witness, h.ty, path)
            return [_replace(s, r.hyp, [_inst(h, w)])]
        case "forall_r":
            if not isinstance(s.goal, Forall):
                raise RuleNotApplicable("forall_r: goal is not universal", path)
            y = Evar(s.goal.hint, s.max_ts() + 1, s.goal.ty)
            return [mk_sequent(s.hyps, _inst(s.goal, y))]
        case "exists_l":
            h = _hyp(s, r, path)
            if not isinstance(h, Exists):
                raise RuleNotApplicable("exists_l: hypothesis is not existential", path)
            y = Evar(h.hint, s.max_ts() + 1, h.ty)
            return [_replace(s, r.hyp, [_inst(h, y)])]
        case "exists_r":
            if not isinstance(s.goal, Exists):
                raise RuleNotApplicable("exists_r: goal is not existential", path)
            w = _check_witness(defn, s, r.witness, s.goal.ty, path)
            return [mk_sequent(s.hyps, _inst(s.goal, w))]
        case "c_l":
            h = _hyp(s, r, path)
            return [mk_sequent(s.hyps + (h,), s.goal)]
        case "cut":
            if r.cut_formula is None:
                raise RuleNotApplicable("cut: no cut formula", path)
            f = normalize_formula(r.cut_formula)
            try:
                typecheck_formula(defn.sig, (), f)
            except FoldnError as e:
                raise RuleNotApplicable(f"cut: ill-typed cut formula: {e}", path)
            scope = {e.ts for e in s.evars()}
            for e in free_evars_formula(f):
                if e.ts not in scope:
                    raise StaleWitness(
                        f"cut formula mentions out-of-scope eigenvariable {e.name}@{e.ts}", path)
            split = tuple(r.cut_split)
            if len(set(split)) != len(split) or any(not 0 <= i < len(s.hyps) for i in split):
                raise RuleNotApplicable("cut: bad hypothesis split", path)
            delta = tuple(s.hyps[i] for i in split)
            gamma = tuple(h for i, h in enumerate(s.hyps) if i not in split)
            return [mk_sequent(delta, f), mk_sequent(gamma + (f,), s.goal)]
        case "nat_r_z":
            if not (isinstance(s.goal, NatAtom) and normalize(s.goal.arg) == Z):
                raise RuleNotApplicable("nat_r_z: goal is not nat z", path)
            return []
        case "nat_r_s":
            g = s.goal
            if not (isinstance(g, NatAtom) and isinstance(g.arg, App)
                    and isinstance(g.arg.head, Const) and g.arg.head.name == "s"):
                raise RuleNotApplicable("nat_r_s: goal is not nat (s I)", path)
            return [mk_sequent(s.hyps, NatAtom(g.arg.args[0]))]
        case "nat_l":
            h = _hyp(s, r, path)
            if not isinstance(h, NatAtom):
                raise HypNotNat("nat_l: hypothesis is not a nat atom", path)
            b = r.invariant
            if b is None or b.ty != NT:
                raise InvariantIllTyped("nat_l: invariant must abstract a nat", path)
            try:
                typecheck_formula(defn.sig, (NT,), b.body)
            except FoldnError as e:
                raise InvariantIllTyped(f"nat_l: {e}", path)
            scope = {e.ts for e in s.evars()}
            for e in free_evars_formula(b.body):
                if e.ts not in scope:
                    raise StaleWitness(
                        f"invariant mentions out-of-scope eigenvariable {e.name}@{e.ts}", path)
            hint = h.arg.name if isinstance(h.arg, Evar) else "j"
            j = Evar(hint, s.max_ts() + 1, NT)
            i_term = h.arg
            return [
                mk_sequent((), b.apply(Z)),
                mk_sequent((b.apply(j),), b.apply(App(Const("s", _s_ty()), (j,)))),
                _replace(s, r.hyp, [b.apply(i_term)]),
            ]
        case "def_r":
            g = s.goal
            if not isinstance(g, Atom):
                raise GoalNotAtom("def_r: goal is not an atom", path)
            if g.pred not in defn.by_pred:
                raise NoMatch(f"def_r: no clauses define {g.pred}", path)
            if (r.clause is None or r.clause[0] != g.pred
                    or not 0 <= r.clause[1] < len(defn.by_pred[g.pred])):
                raise NoMatch(f"def_r: clause {r.clause} does not define {g.pred}", path)
            c = defn.clauses[defn.by_pred[g.pred][r.clause[1]]]
            base = s.max_ts() + 1
            fresh = [Evar(c.var_names[i].lower(), base + i, c.var_types[i]) for i in range(c.nvars)]
            head_args, body = c.instantiate(list(fresh))
            out = U.match_head(list(head_args), list(g.args), {v.ts: None for v in fresh},
                               fresh_start=base + c.nvars)
            if isinstance(out, U.NotPattern):
                raise U.NotInPatternFragment(out.subterm)
            if isinstance(out, U.Failure):
                raise NoMatch(f"def_r: clause {c.label} does not match the goal", path)
            return [mk_sequent(s.hyps, apply_subst_formula(out.theta, body))]
        case "def_l":
            h = _hyp(s, r, path)
            if not isinstance(h, Atom):
                raise NotDefinedPredicate("def_l: hypothesis is not an atom", path)
            if h.pred not in defn.sig.preds:
                raise NotDefinedPredicate(f"def_l: unknown predicate {h.pred}", path)
            base = s.max_ts() + 1
            entries = csu(h, defn, base)
            out = []
            for e in entries:
                c = defn.clauses[e.clause_idx]
                fresh = [Evar(c.var_names[i].lower(), base + i, c.var_types[i]) for i in range(c.nvars)]
                _, body = c.instantiate(list(fresh))
                body_t = apply_subst_formula(e.theta, body)
                hyps = tuple(
                    apply_subst_formula(e.theta, f) if i != r.hyp else body_t
                    for i, f in enumerate(s.hyps))
                out.append(mk_sequent(hyps, apply_subst_formula(e.theta, s.goal)))
            return out
    raise RuleNotApplicable(f"unknown rule tag {r.tag}", path)


def _inst(q, t: Term) -> Formula:
    from .logic import subst_bound_formula
    return subst_bound_formula(q.body, 0, t)


def _s_ty():
    from .term import Arrow
    return Arrow(NT, NT)


def check_proof(defn: Definition, s: Sequent, p: ProofTree,
                path: tuple[int, ...] = ()) -> None:
    """Accepts iff every node's children match the recomputed premises.
    Raises a KernelError carrying the tree path of the offending node."""
    try:
        prems = premises_of(defn, s, p.rule, path)
    except KernelError:
        raise
    except U.NotInPatternFragment as e:
        raise KernelError(f"not in the pattern fragment: {e.subterm!r}", path)
    if len(prems) != len(p.children):
        raise KernelError(
            f"{p.rule.tag}: expected {len(prems)} premises, tree has {len(p.children)}", path)
    for i, (prem, child) in enumerate(zip(prems, p.children)):
        check_proof(defn, prem, child, path + (i,))
