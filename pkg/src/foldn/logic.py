"""Formulas, per-predicate levels, and definitional clauses.

Formula-level binders share the de Bruijn index space with term-level
binders: a quantifier contributes one binder to the environment of the
terms below it.  Definitional clauses store their universally
quantified variables the same way, so instantiation is ordinary index
substitution and clause variable renaming is minting fresh
eigenvariables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .term import (
    NT, O, Arrow, App, Base, Bound, Const, Evar, FoldnError, Lam, SimpleType,
    Signature, Substitution, Term, contains_o, mk_app, normalize, quantifiable,
    replace_evars, shift, spine_type, subst_bound, typecheck_term, TypeMismatch,
)
from . import unify as U


class QuantifierOverO(FoldnError):
    pass


class UnknownPredicate(FoldnError):
    pass


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    ty: SimpleType
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Exists:
    ty: SimpleType
    body: "Formula"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class NatAtom:
    arg: Term


Formula = Bot | Top | And | Or | Imp | Forall | Exists | Atom | NatAtom


@dataclass(frozen=True)
class FormulaAbs:
    """A one-argument predicate expression: the body lives under one binder."""
    ty: SimpleType
    body: Formula
    hint: str = field(default="x", compare=False)

    def apply(self, t: Term) -> Formula:
        return subst_bound_formula(self.body, 0, t)


def map_terms(f: Formula, fn, depth: int = 0) -> Formula:
    match f:
        case Atom(p, args):
            return Atom(p, tuple(fn(a, depth) for a in args))
        case NatAtom(t):
            return NatAtom(fn(t, depth))
        case And(l, r):
            return And(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Or(l, r):
            return Or(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Imp(l, r):
            return Imp(map_terms(l, fn, depth), map_terms(r, fn, depth))
        case Forall(ty, b, h):
            return Forall(ty, map_terms(b, fn, depth + 1), h)
        case Exists(ty, b, h):
            return Exists(ty, map_terms(b, fn, depth + 1), h)
        case _:
            return f


def shift_formula(f: Formula, d: int, cutoff: int = 0) -> Formula:
    return map_terms(f, lambda t, depth: shift(t, d, cutoff + depth))


def subst_bound_formula(f: Formula, k: int, repl: Term) -> Formula:
    return map_terms(f, lambda t, depth: subst_bound(t, k + depth, repl))


def replace_evars_formula(f: Formula, mapping: dict[int, Term]) -> Formula:
    return map_terms(f, lambda t, depth: replace_evars(t, mapping))


def normalize_formula(f: Formula, env: tuple[SimpleType, ...] = ()) -> Formula:
    match f:
        case Forall(ty, b, h):
            return Forall(ty, normalize_formula(b, (ty,) + env), h)
        case Exists(ty, b, h):
            return Exists(ty, normalize_formula(b, (ty,) + env), h)
        case And(l, r):
            return And(normalize_formula(l, env), normalize_formula(r, env))
        case Or(l, r):
            return Or(normalize_formula(l, env), normalize_formula(r, env))
        case Imp(l, r):
            return Imp(normalize_formula(l, env), normalize_formula(r, env))
        case Atom(p, args):
            return Atom(p, tuple(normalize(a, env) for a in args))
        case NatAtom(t):
            return NatAtom(normalize(t, env))
        case _:
            return f


def apply_subst_formula(theta: Substitution, f: Formula,
                        env: tuple[SimpleType, ...] = ()) -> Formula:
    if not theta:
        return normalize_formula(f, env)
    return normalize_formula(replace_evars_formula(f, theta.mapping), env)


def free_evars_formula(f: Formula) -> set[Evar]:
    acc: set[Evar] = set()

    def go(t, depth):
        from .term import free_evars
        acc.update(free_evars(t))
        return t

    map_terms(f, go)
    return acc


def alpha_equal_formula(f1: Formula, f2: Formula, env: tuple[SimpleType, ...] = ()) -> bool:
    return normalize_formula(f1, env) == normalize_formula(f2, env)


# ---------------------------------------------------------------------------
# Levels


def formula_level(sig: Signature, f: Formula) -> int:
    """Level of a formula: atoms take the predicate level, bottom/top
    are 0, conjunction and disjunction take the max, an implication
    raises its antecedent by one, quantifiers are transparent."""
    match f:
        case Bot() | Top():
            return 0
        case NatAtom(_):
            return 0  # nat is built in; see module notes
        case Atom(p, _):
            if p not in sig.levels:
                if p not in sig.preds:
                    raise UnknownPredicate(p)
                raise UnknownPredicate(f"predicate {p} has no level assigned")
            return sig.levels[p]
        case And(l, r) | Or(l, r):
            return max(formula_level(sig, l), formula_level(sig, r))
        case Imp(l, r):
            return max(formula_level(sig, l) + 1, formula_level(sig, r))
        case Forall(_, b, _) | Exists(_, b, _):
            return formula_level(sig, b)
    raise UnknownPredicate(f"not a formula: {f!r}")


def typecheck_formula(sig: Signature, env: tuple[SimpleType, ...], f: Formula) -> None:
    match f:
        case Bot() | Top():
            return
        case And(l, r) | Or(l, r) | Imp(l, r):
            typecheck_formula(sig, env, l)
            typecheck_formula(sig, env, r)
        case Forall(ty, b, _) | Exists(ty, b, _):
            if not quantifiable(ty):
                raise QuantifierOverO(f"quantifier at type {ty!r} mentioning o")
            if not sig.sorts_ok(ty):
                raise UnknownPredicate(f"quantifier type mentions undeclared sorts: {ty!r}")
            typecheck_formula(sig, (ty,) + env, b)
        case NatAtom(t):
            typecheck_term(sig, env, t, expected=NT)
        case Atom(p, args):
            if p not in sig.preds:
                raise UnknownPredicate(p)
            doms = sig.pred_arg_types(p)
            if len(doms) != len(args):
                raise TypeMismatch(f"{p} expects {len(doms)} arguments, got {len(args)}")
            for a, d in zip(args, doms):
                typecheck_term(sig, env, a, expected=d)
        case _:
            raise TypeMismatch(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Definitional clauses


@dataclass(frozen=True)
class DefinitionalClause:
    """forall xs [p ts := body]; variables are de Bruijn bound, the first
    variable outermost."""
    label: str
    var_names: tuple[str, ...]
    var_types: tuple[SimpleType, ...]
    pred: str
    head_args: tuple[Term, ...]
    body: Formula

    @property
    def nvars(self):
        return len(self.var_types)

    def instantiate(self, terms: list[Term]) -> tuple[tuple[Term, ...], Formula]:
        """Replace the clause variables with the given terms."""
        assert len(terms) == self.nvars
        args = list(self.head_args)
        body = self.body
        # variable i is Bound(nvars-1-i) at depth 0; substitute innermost first
        for t in reversed(terms):
            args = [subst_bound(a, 0, t) for a in args]
            body = subst_bound_formula(body, 0, t)
        return tuple(args), body


@dataclass
class Violation:
    kind: str  # LevelViolation | FreeVariableViolation | HeadViolation | TypeViolation | NonPatternHead
    message: str
    warning: bool = False


def _bound_indices(t: Term, depth: int = 0) -> set[int]:
    match t:
        case Bound(k):
            return {k - depth} if k >= depth else set()
        case App(h, args):
            s = _bound_indices(h, depth)
            for a in args:
                s |= _bound_indices(a, depth)
            return s
        case Lam(_, b):
            return _bound_indices(b, depth + 1)
        case _:
            return set()


def _bound_indices_formula(f: Formula) -> set[int]:
    acc: set[int] = set()

    def go(t, depth):
        acc.update(_bound_indices(t, depth))
        return t

    map_terms(f, go)
    return acc


def _head_is_pattern(c: DefinitionalClause) -> bool:
    """Every clause-variable occurrence in the head applies the variable to
    distinct bound (lambda-bound) variables."""
    def check(t: Term, depth: int) -> bool:
        match t:
            case App(h, args):
                if isinstance(h, Bound) and h.index >= depth:
                    seen = []
                    for a in args:
                        if not isinstance(a, Bound) or a.index >= depth or a.index in seen:
                            return False
                        seen.append(a.index)
                    return True
                return check(h, depth) and all(check(a, depth) for a in args)
            case Lam(_, b):
                return check(b, depth + 1)
            case _:
                return True
    return all(check(normalize_clause_arg(a, c), 0) for a in c.head_args)


def normalize_clause_arg(a: Term, c: DefinitionalClause) -> Term:
    env = tuple(reversed(c.var_types))
    return normalize(a, env)


def check_clause(sig: Signature, c: DefinitionalClause) -> list[Violation]:
    """Well-formedness of a clause, reported as structured violations:
    the head must be a declared predicate application, every free
    variable of the body must occur in the head, and level(body) <=
    level(head).  A head outside the pattern fragment is a warning, not
    an error."""
    out: list[Violation] = []
    if c.pred == "nat":
        out.append(Violation("HeadViolation", "nat is built in and may not be defined"))
        return out
    if c.pred not in sig.preds:
        out.append(Violation("HeadViolation", f"unknown predicate {c.pred}"))
        return out
    env = tuple(reversed(c.var_types))
    try:
        typecheck_formula(sig, env, Atom(c.pred, c.head_args))
        typecheck_formula(sig, env, c.body)
    except FoldnError as e:
        out.append(Violation("TypeViolation", f"{c.label}: {e}"))
        return out
    head_vars = set()
    for a in c.head_args:
        head_vars |= _bound_indices(a)
    body_vars = _bound_indices_formula(c.body)
    if not body_vars <= head_vars:
        missing = sorted(body_vars - head_vars)
        names = ", ".join(c.var_names[c.nvars - 1 - k] for k in missing)
        out.append(Violation(
            "FreeVariableViolation",
            f"{c.label}: body variables not free in the head: {names}"))
    if c.pred in sig.levels:
        lvl = sig.levels[c.pred]
        try:
            blvl = formula_level(sig, c.body)
        except UnknownPredicate as e:
            out.append(Violation("LevelViolation", f"{c.label}: {e}"))
        else:
            if blvl > lvl:
                out.append(Violation(
                    "LevelViolation",
                    f"{c.label}: body has level {blvl}, head predicate {c.pred} has level {lvl}"))
    if not _head_is_pattern(c):
        out.append(Violation(
            "NonPatternHead",
            f"{c.label}: head arguments fall outside the pattern fragment; "
            "case analysis on this predicate will be rejected",
            warning=True))
    return out


@dataclass
class Definition:
    """An ordered set of definitional clauses over a signature."""
    sig: Signature
    clauses: list[DefinitionalClause] = field(default_factory=list)

    def __post_init__(self):
        self.by_pred: dict[str, list[int]] = {}
        for i, c in enumerate(self.clauses):
            self.by_pred.setdefault(c.pred, []).append(i)

    def add(self, c: DefinitionalClause):
        self.clauses.append(c)
        self.by_pred.setdefault(c.pred, []).append(len(self.clauses) - 1)

    def clauses_for(self, pred: str) -> list[tuple[int, DefinitionalClause]]:
        return [(i, self.clauses[i]) for i in self.by_pred.get(pred, [])]

    def is_defined(self, pred: str) -> bool:
        return pred in self.by_pred

    def check(self) -> list[Violation]:
        out = []
        for c in self.clauses:
            out.extend(check_clause(self.sig, c))
        return out


def infer_levels(sig: Signature, clauses: list[DefinitionalClause],
                 inferred: set[str], max_level: int = 64) -> dict[str, int]:
    """Least level assignment for the predicates in `inferred` satisfying
    every clause; fails when none exists (non-monotone clause sets)."""
    trial = sig.copy()
    for p in inferred:
        trial.levels[p] = 0
    for _ in range((len(inferred) + 1) * (max_level + 1)):
        changed = False
        for c in clauses:
            if c.pred not in trial.levels:
                continue
            blvl = formula_level(trial, c.body)
            if blvl > trial.levels[c.pred]:
                if c.pred not in inferred:
                    raise FoldnError(
                        f"clause {c.label}: needs level {blvl} on {c.pred}, fixed at {trial.levels[c.pred]}")
                trial.levels[c.pred] = blvl
                if blvl > max_level:
                    raise FoldnError(
                        f"no level assignment exists (clause {c.label} keeps raising {c.pred})")
                changed = True
        if not changed:
            return {p: trial.levels[p] for p in inferred}
    raise FoldnError("no level assignment exists")


def abstract_evar(f: Formula, ts: int) -> Formula:
    """Replace an eigenvariable by a reference to a binder wrapped around
    the formula (depth-aware, through both quantifiers and term binders)."""
    def conv(t: Term, depth: int) -> Term:
        match t:
            case Evar(_, vts, _) if vts == ts:
                return Bound(depth)
            case App(h, args):
                return mk_app(conv(h, depth), [conv(a, depth) for a in args])
            case Lam(ty, b, hint):
                return Lam(ty, conv(b, depth + 1), hint)
            case _:
                return t

    return map_terms(shift_formula(f, 1), conv)


def abstract_clause(label: str, variables: list[tuple[str, SimpleType]], pred: str,
                    head_args: list[Term], body: Formula,
                    placeholders: list[Evar]) -> DefinitionalClause:
    """Build a clause from terms written with placeholder eigenvariables:
    placeholder i becomes the i-th (outermost) clause variable."""
    n = len(variables)
    index = {ph.ts: n - 1 - i for i, ph in enumerate(placeholders)}

    def conv(t: Term, depth: int) -> Term:
        match t:
            case Evar(_, ts, _) if ts in index:
                return Bound(depth + index[ts])
            case App(h, args):
                return mk_app(conv(h, depth), [conv(a, depth) for a in args])
            case Lam(ty, b, hint):
                return Lam(ty, conv(b, depth + 1), hint)
            case _:
                return t

    return DefinitionalClause(
        label=label,
        var_names=tuple(v for v, _ in variables),
        var_types=tuple(ty for _, ty in variables),
        pred=pred,
        head_args=tuple(conv(normalize(a, ()), 0) for a in head_args),
        body=map_terms(normalize_formula(body), conv),
    )


# ---------------------------------------------------------------------------
# Complete sets of unifiers for the definition rules


class CsuEntry:
    def __init__(self, clause_idx: int, theta: Substitution, new_vars: list[Evar]):
        self.clause_idx = clause_idx
        self.theta = theta
        self.new_vars = new_vars


def csu(goal: Atom, defn: Definition, fresh_start: int) -> list[CsuEntry]:
    """One entry per clause per unifier of the goal atom with the clause
    head; inside the pattern fragment each clause contributes at most one.
    Clause variables are renamed fresh starting at fresh_start.  The
    returned substitutions may instantiate the goal's eigenvariables.
    A problem outside the pattern fragment is a hard error.
    """
    entries: list[CsuEntry] = []
    from .term import free_evars
    goal_evars = set()
    for a in goal.args:
        goal_evars |= {e.ts for e in free_evars(a)}
    for idx, c in defn.clauses_for(goal.pred):
        base = fresh_start
        fresh = [Evar(c.var_names[i].lower(), base + i, c.var_types[i]) for i in range(c.nvars)]
        head_args, _ = c.instantiate(list(fresh))
        flex: dict[int, int | None] = {v.ts: None for v in fresh}
        for ts in goal_evars:
            flex[ts] = None
        out = U.unify_pattern(U.UnifProblem(
            list(zip(list(head_args), list(goal.args))), flex,
            fresh_start=base + c.nvars))
        if isinstance(out, U.NotPattern):
            raise U.NotInPatternFragment(out.subterm)
        if isinstance(out, U.Failure):
            continue
        keep = goal_evars | {v.ts for v in fresh} | set(out.fresh)
        theta = out.theta.restrict(keep)
        # variables of the premise that are new relative to the conclusion
        mentioned: set[int] = set()
        new_vars = []
        for ts, img in theta.mapping.items():
            mentioned |= {e.ts for e in free_evars(img)}
        for v in fresh:
            if v.ts not in theta.mapping:
                new_vars.append(v)
        for ts, ceiling in out.fresh.items():
            if ts in mentioned and ts not in theta.mapping:
                new_vars.append(Evar("w", ts, _fresh_type_lookup(theta, ts)))
        entries.append(CsuEntry(idx, theta, new_vars))
    return entries


def _fresh_type_lookup(theta: Substitution, ts: int):
    from .term import free_evars
    for img in theta.mapping.values():
        for e in free_evars(img):
            if e.ts == ts:
                return e.ty
    raise FoldnError("untyped fresh variable")
