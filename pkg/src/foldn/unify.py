"""Higher-order pattern unification and matching.

Unification problems here stay inside the pattern fragment: an
instantiable variable may only be applied to distinct bound variables.
In that fragment most general unifiers exist and are unique up to
renaming, so the left rule for defined atoms gets a finite premise set.
Anything outside the fragment is reported, never approximated.

Instantiable ("flex") variables carry an optional ceiling: the largest
eigenvariable timestamp their image may mention.  Scoping failures such
as solving X with a term mentioning a newer eigenvariable are detected
here.  Helper variables minted during solving inherit the tightest
ceiling of the variables they stand for.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .term import (
    Arrow, App, Bound, Const, Evar, FoldnError, Lam, Substitution, Term,
    alpha_equal, free_evars, mk_app, normalize, replace_evars, spine_type, type_of,
)


class NotInPatternFragment(FoldnError):
    def __init__(self, subterm, reason="instantiable variable applied to non-bound or repeated arguments"):
        self.subterm = subterm
        super().__init__(f"{reason}: {subterm!r}")


@dataclass
class UnifProblem:
    pairs: list[tuple[Term, Term]]
    flex: dict[int, int | None]  # instantiable evar ts -> ceiling (None = unconstrained)
    fresh_start: int = 1_000_000


@dataclass
class Success:
    theta: Substitution
    fresh: dict[int, int | None] = field(default_factory=dict)  # helper vars minted


@dataclass
class Failure:
    reason: str


@dataclass
class NotPattern:
    subterm: Term


UnifOutcome = Success | Failure | NotPattern


class _Fail(Exception):
    def __init__(self, reason):
        self.reason = reason


class _NonPattern(Exception):
    def __init__(self, subterm):
        self.subterm = subterm


def _views(t: Term):
    if isinstance(t, App):
        return t.head, t.args
    return t, ()


def _all_pattern(args) -> bool:
    idxs = []
    for a in args:
        if not isinstance(a, Bound) or a.index in idxs:
            return False
        idxs.append(a.index)
    return True


class _Unifier:
    def __init__(self, flex: dict[int, int | None], fresh_start: int):
        self.sigma: dict[int, Term] = {}
        self.flex = dict(flex)
        self.fresh_ts = fresh_start
        self.fresh: dict[int, int | None] = {}

    # -- plumbed helpers -------------------------------------------------

    def is_flex(self, t: Term) -> bool:
        return isinstance(t, Evar) and t.ts in self.flex

    def ceiling(self, ts: int) -> int | None:
        return self.flex.get(ts)

    def mint(self, ty, ceiling, hint="H") -> Evar:
        v = Evar(hint, self.fresh_ts, ty)
        self.fresh_ts += 1
        self.flex[v.ts] = ceiling
        self.fresh[v.ts] = ceiling
        return v

    def resolve(self, t: Term, env=()) -> Term:
        if self.sigma:
            t = replace_evars(t, self.sigma)
        return normalize(t, env)

    def bind(self, v: Evar, image: Term):
        image = normalize(image)
        for ts, img in list(self.sigma.items()):
            self.sigma[ts] = normalize(replace_evars(img, {v.ts: image}))
        self.sigma[v.ts] = image

    # -- the solver ------------------------------------------------------

    def solve(self, pairs):
        work = [(a, b, ()) for (a, b) in pairs]
        while work:
            t1, t2, env = work.pop(0)
            t1, t2 = self.resolve(t1, env), self.resolve(t2, env)
            if t1 == t2:
                continue
            if isinstance(t1, Lam) and isinstance(t2, Lam):
                work.insert(0, (t1.body, t2.body, (t1.ty,) + env))
                continue
            if isinstance(t1, Lam) or isinstance(t2, Lam):
                raise _Fail("abstraction against non-abstraction at equal type")
            h1, a1 = _views(t1)
            h2, a2 = _views(t2)
            if self.is_flex(h1) and self.is_flex(h2):
                p1, p2 = _all_pattern(a1), _all_pattern(a2)
                if h1.ts == h2.ts and not (p1 and p2):
                    # same instantiable head applied to non-pattern arguments:
                    # decompose argumentwise, reading the head as generic
                    # (arbitrary-but-fixed), as the worked derivations do
                    if len(a1) != len(a2):
                        raise _Fail("arity mismatch")
                    work = [(x, y, env) for x, y in zip(a1, a2)] + work
                    continue
                if p1 and p2:
                    self.flex_flex(h1, a1, h2, a2)
                elif p1:
                    self.flex_rigid(h1, a1, t2)
                elif p2:
                    self.flex_rigid(h2, a2, t1)
                else:
                    raise _NonPattern(t1)
            elif self.is_flex(h1):
                self.flex_rigid(h1, a1, t2)
            elif self.is_flex(h2):
                self.flex_rigid(h2, a2, t1)
            else:
                if not self.rigid_heads_equal(h1, h2):
                    raise _Fail(f"rigid-rigid clash: {h1!r} vs {h2!r}")
                if len(a1) != len(a2):
                    raise _Fail("arity mismatch")
                work = [(x, y, env) for x, y in zip(a1, a2)] + work

    @staticmethod
    def rigid_heads_equal(h1, h2):
        match h1, h2:
            case Bound(i), Bound(j):
                return i == j
            case Const(n1, _), Const(n2, _):
                return n1 == n2
            case Evar(_, ts1, _), Evar(_, ts2, _):
                return ts1 == ts2
        return False

    @staticmethod
    def pattern_args(v: Evar, args) -> list[int]:
        idxs = []
        for a in args:
            if not isinstance(a, Bound) or a.index in idxs:
                raise _NonPattern(mk_app(v, args))
            idxs.append(a.index)
        return idxs

    def flex_flex(self, f: Evar, fargs, g: Evar, gargs):
        fi = self.pattern_args(f, fargs)
        gi = self.pattern_args(g, gargs)
        fdoms, fbase = spine_type(f.ty)
        if f.ts == g.ts:
            if fi == gi:
                return
            keep = [p for p in range(len(fi)) if fi[p] == gi[p]]
            h = self.mint(
                _arrow([fdoms[p] for p in keep], fbase), self.ceiling(f.ts))
            n = len(fi)
            body = mk_app(h, [Bound(n - 1 - p) for p in keep])
            self.bind(f, _lams(fdoms, body))
            return
        gdoms, _ = spine_type(g.ty)
        cf, cg = self.ceiling(f.ts), self.ceiling(g.ts)
        ceiling = cf if cg is None else cg if cf is None else min(cf, cg)
        # same argument lists: eliminate the newer variable so the older
        # one survives, tightening its ceiling to what both sides allowed
        if fi == gi:
            newer, older = (f, g) if f.ts > g.ts else (g, f)
            self.flex[older.ts] = ceiling
            n = len(fi)
            self.bind(newer, _lams(fdoms, mk_app(older, [Bound(n - 1 - p) for p in range(n)])))
            return
        common = [v for v in fi if v in gi]
        h = self.mint(
            _arrow([fdoms[fi.index(v)] for v in common], fbase), ceiling)
        nf, ng = len(fi), len(gi)
        fbody = mk_app(h, [Bound(nf - 1 - fi.index(v)) for v in common])
        gbody = mk_app(h, [Bound(ng - 1 - gi.index(v)) for v in common])
        self.bind(f, _lams(fdoms, fbody))
        self.bind(g, _lams(gdoms, gbody))

    def flex_rigid(self, f: Evar, fargs, rhs: Term):
        idxs = self.pattern_args(f, fargs)
        fdoms, _ = spine_type(f.ty)
        n = len(idxs)
        body = self.invert(f, idxs, rhs, 0)
        self.bind(f, _lams(fdoms, body))

    def invert(self, f: Evar, idxs: list[int], t: Term, local: int) -> Term:
        """Rewrite t into f's frame: outside bound variables must be among
        f's arguments; flexible subterms are pruned; scope and occurs
        violations fail."""
        n = len(idxs)
        match t:
            case Lam(ty, b, hint):
                return Lam(ty, self.invert(f, idxs, b, local + 1), hint)
            case Bound(k):
                if k < local:
                    return t
                outer = k - local
                if outer in idxs:
                    return Bound(local + (n - 1 - idxs.index(outer)))
                raise _Fail("bound variable outside the instantiable variable's arguments")
            case Const():
                return t
            case Evar(_, ts, _):
                return self.invert_evar_app(f, idxs, t, (), local)
            case App(h, args):
                if isinstance(h, Evar) and self.is_flex(h):
                    return self.invert_evar_app(f, idxs, h, args, local)
                return mk_app(self.invert(f, idxs, h, local),
                              [self.invert(f, idxs, a, local) for a in args])
        raise _Fail(f"cannot invert {t!r}")

    def invert_evar_app(self, f: Evar, idxs, g: Evar, gargs, local) -> Term:
        if g.ts == f.ts:
            raise _Fail("occurs-check")
        cf = self.ceiling(f.ts)
        if not self.is_flex(g):
            if cf is not None and g.ts > cf:
                raise _Fail(f"scope violation: {g.name}@{g.ts} above ceiling {cf}")
            return mk_app(g, [self.invert(f, idxs, a, local) for a in gargs])
        cg = self.ceiling(g.ts)
        ceiling = cf if cg is None else cg if cf is None else min(cf, cg)
        # if the occurrence inverts wholesale, keep it and just tighten the
        # ceiling; pruning is only needed when an argument cannot be mapped
        try:
            inverted = [self.invert(f, idxs, a, local) for a in gargs]
        except _Fail:
            pass
        else:
            self.flex[g.ts] = ceiling
            return mk_app(g, inverted)
        # prune the arguments f cannot depend on (pattern occurrences only)
        gi = self.pattern_args(g, gargs)
        keep, mapped = [], []
        for pos, k in enumerate(gi):
            if k < local:
                keep.append(pos)
                mapped.append(Bound(k))
            elif (k - local) in idxs:
                keep.append(pos)
                mapped.append(Bound(local + (len(idxs) - 1 - idxs.index(k - local))))
        if len(keep) == len(gi):
            self.flex[g.ts] = ceiling
            return mk_app(g, mapped)
        gdoms, gbase = spine_type(g.ty)
        g2 = self.mint(_arrow([gdoms[p] for p in keep], gbase), ceiling, hint=g.name)
        m = len(gi)
        self.bind(g, _lams(gdoms, mk_app(g2, [Bound(m - 1 - p) for p in keep])))
        return mk_app(g2, mapped)


def _arrow(doms, cod):
    ty = cod
    for d in reversed(doms):
        ty = Arrow(d, ty)
    return ty


def _lams(doms, body):
    t = body
    for d in reversed(doms):
        t = Lam(d, t)
    return t


def unify_pattern(problem: UnifProblem) -> UnifOutcome:
    """Solve a pattern unification problem.

    On Success the substitution unifies every pair (checked property) and
    is most general: any unifier factors through it.
    """
    u = _Unifier(problem.flex, problem.fresh_start)
    try:
        u.solve([(normalize(a), normalize(b)) for a, b in problem.pairs])
    except _Fail as e:
        return Failure(e.reason)
    except _NonPattern as e:
        return NotPattern(e.subterm)
    for ts, img in u.sigma.items():
        c = u.flex.get(ts)
        if c is None:
            continue
        for e in free_evars(img):
            if e.ts not in u.flex and e.ts > c:
                return Failure(
                    f"scope violation: image of variable with ceiling {c} mentions {e.name}@{e.ts}")
    theta = Substitution({ts: img for ts, img in u.sigma.items()})
    return Success(theta, dict(u.fresh))


def match_head(head_args, goal_args, clause_vars: dict[int, int | None],
               fresh_start: int = 1_000_000) -> UnifOutcome:
    """Match a clause head against a goal atom: only clause variables are
    instantiable, the goal is rigid."""
    if len(head_args) != len(goal_args):
        return Failure("arity mismatch")
    out = unify_pattern(UnifProblem(list(zip(head_args, goal_args)), dict(clause_vars), fresh_start))
    if isinstance(out, Success):
        # matching never instantiates the goal side
        for ts in out.theta.mapping:
            if ts not in clause_vars and ts not in out.fresh:
                return Failure("goal variable would be instantiated during matching")
    return out
