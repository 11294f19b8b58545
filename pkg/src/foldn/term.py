"""Simply-typed lambda-terms over a user signature.

Bound variables are de Bruijn indices; binder names survive only as
printing hints.  The canonical form of a well-typed term is beta-normal
and eta-long, which makes alpha-equality plain structural equality and
is what the pattern unifier assumes.

Eigenvariables carry an integer timestamp: within one derivation branch
timestamps strictly increase in order of introduction, which gives a
local, decidable check for the usual "not free in the lower sequent"
freshness side condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class FoldnError(Exception):
    """Base class for all errors raised by this package."""


class TypeError_(FoldnError):
    pass


class UnknownConstant(TypeError_):
    pass


class TypeMismatch(TypeError_):
    pass


class PredicateUsedAsTerm(TypeError_):
    pass


class TimestampViolation(FoldnError):
    pass


# ---------------------------------------------------------------------------
# Simple types


@dataclass(frozen=True)
class Base:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"

    def __repr__(self):
        d = f"({self.dom!r})" if isinstance(self.dom, Arrow) else repr(self.dom)
        return f"{d} -> {self.cod!r}"


SimpleType = Base | Arrow

O = Base("o")
NT = Base("nt")


def arrow(doms, cod: SimpleType) -> SimpleType:
    ty = cod
    for d in reversed(list(doms)):
        ty = Arrow(d, ty)
    return ty


def spine_type(ty: SimpleType) -> tuple[list[SimpleType], Base]:
    doms = []
    while isinstance(ty, Arrow):
        doms.append(ty.dom)
        ty = ty.cod
    return doms, ty


def contains_o(ty: SimpleType) -> bool:
    if isinstance(ty, Base):
        return ty == O
    return contains_o(ty.dom) or contains_o(ty.cod)


def quantifiable(ty: SimpleType) -> bool:
    """Quantification types are restricted to not contain the formula sort."""
    return not contains_o(ty)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Bound:
    index: int


@dataclass(frozen=True)
class Const:
    name: str
    ty: SimpleType


@dataclass(frozen=True)
class Evar:
    name: str = field(compare=False)
    ts: int
    ty: SimpleType


@dataclass(frozen=True)
class App:
    head: "Term"  # Bound | Const | Evar in normal form
    args: tuple["Term", ...]


@dataclass(frozen=True)
class Lam:
    ty: SimpleType
    body: "Term"
    hint: str = field(default="x", compare=False)


Term = Bound | Const | Evar | App | Lam


def mk_app(head: Term, args) -> Term:
    args = tuple(args)
    if not args:
        return head
    if isinstance(head, App):
        return App(head.head, head.args + args)
    return App(head, args)


def term_size(t: Term) -> int:
    match t:
        case App(h, args):
            return term_size(h) + sum(term_size(a) for a in args)
        case Lam(_, b):
            return 1 + term_size(b)
        case _:
            return 1


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Add d to every de Bruijn index >= cutoff."""
    match t:
        case Bound(k):
            return Bound(k + d) if k >= cutoff else t
        case App(h, args):
            return App(shift(h, d, cutoff), tuple(shift(a, d, cutoff) for a in args))
        case Lam(ty, b, hint):
            return Lam(ty, shift(b, d, cutoff + 1), hint)
        case _:
            return t


def subst_bound(t: Term, k: int, repl: Term) -> Term:
    """Replace Bound(k) with repl (shifted under binders); lower indexes above k."""
    match t:
        case Bound(i):
            if i == k:
                return shift(repl, k)
            return Bound(i - 1) if i > k else t
        case App(h, args):
            return mk_app(subst_bound(h, k, repl), tuple(subst_bound(a, k, repl) for a in args))
        case Lam(ty, b, hint):
            return Lam(ty, subst_bound(b, k + 1, repl), hint)
        case _:
            return t


def beta(t: Term) -> Term:
    """Beta-normalize (simply-typed terms strongly normalize)."""
    match t:
        case Lam(ty, b, hint):
            return Lam(ty, beta(b), hint)
        case App(h, args):
            h = beta(h)
            args = [beta(a) for a in args]
            while args and isinstance(h, Lam):
                h = beta(subst_bound(h.body, 0, args.pop(0)))
            return mk_app(h, args)
        case _:
            return t


def head_type(t: Term, env: tuple[SimpleType, ...]) -> SimpleType:
    match t:
        case Bound(k):
            if k >= len(env):
                raise TypeMismatch(f"unbound de Bruijn index {k}")
            return env[k]
        case Const(_, ty) | Evar(_, _, ty):
            return ty
        case _:
            raise TypeMismatch(f"not a head: {t}")


def type_of(t: Term, env: tuple[SimpleType, ...] = ()) -> SimpleType:
    """Type of a well-typed term; env lists binder types innermost first."""
    match t:
        case Lam(ty, b, _):
            return Arrow(ty, type_of(b, (ty,) + env))
        case App(h, args):
            ty = type_of(h, env)
            for a in args:
                if not isinstance(ty, Arrow):
                    raise TypeMismatch("over-applied head")
                ty = ty.cod
            return ty
        case _:
            return head_type(t, env)


def eta_expand(t: Term, env: tuple[SimpleType, ...] = ()) -> Term:
    """Eta-long form of a beta-normal term."""
    ty = type_of(t, env)
    if isinstance(ty, Arrow):
        if isinstance(t, Lam):
            return Lam(t.ty, eta_expand(t.body, (t.ty,) + env), t.hint)
        doms, _ = spine_type(ty)
        n = len(doms)
        inner_env = tuple(reversed(doms)) + env
        body = mk_app(
            shift(t, n),
            tuple(eta_expand(Bound(n - 1 - i), inner_env) for i in range(n)),
        )
        out = body
        for d in reversed(doms):
            out = Lam(d, out)
        return out
    match t:
        case App(h, args):
            return mk_app(h, tuple(eta_expand(a, env) for a in args))
        case _:
            return t


def normalize(t: Term, env: tuple[SimpleType, ...] = ()) -> Term:
    """Canonical beta-normal eta-long form. Idempotent."""
    return eta_expand(beta(t), env)


def alpha_equal(t1: Term, t2: Term, env: tuple[SimpleType, ...] = ()) -> bool:
    """True iff the normal forms coincide up to binder renaming.

    With nameless binders this is structural equality of normal forms.
    """
    return normalize(t1, env) == normalize(t2, env)


def free_evars(t: Term) -> set[Evar]:
    match t:
        case Evar():
            return {t}
        case App(h, args):
            s = free_evars(h)
            for a in args:
                s |= free_evars(a)
            return s
        case Lam(_, b):
            return free_evars(b)
        case _:
            return set()


def has_bound_below(t: Term, cutoff: int) -> bool:
    """True if t mentions a de Bruijn index < cutoff (a locally free binder ref)."""
    match t:
        case Bound(k):
            return k < cutoff
        case App(h, args):
            return has_bound_below(h, cutoff) or any(has_bound_below(a, cutoff) for a in args)
        case Lam(_, b):
            return has_bound_below(b, cutoff + 1)
        case _:
            return False


# ---------------------------------------------------------------------------
# Eigenvariable substitutions


class Substitution:
    """Finite map from eigenvariables (by timestamp) to closed terms.

    Closed means: no de Bruijn index escapes, so images can be grafted
    under any binder without shifting.  Applying the substitution
    renormalizes, and the map is kept idempotent by eager composition.
    """

    def __init__(self, mapping: dict[int, Term] | None = None):
        self.mapping: dict[int, Term] = dict(mapping or {})

    def __bool__(self):
        return bool(self.mapping)

    def __contains__(self, ts: int):
        return ts in self.mapping

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.mapping == other.mapping

    def __repr__(self):
        return f"Substitution({self.mapping!r})"

    def items(self):
        return self.mapping.items()

    def bind(self, v: Evar, image: Term) -> "Substitution":
        """Extend with v := image, composing into existing images."""
        image = normalize(image)
        new = {ts: normalize(replace_evars(img, {v.ts: image})) for ts, img in self.mapping.items()}
        new[v.ts] = image
        return Substitution(new)

    def lookup(self, v: Evar) -> Term | None:
        return self.mapping.get(v.ts)

    def apply(self, t: Term) -> Term:
        if not self.mapping:
            return normalize(t)
        return normalize(replace_evars(t, self.mapping))

    def restrict(self, keep: set[int]) -> "Substitution":
        return Substitution({ts: img for ts, img in self.mapping.items() if ts in keep})


def replace_evars(t: Term, mapping: dict[int, Term]) -> Term:
    match t:
        case Evar(_, ts, _):
            return mapping.get(ts, t)
        case App(h, args):
            return mk_app(replace_evars(h, mapping), tuple(replace_evars(a, mapping) for a in args))
        case Lam(ty, b, hint):
            return Lam(ty, replace_evars(b, mapping), hint)
        case _:
            return t


def apply_subst(theta: Substitution, t: Term) -> Term:
    """Capture-avoiding application followed by normalization."""
    return theta.apply(t)


# ---------------------------------------------------------------------------
# Signatures and type checking


@dataclass
class Signature:
    sorts: set[str] = field(default_factory=set)
    consts: dict[str, SimpleType] = field(default_factory=dict)
    preds: dict[str, SimpleType] = field(default_factory=dict)
    levels: dict[str, int] = field(default_factory=dict)

    def copy(self) -> "Signature":
        return Signature(set(self.sorts), dict(self.consts), dict(self.preds), dict(self.levels))

    def declare_sort(self, name: str):
        if name in ("o",):
            raise FoldnError("sort o is built in")
        self.sorts.add(name)

    def sorts_ok(self, ty: SimpleType) -> bool:
        if isinstance(ty, Base):
            return ty.name in self.sorts or ty in (O, NT)
        return self.sorts_ok(ty.dom) and self.sorts_ok(ty.cod)

    def declare_const(self, name: str, ty: SimpleType):
        if not self.sorts_ok(ty):
            raise UnknownConstant(f"type of {name} mentions undeclared sorts: {ty!r}")
        if contains_o(ty):
            raise PredicateUsedAsTerm(f"constant {name} may not mention sort o")
        if name in self.consts and self.consts[name] != ty:
            raise FoldnError(f"constant {name} redeclared at a different type")
        self.consts[name] = ty

    def declare_pred(self, name: str, ty: SimpleType, level: int | None):
        doms, res = spine_type(ty)
        if res != O:
            raise TypeMismatch(f"predicate {name} must end in o")
        if any(contains_o(d) for d in doms):
            raise PredicateUsedAsTerm(f"predicate {name} takes an argument mentioning o")
        if not self.sorts_ok(ty):
            raise UnknownConstant(f"type of {name} mentions undeclared sorts")
        if name == "nat":
            raise FoldnError("nat is built in and may not be redeclared")
        self.preds[name] = ty
        if level is not None:
            self.levels[name] = level

    def pred_arg_types(self, name: str) -> list[SimpleType]:
        doms, _ = spine_type(self.preds[name])
        return doms


def typecheck_term(sig: Signature, env: tuple[SimpleType, ...], t: Term,
                   expected: SimpleType | None = None) -> SimpleType:
    """Check t against the signature; returns its unique type.

    All constants must be declared, predicate names may not occur in
    term position, and no subterm may have a type mentioning o.
    """
    match t:
        case Bound(k):
            if k >= len(env):
                raise TypeMismatch(f"unbound variable index {k}")
            ty = env[k]
        case Const(name, ty0):
            if name in sig.preds:
                raise PredicateUsedAsTerm(f"predicate {name} used in term position")
            if name not in sig.consts:
                raise UnknownConstant(name)
            if sig.consts[name] != ty0:
                raise TypeMismatch(f"constant {name} annotated {ty0!r}, declared {sig.consts[name]!r}")
            ty = ty0
        case Evar(_, _, ty0):
            if contains_o(ty0):
                raise PredicateUsedAsTerm("eigenvariable at a type mentioning o")
            ty = ty0
        case App(h, args):
            ty = typecheck_term(sig, env, h)
            for a in args:
                if not isinstance(ty, Arrow):
                    raise TypeMismatch("application of a non-function")
                aty = typecheck_term(sig, env, a)
                if aty != ty.dom:
                    raise TypeMismatch(f"argument type {aty!r}, expected {ty.dom!r}")
                ty = ty.cod
        case Lam(bty, b, _):
            if contains_o(bty):
                raise PredicateUsedAsTerm("binder at a type mentioning o")
            ty = Arrow(bty, typecheck_term(sig, (bty,) + env, b))
        case _:
            raise TypeMismatch(f"not a term: {t!r}")
    if expected is not None and ty != expected:
        raise TypeMismatch(f"term has type {ty!r}, expected {expected!r}")
    return ty


# built-in natural number constants
Z = Const("z", NT)


def S(t: Term) -> Term:
    return App(Const("s", Arrow(NT, NT)), (t,))


def num(n: int) -> Term:
    t: Term = Z
    for _ in range(n):
        t = S(t)
    return t
