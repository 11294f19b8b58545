"""Concrete syntax: parser and printer for signatures, definitions,
theorems and tactic scripts (.fnd files).

Every symbol has an ASCII spelling; the printer defaults to ASCII so
scripts diff cleanly.  Printing then reparsing yields an alpha-equal
value.  Comments run from % to end of line.

Binder types may be omitted when inferable: elaboration runs a small
first-order type reconstruction over the simple types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .logic import (
    And, Atom, Bot, Exists, Forall, Formula, FormulaAbs, Imp, NatAtom, Or, Top,
    abstract_clause, DefinitionalClause,
)
from .term import (
    NT, O, App, Arrow, Base, Bound, Const, Evar, FoldnError, Lam, SimpleType,
    Signature, Term, mk_app, normalize,
)


class ParseError(FoldnError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"parse error{where}: {msg}")


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|[0-9]+)
  | (?P<sym>:=|::|->|=>|<=|==|/\\|\\/|\|-|[()\\.,;:<=&])
""", re.VERBOSE)

KEYWORDS = {
    "Sort", "Const", "Pred", "Define", "Extend", "Theorem", "Proof", "Qed",
    "Import", "Abbrev", "by", "level", "forall", "exists", "nat", "top", "bot",
}


@dataclass
class Token:
    kind: str  # ident | sym | eof
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind not in ("ws", "comment"):
            toks.append(Token("ident" if kind == "ident" else "sym", val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            col = len(val) - val.rfind("\n")
        else:
            col += len(val)
        pos = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Raw syntax trees (pre-elaboration)


@dataclass
class RTName:
    name: str
    line: int = 0
    col: int = 0


@dataclass
class RTApp:
    fn: "RawTerm"
    arg: "RawTerm"


@dataclass
class RTLam:
    binders: list[tuple[str, "RawType | None"]]
    body: "RawTerm"


@dataclass
class RTInfix:
    op: str
    left: "RawTerm"
    right: "RawTerm"


RawTerm = RTName | RTApp | RTLam | RTInfix


@dataclass
class RFTop:
    pass


@dataclass
class RFBot:
    pass


@dataclass
class RFBin:
    op: str  # and | or | imp
    left: "RawFormula"
    right: "RawFormula"


@dataclass
class RFQuant:
    q: str  # forall | exists
    binders: list[tuple[str, "RawType | None"]]
    body: "RawFormula"


@dataclass
class RFAtom:
    head: str
    args: list[RawTerm]
    line: int = 0
    col: int = 0


RawFormula = RFTop | RFBot | RFBin | RFQuant | RFAtom


# Declarations


@dataclass
class SortDecl:
    names: list[str]


@dataclass
class ConstDecl:
    names: list[str]
    ty: SimpleType


@dataclass
class PredSig:
    name: str
    ty: SimpleType
    level: int | None  # None = infer


@dataclass
class PredDecl:
    preds: list[PredSig]


@dataclass
class RawClause:
    head: RFAtom
    body: RawFormula | None
    label: str


@dataclass
class DefineBlock:
    preds: list[PredSig]
    clauses: list[RawClause]
    extend: bool = False


@dataclass
class TheoremDecl:
    name: str
    formula: RawFormula


@dataclass
class ProofBlock:
    theorem: str
    tactics: list["RawTactic"]


@dataclass
class ImportDecl:
    name: str


@dataclass
class AbbrevDecl:
    name: str
    params: list[str]
    body: RawFormula


SourceDecl = SortDecl | ConstDecl | PredDecl | DefineBlock | TheoremDecl | ProofBlock | ImportDecl | AbbrevDecl


@dataclass
class RawTactic:
    name: str
    args: list
    text: str


# object-level infix constants and formula-level infix predicates; the
# fixity table is fixed, not user-extensible
TERM_INFIX = {"::": 60, "&": 55, "=>": 50}  # right associative
TERM_INFIX_NAME = {"::": "cons", "=>": "imp", "&": "amp"}
TERM_INFIX_SYMBOL = {v: k for k, v in TERM_INFIX_NAME.items()}
PRED_INFIX = ("<=", "<", "=", "==")
SYMBOL_NAMES = set(PRED_INFIX)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self, ahead=0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, value) -> Token:
        t = self.next()
        if t.value != value:
            raise ParseError(f"expected {value!r}, found {t.value!r}", t.line, t.col)
        return t

    def at(self, value) -> bool:
        return self.peek().value == value

    def eat(self, value) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    # -- types ----------------------------------------------------------

    def parse_type(self) -> SimpleType:
        left = self.parse_type_atom()
        if self.eat("->"):
            return Arrow(left, self.parse_type())
        return left

    def parse_type_atom(self) -> SimpleType:
        t = self.next()
        if t.value == "(":
            ty = self.parse_type()
            self.expect(")")
            return ty
        if t.kind != "ident":
            raise ParseError(f"expected a type, found {t.value!r}", t.line, t.col)
        return Base(t.value)

    # -- terms ----------------------------------------------------------

    def parse_term(self, prec=0) -> RawTerm:
        left = self.parse_term_lam()
        while self.peek().value in TERM_INFIX and TERM_INFIX[self.peek().value] >= prec:
            op = self.next().value
            right = self.parse_term(TERM_INFIX[op])  # right associative
            left = RTInfix(op, left, right)
        return left

    def parse_term_lam(self) -> RawTerm:
        # \x. t   |   \(x:ty) y. t   |   x\ t   |   x\. t
        if self.at("\\"):
            self.next()
            binders = self.parse_binders()
            self.expect(".")
            return RTLam(binders, self.parse_term())
        if self.peek().kind == "ident" and self.peek(1).value == "\\" \
                and self.peek().value not in KEYWORDS:
            name = self.next().value
            self.next()  # backslash
            self.eat(".")
            return RTLam([(name, None)], self.parse_term())
        return self.parse_term_app()

    def parse_binders(self) -> list[tuple[str, SimpleType | None]]:
        out = []
        while True:
            t = self.peek()
            if t.value == "(" and self.peek(1).kind == "ident" and self.peek(2).value == ":":
                self.next()
                name = self.next().value
                self.expect(":")
                ty = self.parse_type()
                self.expect(")")
                out.append((name, ty))
            elif t.kind == "ident" and t.value not in KEYWORDS:
                out.append((self.next().value, None))
            else:
                break
        if not out:
            t = self.peek()
            raise ParseError("expected at least one binder", t.line, t.col)
        return out

    def parse_term_app(self) -> RawTerm:
        t = self.parse_term_atom()
        while self.term_starts():
            t = RTApp(t, self.parse_term_atom())
        return t

    def term_starts(self) -> bool:
        t = self.peek()
        return (t.kind == "ident" and t.value not in KEYWORDS) or t.value in ("(", "\\")

    def parse_term_atom(self) -> RawTerm:
        t = self.next()
        if t.value == "(":
            inner = self.parse_term()
            self.expect(")")
            return inner
        if t.value == "\\":
            self.pos -= 1
            return self.parse_term_lam()
        if t.kind != "ident" or t.value in KEYWORDS:
            raise ParseError(f"expected a term, found {t.value!r}", t.line, t.col)
        if self.peek().value == "\\":
            self.pos -= 1
            return self.parse_term_lam()
        return RTName(t.value, t.line, t.col)

    # -- formulas ---------------------------------------------------------

    def parse_formula(self) -> RawFormula:
        left = self.parse_formula_or()
        if self.eat("=>"):
            return RFBin("imp", left, self.parse_formula())
        return left

    def parse_formula_or(self) -> RawFormula:
        left = self.parse_formula_and()
        while self.eat("\\/"):
            left = RFBin("or", left, self.parse_formula_and())
        return left

    def parse_formula_and(self) -> RawFormula:
        left = self.parse_formula_unit()
        while self.eat("/\\"):
            left = RFBin("and", left, self.parse_formula_unit())
        return left

    def parse_formula_unit(self) -> RawFormula:
        t = self.peek()
        if t.value in ("forall", "exists"):
            self.next()
            binders = self.parse_binders()
            self.expect(",")
            return RFQuant(t.value, binders, self.parse_formula())
        if t.value == "top":
            self.next()
            return RFTop()
        if t.value == "bot":
            self.next()
            return RFBot()
        if t.value == "(":
            save = self.pos
            self.next()
            try:
                f = self.parse_formula()
                self.expect(")")
            except ParseError:
                self.pos = save
                return self.parse_atom()
            # parenthesized single atom may continue as infix-predicate atom
            if isinstance(f, RFAtom) and self.peek().value in PRED_INFIX:
                self.pos = save
                return self.parse_atom()
            return f
        return self.parse_atom()

    def parse_atom(self) -> RFAtom:
        t = self.peek()
        if t.value == "nat":
            self.next()
            return RFAtom("nat", [self.parse_term_atom()], t.line, t.col)
        lhs = self.parse_term_app()
        if self.peek().value in PRED_INFIX:
            op = self.next().value
            rhs = self.parse_term_app()
            return RFAtom(op, [lhs, rhs], t.line, t.col)
        if not isinstance(lhs, RTName) and not isinstance(lhs, RTApp):
            raise ParseError("expected an atomic formula", t.line, t.col)
        head, args = lhs, []
        while isinstance(head, RTApp):
            args.insert(0, head.arg)
            head = head.fn
        if not isinstance(head, RTName):
            raise ParseError("atomic formula must start with a predicate name", t.line, t.col)
        return RFAtom(head.name, args, t.line, t.col)

    # -- declarations ------------------------------------------------------

    def parse_file(self) -> list[SourceDecl]:
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.parse_decl(decls))
        return decls

    def parse_decl(self, sofar) -> SourceDecl:
        t = self.peek()
        match t.value:
            case "Sort":
                self.next()
                names = [self.next().value]
                while self.eat(","):
                    names.append(self.next().value)
                self.expect(".")
                return SortDecl(names)
            case "Const":
                self.next()
                names = [self.parse_decl_name()]
                while self.eat(","):
                    names.append(self.parse_decl_name())
                self.expect(":")
                ty = self.parse_type()
                self.expect(".")
                return ConstDecl(names, ty)
            case "Pred":
                self.next()
                preds = []
                while True:
                    pname = self.parse_decl_name()
                    self.expect(":")
                    ty = self.parse_type()
                    level = None
                    if self.eat("level"):
                        tok = self.next()
                        if not tok.value.isdigit():
                            raise ParseError("level must be a number", tok.line, tok.col)
                        level = int(tok.value)
                    preds.append(PredSig(pname, ty, level))
                    if not self.eat(","):
                        break
                self.expect(".")
                return PredDecl(preds)
            case "Define" | "Extend":
                return self.parse_define(extend=t.value == "Extend")
            case "Theorem":
                self.next()
                name = self.next().value
                self.expect(":")
                f = self.parse_formula()
                self.expect(".")
                return TheoremDecl(name, f)
            case "Proof":
                self.next()
                self.expect(".")
                tactics = []
                while not self.at("Qed"):
                    if self.peek().kind == "eof":
                        raise ParseError("unterminated proof block", t.line, t.col)
                    tactics.append(self.parse_tactic())
                self.expect("Qed")
                self.expect(".")
                thms = [d.name for d in sofar if isinstance(d, TheoremDecl)]
                if not thms:
                    raise ParseError("proof block without a theorem", t.line, t.col)
                return ProofBlock(thms[-1], tactics)
            case "Import":
                self.next()
                name = self.next().value
                self.expect(".")
                return ImportDecl(name)
            case "Abbrev":
                self.next()
                name = self.next().value
                params = []
                while self.peek().kind == "ident" and not self.at(":="):
                    params.append(self.next().value)
                self.expect(":=")
                body = self.parse_formula()
                self.expect(".")
                return AbbrevDecl(name, params, body)
        raise ParseError(f"expected a declaration, found {t.value!r}", t.line, t.col)

    def parse_decl_name(self) -> str:
        t = self.next()
        if t.kind == "ident" and t.value not in KEYWORDS:
            return t.value
        if t.value in SYMBOL_NAMES:
            return t.value
        raise ParseError(f"expected a name, found {t.value!r}", t.line, t.col)

    def parse_define(self, extend: bool) -> DefineBlock:
        self.next()
        preds = []
        if extend:
            while True:
                name = self.parse_decl_name()
                preds.append(PredSig(name, None, None))
                if not self.eat(","):
                    break
        else:
            while True:
                name = self.parse_decl_name()
                self.expect(":")
                ty = self.parse_type()
                level = None
                if self.eat("level"):
                    tok = self.next()
                    if not tok.value.isdigit():
                        raise ParseError("level must be a number", tok.line, tok.col)
                    level = int(tok.value)
                preds.append(PredSig(name, ty, level))
                if not self.eat(","):
                    break
        self.expect("by")
        clauses = []
        n = 0
        while True:
            head = self.parse_atom()
            body = None
            if self.eat(":="):
                body = self.parse_formula()
            n += 1
            clauses.append(RawClause(head, body, f"{head.head}#{n}"))
            if self.eat(";"):
                continue
            self.expect(".")
            break
        if not clauses:
            raise ParseError("empty definition block")
        return DefineBlock(preds, clauses, extend)

    # -- tactics -----------------------------------------------------------

    def parse_tactic(self) -> RawTactic:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected a tactic, found {t.value!r}", t.line, t.col)
        name = t.value
        args = []
        start = self.pos
        while not self.at("."):
            tok = self.peek()
            if tok.kind == "eof":
                raise ParseError("unterminated tactic", t.line, t.col)
            if tok.kind == "ident" and tok.value.isdigit():
                args.append(int(self.next().value))
            elif tok.value == "(" and self.peek(1).kind == "ident" and self.peek(2).value == "\\":
                # formula abstraction (x\ F)
                self.next()
                binder = self.next().value
                self.expect("\\")
                f = self.parse_formula()
                self.expect(")")
                args.append(("fabs", binder, f))
            elif tok.value == "(" and name in ("cut", "assert"):
                self.next()
                f = self.parse_formula()
                self.expect(")")
                args.append(("formula", f))
            else:
                args.append(("term", self.parse_term_atom()))
        self.expect(".")
        return RawTactic(name, args, "")


# ---------------------------------------------------------------------------
# Elaboration: raw trees -> typed terms/formulas


@dataclass(frozen=True)
class TVar:
    id: int


class _TypeEnv:
    def __init__(self):
        self.n = 0
        self.sub: dict[int, SimpleType | TVar] = {}

    def fresh(self) -> TVar:
        self.n += 1
        return TVar(self.n)

    def find(self, ty):
        while isinstance(ty, TVar) and ty.id in self.sub:
            ty = self.sub[ty.id]
        return ty

    def unify(self, a, b, where=""):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if isinstance(a, TVar):
            self.sub[a.id] = b
            return
        if isinstance(b, TVar):
            self.sub[b.id] = a
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom, where)
            self.unify(a.cod, b.cod, where)
            return
        raise ParseError(f"type mismatch{where}: {a!r} vs {b!r}")

    def resolve(self, ty, where=""):
        ty = self.find(ty)
        if isinstance(ty, TVar):
            raise ParseError(f"cannot infer type{where}; annotate the binder")
        if isinstance(ty, Arrow):
            return Arrow(self.resolve(ty.dom, where), self.resolve(ty.cod, where))
        return ty


@dataclass
class ElabCtx:
    sig: Signature
    evars: dict[str, Evar] = field(default_factory=dict)
    macros: dict[str, tuple[list[str], RawFormula]] = field(default_factory=dict)
    allow_clause_vars: bool = False
    clause_var_base: int = -1

    def __post_init__(self):
        self.clause_vars: dict[str, tuple[Evar, object]] = {}
        self.tenv = _TypeEnv()


def _is_clause_var(name: str) -> bool:
    return name[0].isupper()


class Elaborator:
    def __init__(self, ctx: ElabCtx):
        self.ctx = ctx
        self.tenv = ctx.tenv

    # binders: list of (name, type-or-tvar), innermost first
    def term(self, rt: RawTerm, binders) -> tuple[Term, object]:
        match rt:
            case RTName(name, line, col):
                if name.isdigit():  # numeral sugar for the built-in naturals
                    from .term import num
                    return num(int(name)), NT
                for k, (bn, bty) in enumerate(binders):
                    if bn == name:
                        return Bound(k), bty
                if name in self.ctx.evars:
                    e = self.ctx.evars[name]
                    return e, e.ty
                if name in self.ctx.sig.consts:
                    c = Const(name, self.ctx.sig.consts[name])
                    return c, c.ty
                if name in self.ctx.sig.preds:
                    raise ParseError(f"predicate {name} used in term position", line, col)
                if self.ctx.allow_clause_vars and _is_clause_var(name):
                    if name not in self.ctx.clause_vars:
                        tv = self.tenv.fresh()
                        ph = Evar(name, self.ctx.clause_var_base - len(self.ctx.clause_vars), tv)
                        self.ctx.clause_vars[name] = (ph, tv)
                    ph, tv = self.ctx.clause_vars[name]
                    return ph, tv
                raise ParseError(f"unbound identifier {name!r}", line, col)
            case RTApp(fn, arg):
                f, fty = self.term(fn, binders)
                a, aty = self.term(arg, binders)
                res = self.tenv.fresh()
                self.tenv.unify(fty, Arrow(aty, res))
                return mk_app(f, [a]), res
            case RTLam(bs, body):
                names = []
                for (n, ty) in bs:
                    names.append((n, ty if ty is not None else self.tenv.fresh()))
                b, bty = self.term(body, list(reversed(names)) + binders)
                ty = bty
                for (_, t0) in reversed(names):
                    ty = Arrow(t0, ty)
                out = b
                for (n, t0) in reversed(names):
                    out = Lam(t0 if not isinstance(t0, TVar) else t0, out, n)
                return out, ty
            case RTInfix(op, l, r):
                return self.term(RTApp(RTApp(RTName(TERM_INFIX_NAME[op]), l), r), binders)
        raise ParseError(f"bad term {rt!r}")

    def formula(self, rf: RawFormula, binders) -> Formula:
        match rf:
            case RFTop():
                return Top()
            case RFBot():
                return Bot()
            case RFBin(op, l, r):
                cls = {"and": And, "or": Or, "imp": Imp}[op]
                return cls(self.formula(l, binders), self.formula(r, binders))
            case RFQuant(q, bs, body):
                names = [(n, ty if ty is not None else self.tenv.fresh()) for n, ty in bs]
                inner = self.formula(body, list(reversed(names)) + binders)
                out = inner
                for (n, ty) in reversed(names):
                    out = (Forall if q == "forall" else Exists)(ty, out, n)
                return out
            case RFAtom(head, args, line, col):
                if head in self.ctx.macros:
                    params, template = self.ctx.macros[head]
                    if len(params) != len(args):
                        raise ParseError(f"abbreviation {head} expects {len(params)} arguments",
                                         line, col)
                    expanded = _substitute_raw(template, dict(zip(params, args)))
                    return self.formula(expanded, binders)
                if head == "nat":
                    if len(args) != 1:
                        raise ParseError("nat takes one argument", line, col)
                    t, ty = self.term(args[0], binders)
                    self.tenv.unify(ty, NT, " in nat atom")
                    return NatAtom(t)
                if head not in self.ctx.sig.preds:
                    raise ParseError(f"unknown predicate {head!r}", line, col)
                doms, res = [], self.ctx.sig.preds[head]
                while isinstance(res, Arrow):
                    doms.append(res.dom)
                    res = res.cod
                if len(doms) != len(args):
                    raise ParseError(f"{head} expects {len(doms)} arguments, got {len(args)}",
                                     line, col)
                ts = []
                for a, d in zip(args, doms):
                    t, ty = self.term(a, binders)
                    self.tenv.unify(ty, d, f" in argument of {head}")
                    ts.append(t)
                return Atom(head, tuple(ts))
        raise ParseError(f"bad formula {rf!r}")


def _substitute_raw(rf: RawFormula, mapping: dict[str, RawTerm]) -> RawFormula:
    def sub_t(rt):
        match rt:
            case RTName(n, _, _):
                return mapping.get(n, rt)
            case RTApp(f, a):
                return RTApp(sub_t(f), sub_t(a))
            case RTLam(bs, b):
                inner = {k: v for k, v in mapping.items() if k not in [n for n, _ in bs]}
                return RTLam(bs, _sub_term(b, inner))
            case RTInfix(op, l, r):
                return RTInfix(op, sub_t(l), sub_t(r))
        return rt

    def _sub_term(rt, m):
        return _substitute_raw_term(rt, m)

    match rf:
        case RFBin(op, l, r):
            return RFBin(op, _substitute_raw(l, mapping), _substitute_raw(r, mapping))
        case RFQuant(q, bs, body):
            inner = {k: v for k, v in mapping.items() if k not in [n for n, _ in bs]}
            return RFQuant(q, bs, _substitute_raw(body, inner))
        case RFAtom(h, args, line, col):
            return RFAtom(h, [sub_t(a) for a in args], line, col)
        case _:
            return rf


def _substitute_raw_term(rt: RawTerm, mapping) -> RawTerm:
    match rt:
        case RTName(n, _, _):
            return mapping.get(n, rt)
        case RTApp(f, a):
            return RTApp(_substitute_raw_term(f, mapping), _substitute_raw_term(a, mapping))
        case RTLam(bs, b):
            inner = {k: v for k, v in mapping.items() if k not in [n for n, _ in bs]}
            return RTLam(bs, _substitute_raw_term(b, inner))
        case RTInfix(op, l, r):
            return RTInfix(op, _substitute_raw_term(l, mapping), _substitute_raw_term(r, mapping))
    return rt


def _resolve_types_term(t: Term, tenv: _TypeEnv) -> Term:
    match t:
        case Evar(n, ts, ty):
            return Evar(n, ts, tenv.resolve(ty, f" of {n}")) if _mentions_tvar(ty) else t
        case App(h, args):
            return mk_app(_resolve_types_term(h, tenv), [_resolve_types_term(a, tenv) for a in args])
        case Lam(ty, b, hint):
            rty = tenv.resolve(ty, f" of binder {hint}") if _mentions_tvar(ty) else ty
            return Lam(rty, _resolve_types_term(b, tenv), hint)
        case _:
            return t


def _mentions_tvar(ty) -> bool:
    if isinstance(ty, TVar):
        return True
    if isinstance(ty, Arrow):
        return _mentions_tvar(ty.dom) or _mentions_tvar(ty.cod)
    return False


def _resolve_types_formula(f: Formula, tenv: _TypeEnv) -> Formula:
    match f:
        case And(l, r):
            return And(_resolve_types_formula(l, tenv), _resolve_types_formula(r, tenv))
        case Or(l, r):
            return Or(_resolve_types_formula(l, tenv), _resolve_types_formula(r, tenv))
        case Imp(l, r):
            return Imp(_resolve_types_formula(l, tenv), _resolve_types_formula(r, tenv))
        case Forall(ty, b, h):
            rty = tenv.resolve(ty, f" of {h}") if _mentions_tvar(ty) else ty
            return Forall(rty, _resolve_types_formula(b, tenv), h)
        case Exists(ty, b, h):
            rty = tenv.resolve(ty, f" of {h}") if _mentions_tvar(ty) else ty
            return Exists(rty, _resolve_types_formula(b, tenv), h)
        case Atom(p, args):
            return Atom(p, tuple(_resolve_types_term(a, tenv) for a in args))
        case NatAtom(t):
            return NatAtom(_resolve_types_term(t, tenv))
        case _:
            return f


def elaborate_formula(ctx: ElabCtx, rf: RawFormula) -> Formula:
    el = Elaborator(ctx)
    f = el.formula(rf, [])
    f = _resolve_types_formula(f, ctx.tenv)
    return f


def elaborate_term(ctx: ElabCtx, rt: RawTerm, expected: SimpleType | None = None) -> Term:
    el = Elaborator(ctx)
    t, ty = el.term(rt, [])
    if expected is not None:
        ctx.tenv.unify(ty, expected)
    t = _resolve_types_term(t, ctx.tenv)
    return t


def elaborate_clause(ctx: ElabCtx, rc: RawClause) -> DefinitionalClause:
    ctx.clause_vars = {}
    el = Elaborator(ctx)
    head = el.formula(rc.head, [])
    body = el.formula(rc.body, []) if rc.body is not None else Top()
    if isinstance(head, NatAtom):
        raise ParseError("nat may not be defined")
    if not isinstance(head, Atom):
        raise ParseError(f"clause head must be an atom: {rc.label}")
    head = _resolve_types_formula(head, ctx.tenv)
    body = _resolve_types_formula(body, ctx.tenv)
    placeholders, variables = [], []
    for name, (ph, tv) in ctx.clause_vars.items():
        ty = ctx.tenv.resolve(tv, f" of clause variable {name}")
        placeholders.append(Evar(name, ph.ts, ty))
        variables.append((name, ty))
    # the elaborated trees still hold placeholders typed with type variables
    fix = {p.ts: p for p in placeholders}
    from .logic import replace_evars_formula
    head = replace_evars_formula(head, fix)
    body = replace_evars_formula(body, fix)
    return abstract_clause(rc.label, variables, head.pred, list(head.args), body, placeholders)


# ---------------------------------------------------------------------------
# Printing


@dataclass
class PrintOptions:
    unicode: bool = False
    show_timestamps: bool = False
    width: int = 100


class NameEnv:
    """Deterministic display names for eigenvariables: hint, then primes."""

    def __init__(self, sig: Signature | None = None):
        self.taken: set[str] = set(sig.consts) | set(sig.preds) if sig else set()
        self.names: dict[int, str] = {}
        self.by_name: dict[str, int] = {}

    def name_of(self, e: Evar) -> str:
        if e.ts in self.names:
            return self.names[e.ts]
        base = e.name or "x"
        cand = base
        while cand in self.taken or cand in self.by_name:
            cand += "'"
        self.names[e.ts] = cand
        self.by_name[cand] = e.ts
        return cand

    def assign_sequent(self, s) -> None:
        for e in s.evars():
            self.name_of(e)

    def lookup(self, name: str) -> int | None:
        return self.by_name.get(name)


def print_type(ty: SimpleType) -> str:
    if isinstance(ty, Base):
        return ty.name
    l = print_type(ty.dom)
    if isinstance(ty.dom, Arrow):
        l = f"({l})"
    return f"{l} -> {print_type(ty.cod)}"


def print_term(t: Term, names: NameEnv, opts: PrintOptions | None = None,
               binders: tuple[str, ...] = (), prec: int = 0) -> str:
    opts = opts or PrintOptions()
    match t:
        case Bound(k):
            return binders[k] if k < len(binders) else f"#{k}"
        case Const(name, _):
            return name
        case Evar() as e:
            n = names.name_of(e)
            return f"{n}@{e.ts}" if opts.show_timestamps else n
        case Lam() as lam:
            bs = []
            body = lam
            while isinstance(body, Lam):
                b = body.hint or "x"
                while b in bs or b in binders or b in names.by_name or b in names.taken:
                    b += "'"
                bs.append(b)
                body = body.body
            inner = print_term(body, names, opts, tuple(reversed(bs)) + binders, 0)
            s = "\\".join(bs) + "\\ " + inner if len(bs) == 1 else \
                "\\" + " ".join(bs) + ". " + inner
            return f"({s})" if prec > 0 else s
        case App(h, args):
            if isinstance(h, Const) and h.name in TERM_INFIX_SYMBOL and len(args) == 2:
                sym = TERM_INFIX_SYMBOL[h.name]
                p = TERM_INFIX[sym]
                l = print_term(args[0], names, opts, binders, p + 1)
                r = print_term(args[1], names, opts, binders, p)
                s = f"{l} {sym} {r}"
                return f"({s})" if prec > p else s
            parts = [print_term(h, names, opts, binders, 100)]
            for a in args:
                parts.append(print_term(a, names, opts, binders, 100))
            s = " ".join(parts)
            return f"({s})" if prec >= 100 else s
    raise FoldnError(f"cannot print {t!r}")


_UNI = {"forall": "∀", "exists": "∃", "=>": "⊃", "/\\": "∧",
        "\\/": "∨", "top": "⊤", "bot": "⊥", "|-": "⊢"}


def _kw(s: str, opts: PrintOptions) -> str:
    return _UNI[s] if opts.unicode else s


def print_formula(f: Formula, names: NameEnv, opts: PrintOptions | None = None,
                  binders: tuple[str, ...] = (), prec: int = 0) -> str:
    opts = opts or PrintOptions()
    match f:
        case Top():
            return _kw("top", opts)
        case Bot():
            return _kw("bot", opts)
        case Imp(l, r):
            op = _kw("=>", opts)
            s = (print_formula(l, names, opts, binders, 11) + " " + op + " "
                 + print_formula(r, names, opts, binders, 10))
            return f"({s})" if prec > 10 else s
        case Or(l, r):
            op = _kw("\\/", opts)
            s = (print_formula(l, names, opts, binders, 20) + " " + op + " "
                 + print_formula(r, names, opts, binders, 21))
            return f"({s})" if prec > 20 else s
        case And(l, r):
            op = _kw("/\\", opts)
            s = (print_formula(l, names, opts, binders, 30) + " " + op + " "
                 + print_formula(r, names, opts, binders, 31))
            return f"({s})" if prec > 30 else s
        case Forall(ty, _, _) | Exists(ty, _, _):
            q = "forall" if isinstance(f, Forall) else "exists"
            bs, body = [], f
            while isinstance(body, (Forall, Exists)) and \
                    (isinstance(body, Forall)) == (q == "forall"):
                b = body.hint or "x"
                used = [n for n, _ in bs]
                while b in used or b in binders or b in names.by_name or b in names.taken:
                    b += "'"
                bs.append((b, body.ty))
                body = body.body
            shown = " ".join(f"({n} : {print_type(t)})" for n, t in bs)
            inner = print_formula(body, names, opts,
                                  tuple(n for n, _ in reversed(bs)) + binders, 0)
            s = f"{q} {shown}, {inner}"
            return f"({s})" if prec > 0 else s
        case NatAtom(t):
            s = "nat " + print_term(t, names, opts, binders, 100)
            return f"({s})" if prec >= 100 else s
        case Atom(p, args):
            if p in PRED_INFIX and len(args) == 2:
                l = print_term(args[0], names, opts, binders, 99)
                r = print_term(args[1], names, opts, binders, 99)
                s = f"{l} {p} {r}"
                return f"({s})" if prec >= 99 else s
            if not args:
                return p
            parts = [p] + [print_term(a, names, opts, binders, 100) for a in args]
            s = " ".join(parts)
            return f"({s})" if prec >= 100 else s
    raise FoldnError(f"cannot print formula {f!r}")


def print_sequent(s, names: NameEnv | None = None, opts: PrintOptions | None = None,
                  sig: Signature | None = None) -> str:
    """Hypotheses numbered H1..Hn, goal after the turnstile."""
    opts = opts or PrintOptions()
    names = names or NameEnv(sig)
    names.assign_sequent(s)
    lines = []
    for i, h in enumerate(s.hyps):
        lines.append(f"H{i + 1} : {print_formula(h, names, opts)}")
    lines.append(f"{_kw('|-', opts)} {print_formula(s.goal, names, opts)}")
    return "\n".join(lines)
