"""Independent oracles for the acceptance suite.

The PCF interpreter and type checker are direct tree-walkers over the
object syntax, written without reference to the logic implementation:
they only share the Term data type used to exchange programs.
"""

from foldn.term import App, Base, Bound, Const, Lam, Term, mk_app, normalize, subst_bound

I = Base("i")


class PcfError(Exception):
    pass


def _head(t: Term):
    if isinstance(t, App):
        return t.head.name if isinstance(t.head, Const) else None, t.args
    if isinstance(t, Const):
        return t.name, ()
    return None, ()


def pcf_eval(t: Term, fuel: int = 10_000) -> Term:
    """Call-by-name natural semantics for PCF, directly."""
    if fuel <= 0:
        raise PcfError("out of fuel")
    t = normalize(t)
    name, args = _head(t)
    match name:
        case "zero" | "true" | "false":
            return t
        case "tabs":
            return t
        case "succ":
            return mk_app(Const("succ", _c("succ")), [pcf_eval(args[0], fuel - 1)])
        case "pred":
            v = pcf_eval(args[0], fuel - 1)
            vn, vargs = _head(v)
            if vn == "zero":
                return v
            if vn == "succ":
                return vargs[0]
            raise PcfError(f"pred of non-number {v!r}")
        case "is_zero":
            v = pcf_eval(args[0], fuel - 1)
            vn, _ = _head(v)
            if vn == "zero":
                return Const("true", I)
            if vn == "succ":
                return Const("false", I)
            raise PcfError(f"is_zero of non-number {v!r}")
        case "if":
            v = pcf_eval(args[0], fuel - 1)
            vn, _ = _head(v)
            if vn == "true":
                return pcf_eval(args[1], fuel - 1)
            if vn == "false":
                return pcf_eval(args[2], fuel - 1)
            raise PcfError("if of non-boolean")
        case "app":
            f = pcf_eval(args[0], fuel - 1)
            fn, fargs = _head(f)
            if fn != "tabs":
                raise PcfError("application of a non-function")
            body = fargs[1]
            assert isinstance(body, Lam)
            return pcf_eval(subst_bound(body.body, 0, args[1]), fuel - 1)
        case "rec":
            body = args[1]
            assert isinstance(body, Lam)
            return pcf_eval(subst_bound(body.body, 0, t), fuel - 1)
    raise PcfError(f"stuck term {t!r}")


def _c(name):
    from foldn.term import Arrow
    return Arrow(I, I)


def pcf_typeof(t: Term, env=()) -> Term:
    """Simple type inference for PCF; env maps de Bruijn binders to types."""
    t = normalize(t, tuple(I for _ in env))
    name, args = _head(t)
    num, bool_ = Const("num", I), Const("bool", I)

    def arr(a, b):
        from foldn.term import arrow
        return mk_app(Const("arr", arrow([I, I], I)), [a, b])

    match name:
        case "zero":
            return num
        case "true" | "false":
            return bool_
        case "succ" | "pred":
            _expect(pcf_typeof(args[0], env), num)
            return num
        case "is_zero":
            _expect(pcf_typeof(args[0], env), num)
            return bool_
        case "if":
            _expect(pcf_typeof(args[0], env), bool_)
            t1 = pcf_typeof(args[1], env)
            t2 = pcf_typeof(args[2], env)
            _expect(t1, t2)
            return t1
        case "tabs":
            dom, body = args
            assert isinstance(body, Lam)
            cod = pcf_typeof(body.body, (dom,) + tuple(env))
            return arr(dom, cod)
        case "app":
            ft = pcf_typeof(args[0], env)
            fn, fargs = _head(ft)
            if fn != "arr":
                raise PcfError("application of a non-function type")
            _expect(pcf_typeof(args[1], env), fargs[0])
            return fargs[1]
        case "rec":
            dom, body = args
            assert isinstance(body, Lam)
            _expect(pcf_typeof(body.body, (dom,) + tuple(env)), dom)
            return dom
    if isinstance(t, Bound):
        return env[t.index]
    raise PcfError(f"untypable term {t!r}")


def _expect(got, want):
    if normalize(got) != normalize(want):
        raise PcfError(f"type mismatch: {got!r} vs {want!r}")


# -- arithmetic oracle over the relational clauses ---------------------------


def to_int(t: Term) -> int:
    n = 0
    t = normalize(t)
    while isinstance(t, App) and isinstance(t.head, Const) and t.head.name == "s":
        n += 1
        t = t.args[0]
    if not (isinstance(t, Const) and t.name == "z"):
        raise ValueError(f"not a numeral: {t!r}")
    return n
