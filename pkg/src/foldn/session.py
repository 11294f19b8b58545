"""Interactive sessions over a line-delimited JSON protocol.

A session holds a loaded definition and at most one proof in progress;
every request gets exactly one response with the same id, and bad input
produces ok=false rather than a crash.  History snapshots make undo
exact, and replaying a request log from a fresh session reproduces the
same responses.

The same handler serves the stdio REPL and the local HTTP endpoint used
by the web console.
"""

from __future__ import annotations

import json
import sys
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .engine import (
    ProofState, Query, TacticError, apply_tactic, elaborate_tactic, search_goal,
    start_proof,
)
from .kernel import check_proof
from .library import Library, LoadError, initial_signature
from .logic import And, Atom, Bot, Definition, Exists, Forall, Imp, NatAtom, Or, Top
from .syntax import (
    ElabCtx, NameEnv, ParseError, Parser, elaborate_formula, print_formula,
    print_sequent,
)
from .term import Evar, FoldnError


@dataclass
class Session:
    id: str
    library: Library = field(default_factory=Library)
    unit = None
    state: ProofState | None = None
    theorem_name: str | None = None
    history: list = field(default_factory=list)
    log: list = field(default_factory=list)
    local_lemmas: dict = field(default_factory=dict)

    @property
    def defn(self) -> Definition | None:
        return self.unit.defn if self.unit else None


TACTIC_HINTS_GOAL = {
    Forall: ["intros"], Imp: ["intros"], And: ["split"], Or: ["left", "right"],
    Exists: ["exists ?"], Top: ["top_r"], Atom: ["unfold", "search"],
    NatAtom: ["nat_r", "search"],
}


def _structured_sequent(sess: Session, s, index: int) -> dict:
    sig = sess.defn.sig if sess.defn else initial_signature()
    names = NameEnv(sig)
    names.assign_sequent(s)
    hyps = []
    for i, h in enumerate(s.hyps):
        hints = []
        if isinstance(h, Atom) and sess.defn and sess.defn.is_defined(h.pred):
            hints.append(f"case H{i + 1}")
        if isinstance(h, (Exists, And)):
            hints.append(f"destruct H{i + 1}")
        if isinstance(h, NatAtom):
            hints.append(f"induction H{i + 1} (w\\ ...)")
        if isinstance(h, Imp) or isinstance(h, Forall):
            hints.append(f"apply H{i + 1} ...")
        hyps.append({"handle": f"H{i + 1}",
                     "text": print_formula(h, names), "tactics": hints})
    goal_hints = TACTIC_HINTS_GOAL.get(type(s.goal), [])
    return {"index": index, "hyps": hyps,
            "goal": print_formula(s.goal, names), "tactics": list(goal_hints)}


def _subgoals(sess: Session) -> list[dict]:
    if sess.state is None:
        return []
    return [_structured_sequent(sess, s, i + 1)
            for i, s in enumerate(sess.state.subgoals())]


def _snapshot(sess: Session):
    sess.history.append((sess.state, sess.theorem_name))


def handle_request(sess: Session, req: dict) -> dict:
    """One request, one response; the session survives any input."""
    rid = req.get("id")
    cmd = req.get("cmd")
    payload = req.get("payload", "")
    try:
        sess.log.append(req)
        match cmd:
            case "load":
                sess.unit = sess.library.load(payload.strip())
                sess.state = None
                sess.history = []
                return _ok(rid, message=f"loaded {sess.unit.name}: "
                           f"{len(sess.unit.defn.clauses)} clauses, "
                           f"{len(sess.unit.proofs)} checked theorems")
            case "theorem":
                if sess.defn is None:
                    return _err(rid, "no library loaded")
                name, text = "goal", payload
                if ":" in payload.split("=>")[0].split(",")[0]:
                    name, text = payload.split(":", 1)
                    name = name.strip()
                ctx = ElabCtx(sess.defn.sig, macros=dict(sess.unit.macros))
                f = elaborate_formula(ctx, Parser(text).parse_formula())
                _snapshot(sess)
                lemmas = dict(sess.unit.proofs)
                lemmas.update(sess.local_lemmas)
                sess.state = start_proof(sess.defn, name, f, lemmas=lemmas)
                sess.theorem_name = name
                return _ok(rid, subgoals=_subgoals(sess))
            case "tactic":
                if sess.state is None:
                    return _err(rid, "no proof in progress")
                raw = Parser(payload.strip().rstrip(".") + " .").parse_tactic()
                t = elaborate_tactic(sess.state, raw, macros=sess.unit.macros)
                new_state = apply_tactic(sess.state, t)  # transactional
                _snapshot(sess)
                sess.state = new_state
                return _ok(rid, subgoals=_subgoals(sess))
            case "undo":
                if not sess.history:
                    return _err(rid, "nothing to undo")
                sess.state, sess.theorem_name = sess.history.pop()
                return _ok(rid, subgoals=_subgoals(sess))
            case "state":
                return _ok(rid, subgoals=_subgoals(sess))
            case "search":
                if sess.defn is None:
                    return _err(rid, "no library loaded")
                depth = int(req.get("depth", 25))
                goal, names = parse_query(sess.defn, sess.unit.macros, payload)
                res = search_goal(sess.defn, Query(goal, depth))
                if res is None:
                    return _ok(rid, answers=None,
                               message=f"exhausted at depth {depth}")
                answers, _ = res
                sig_names = NameEnv(sess.defn.sig)
                rendered = {n: (print_formula(Atom("", ()), sig_names) if v is None else
                                _print_term(v, sig_names))
                            for n, v in zip(names, [v for _, v in answers])}
                return _ok(rid, answers=rendered, message="yes")
            case "qed":
                if sess.state is None:
                    return _err(rid, "no proof in progress")
                if not sess.state.done:
                    return _err(rid, f"{len(sess.state.holes)} subgoals remain")
                tree = sess.state.to_tree()
                check_proof(sess.defn, sess.state.root_sequent, tree)
                _snapshot(sess)
                sess.local_lemmas[sess.theorem_name] = (
                    sess.state.root_sequent.goal, tree)
                nodes = tree.size()
                out = _ok(rid, message=f"checked ({nodes} rule instances)")
                out["tree"] = _tree_json(sess, tree)
                sess.state = None
                return out
            case _:
                return _err(rid, f"unknown command {cmd!r}")
    except (FoldnError, LoadError, ParseError, ValueError) as e:
        return _err(rid, str(e), subgoals=_subgoals(sess))


def _print_term(t, names):
    from .syntax import print_term
    return print_term(t, names)


def _tree_json(sess, tree):
    """Machine-readable form of a checked proof tree."""
    from .syntax import print_term, print_formula
    names = NameEnv(sess.defn.sig)

    def go(t):
        r = t.rule
        node = {"rule": r.tag}
        if r.hyp is not None:
            node["hyp"] = r.hyp + 1
        if r.witness is not None:
            node["witness"] = print_term(r.witness, names)
        if r.clause is not None:
            node["clause"] = list(r.clause)
        if r.cut_formula is not None:
            node["cut"] = print_formula(r.cut_formula, names)
        if t.children:
            node["children"] = [go(c) for c in t.children]
        return node

    return go(tree)


def _ok(rid, subgoals=None, answers=None, message=None):
    out = {"id": rid, "ok": True}
    if subgoals is not None:
        out["subgoals"] = subgoals
    if answers is not None:
        out["answers"] = answers
    if message is not None:
        out["message"] = message
    return out


def _err(rid, error, subgoals=None):
    out = {"id": rid, "ok": False, "error": error}
    if subgoals:
        out["subgoals"] = subgoals
    return out


def parse_query(defn: Definition, macros, text: str):
    """Parse a query goal; free capitalized identifiers become answer
    variables, wrapped in existentials from the outside in."""
    ctx = ElabCtx(defn.sig, macros=dict(macros), allow_clause_vars=True,
                  clause_var_base=-1)
    f = elaborate_formula(ctx, Parser(text).parse_formula())
    names = []
    from .logic import Exists as Ex, abstract_evar
    for name, (ph, tv) in reversed(list(ctx.clause_vars.items())):
        ty = ctx.tenv.resolve(tv, f" of answer variable {name}")
        f = Ex(ty, abstract_evar(f, ph.ts), name)
        names.insert(0, name)
    return f, names


# ---------------------------------------------------------------------------
# stdio REPL


def repl(file: str | None = None, json_mode: bool | None = None):
    sess = Session(id="repl")
    if file:
        sess.library.cache.clear()
        unit = sess.library.load_path(Path(file))
        sess.unit = unit
        print(f"loaded {unit.name}: {len(unit.proofs)} checked theorems",
              file=sys.stderr)
    if json_mode is None:
        json_mode = not sys.stdin.isatty()
    n = 0
    while True:
        if not json_mode:
            sys.stderr.write("foldn> ")
            sys.stderr.flush()
        line = sys.stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        if json_mode:
            try:
                req = json.loads(line)
            except json.JSONDecodeError as e:
                print(json.dumps({"id": None, "ok": False, "error": str(e)}), flush=True)
                continue
            print(json.dumps(handle_request(sess, req)), flush=True)
            continue
        n += 1
        req = _parse_repl_line(line, n)
        if req is None:
            print("commands: load U | theorem [n :] F | <tactic>. | undo | state | "
                  "search G | qed | quit", file=sys.stderr)
            continue
        if req == "quit":
            break
        resp = handle_request(sess, req)
        _render_human(resp)


def _parse_repl_line(line: str, n: int):
    for cmd in ("load", "theorem", "search"):
        if line.startswith(cmd + " "):
            return {"id": n, "cmd": cmd, "payload": line[len(cmd) + 1:]}
    if line in ("undo", "state", "qed"):
        return {"id": n, "cmd": line}
    if line in ("quit", "exit"):
        return "quit"
    if line == "help":
        return None
    return {"id": n, "cmd": "tactic", "payload": line}


def _render_human(resp: dict):
    if not resp.get("ok"):
        print(f"error: {resp.get('error')}")
        return
    if resp.get("message"):
        print(resp["message"])
    if resp.get("answers"):
        for k, v in resp["answers"].items():
            print(f"  {k} = {v}")
    subgoals = resp.get("subgoals")
    if subgoals is not None:
        if not subgoals:
            print("no subgoals")
        for g in subgoals:
            print(f"-- subgoal {g['index']} " + "-" * 30)
            for h in g["hyps"]:
                print(f"{h['handle']} : {h['text']}")
            print(f"|- {g['goal']}")


# ---------------------------------------------------------------------------
# HTTP server (one in-flight request per session, FIFO)


class _Sessions:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.global_lock = threading.Lock()

    def create(self) -> Session:
        sid = uuid.uuid4().hex[:12]
        with self.global_lock:
            self.sessions[sid] = Session(id=sid)
            self.locks[sid] = threading.Lock()
        return self.sessions[sid]

    def get(self, sid: str):
        return self.sessions.get(sid), self.locks.get(sid)


def make_handler(sessions: _Sessions):
    webui_dir = Path(__file__).parent / "webui"

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send(self, code, body: bytes, ctype="application/json"):
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            path = self.path.split("?")[0]
            if path == "/":
                path = "/index.html"
            f = webui_dir / path.lstrip("/")
            if f.is_file() and webui_dir in f.resolve().parents:
                ctype = {"html": "text/html", "js": "text/javascript",
                         "css": "text/css"}.get(f.suffix.lstrip("."), "text/plain")
                self._send(200, f.read_bytes(), ctype)
            else:
                self._send(404, b'{"error": "not found"}')

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length)
            if self.path == "/session":
                sess = sessions.create()
                self._send(200, json.dumps({"session": sess.id}).encode())
                return
            if self.path.startswith("/session/"):
                sid = self.path.split("/")[2]
                sess, lock = sessions.get(sid)
                if sess is None:
                    self._send(404, b'{"ok": false, "error": "no such session"}')
                    return
                try:
                    req = json.loads(body.decode())
                except json.JSONDecodeError as e:
                    self._send(400, json.dumps(
                        {"ok": False, "error": f"bad JSON: {e}"}).encode())
                    return
                with lock:  # requests within a session are strictly serialized
                    resp = handle_request(sess, req)
                self._send(200, json.dumps(resp).encode())
                return
            self._send(404, b'{"error": "not found"}')

    return Handler


def serve(addr: str = "127.0.0.1:7110"):
    host, port = addr.rsplit(":", 1)
    sessions = _Sessions()
    server = ThreadingHTTPServer((host, int(port)), make_handler(sessions))
    print(f"serving on http://{host}:{port}/ (Ctrl-C to stop)", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
