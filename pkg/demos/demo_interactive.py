"""Walkthrough: the interactive session protocol.

Drives the same line-JSON protocol the REPL and web console speak:
states a theorem, applies tactics (including one wrong turn fixed with
undo), and has the kernel certify the result.  Run with:
python3 demos/demo_interactive.py
"""

import json

from foldn.session import Session, handle_request

sess = Session(id="demo")
script = [
    {"cmd": "load", "payload": "nat"},
    {"cmd": "theorem", "payload": "zero_least : forall i, nat i => z <= i"},
    {"cmd": "tactic", "payload": "intros"},
    {"cmd": "tactic", "payload": "split"},          # wrong: the goal is an atom
    {"cmd": "undo"},                                 # back before intros
    {"cmd": "tactic", "payload": "intros"},
    {"cmd": "tactic", "payload": "nat_case H1 (w\\ z <= w)"},
    {"cmd": "tactic", "payload": "search 3"},
    {"cmd": "tactic", "payload": "search 3"},
    {"cmd": "tactic", "payload": "init H1"},
    {"cmd": "qed"},
]
for k, req in enumerate(script):
    req["id"] = k + 1
    resp = handle_request(sess, req)
    print(f">>> {req['cmd']}" + (f" {req.get('payload', '')}" if req.get("payload") else ""))
    if not resp["ok"]:
        print(f"    error: {resp['error']} (as expected)" if req["cmd"] == "tactic"
              else f"    error: {resp['error']}")
        continue
    if resp.get("message"):
        print(f"    {resp['message']}")
    for g in resp.get("subgoals", []):
        hyps = "; ".join(f"{h['handle']}: {h['text']}" for h in g["hyps"])
        print(f"    [{g['index']}] {hyps + ' ' if hyps else ''}|- {g['goal']}")

print()
print("request log replays deterministically:",
      json.dumps([handle_request(Session(id="d2"), dict(r)) for r in script])
      == json.dumps([handle_request(Session(id="d3"), dict(r)) for r in script]))
