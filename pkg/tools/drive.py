"""Dev driver: run a unit's proof script step by step and show subgoals.

Usage: python3 tools/drive.py UNIT THEOREM [STEPS]
Shows the state after applying the first STEPS tactics of the stored script.
"""
import sys

sys.path.insert(0, "src")

from foldn.engine import apply_tactic, elaborate_tactic, start_proof
from foldn.library import Library
from foldn.syntax import Parser, ProofBlock, TheoremDecl, print_sequent

unit_name, them = sys.argv[1], sys.argv[2]
upto = int(sys.argv[3]) if len(sys.argv) > 3 else 10 ** 9

lib = Library()
path = lib.find(unit_name)
decls = Parser(path.read_text()).parse_file()
keep, proof = [], None
for d in decls:
    if isinstance(d, ProofBlock) and d.theorem == them:
        proof = d
        break
    keep.append(d)
unit = lib.process("_dev", path, keep)
f = unit.theorems[them]
st = start_proof(unit.defn, them, f, lemmas=unit.proofs)
for k, raw in enumerate(proof.tactics[:upto]):
    try:
        t = elaborate_tactic(st, raw, macros=unit.macros)
        st = apply_tactic(st, t)
    except Exception as e:
        print(f"STEP {k + 1} ({raw.name}) FAILED: {e}")
        break
    print(f"-- after step {k + 1} ({raw.name}): {len(st.order)} subgoals")
if st.done:
    print("ALL CLOSED")
else:
    for n, s in enumerate(st.subgoals()):
        print(f"==== subgoal {n + 1} ====")
        print(print_sequent(s, sig=unit.defn.sig))
