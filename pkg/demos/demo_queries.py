"""Walkthrough: the goal-directed query engine.

Queries run backchaining and right rules only, so they behave like a
logic programming interpreter over the library definitions.  Capitalized
free names are answer variables.  Run with:  python3 demos/demo_queries.py
"""

from foldn.engine import Query, search_goal
from foldn.library import Library
from foldn.session import parse_query
from foldn.syntax import NameEnv, print_term

lib = Library()


def ask(unit, text, depth=30):
    u = lib.load(unit)
    goal, names = parse_query(u.defn, u.macros, text)
    res = search_goal(u.defn, Query(goal, depth))
    if res is None:
        print(f"{unit} ?- {text}\n   exhausted at depth {depth}")
        return
    answers, tree = res
    env = NameEnv(u.defn.sig)
    shown = ", ".join(f"{h} = {print_term(v, env)}" for h, v in answers if v is not None)
    print(f"{unit} ?- {text}\n   yes" + (f"  ({shown})" if shown else "")
          + f"   [{tree.size()} rule instances, kernel-checked]")


print("== arithmetic over the relational clauses ==")
ask("nat", "sum 2 3 K")
ask("nat", "sum K 2 5")
ask("nat", "3 < 5")
ask("nat", "5 < 3")

print()
print("== call-by-name evaluation of untyped lambda-terms ==")
ask("lambda", "exists n, seq n nil (at (eval (app (abs (x\\ x)) (abs (y\\ y))) V)) /\\ nat n")

print()
print("== PCF evaluation and type inference ==")
ask("pcf", "exists n, seq n nil (at (eval (if (is_zero (pred (succ zero))) (succ zero) zero) V)) /\\ nat n")
ask("pcf", "exists n, seq n nil (at (typeof (tabs num (x\\ succ x)) T)) /\\ nat n")
ask("pcf", "exists n, seq n nil (at (eval (app (rec (arr num num) (f\\ tabs num (x\\ if (is_zero x) zero (app f (pred x))))) (succ (succ zero))) V)) /\\ nat n", depth=60)

print()
print("== consistency smoke: nothing proves the empty sequent ==")
ask("nat", "bot", depth=8)
