"""Library units: versioned .fnd files that load, level-check, and carry
their checked proof scripts.

A unit's definition is the merge of its imports (deduplicated, in
dependency order) with its own declarations.  Clause references inside
stored proof trees are (predicate, ordinal) pairs, so merged
definitions keep them valid as long as per-predicate clause order is
preserved, which the loader guarantees.

The manifest records one line per unit: name, file, expected status
(green, fails-level-check, or statements-only) and a content hash.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Tactic, TacticError, elaborate_tactic, run_script, start_proof, apply_tactic
from .kernel import ProofTree, check_proof, mk_sequent
from .logic import Definition, Violation, check_clause, infer_levels
from .syntax import (
    AbbrevDecl, ConstDecl, DefineBlock, ElabCtx, ImportDecl, ParseError, Parser,
    PredDecl, ProofBlock, SortDecl, TheoremDecl, elaborate_clause, elaborate_formula,
)
from .term import Arrow, FoldnError, NT, Signature, typecheck_term


class LoadError(FoldnError):
    pass


def initial_signature() -> Signature:
    sig = Signature()
    sig.declare_sort("nt")
    sig.declare_const("z", NT)
    sig.declare_const("s", Arrow(NT, NT))
    return sig


@dataclass
class Unit:
    name: str
    path: Path
    imports: list[str]
    defn: Definition
    unit_clauses: dict[str, list]           # unit name -> its own clauses, in order
    macros: dict[str, tuple]
    theorems: dict[str, object]             # name -> Formula (all statements)
    proofs: dict[str, tuple]                # name -> (Formula, ProofTree)
    unchecked: list[str]                    # statement-only theorems
    warnings: list[Violation]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def script_names(self):
        return list(self.proofs)


def default_paths() -> list[Path]:
    paths = []
    env = os.environ.get("FOLDN_STDLIB")
    if env:
        paths.append(Path(env))
    paths.append(Path(__file__).parent / "stdlib")
    return paths


class Library:
    """Loads and caches library units from the search path."""

    def __init__(self, paths: list[Path] | None = None):
        self.paths = paths or default_paths()
        self.cache: dict[str, Unit] = {}

    def find(self, name: str) -> Path:
        for p in self.paths:
            for cand in (p / f"{name}.fnd", p / "stretch" / f"{name}.fnd"):
                if cand.exists():
                    return cand
        raise LoadError(f"no library unit named {name!r} on the search path")

    def load(self, name: str) -> Unit:
        if name in self.cache:
            return self.cache[name]
        path = self.find(name)
        unit = self.load_path(path, name)
        self.cache[name] = unit
        return unit

    def load_path(self, path: Path, name: str | None = None) -> Unit:
        name = name or path.stem
        try:
            decls = Parser(path.read_text()).parse_file()
        except ParseError as e:
            raise LoadError(f"{path}: {e}")
        return self.process(name, path, decls)

    def process(self, name: str, path: Path, decls) -> Unit:
        sig = initial_signature()
        unit_clauses: dict[str, list] = {}
        order: list[str] = []
        macros: dict[str, tuple] = {}
        theorems: dict = {}
        proofs: dict = {}
        unchecked: list[str] = []
        warnings: list[Violation] = []
        imports: list[str] = []
        timings: dict[str, float] = {}

        def merge_unit(dep: Unit):
            for uname in dep.unit_clauses:
                if uname in unit_clauses:
                    continue
                order.append(uname)
                unit_clauses[uname] = dep.unit_clauses[uname]
            _merge_signature(sig, dep.defn.sig, where=dep.name)
            for mname, m in dep.macros.items():
                macros.setdefault(mname, m)
            for tname, f in dep.theorems.items():
                theorems.setdefault(tname, f)
            for pname, p in dep.proofs.items():
                proofs.setdefault(pname, p)

        own: list = []
        unit_clauses[name] = own
        order.append(name)

        def build_defn() -> Definition:
            clauses = []
            for uname in order:
                clauses.extend(unit_clauses[uname])
            return Definition(sig, clauses)

        for d in decls:
            try:
                match d:
                    case ImportDecl(dep_name):
                        dep = self.load(dep_name)
                        imports.append(dep_name)
                        merge_unit(dep)
                    case SortDecl(names):
                        for n in names:
                            sig.declare_sort(n)
                    case ConstDecl(names, ty):
                        for n in names:
                            sig.declare_const(n, ty)
                    case PredDecl(preds):
                        for p in preds:
                            sig.declare_pred(p.name, p.ty,
                                             p.level if p.level is not None else 0)
                    case AbbrevDecl(mname, params, body):
                        macros[mname] = (params, body)
                    case DefineBlock() as blk:
                        warnings.extend(
                            _process_define(sig, blk, own, macros, name))
                    case TheoremDecl(tname, rf):
                        ctx = ElabCtx(sig, macros=dict(macros))
                        f = elaborate_formula(ctx, rf)
                        if tname in theorems:
                            raise LoadError(f"duplicate theorem name {tname}")
                        theorems[tname] = f
                        unchecked.append(tname)
                    case ProofBlock(tname, raw_tactics):
                        defn = build_defn()
                        f = theorems[tname]
                        t0 = time.perf_counter()
                        tree = _run_proof(defn, tname, f, raw_tactics, proofs, macros)
                        timings[tname] = time.perf_counter() - t0
                        proofs[tname] = (f, tree)
                        if tname in unchecked:
                            unchecked.remove(tname)
            except (FoldnError, LoadError) as e:
                raise LoadError(f"{name}: {e}") from e

        defn = build_defn()
        hard = [v for v in defn.check() if not v.warning]
        if hard:
            msgs = "; ".join(f"{v.kind}: {v.message}" for v in hard)
            raise LoadError(f"{name}: definition rejected: {msgs}")
        return Unit(name, path, imports, defn, unit_clauses, macros,
                    theorems, proofs, unchecked, warnings, timings)


def _merge_signature(sig: Signature, other: Signature, where: str):
    for s in other.sorts:
        sig.sorts.add(s)
    for n, ty in other.consts.items():
        if n in sig.consts and sig.consts[n] != ty:
            raise LoadError(f"import {where}: constant {n} clashes")
        sig.consts[n] = ty
    for n, ty in other.preds.items():
        if n in sig.preds and sig.preds[n] != ty:
            raise LoadError(f"import {where}: predicate {n} clashes")
        sig.preds[n] = ty
        if n in other.levels:
            if n in sig.levels and sig.levels[n] != other.levels[n]:
                raise LoadError(f"import {where}: level of {n} clashes")
            sig.levels[n] = other.levels[n]


def _process_define(sig: Signature, blk: DefineBlock, own: list, macros, unit: str):
    inferred = set()
    for p in blk.preds:
        if blk.extend:
            if p.name not in sig.preds:
                raise LoadError(f"Extend {p.name}: predicate not declared")
        else:
            sig.declare_pred(p.name, p.ty, p.level)
            if p.level is None:
                inferred.add(p.name)
    new_clauses = []
    for rc in blk.clauses:
        ctx = ElabCtx(sig, macros=dict(macros), allow_clause_vars=True)
        c = elaborate_clause(ctx, rc)
        new_clauses.append(c)
    if inferred:
        levels = infer_levels(sig, new_clauses, inferred)
        sig.levels.update(levels)
    warnings = []
    for c in new_clauses:
        vs = check_clause(sig, c)
        hard = [v for v in vs if not v.warning]
        if hard:
            msgs = "; ".join(f"{v.kind}: {v.message}" for v in hard)
            raise LoadError(f"clause {c.label}: {msgs}")
        warnings.extend(vs)
    own.extend(new_clauses)
    return warnings


def _run_proof(defn, tname, f, raw_tactics, lemmas, macros) -> ProofTree:
    st = start_proof(defn, tname, f, lemmas={k: v for k, v in lemmas.items()})
    for k, raw in enumerate(raw_tactics):
        try:
            t = elaborate_tactic(st, raw, macros=macros)
            st = apply_tactic(st, t)
        except (FoldnError, ParseError) as e:
            from .syntax import print_sequent
            goal = print_sequent(st.subgoals()[0], sig=defn.sig) if not st.done \
                else "(no subgoals)"
            raise LoadError(
                f"proof of {tname}, step {k + 1} ({raw.name}): {e}\n{goal}")
    if not st.done:
        from .syntax import print_sequent
        raise LoadError(
            f"proof of {tname}: {len(st.holes)} subgoals remain; first:\n"
            + print_sequent(st.subgoals()[0], sig=defn.sig))
    tree = st.to_tree()
    check_proof(defn, st.root_sequent, tree)
    return tree


# ---------------------------------------------------------------------------
# Manifest


def manifest_path(paths=None) -> Path:
    for p in (paths or default_paths()):
        if (p / "manifest.txt").exists():
            return p / "manifest.txt"
    return default_paths()[-1] / "manifest.txt"


def file_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def read_manifest(paths=None) -> dict[str, tuple[str, str, str]]:
    out = {}
    mp = manifest_path(paths)
    if not mp.exists():
        return out
    for line in mp.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, fname, status, digest = line.split()
        out[name] = (fname, status, digest)
    return out


def write_manifest(root: Path) -> str:
    lines = ["# unit  file  expected-status  sha256-prefix"]
    statuses = {"natded_bad": "fails-level-check"}
    for sub in ("", "stretch/"):
        d = root / sub if sub else root
        if not d.exists():
            continue
        for f in sorted(d.glob("*.fnd")):
            name = f.stem
            status = statuses.get(name, "statements-only" if sub else "green")
            lines.append(f"{name} {sub}{f.name} {status} {file_hash(f)}")
    text = "\n".join(lines) + "\n"
    (root / "manifest.txt").write_text(text)
    return text


def verify_manifest(lib: Library) -> list[str]:
    """Check hashes and expected statuses; returns a list of problems."""
    problems = []
    man = read_manifest(lib.paths)
    root = manifest_path(lib.paths).parent
    for name, (fname, status, digest) in man.items():
        path = root / fname
        if not path.exists():
            problems.append(f"{name}: file {fname} missing")
            continue
        if file_hash(path) != digest:
            problems.append(f"{name}: content hash mismatch")
        if status == "green":
            try:
                unit = lib.load(name)
            except LoadError as e:
                problems.append(f"{name}: expected green, load failed: {e}")
                continue
            if unit.unchecked:
                problems.append(f"{name}: unchecked theorems {unit.unchecked}")
        elif status == "fails-level-check":
            try:
                lib.load(name)
                problems.append(f"{name}: expected to fail the level check, but loaded")
            except LoadError as e:
                if "LevelViolation" not in str(e):
                    problems.append(f"{name}: failed for the wrong reason: {e}")
        elif status == "statements-only":
            try:
                lib.load(name)
            except LoadError as e:
                problems.append(f"{name}: statements-only unit failed to load: {e}")
    return problems
