"""Quantifier-free formulas over a fixed ambient structure.

Formulas carry named free variables plus parameters, which are element ids
of some ambient structure.  Literals are plain tuples so grounded literals
can be collected into sets and compared directly.

Term encoding: ``("v", name)`` for a variable, ``("e", elem_id)`` for a
parameter.  Literal encodings:

    ("rel", rname, args, positive)
    ("fun", fname, args, value_term)      # always positive
    ("pair", pair_term, base_terms)       # always positive
    ("eq", left, right, positive)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..structures import FinStructure, Signature
from ..theories import TheorySpec, atom_variants

Term = tuple


class FormulaError(ValueError):
    pass


def var(name: str) -> Term:
    return ("v", name)


def elem(eid) -> Term:
    return ("e", eid)


@dataclass(frozen=True)
class QFFormula:
    """Conjunction of literals with sorted free variables."""

    literals: tuple
    var_sorts: tuple  # ((name, sort), ...) sorted by name

    def variables(self) -> tuple:
        return tuple(n for n, _ in self.var_sorts)

    def sort_of(self, name: str) -> str:
        for n, s in self.var_sorts:
            if n == name:
                return s
        raise FormulaError(f"unknown variable {name!r}")

    def params(self) -> frozenset:
        out = set()
        for lit in self.literals:
            for t in _literal_terms(lit):
                if t[0] == "e":
                    out.add(t[1])
        return frozenset(out)


@dataclass(frozen=True)
class ExFormula:
    """QF matrix with a chosen subset of variables existentially bound."""

    matrix: QFFormula
    witnesses: tuple  # variable names, sorted

    def free_variables(self) -> tuple:
        bound = set(self.witnesses)
        return tuple(n for n in self.matrix.variables() if n not in bound)


def _literal_terms(lit) -> tuple:
    kind = lit[0]
    if kind == "rel":
        return lit[2]
    if kind == "fun":
        return lit[2] + (lit[3],)
    if kind == "pair":
        return (lit[1],) + lit[2]
    if kind == "eq":
        return (lit[1], lit[2])
    raise FormulaError(f"bad literal kind {kind!r}")


def _ground_term(t: Term, assignment: dict):
    if t[0] == "e":
        return t[1]
    name = t[1]
    if name not in assignment:
        raise FormulaError(f"unassigned variable {name!r}")
    return assignment[name]


def ground(lit, assignment: dict):
    """Substitute element ids for variables, yielding an id-only literal."""
    kind = lit[0]
    if kind == "rel":
        return ("rel", lit[1], tuple(_ground_term(t, assignment) for t in lit[2]), lit[3])
    if kind == "fun":
        return ("fun", lit[1], tuple(_ground_term(t, assignment) for t in lit[2]),
                _ground_term(lit[3], assignment))
    if kind == "pair":
        return ("pair", _ground_term(lit[1], assignment),
                tuple(_ground_term(t, assignment) for t in lit[2]))
    if kind == "eq":
        return ("eq", _ground_term(lit[1], assignment), _ground_term(lit[2], assignment), lit[3])
    raise FormulaError(f"bad literal kind {kind!r}")


def holds(s: FinStructure, glit) -> bool:
    """Evaluate a grounded literal against the atoms present in s.

    An absent relation atom counts as a satisfied negative literal; callers
    working with partial diagrams must decide separately whether absence is
    meaningful (for completed structures it always is)."""
    kind = glit[0]
    if kind == "rel":
        _, name, row, pos = glit
        return (row in s.rels.get(name, frozenset())) == pos
    if kind == "fun":
        _, name, row, val = glit
        return row + (val,) in s.funs.get(name, frozenset())
    if kind == "pair":
        _, p, base = glit
        for reg in s.pairs.values():
            if p in reg:
                return reg[p] == frozenset(base)
        return False
    if kind == "eq":
        _, a, b, pos = glit
        return (a == b) == pos
    raise FormulaError(f"bad literal kind {kind!r}")


def diagram_formula(t: TheorySpec, amb: FinStructure, left: tuple, over: frozenset,
                    vnames: tuple | None = None) -> QFFormula:
    """Quantifier-free diagram of a tuple with the given parameter set.

    Replaces each coordinate of ``left`` by a fresh variable and records
    every atom of the substructure on left+over that touches the tuple,
    plus negative literals for absent relation rows over the same elements
    and distinctness constraints."""
    touched = set(left)
    keep = touched | set(over)
    sub = amb.restrict(keep)
    keep = frozenset(sub.sort_of)  # restrict may widen with pair points
    if vnames is None:
        vnames = tuple(f"x{i}" for i in range(len(left)))
    if len(vnames) != len(left):
        raise FormulaError("one variable name per tuple coordinate")
    name_of = dict(zip(left, vnames))
    tmap = {e: var(v) for e, v in name_of.items()}

    def term(e):
        return tmap.get(e, elem(e))

    lits = []
    for atom in sub.atoms():
        if not (sub.atom_elems(atom) & touched):
            continue
        if atom[0] == "rel":
            lits.append(("rel", atom[1], tuple(term(e) for e in atom[2]), True))
        elif atom[0] == "fun":
            row = atom[2]
            lits.append(("fun", atom[1], tuple(term(e) for e in row[:-1]), term(row[-1])))
        else:
            lits.append(("pair", term(atom[2]), tuple(term(e) for e in sorted(atom[3]))))
    # absent relation rows touching the tuple become negative literals, one
    # representative per symmetry class
    by_sort = {}
    for e in keep:
        by_sort.setdefault(sub.sort_of[e], []).append(e)
    for rows in by_sort.values():
        rows.sort()
    import itertools
    for rname, sorts in t.signature.relations:
        pools = [by_sort.get(s, []) for s in sorts]
        present = sub.rels.get(rname, frozenset())
        seen = set()
        for row in itertools.product(*pools):
            if row in present or not (set(row) & touched):
                continue
            variants = atom_variants(t, rname, row)
            if variants & present or variants & seen:
                continue
            seen.add(row)
            lits.append(("rel", rname, tuple(term(e) for e in row), False))
    # tuple coordinates are pairwise distinct and distinct from parameters
    others = sorted(keep - touched)
    for i, e in enumerate(left):
        for f in left[i + 1:]:
            if e != f:
                lits.append(("eq", term(e), term(f), False))
        for o in others:
            lits.append(("eq", term(e), elem(o), False))
    vs = tuple(sorted((v, amb.sort_of[e]) for e, v in name_of.items()))
    return QFFormula(tuple(lits), vs)


_ATOM = re.compile(r"^(!?)\s*(\w+)\s*\(([^)]*)\)\s*(?:=\s*(\w+))?$")
_EQ = re.compile(r"^(\w+)\s*(!?=)\s*(\w+)$")


def parse_formula(text: str, signature: Signature, names: dict) -> QFFormula:
    """Parse a conjunction like ``E(x, b, 0) & !E(x, b, 1)``.

    ``names`` maps identifiers to ambient element ids; bare identifiers not
    in the map become variables whose sorts are inferred from the slots
    they occupy.  ``pair(x, y) = p`` registers a pair atom; ``f(x, y) = z``
    a function entry; ``a != b`` a negated equality."""
    sort_by_id = None
    var_sorts: dict = {}
    lits = []

    def term_for(tok, slot_sort):
        if tok in names:
            return elem(names[tok])
        if tok in var_sorts:
            if slot_sort is not None and var_sorts[tok] != slot_sort:
                raise FormulaError(f"variable {tok!r} used at sorts "
                                   f"{var_sorts[tok]} and {slot_sort}")
        elif slot_sort is not None:
            var_sorts[tok] = slot_sort
        else:
            raise FormulaError(f"cannot infer sort of variable {tok!r}")
        return var(tok)

    for clause in text.split("&"):
        clause = clause.strip()
        if not clause:
            raise FormulaError("empty conjunct")
        m = _ATOM.match(clause)
        if m:
            neg, name, argtxt, val = m.group(1) == "!", m.group(2), m.group(3), m.group(4)
            args = [a.strip() for a in argtxt.split(",")] if argtxt.strip() else []
            if name == "pair":
                if val is None:
                    raise FormulaError(f"pair atom needs '= p': {clause!r}")
                if neg:
                    raise FormulaError("negated pair atoms are not supported")
                if len(signature.pair_sorts) != 1:
                    raise FormulaError("pair atom is ambiguous without a unique pair sort")
                pname, base_sort = signature.pair_sorts[0]
                lits.append(("pair", term_for(val, pname),
                             tuple(term_for(a, base_sort) for a in args)))
                continue
            if name in {n for n, _ in signature.relations}:
                sorts = signature.rel_sorts(name)
                if val is not None:
                    raise FormulaError(f"relation atom cannot have '=': {clause!r}")
                if len(args) != len(sorts):
                    raise FormulaError(f"{name} expects {len(sorts)} arguments")
                lits.append(("rel", name, tuple(term_for(a, s) for a, s in zip(args, sorts)),
                             not neg))
                continue
            if name in {n for n, _, _ in signature.functions}:
                arg_sorts, out_sort = signature.fun_sorts(name)
                if val is None:
                    raise FormulaError(f"function atom needs '= value': {clause!r}")
                if neg:
                    raise FormulaError("negated function atoms are not supported")
                if len(args) != len(arg_sorts):
                    raise FormulaError(f"{name} expects {len(arg_sorts)} arguments")
                lits.append(("fun", name, tuple(term_for(a, s) for a, s in zip(args, arg_sorts)),
                             term_for(val, out_sort)))
                continue
            raise FormulaError(f"unknown symbol {name!r}")
        m = _EQ.match(clause)
        if m:
            a, op, b = m.groups()
            sa = var_sorts.get(a)
            sb = var_sorts.get(b)
            # equality gives no slot sorts; borrow from the other side
            ta = term_for(a, sa if a not in names else None) if a not in names else elem(names[a])
            tb = term_for(b, sb if b not in names else None) if b not in names else elem(names[b])
            lits.append(("eq", ta, tb, op == "="))
            continue
        raise FormulaError(f"cannot parse conjunct: {clause!r}")
    vs = tuple(sorted(var_sorts.items()))
    return QFFormula(tuple(lits), vs)
