"""Builtin theory classes and membership checks.

A TheorySpec packages the signature of a theory with its class conditions
(named, individually checkable universal conditions on finite structures),
flags describing which engine features apply, and enough metadata to
complete a partial member into a fuller one.

Builtin theories:

* circular          dense cyclic order with a pair sort: members are partial
                    cyclic-order diagrams extendable to a total cyclic order
* generic_function  one generic binary function with a pair sort: members are
                    single-valued partial function tables
* og                two-sorted colored graphs (colors 0, 1) with an
                    object-to-vertex edge relation; a colored graph edge
                    excludes common edge witnesses of the same color
* incidence         point/line incidences with no complete bipartite
                    configuration of m points on n lines (default 4, 2)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .structures import FinStructure, Signature, StructureBuilder, extend_builder


class NoCompletion(RuntimeError):
    """The structure admits no completion within budget."""


@dataclass(frozen=True)
class ClassViolation:
    condition: str
    detail: str
    elems: tuple = ()


@dataclass(frozen=True)
class TheorySpec:
    name: str
    kind: str  # dispatch key; survives corrupted copies
    signature: Signature
    conditions: tuple  # of (condition name, fn(FinStructure) -> [ClassViolation])
    flags: frozenset
    params: tuple = ()

    def drop_condition(self, cname: str) -> "TheorySpec":
        kept = tuple((n, f) for n, f in self.conditions if n != cname)
        if len(kept) == len(self.conditions):
            raise KeyError(cname)
        return replace(self, name=f"{self.name}-without-{cname}", conditions=kept)


def in_class(t: TheorySpec, s: FinStructure) -> list[ClassViolation]:
    """All class violations; empty means s is a member of t's class."""
    if s.signature != t.signature:
        return [ClassViolation("signature", "structure signature differs from theory")]
    out = []
    for _, fn in t.conditions:
        out.extend(fn(s))
    return out


# -- circular ------------------------------------------------------------------


def cyclic_arrangement(points, triples) -> list | None:
    """A circular arrangement of points satisfying every cyc triple, or None.

    Places points one at a time into every gap of the partial cycle,
    rejecting a placement as soon as a fully-placed triple fails.
    """
    points = sorted(points)
    triples = [tr for tr in triples]

    def holds(order, x, y, z):
        i, j, k = order.index(x), order.index(y), order.index(z)
        return (i < j < k) or (j < k < i) or (k < i < j)

    def place(order, rest):
        if not rest:
            return list(order)
        p, *tail = rest
        for gap in range(max(1, len(order))):
            cand = order[: gap + 1] + [p] + order[gap + 1:]
            ok = True
            for x, y, z in triples:
                if {x, y, z} <= set(cand) and not holds(cand, x, y, z):
                    ok = False
                    break
            if ok:
                got = place(cand, tail)
                if got is not None:
                    return got
        return None

    return place([], points)


def _check_cyclic(s: FinStructure) -> list[ClassViolation]:
    out = []
    triples = []
    for row in s.rels.get("cyc", ()):
        if len(set(row)) != 3:
            out.append(ClassViolation("cyclic-order", f"repeated argument in cyc{row}", row))
        else:
            triples.append(row)
    if out:
        return out
    if cyclic_arrangement(s.elements("O"), triples) is None:
        out.append(ClassViolation("cyclic-order", "cyc diagram extends to no cyclic order"))
    return out


def _circular() -> TheorySpec:
    sig = Signature(
        sorts=("O", "P"),
        relations=(("cyc", ("O", "O", "O")),),
        pair_sorts=(("P", "O"),),
    )
    return TheorySpec(
        name="circular",
        kind="circular",
        signature=sig,
        conditions=(("cyclic-order", _check_cyclic),),
        flags=frozenset({"dense_completion"}),
    )


# -- generic function ----------------------------------------------------------


def _check_functional(s: FinStructure) -> list[ClassViolation]:
    out = []
    for name, rows in s.funs.items():
        byargs: dict = {}
        for row in rows:
            byargs.setdefault(row[:-1], set()).add(row[-1])
        for args, vals in sorted(byargs.items()):
            if len(vals) > 1:
                out.append(ClassViolation(
                    "single-valued",
                    f"{name}{args} has values {sorted(vals)}",
                    args,
                ))
    return out


def _generic_function() -> TheorySpec:
    sig = Signature(
        sorts=("O", "P"),
        functions=(("f", ("O", "O"), "O"),),
        pair_sorts=(("P", "O"),),
    )
    return TheorySpec(
        name="generic_function",
        kind="generic_function",
        signature=sig,
        conditions=(("single-valued", _check_functional),),
        flags=frozenset({"functional"}),
    )


# -- og: colored graphs with excluded edge witnesses ----------------------------


def _check_two_colors(s: FinStructure) -> list[ClassViolation]:
    out = []
    named = s.constant_elems
    for e in s.elements("C"):
        if e not in named:
            out.append(ClassViolation("two-colors", f"color element {e} is unnamed", (e,)))
    return out


def _check_colored_graphs(s: FinStructure) -> list[ClassViolation]:
    out = []
    rows = s.rels.get("R", frozenset())
    for v, w, c in sorted(rows):
        if v == w:
            out.append(ClassViolation("colored-graphs", f"loop R({v},{v},{c})", (v, c)))
        if (w, v, c) not in rows:
            out.append(ClassViolation(
                "colored-graphs", f"R({v},{w},{c}) without R({w},{v},{c})", (v, w, c)))
    for v, w in {(min(v, w), max(v, w)) for v, w, _ in rows}:
        colors = {c for x, y, c in rows if {x, y} == {v, w}}
        if len(colors) > 1:
            out.append(ClassViolation(
                "colored-graphs", f"edge {{{v},{w}}} carries two colors", (v, w)))
    return out


def _check_edge_witness(s: FinStructure) -> list[ClassViolation]:
    out = []
    erows = s.rels.get("E", frozenset())
    for v, w, c in sorted(s.rels.get("R", frozenset())):
        if v < w:
            for o in s.elements("O"):
                if (o, v, c) in erows and (o, w, c) in erows:
                    out.append(ClassViolation(
                        "edge-witness-exclusion",
                        f"R({v},{w},{c}) with common witness E({o},-,{c})",
                        (o, v, w, c),
                    ))
    return out


def _og() -> TheorySpec:
    sig = Signature(
        sorts=("O", "G", "C"),
        relations=(("R", ("G", "G", "C")), ("E", ("O", "G", "C"))),
        constants=(("0", "C"), ("1", "C")),
    )
    return TheorySpec(
        name="og",
        kind="og",
        signature=sig,
        conditions=(
            ("two-colors", _check_two_colors),
            ("colored-graphs", _check_colored_graphs),
            ("edge-witness-exclusion", _check_edge_witness),
        ),
        flags=frozenset({"free_amalgamation"}),
    )


# -- incidence(m, n) -------------------------------------------------------------


def _check_incidence(m: int, n: int):
    def check(s: FinStructure) -> list[ClassViolation]:
        out = []
        rows = s.rels.get("I", frozenset())
        on_line: dict = {l: set() for l in s.elements("L")}
        for p, l in rows:
            on_line[l].add(p)
        for lines in itertools.combinations(s.elements("L"), n):
            common = set.intersection(*(on_line[l] for l in lines))
            if len(common) >= m:
                out.append(ClassViolation(
                    "no-complete-bipartite",
                    f"{len(common)} points common to lines {lines}",
                    tuple(sorted(common)) + lines,
                ))
        return out

    return check


def _incidence(m: int = 4, n: int = 2) -> TheorySpec:
    sig = Signature(sorts=("P", "L"), relations=(("I", ("P", "L")),))
    return TheorySpec(
        name=f"incidence_{m}_{n}",
        kind="incidence",
        signature=sig,
        conditions=(("no-complete-bipartite", _check_incidence(m, n)),),
        flags=frozenset({"free_amalgamation"}),
        params=(m, n),
    )


_BUILTINS = {
    "circular": _circular,
    "generic_function": _generic_function,
    "og": _og,
    "incidence_4_2": _incidence,
}


def builtin(name: str) -> TheorySpec:
    """A builtin theory by its catalog name."""
    norm = name.replace("-", "_")
    if norm not in _BUILTINS:
        raise KeyError(f"unknown theory {name!r}; have {sorted(_BUILTINS)}")
    return _BUILTINS[norm]()


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


# -- completion ------------------------------------------------------------------


def atom_variants(t: TheorySpec, rname: str, row: tuple) -> frozenset:
    """All relation rows implied by one row under the theory's symmetries:
    cyc is rotation-invariant, the colored graph relation R is symmetric in
    its first two arguments.  Builders add whole variant classes at once so
    diagrams stay closed."""
    if t.kind == "circular" and rname == "cyc":
        x, y, z = row
        return frozenset({(x, y, z), (y, z, x), (z, x, y)})
    if t.kind == "og" and rname == "R":
        v, w, c = row
        return frozenset({(v, w, c), (w, v, c)})
    return frozenset({row})


def rotation_closed(rows) -> frozenset:
    """cyc is invariant under cyclic rotation of its arguments; diagrams are
    stored rotation-closed so isomorphism tests compare like with like."""
    out = set()
    for x, y, z in rows:
        out |= {(x, y, z), (y, z, x), (z, x, y)}
    return frozenset(out)


def complete_in_class(
    t: TheorySpec, s: FinStructure, seed: int = 0, fresh_budget: int = 4
) -> FinStructure:
    """A class member extending s with a fully determined diagram.

    circular: the first cyclic arrangement consistent with s, with all cyc
    rows filled in.  generic_function: missing f values all routed to one
    fresh absorbing idempotent.  Free-amalgamation theories are returned
    unchanged (their members need no completion).  Deterministic given seed.
    """
    bad = in_class(t, s)
    if bad:
        raise NoCompletion(f"not a class member: {bad[0].detail}")
    if t.kind == "circular":
        order = cyclic_arrangement(s.elements("O"), s.rels.get("cyc", ()))
        if order is None:
            raise NoCompletion("no cyclic arrangement")
        b = extend_builder(s)
        for i, j, k in itertools.permutations(range(len(order)), 3):
            if (i < j < k) or (j < k < i) or (k < i < j):
                b.add_rel("cyc", (order[i], order[j], order[k]))
        b.rels["cyc"] = set(rotation_closed(b.rels["cyc"]))
        return b.build()
    if t.kind == "generic_function":
        missing = []
        elems = s.elements("O")
        defined = {row[:-1] for row in s.funs.get("f", ())}
        for pair in itertools.product(elems, repeat=2):
            if pair not in defined:
                missing.append(pair)
        if not missing:
            return s
        if fresh_budget < 1:
            raise NoCompletion("needs one fresh element")
        b = extend_builder(s)
        z = b.add_element("O")
        for pair in missing:
            b.add_fun("f", pair, z)
        for u in (*elems, z):
            b.add_fun("f", (z, u), z)
            b.add_fun("f", (u, z), z)
        return b.build()
    return s
