"""Plain-text structure literals.

A literal names every element, then lists atomic facts, one per line:

    # anything after '#' is a comment
    sort O: a, d1, d2
    sort G: v
    constant 0 = c0
    pair b = {d1, d2}
    cyc(d1, a, d2)
    f(a, d2) = d1

The signature comes from the theory; the document only mentions symbol
names it defines.  parse_structure and format_structure round-trip.
"""

from __future__ import annotations

import re

from .structures import FinStructure, Signature, StructureBuilder


class LiteralError(ValueError):
    """Malformed structure literal."""


_SORT = re.compile(r"^sort\s+(\w+)\s*:\s*(.*)$")
_CONST = re.compile(r"^constant\s+([\w']+)\s*=\s*([\w']+)$")
_PAIR = re.compile(r"^pair\s+([\w']+)\s*=\s*\{\s*([\w']+)\s*(?:,\s*([\w']+)\s*)?\}$")
_FUN = re.compile(r"^(\w+)\s*\(([^)]*)\)\s*=\s*([\w']+)$")
_REL = re.compile(r"^(\w+)\s*\(([^)]*)\)$")


def parse_structure(text: str, signature: Signature):
    """Parse a literal against signature.  Returns (structure, name -> id)."""
    b = StructureBuilder(signature)
    names: dict = {}
    rel_names = {n for n, _ in signature.relations}
    fun_names = {n for n, _, _ in signature.functions}

    def elem(name: str, sort: str | None = None) -> int:
        if name not in names:
            if sort is None:
                raise LiteralError(f"element {name} used before its sort declaration")
            names[name] = b.add_element(sort)
        return names[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _SORT.match(line):
                sort, rest = m.group(1), m.group(2).strip()
                for name in filter(None, re.split(r"[,\s]+", rest)):
                    if name in names:
                        raise LiteralError(f"element {name} declared twice")
                    names[name] = b.add_element(sort)
            elif m := _CONST.match(line):
                b.set_constant(m.group(1), elem(m.group(2)))
            elif m := _PAIR.match(line):
                pname, x, y = m.groups()
                points = [elem(x)] + ([elem(y)] if y else [])
                base_sort = b.sort_of[points[0]]
                psorts = [pn for pn, bs in signature.pair_sorts if bs == base_sort]
                if len(psorts) != 1:
                    raise LiteralError(f"no unique pair sort over {base_sort}")
                if pname in names:
                    raise LiteralError(f"element {pname} declared twice")
                names[pname] = b.add_pair(psorts[0], points)
            elif (m := _FUN.match(line)) and m.group(1) in fun_names:
                fname = m.group(1)
                args = [elem(a.strip()) for a in m.group(2).split(",")]
                b.add_fun(fname, tuple(args), elem(m.group(3)))
            elif (m := _REL.match(line)) and m.group(1) in rel_names:
                rname = m.group(1)
                args = [elem(a.strip()) for a in m.group(2).split(",")]
                b.add_rel(rname, tuple(args))
            else:
                raise LiteralError(f"unrecognized line: {line!r}")
        except LiteralError as exc:
            raise LiteralError(f"line {lineno}: {exc}") from None
    return b.build(), names


def format_structure(s: FinStructure, names: dict | None = None) -> str:
    """Write s as a literal.  names maps element id -> name; missing names
    are generated from the sort."""
    names = dict(names or {})
    counters: dict = {}
    for e in s.elements():
        if e not in names:
            sort = s.sort_of[e]
            counters[sort] = counters.get(sort, 0)
            while f"{sort.lower()}{counters[sort]}" in names.values():
                counters[sort] += 1
            names[e] = f"{sort.lower()}{counters[sort]}"
            counters[sort] += 1
    lines = []
    pair_sorts = s.signature.pair_sort_names
    for sort in s.signature.sorts:
        if sort in pair_sorts:
            continue
        elems = s.elements(sort)
        if elems:
            lines.append(f"sort {sort}: " + ", ".join(names[e] for e in elems))
    for cname in sorted(s.consts):
        lines.append(f"constant {cname} = {names[s.consts[cname]]}")
    for pname in sorted(s.pairs):
        for p in sorted(s.pairs[pname]):
            pts = ", ".join(names[x] for x in sorted(s.pairs[pname][p]))
            lines.append(f"pair {names[p]} = {{{pts}}}")
    for name in sorted(s.rels):
        for row in sorted(s.rels[name]):
            lines.append(f"{name}(" + ", ".join(names[x] for x in row) + ")")
    for name in sorted(s.funs):
        for row in sorted(s.funs[name]):
            args = ", ".join(names[x] for x in row[:-1])
            lines.append(f"{name}({args}) = {names[row[-1]]}")
    return "\n".join(lines) + "\n"
