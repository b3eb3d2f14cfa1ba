"""Candidate row arrays for dividing checks.

An array pattern describes how copies of one row diagram may sit together:
which row elements stay constant across copies, and which atoms link two
distinct copies.  Patterns are enumerated per theory (link atoms for the
relational classes, cyclic completions for circular orders, nothing beyond
identifications for generic functions), deduplicated up to isomorphism over
the base, and screened by instantiating three rows and checking class
membership.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..structures import (
    BudgetExceeded,
    FinStructure,
    SignatureError,
    StructureBuilder,
    canonical_code,
)
from ..theories import TheorySpec, atom_variants, cyclic_arrangement, in_class
from ..typespace import acl

# tagged template elements: ("s", e) is shared (base closure or constant
# across rows), (0, e) and (1, e) are the two row copies of a moving element


@dataclass(frozen=True)
class ArrayPattern:
    base_struct: FinStructure  # substructure on the closed base, ambient ids
    row_struct: FinStructure  # row diagram including the base part, ambient ids
    row_coords: tuple  # tuple coordinates (ambient ids, may meet the base)
    moving: tuple  # row elements outside the base closure, sorted
    const_elems: frozenset  # moving elements shared by all rows
    cross_atoms: tuple  # ("rel", name, tagged-args) linking two row copies
    code: bytes  # canonical code of the two-row instance

    def describe(self) -> str:
        parts = [f"{len(self.moving)} moving", f"{len(self.const_elems)} constant"]
        parts.append(f"{len(self.cross_atoms)} link atoms")
        return ", ".join(parts)

    def with_cross(self, cross) -> "ArrayPattern":
        return ArrayPattern(self.base_struct, self.row_struct, self.row_coords,
                            self.moving, self.const_elems, tuple(cross), b"")


@dataclass(frozen=True)
class Inconsistent:
    reason: str


@dataclass
class ArrayInstance:
    structure: FinStructure
    base_map: dict  # ambient base id -> instance id
    row_maps: list  # per row: ambient row id -> instance id

    def coord_ids(self, pattern: ArrayPattern, i: int) -> tuple:
        """Instance ids of the row coordinates in row i."""
        return tuple(self.row_maps[i][c] for c in pattern.row_coords)


def _close_constants(row: FinStructure, base: frozenset, subset: set) -> frozenset:
    """Congruence closure of a constant-across-rows candidate set.

    A pair element is constant exactly when both its base points are, and a
    function value over constant arguments cannot vary between rows."""
    s = set(subset)
    changed = True
    while changed:
        changed = False
        for reg in row.pairs.values():
            for p, xy in reg.items():
                if p in base:
                    continue
                if p in s and not (xy <= s | base):
                    s |= set(xy - base)
                    changed = True
                if p not in s and xy <= s | base:
                    s.add(p)
                    changed = True
        for rows in row.funs.values():
            for r in rows:
                if set(r[:-1]) <= s | base and r[-1] not in s | base:
                    s.add(r[-1])
                    changed = True
    return frozenset(s)


def instantiate_array(t: TheorySpec, pattern: ArrayPattern, k: int):
    """Lay out k rows of the pattern; returns ArrayInstance or Inconsistent.

    Link atoms are applied to every ordered pair of distinct rows, so the
    result is the diagram an order-indiscernible sequence would have to
    carry.  Identification conflicts (a pair registered over two different
    bases, say) and class violations both yield Inconsistent."""
    bld = StructureBuilder(t.signature)
    base_map: dict = {}
    for e in sorted(pattern.base_struct.sort_of):
        base_map[e] = bld.add_element(pattern.base_struct.sort_of[e])
    cmap: dict = {}
    for e in sorted(pattern.const_elems):
        cmap[e] = bld.add_element(pattern.row_struct.sort_of[e])
    row_maps = []
    for _ in range(k):
        rm = dict(base_map)
        rm.update(cmap)
        for e in pattern.moving:
            if e not in pattern.const_elems:
                rm[e] = bld.add_element(pattern.row_struct.sort_of[e])
        row_maps.append(rm)
    try:
        for name, e in pattern.base_struct.consts.items():
            bld.set_constant(name, base_map[e])
        bld.copy_atoms_from(pattern.base_struct, base_map)
        for rm in row_maps:
            bld.copy_atoms_from(pattern.row_struct, rm)

        def resolve(tag, i, j):
            side, e = tag
            if side == "s":
                return base_map[e] if e in base_map else cmap[e]
            return row_maps[i][e] if side == 0 else row_maps[j][e]

        for i in range(k):
            for j in range(k):
                if i >= j:
                    continue
                for _, name, args in pattern.cross_atoms:
                    row = tuple(resolve(a, i, j) for a in args)
                    for variant in atom_variants(t, name, row):
                        bld.add_rel(name, variant)
        s = bld.build()
    except SignatureError as exc:
        return Inconsistent(f"identification conflict: {exc}")
    bad = in_class(t, s)
    if bad:
        return Inconsistent("; ".join(v.condition for v in bad))
    return ArrayInstance(s, base_map, row_maps)


def _cross_slots(t: TheorySpec, pattern_row: FinStructure, base: frozenset,
                 const: frozenset, moving: tuple) -> list:
    """Candidate link atoms between two row copies, one per symmetry class."""
    shared = sorted(base | const)
    excl = [e for e in moving if e not in const]
    slots = []
    seen = set()
    for rname, sorts in t.signature.relations:
        pools = []
        for s in sorts:
            pool = [("s", e) for e in shared if pattern_row.sort_of[e] == s]
            pool += [(0, e) for e in excl if pattern_row.sort_of[e] == s]
            pool += [(1, e) for e in excl if pattern_row.sort_of[e] == s]
            pools.append(pool)
        for args in itertools.product(*pools):
            sides = {a[0] for a in args}
            if not (0 in sides and 1 in sides):
                continue
            if len({(a[0], a[1]) for a in args}) != len(args):
                continue  # repeated element, never a fresh link atom
            # symmetry classes: R(v, w, c) equals R(w, v, c)
            key = min(_tag_variants(t, rname, args), key=_tag_key)
            if key in seen:
                continue
            seen.add(key)
            slots.append(("rel", rname, key))
    slots.sort(key=lambda sl: (sl[1], _tag_key(sl[2])))
    return slots


def _tag_key(args: tuple) -> tuple:
    return tuple((str(side), e) for side, e in args)


def _tag_variants(t: TheorySpec, rname: str, args: tuple):
    if t.kind == "og" and rname == "R":
        v, w, c = args
        return [(v, w, c), (w, v, c)]
    if t.kind == "circular" and rname == "cyc":
        x, y, z = args
        return [(x, y, z), (y, z, x), (z, x, y)]
    return [args]


def _relational_link_sets(t: TheorySpec, pattern: ArrayPattern, budget: int):
    """Depth-first search over subsets of link slots, pruning any partial
    set whose two-row layout already leaves the class."""
    slots = _cross_slots(t, pattern.row_struct, frozenset(pattern.base_struct.sort_of),
                         pattern.const_elems, pattern.moving)
    out = []

    def ok(chosen):
        return not isinstance(instantiate_array(t, pattern.with_cross(chosen), 2),
                              Inconsistent)

    def walk(i, chosen):
        if len(out) >= budget:
            return
        if i == len(slots):
            out.append(tuple(chosen))
            return
        walk(i + 1, chosen)
        chosen.append(slots[i])
        if ok(chosen):
            walk(i + 1, chosen)
        chosen.pop()

    walk(0, [])
    return out


def _circular_link_sets(t: TheorySpec, pattern: ArrayPattern, budget: int):
    """Link sets for circular orders: every way two row copies can be
    completed to one cyclic order, recorded as the mixed-orientation atoms."""
    skeleton = instantiate_array(t, pattern.with_cross(()), 2)
    if isinstance(skeleton, Inconsistent):
        return []
    s = skeleton.structure
    # tag lookup for instance ids of the two rows
    tag_of = {}
    for e in pattern.base_struct.sort_of:
        tag_of[skeleton.base_map[e]] = ("s", e)
    for e in pattern.const_elems:
        tag_of[skeleton.row_maps[0][e]] = ("s", e)
    for i in (0, 1):
        for e in pattern.moving:
            if e not in pattern.const_elems:
                tag_of[skeleton.row_maps[i][e]] = (i, e)
    points = sorted(e for e in s.elements("O"))
    present = s.rels.get("cyc", frozenset())
    if len(points) < 3:
        return [()]
    out = []
    seen = set()
    first, rest = points[0], points[1:]

    def orientations(order):
        atoms = set()
        n = len(order)
        for a, b, c in itertools.combinations(range(n), 3):
            atoms |= atom_variants(t, "cyc", (order[a], order[b], order[c]))
        return atoms

    for perm in itertools.permutations(rest):
        order = (first,) + perm
        atoms = orientations(order)
        if not present <= atoms:
            continue
        cross = []
        undecided_same_row = False
        for row in sorted(atoms - present):
            tags = tuple(tag_of[e] for e in row)
            sides = {x[0] for x in tags}
            if not (0 in sides and 1 in sides):
                # order decides a same-row triple the diagram left open;
                # such triples cannot be stored as link templates
                undecided_same_row = True
                break
            cross.append(("rel", "cyc", tags))
        if undecided_same_row:
            continue
        key = frozenset(cross)
        if key not in seen:
            seen.add(key)
            out.append(tuple(sorted(cross, key=lambda c: _tag_key(c[2]))))
        if len(out) >= budget:
            break
    return out


def enumerate_patterns(
    t: TheorySpec,
    amb: FinStructure,
    coords: tuple,
    base,
    pattern_budget: int = 10000,
) -> list[ArrayPattern]:
    """All valid array patterns for copies of the given tuple over base.

    The row diagram is the closure of base and tuple; coordinates inside
    the base closure stay fixed in every row.  Patterns failing the
    three-row class check are dropped; survivors are deduplicated by the
    canonical code of their two-row layout (base and coordinates held
    fixed, auxiliary closure elements free) and returned in code order."""
    base_cl = acl(t, amb, set(base)).closure
    row_cl = acl(t, amb, set(base) | set(coords)).closure
    base_struct = amb.restrict(base_cl)
    row_struct = amb.restrict(row_cl | base_cl)
    moving = tuple(sorted(set(row_struct.sort_of) - base_cl))

    candidates = []
    for bits in itertools.product((False, True), repeat=len(moving)):
        subset = {e for e, b in zip(moving, bits) if b}
        closed = _close_constants(row_struct, base_cl, subset)
        if closed != frozenset(subset):
            continue  # its closure shows up as another subset
        skel = ArrayPattern(base_struct, row_struct, coords, moving, closed, (), b"")
        if t.kind == "circular":
            link_sets = _circular_link_sets(t, skel, pattern_budget)
        elif t.kind == "generic_function":
            link_sets = [()]  # links between rows are never forced in class
        else:
            link_sets = _relational_link_sets(t, skel, pattern_budget)
        for cross in link_sets:
            candidates.append(skel.with_cross(cross))
            if len(candidates) >= pattern_budget:
                break
        if len(candidates) >= pattern_budget:
            break

    out = []
    seen = set()
    for cand in candidates:
        if isinstance(instantiate_array(t, cand, 3), Inconsistent):
            continue
        two = instantiate_array(t, cand, 2)
        if isinstance(two, Inconsistent):
            continue
        colors = {}
        for e, i in two.base_map.items():
            colors[i] = ("base", e)
        for i in (0, 1):
            for e in cand.moving:
                colors[two.row_maps[i][e]] = ("row", i)
        for i in (0, 1):
            for pos, c in enumerate(coords):
                colors[two.row_maps[i].get(c, two.base_map.get(c))] = ("coord", i, pos)
        code = canonical_code(two.structure, colors)
        if code in seen:
            continue
        seen.add(code)
        out.append(ArrayPattern(cand.base_struct, cand.row_struct, cand.row_coords,
                                cand.moving, cand.const_elems, cand.cross_atoms, code))
    out.sort(key=lambda p: p.code)
    return out
