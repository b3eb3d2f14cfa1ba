"""Finite multi-sorted structures with partial function tables and pair sorts.

Elements are opaque integer ids scoped to a single structure.  A structure
carries relation tables, partial function tables (stored as graphs, so a
malformed source can record two values for one argument tuple and a class
check can report it), named constants, and "pair sorts": sorts whose
elements stand for unordered pairs {x, y} of a base sort, registered
explicitly one pair element per base pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class SignatureError(ValueError):
    """Malformed signature or structure data."""


class BudgetExceeded(RuntimeError):
    """A closure computation exceeded its iteration budget."""


@dataclass(frozen=True)
class Signature:
    """Sorts, relation symbols, function symbols, constants, pair sorts.

    relations: tuple of (name, argument sorts)
    functions: tuple of (name, argument sorts, result sort)
    constants: tuple of (name, sort)
    pair_sorts: tuple of (pair sort name, base sort name)
    """

    sorts: tuple[str, ...] = ()
    relations: tuple[tuple[str, tuple[str, ...]], ...] = ()
    functions: tuple[tuple[str, tuple[str, ...], str], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    pair_sorts: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        known = set(self.sorts)
        if len(known) != len(self.sorts):
            raise SignatureError("duplicate sort name")
        names = []
        for name, args in self.relations:
            names.append(name)
            for s in args:
                if s not in known:
                    raise SignatureError(f"relation {name}: unknown sort {s}")
        for name, args, res in self.functions:
            names.append(name)
            for s in (*args, res):
                if s not in known:
                    raise SignatureError(f"function {name}: unknown sort {s}")
        for name, s in self.constants:
            names.append(name)
            if s not in known:
                raise SignatureError(f"constant {name}: unknown sort {s}")
        for pname, base in self.pair_sorts:
            if pname not in known or base not in known:
                raise SignatureError(f"pair sort {pname}: unknown sort")
            if pname == base:
                raise SignatureError(f"pair sort {pname} cannot be its own base")
        if len(set(names)) != len(names):
            raise SignatureError("duplicate symbol name")

    def rel_sorts(self, name: str) -> tuple[str, ...]:
        for n, args in self.relations:
            if n == name:
                return args
        raise SignatureError(f"unknown relation {name}")

    def fun_sorts(self, name: str) -> tuple[tuple[str, ...], str]:
        for n, args, res in self.functions:
            if n == name:
                return args, res
        raise SignatureError(f"unknown function {name}")

    def pair_base(self, pname: str) -> str:
        for n, base in self.pair_sorts:
            if n == pname:
                return base
        raise SignatureError(f"unknown pair sort {pname}")

    @property
    def pair_sort_names(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.pair_sorts)


# A partial map between structures: src element id -> dst element id.
PartialMap = dict


@dataclass(frozen=True)
class FinStructure:
    """An immutable finite structure.  Build via StructureBuilder or restrict."""

    signature: Signature
    sort_of: dict = field(default_factory=dict)  # elem -> sort name
    rels: dict = field(default_factory=dict)  # rel name -> frozenset of tuples
    funs: dict = field(default_factory=dict)  # fun name -> frozenset of (args..., value)
    consts: dict = field(default_factory=dict)  # const name -> elem
    pairs: dict = field(default_factory=dict)  # pair sort -> {pair elem: frozenset{x,y}}

    def __post_init__(self):
        for name, _ in self.signature.relations:
            self.rels.setdefault(name, frozenset())
        for name, _, _ in self.signature.functions:
            self.funs.setdefault(name, frozenset())
        for pname, _ in self.signature.pair_sorts:
            self.pairs.setdefault(pname, {})
        self._validate()

    def _validate(self):
        elems = set(self.sort_of)
        for name, rows in self.rels.items():
            argsorts = self.signature.rel_sorts(name)
            for row in rows:
                if len(row) != len(argsorts):
                    raise SignatureError(f"{name}: bad arity {row}")
                for e, s in zip(row, argsorts):
                    if e not in elems or self.sort_of[e] != s:
                        raise SignatureError(f"{name}: bad argument {e} in {row}")
        for name, rows in self.funs.items():
            argsorts, res = self.signature.fun_sorts(name)
            for row in rows:
                if len(row) != len(argsorts) + 1:
                    raise SignatureError(f"{name}: bad arity {row}")
                for e, s in zip(row, (*argsorts, res)):
                    if e not in elems or self.sort_of[e] != s:
                        raise SignatureError(f"{name}: bad entry {row}")
        for name, sort in self.signature.constants:
            if name not in self.consts:
                raise SignatureError(f"constant {name} not interpreted")
            e = self.consts[name]
            if e not in elems or self.sort_of[e] != sort:
                raise SignatureError(f"constant {name}: bad element")
        if len(set(self.consts.values())) != len(self.consts):
            # distinct constant names may not collapse; the theories used
            # here all require named constants to be pairwise distinct
            raise SignatureError("constants must be pairwise distinct")
        for pname, reg in self.pairs.items():
            base = self.signature.pair_base(pname)
            seen_bases = set()
            for p, xy in reg.items():
                if p not in elems or self.sort_of[p] != pname:
                    raise SignatureError(f"pair element {p}: wrong sort")
                if not (1 <= len(xy) <= 2):
                    raise SignatureError(f"pair {p}: base must have 1 or 2 points")
                for x in xy:
                    if x not in elems or self.sort_of[x] != base:
                        raise SignatureError(f"pair {p}: bad base point {x}")
                if xy in seen_bases:
                    raise SignatureError(f"two pair elements registered for {set(xy)}")
                seen_bases.add(xy)
            for e in elems:
                if self.sort_of[e] == pname and e not in reg:
                    raise SignatureError(f"pair-sort element {e} has no registration")

    # -- accessors ---------------------------------------------------------

    def elements(self, sort: str | None = None) -> tuple[int, ...]:
        if sort is None:
            return tuple(sorted(self.sort_of))
        return tuple(sorted(e for e, s in self.sort_of.items() if s == sort))

    def __contains__(self, e: int) -> bool:
        return e in self.sort_of

    def __len__(self) -> int:
        return len(self.sort_of)

    @property
    def constant_elems(self) -> frozenset[int]:
        return frozenset(self.consts.values())

    def pair_points(self, p: int) -> frozenset[int]:
        return self.pairs[self.sort_of[p]][p]

    def is_pair_elem(self, e: int) -> bool:
        return self.sort_of[e] in self.signature.pair_sort_names

    def pair_for(self, pname: str, xy: frozenset) -> int | None:
        """The registered pair element for base pair xy, if any."""
        for p, base in self.pairs[pname].items():
            if base == xy:
                return p
        return None

    def atoms(self):
        """All atomic facts: ('rel', name, row), ('fun', name, row),
        ('pair', pname, p, base)."""
        for name in sorted(self.rels):
            for row in sorted(self.rels[name]):
                yield ("rel", name, row)
        for name in sorted(self.funs):
            for row in sorted(self.funs[name]):
                yield ("fun", name, row)
        for pname in sorted(self.pairs):
            for p in sorted(self.pairs[pname]):
                yield ("pair", pname, p, self.pairs[pname][p])

    def atom_elems(self, atom) -> set[int]:
        if atom[0] in ("rel", "fun"):
            return set(atom[2])
        return {atom[2], *atom[3]}

    def fun_value(self, name: str, args: tuple) -> int | None:
        """The value of a function entry if present and single-valued."""
        vals = {row[-1] for row in self.funs[name] if row[:-1] == args}
        if len(vals) == 1:
            return next(iter(vals))
        if not vals:
            return None
        raise SignatureError(f"{name}{args} has {len(vals)} values")

    def is_functional(self) -> bool:
        for name, rows in self.funs.items():
            if len({row[:-1] for row in rows}) != len(rows):
                return False
        return True

    # -- derived structures -------------------------------------------------

    def restrict(self, keep) -> "FinStructure":
        """Induced substructure on keep, widened with registered base points
        of any kept pair element (a pair element never travels without its
        base points)."""
        keep = set(keep)
        for e in list(keep):
            if e not in self.sort_of:
                raise SignatureError(f"restrict: {e} not an element")
            if self.is_pair_elem(e):
                keep |= self.pair_points(e)
        sort_of = {e: self.sort_of[e] for e in keep}
        rels = {
            name: frozenset(r for r in rows if set(r) <= keep)
            for name, rows in self.rels.items()
        }
        funs = {
            name: frozenset(r for r in rows if set(r) <= keep)
            for name, rows in self.funs.items()
        }
        consts = dict(self.consts)
        for name, e in consts.items():
            if e not in keep:
                raise SignatureError(f"restrict: constant {name} dropped")
        pairs = {
            pname: {p: xy for p, xy in reg.items() if p in keep}
            for pname, reg in self.pairs.items()
        }
        return FinStructure(self.signature, sort_of, rels, funs, consts, pairs)

    def relabel(self, mapping: dict) -> "FinStructure":
        """Copy with element ids renamed by mapping (total, injective)."""
        m = mapping
        if len(set(m.values())) != len(m) or set(m) != set(self.sort_of):
            raise SignatureError("relabel: mapping must be a total bijection")
        return FinStructure(
            self.signature,
            {m[e]: s for e, s in self.sort_of.items()},
            {n: frozenset(tuple(m[x] for x in r) for r in rows) for n, rows in self.rels.items()},
            {n: frozenset(tuple(m[x] for x in r) for r in rows) for n, rows in self.funs.items()},
            {n: m[e] for n, e in self.consts.items()},
            {pn: {m[p]: frozenset(m[x] for x in xy) for p, xy in reg.items()}
             for pn, reg in self.pairs.items()},
        )


class StructureBuilder:
    """Accumulates elements and atoms, then freezes into a FinStructure."""

    def __init__(self, signature: Signature, start_id: int = 0):
        self.signature = signature
        self._next = start_id
        self.sort_of: dict = {}
        self.rels: dict = {name: set() for name, _ in signature.relations}
        self.funs: dict = {name: set() for name, _, _ in signature.functions}
        self.consts: dict = {}
        self.pairs: dict = {pname: {} for pname, _ in signature.pair_sorts}

    def add_element(self, sort: str, elem: int | None = None) -> int:
        if sort not in self.signature.sorts:
            raise SignatureError(f"unknown sort {sort}")
        if elem is None:
            elem = self._next
        if elem in self.sort_of:
            if self.sort_of[elem] != sort:
                raise SignatureError(f"element {elem} already has sort {self.sort_of[elem]}")
            return elem
        self._next = max(self._next, elem + 1)
        self.sort_of[elem] = sort
        return elem

    def add_rel(self, name: str, row: tuple) -> None:
        self.rels[name].add(tuple(row))

    def add_fun(self, name: str, args: tuple, value: int) -> None:
        self.funs[name].add((*args, value))

    def set_constant(self, name: str, elem: int) -> None:
        self.consts[name] = elem

    def add_pair(self, pname: str, points, elem: int | None = None) -> int:
        xy = frozenset(points)
        existing = [p for p, base in self.pairs[pname].items() if base == xy]
        if existing:
            if elem is not None and elem != existing[0]:
                raise SignatureError(f"pair over {set(xy)} already registered")
            return existing[0]
        if elem is not None and elem in self.pairs[pname]:
            # a pair element is its base set; rebinding it is a conflict
            raise SignatureError(f"pair element {elem} already registered "
                                 f"over {set(self.pairs[pname][elem])}")
        p = self.add_element(pname, elem)
        self.pairs[pname][p] = xy
        return p

    def copy_atoms_from(self, other: FinStructure, mapping: dict) -> None:
        """Translate other's atoms through mapping and add them."""
        for atom in other.atoms():
            if atom[0] == "rel":
                self.add_rel(atom[1], tuple(mapping[x] for x in atom[2]))
            elif atom[0] == "fun":
                row = tuple(mapping[x] for x in atom[2])
                self.funs[atom[1]].add(row)
            else:
                _, pname, p, xy = atom
                q = mapping[p]
                base = frozenset(mapping[x] for x in xy)
                if self.pairs[pname].get(q, base) != base:
                    raise SignatureError("conflicting pair registration")
                self.pairs[pname][q] = base

    def build(self) -> FinStructure:
        return FinStructure(
            self.signature,
            dict(self.sort_of),
            {n: frozenset(rows) for n, rows in self.rels.items()},
            {n: frozenset(rows) for n, rows in self.funs.items()},
            dict(self.consts),
            {pn: dict(reg) for pn, reg in self.pairs.items()},
        )


def extend_builder(s: FinStructure) -> StructureBuilder:
    """A builder preloaded with s (same element ids)."""
    b = StructureBuilder(s.signature)
    for e, sort in s.sort_of.items():
        b.add_element(sort, e)
    for n, rows in s.rels.items():
        b.rels[n] |= set(rows)
    for n, rows in s.funs.items():
        b.funs[n] |= set(rows)
    b.consts = dict(s.consts)
    for pn, reg in s.pairs.items():
        b.pairs[pn] = dict(reg)
    return b


# -- embeddings --------------------------------------------------------------


def _map_ok(m: dict, src: FinStructure, dst: FinStructure) -> bool:
    """Partial consistency: atoms of src fully inside dom(m) must hold in dst,
    atoms of dst fully inside img(m) must pull back.  Constants must land on
    constants (by element, not by name: named points of the same sort are
    interchangeable under embedding, which matches reduct semantics where
    the two distinguished elements may swap)."""
    img = set(m.values())
    if len(img) != len(m):
        return False
    for e, v in m.items():
        if src.sort_of[e] != dst.sort_of[v]:
            return False
        if (e in src.constant_elems) != (v in dst.constant_elems):
            return False
    dom = set(m)
    for name, rows in src.rels.items():
        drows = dst.rels[name]
        for row in rows:
            if set(row) <= dom and tuple(m[x] for x in row) not in drows:
                return False
    for name, rows in dst.rels.items():
        srows = src.rels[name]
        inv = {v: e for e, v in m.items()}
        for row in rows:
            if set(row) <= img and tuple(inv[x] for x in row) not in srows:
                return False
    for name, rows in src.funs.items():
        drows = dst.funs[name]
        for row in rows:
            if set(row) <= dom and tuple(m[x] for x in row) not in drows:
                return False
    inv = {v: e for e, v in m.items()}
    for name, rows in dst.funs.items():
        srows = src.funs[name]
        for row in rows:
            if set(row) <= img and tuple(inv[x] for x in row) not in srows:
                return False
    for pname, reg in src.pairs.items():
        for p, xy in reg.items():
            if p in dom:
                q = m[p]
                if q not in dst.pairs[pname]:
                    return False
                if xy <= dom and dst.pairs[pname][q] != frozenset(m[x] for x in xy):
                    return False
    for pname, reg in dst.pairs.items():
        for q, xy in reg.items():
            if q in img:
                p = inv[q]
                if p not in src.pairs[pname]:
                    return False
                if xy <= img and src.pairs[pname][p] != frozenset(inv[x] for x in xy):
                    return False
    return True


def is_embedding(m: dict, src: FinStructure, dst: FinStructure) -> bool:
    """True iff m is a total embedding of src onto an induced substructure
    of dst: injective, sort-preserving, preserving and reflecting relation
    rows, function entries, and pair registrations."""
    if set(m) != set(src.sort_of):
        return False
    for e, v in m.items():
        if v not in dst.sort_of:
            return False
    return _map_ok(m, src, dst)


def find_embeddings(
    src: FinStructure,
    dst: FinStructure,
    pinned: dict | None = None,
    limit: int | None = None,
) -> list[dict]:
    """All embeddings of src into dst extending pinned, deterministic order.

    Backtracking, most-constrained-first: source elements are ordered by
    descending atom degree so failures surface early.
    """
    pinned = dict(pinned or {})
    for e in pinned:
        if e not in src.sort_of:
            raise SignatureError(f"pinned element {e} not in source")
    degree: dict = {e: 0 for e in src.sort_of}
    for atom in src.atoms():
        for e in src.atom_elems(atom):
            degree[e] += 1
    order = [e for e in sorted(src.sort_of, key=lambda e: (-degree[e], e)) if e not in pinned]
    if not _map_ok(pinned, src, dst):
        return []
    out: list[dict] = []

    def bt(i: int, m: dict):
        if limit is not None and len(out) >= limit:
            return
        if i == len(order):
            if is_embedding(m, src, dst):
                out.append(dict(m))
            return
        e = order[i]
        for v in dst.elements(src.sort_of[e]):
            if v in m.values():
                continue
            m[e] = v
            if _map_ok(m, src, dst):
                bt(i + 1, m)
            del m[e]
            if limit is not None and len(out) >= limit:
                return

    bt(0, pinned)
    return out


# -- generated substructure ---------------------------------------------------


def generated_substructure(
    amb: FinStructure, generators, depth_budget: int = 64
) -> FinStructure:
    """Substructure of amb generated by generators: contains the constants,
    both base points of every generator that is a registered pair, and is
    closed under all defined function entries of amb."""
    closure = set(generators) | set(amb.constant_elems)
    for e in closure:
        if e not in amb.sort_of:
            raise SignatureError(f"generator {e} not in structure")
    for _ in range(depth_budget + 1):
        new = set()
        for e in closure:
            if amb.is_pair_elem(e):
                new |= amb.pair_points(e) - closure
        for name, rows in amb.funs.items():
            for row in rows:
                if set(row[:-1]) <= closure and row[-1] not in closure:
                    new.add(row[-1])
        if not new:
            return amb.restrict(closure)
        closure |= new
    raise BudgetExceeded("generated substructure did not close")


# -- disjoint union over a shared part ----------------------------------------


def disjoint_union_over(
    a: FinStructure, b: FinStructure, shared: dict | None = None
):
    """Glue a and b along shared (b-element -> a-element), taking the union
    of atoms and no others.  Returns (result, embed_a, embed_b).

    shared must identify isomorphic induced substructures, cover all
    constants of b (matched by name), and be closed under pair
    registration.  Function entries of the two sides must agree on the
    shared part (checked by the resulting table being well-formed; callers
    that need single-valuedness check it through their theory).
    """
    shared = dict(shared or {})
    for name in b.consts:
        if name in a.consts:
            if shared.get(b.consts[name], a.consts[name]) != a.consts[name]:
                raise SignatureError(f"constant {name} identified inconsistently")
            shared[b.consts[name]] = a.consts[name]
    for e, v in shared.items():
        if e not in b.sort_of or v not in a.sort_of:
            raise SignatureError("shared map references unknown elements")
        if b.sort_of[e] != a.sort_of[v]:
            raise SignatureError("shared map not sort-preserving")
    if len(set(shared.values())) != len(shared):
        raise SignatureError("shared map not injective")
    for e in list(shared):
        if b.is_pair_elem(e):
            xy = b.pair_points(e)
            if not xy <= set(shared):
                raise SignatureError("shared pair element without shared base points")
    sub_b = b.restrict(set(shared))
    if not is_embedding(shared, sub_b, a.restrict(set(shared.values()))):
        raise SignatureError("shared parts are not isomorphic")

    out = StructureBuilder(a.signature)
    embed_a = {}
    for e in sorted(a.sort_of):
        embed_a[e] = out.add_element(a.sort_of[e])
    embed_b = {}
    for e in sorted(b.sort_of):
        if e in shared:
            embed_b[e] = embed_a[shared[e]]
        else:
            embed_b[e] = out.add_element(b.sort_of[e])
    for name, e in a.consts.items():
        out.set_constant(name, embed_a[e])
    for name, e in b.consts.items():
        if name not in a.consts:
            out.set_constant(name, embed_b[e])
    out.copy_atoms_from(a, embed_a)
    # pair uniqueness across the two sides: an unshared pair element of b
    # whose base points are shared may collide with a pair of a
    for pname, reg in b.pairs.items():
        for p, xy in reg.items():
            if p not in shared and xy <= set(shared):
                other = a.pair_for(pname, frozenset(shared[x] for x in xy))
                if other is not None:
                    raise SignatureError("pair registered on both sides but not shared")
    out.copy_atoms_from(b, embed_b)
    return out.build(), embed_a, embed_b


# -- canonical codes -----------------------------------------------------------


def _refine_colors(s: FinStructure, colors: dict | None) -> dict:
    col = {}
    for e, sort in s.sort_of.items():
        col[e] = (sort, e in s.constant_elems, (colors or {}).get(e))
    atoms = list(s.atoms())
    for _ in range(len(s.sort_of) + 1):
        sigs = {e: [] for e in col}
        for atom in atoms:
            if atom[0] in ("rel", "fun"):
                row = atom[2]
                for i, e in enumerate(row):
                    sigs[e].append((atom[0], atom[1], i, tuple(col[x] for x in row)))
            else:
                _, pname, p, xy = atom
                base = tuple(sorted(col[x] for x in xy))
                sigs[p].append(("pairelem", pname, base))
                for x in xy:
                    sigs[x].append(("pairbase", pname, col[p]))
        new = {e: (col[e], tuple(sorted(sigs[e]))) for e in col}
        # compress
        ranks = {v: i for i, v in enumerate(sorted(set(new.values())))}
        new = {e: ranks[new[e]] for e in new}
        if len(set(new.values())) == len(set(col.values())):
            canon = {}
            for e in new:
                canon[e] = (s.sort_of[e], e in s.constant_elems, (colors or {}).get(e), new[e])
            return canon
        col = new
    return col


def canonical_code(s: FinStructure, colors: dict | None = None) -> bytes:
    """An isomorphism-invariant code: equal codes iff the structures are
    isomorphic (constants matched as a set per sort, not by name; optional
    colors must be matched exactly).

    Color refinement followed by exhaustive minimization within color
    classes.  Intended for the small structures this package works with.
    """
    col = _refine_colors(s, colors)
    classes: dict = {}
    for e, c in col.items():
        classes.setdefault(c, []).append(e)
    keys = sorted(classes)
    cells = [sorted(classes[k]) for k in keys]

    best: list | None = None
    for perm_combo in itertools.product(*[itertools.permutations(c) for c in cells]):
        label = {}
        for cell in perm_combo:
            for e in cell:
                label[e] = len(label)
        code = _encode(s, label, keys, [len(c) for c in cells], colors)
        if best is None or code < best:
            best = code
    if best is None:  # empty structure
        best = _encode(s, {}, keys, [], colors)
    return repr(best).encode()


def _encode(s, label, cell_keys, cell_sizes, colors):
    rels = sorted(
        (name, tuple(sorted(tuple(label[x] for x in row) for row in rows)))
        for name, rows in s.rels.items()
    )
    funs = sorted(
        (name, tuple(sorted(tuple(label[x] for x in row) for row in rows)))
        for name, rows in s.funs.items()
    )
    consts = tuple(sorted((s.sort_of[e], label[e]) for e in s.constant_elems))
    pairs = sorted(
        (pname, tuple(sorted((label[p], tuple(sorted(label[x] for x in xy)))
                             for p, xy in reg.items())))
        for pname, reg in s.pairs.items()
    )
    cells = tuple((str(k), n) for k, n in zip(cell_keys, cell_sizes))
    colmarks = tuple(sorted((label[e], repr(c)) for e, c in (colors or {}).items()))
    return [cells, rels, funs, consts, pairs, colmarks]


def isomorphic(a: FinStructure, b: FinStructure) -> bool:
    if sorted(a.sort_of.values()) != sorted(b.sort_of.values()):
        return False
    return bool(find_embeddings(a, b, limit=1))
