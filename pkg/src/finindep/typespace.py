"""Algebraic closure and quantifier-free type equality over an ambient.

Two acl mechanisms are provided: a rule-based fast path (constants, base
points of registered pairs, function-entry closure, and for incidence
theories the bounded point/line closure), and a semantic duplication-test
oracle that asks how many pairwise-distinct copies of an element can share
its diagram over a base inside one class member.  The two can be
cross-checked against each other.

Type equality is bounded and syntactic: two tuples have the same type over
a base iff the substructures induced on the algebraic closures of
base+tuple are isomorphic by a map fixing the base pointwise and matching
the tuples coordinate-wise.  The base is fixed pointwise; everything else,
including named constants and pair base points, may move.  This is what
lets a two-colored structure swap its colors over the empty base, and a
pair element present its base points in either order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .structures import (
    BudgetExceeded,
    FinStructure,
    SignatureError,
    StructureBuilder,
    find_embeddings,
)
from .theories import TheorySpec, in_class


@dataclass(frozen=True)
class AclResult:
    closure: frozenset
    reasons: dict  # elem -> short justification, for elements added to X


def acl(t: TheorySpec, amb: FinStructure, xs, budget: int = 64) -> AclResult:
    """Rule-based algebraic closure of xs inside amb."""
    closure = set(xs)
    reasons: dict = {}
    for e in closure:
        if e not in amb.sort_of:
            raise SignatureError(f"acl: {e} not in ambient")
    for e in amb.constant_elems - closure:
        closure.add(e)
        reasons[e] = "named constant"
    for _ in range(budget + 1):
        new: dict = {}
        for e in closure:
            if amb.is_pair_elem(e):
                for x in amb.pair_points(e) - closure:
                    new[x] = f"base point of pair {e}"
        for pname, reg in amb.pairs.items():
            for p, xy in reg.items():
                if p not in closure and xy <= closure:
                    new[p] = f"pair over closure points {sorted(xy)}"
        for name, rows in amb.funs.items():
            for row in rows:
                if set(row[:-1]) <= closure and row[-1] not in closure:
                    new[row[-1]] = f"{name} image of closure elements"
        if t.kind == "incidence":
            m, n = t.params
            irows = amb.rels.get("I", frozenset())
            for p in amb.elements("P"):
                if p in closure:
                    continue
                lines = {l for q, l in irows if q == p and l in closure}
                if len(lines) >= n:
                    new[p] = f"point on {n} closure lines"
            for l in amb.elements("L"):
                if l in closure:
                    continue
                pts = {q for q, l2 in irows if l2 == l and q in closure}
                if len(pts) >= m:
                    new[l] = f"line through {m} closure points"
        if not new:
            return AclResult(frozenset(closure), reasons)
        closure |= set(new)
        reasons.update(new)
    raise BudgetExceeded("acl did not close within budget")


# -- duplication test ------------------------------------------------------------


@dataclass(frozen=True)
class Algebraic:
    count: int  # copies of the diagram cannot exceed this many


@dataclass(frozen=True)
class NotAlgebraicUpTo:
    bound: int  # this many pairwise-distinct copies coexist in a class member


def duplication_test(t: TheorySpec, amb: FinStructure, e: int, base, bound: int = 4):
    """Semantic algebraicity probe: try to realize n pairwise-distinct copies
    of e, each with e's full diagram over base, in one class member, for
    n = 2..bound+1.  Copies carry no atoms among themselves beyond what the
    diagram forces; for the universal classes here, adding more atoms never
    rescues a failed duplication, so this minimal candidate is decisive.
    """
    if e in amb.constant_elems:
        # named points are interchangeable within their sort, so the copy
        # count is the number of same-sorted named points
        return Algebraic(len([x for x in amb.constant_elems
                              if amb.sort_of[x] == amb.sort_of[e]]))
    base = set(base) | amb.constant_elems
    if e in base:
        return Algebraic(1)
    sub = amb.restrict(base | {e})
    if e not in sub.sort_of:
        raise SignatureError(f"duplication_test: {e} not in ambient")
    # restrict may pull in base points of pair elements; points attached to
    # e and not forced by the base travel with each copy rather than being
    # pinned
    base_fixed = set(base)
    for x in base:
        if amb.is_pair_elem(x):
            base_fixed |= amb.pair_points(x)
    moving = sorted(set(sub.sort_of) - base_fixed)
    rest = sorted(set(sub.sort_of) - set(moving))
    for n in range(2, bound + 2):
        try:
            b = StructureBuilder(sub.signature)
            for x in rest:
                b.add_element(sub.sort_of[x], x)
            copy_maps = []
            for _ in range(n):
                cm = {x: x for x in rest}
                for x in moving:
                    cm[x] = b.add_element(sub.sort_of[x])
                copy_maps.append(cm)
            for atom in sub.atoms():
                touched = sub.atom_elems(atom)
                maps = [{x: x for x in rest}] if not (touched & set(moving)) else copy_maps
                for m in maps:
                    if atom[0] == "rel":
                        b.add_rel(atom[1], tuple(m[x] for x in atom[2]))
                    elif atom[0] == "fun":
                        b.funs[atom[1]].add(tuple(m[x] for x in atom[2]))
                    else:
                        _, pname, p, xy = atom
                        q = m[p]
                        basepts = frozenset(m[x] for x in xy)
                        if q in b.pairs[pname] and b.pairs[pname][q] != basepts:
                            raise SignatureError("pair registration conflict")
                        for other, obase in b.pairs[pname].items():
                            if other != q and obase == basepts:
                                raise SignatureError("two pairs over one base")
                        b.pairs[pname][q] = basepts
            for name, x in sub.consts.items():
                b.set_constant(name, x)
            cand = b.build()
        except SignatureError:
            return Algebraic(n - 1)
        if in_class(t, cand):
            return Algebraic(n - 1)
    return NotAlgebraicUpTo(bound)


def acl_cross_check(t: TheorySpec, amb: FinStructure, xs, bound: int = 4) -> list:
    """Disagreements between the rule path and the duplication oracle on
    acl(xs): rule-closure members (beyond xs) that the oracle calls
    non-algebraic, and outside elements the oracle calls algebraic."""
    res = acl(t, amb, xs)
    mismatches = []
    for e in sorted(res.closure - set(xs)):
        if isinstance(duplication_test(t, amb, e, res.closure - {e}, bound), NotAlgebraicUpTo):
            mismatches.append(("rule-only", e))
    for e in sorted(set(amb.sort_of) - res.closure):
        if isinstance(duplication_test(t, amb, e, res.closure, bound), Algebraic):
            mismatches.append(("oracle-only", e))
    return mismatches


# -- type equality ----------------------------------------------------------------


def same_type_across(
    t: TheorySpec,
    amb_left: FinStructure,
    left: tuple,
    amb_right: FinStructure,
    right: tuple,
    base_pairs=(),
):
    """Whether left (in amb_left) and right (in amb_right) have the same
    bounded quantifier-free type over the aligned bases.  Returns
    (bool, witness iso or None).  base_pairs aligns the two bases as
    (left element, right element) pairs, fixed pointwise by the witness.
    """
    if len(left) != len(right):
        raise SignatureError("tuples must have equal length")
    base_l = [p[0] for p in base_pairs]
    base_r = [p[1] for p in base_pairs]
    cl_l = acl(t, amb_left, set(base_l) | set(left)).closure
    cl_r = acl(t, amb_right, set(base_r) | set(right)).closure
    sub_l = amb_left.restrict(cl_l)
    sub_r = amb_right.restrict(cl_r)
    if sorted(sub_l.sort_of.values()) != sorted(sub_r.sort_of.values()):
        return False, None
    pinned = dict(zip(base_l, base_r))
    for x, y in zip(left, right):
        if pinned.get(x, y) != y:
            return False, None
        pinned[x] = y
    embs = find_embeddings(sub_l, sub_r, pinned=pinned, limit=1)
    if embs:
        return True, embs[0]
    return False, None


def same_type(t: TheorySpec, amb: FinStructure, left: tuple, right: tuple, base=()):
    """Type equality for two tuples of one ambient over a common base."""
    pairs = [(b, b) for b in base]
    return same_type_across(t, amb, tuple(left), amb, tuple(right), pairs)


def conjugates(t: TheorySpec, amb: FinStructure, e: int, base=(), limit: int = 16):
    """Elements of amb with the same type as e over base, e included."""
    out = []
    for cand in amb.elements(amb.sort_of[e]):
        ok, _ = same_type(t, amb, (e,), (cand,), base)
        if ok:
            out.append(cand)
            if len(out) >= limit:
                break
    return out
