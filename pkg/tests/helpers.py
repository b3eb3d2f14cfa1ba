"""Shared oracles and random-instance generators for the test suite.

The oracles here deliberately re-derive answers by exhaustive enumeration
instead of calling back into the search code they are checking.
"""

import itertools
import random

from finindep import FinStructure, SignatureError, extend_builder
from finindep.amalgam import random_member
from finindep.indep import (
    Inconsistent,
    diagram_formula,
    enumerate_patterns,
    instantiate_array,
)
from finindep.theories import atom_variants, in_class
from finindep.typespace import acl


# -- embedding / isomorphism oracle ------------------------------------------------


def _atoms_respected(m: dict, src: FinStructure, dst: FinStructure) -> bool:
    dom, img = set(m), set(m.values())
    inv = {v: e for e, v in m.items()}
    for name, rows in src.rels.items():
        for row in rows:
            if set(row) <= dom and tuple(m[x] for x in row) not in dst.rels[name]:
                return False
    for name, rows in dst.rels.items():
        for row in rows:
            if set(row) <= img and tuple(inv[x] for x in row) not in src.rels[name]:
                return False
    for name, rows in src.funs.items():
        for row in rows:
            if set(row) <= dom and tuple(m[x] for x in row) not in dst.funs[name]:
                return False
    for name, rows in dst.funs.items():
        for row in rows:
            if set(row) <= img and tuple(inv[x] for x in row) not in src.funs[name]:
                return False
    for pname, reg in src.pairs.items():
        for p, xy in reg.items():
            if p not in dom:
                continue
            q = m[p]
            if q not in dst.pairs[pname]:
                return False
            if xy <= dom and dst.pairs[pname][q] != frozenset(m[x] for x in xy):
                return False
    for pname, reg in dst.pairs.items():
        for q, xy in reg.items():
            if q not in img:
                continue
            p = inv[q]
            if p not in src.pairs[pname]:
                return False
            if xy <= img and src.pairs[pname][p] != frozenset(inv[x] for x in xy):
                return False
    return True


def embeddings_oracle(src: FinStructure, dst: FinStructure) -> list:
    """Every embedding of src into dst, by brute enumeration of injections.

    Distinguished points must land on distinguished points but may permute;
    that matches the reduct semantics the library uses.
    """
    srcs = list(src.sort_of)
    out = []
    per_elem = []
    for e in srcs:
        cands = [v for v in dst.sort_of
                 if dst.sort_of[v] == src.sort_of[e]
                 and (e in src.constant_elems) == (v in dst.constant_elems)]
        per_elem.append(cands)
    for combo in itertools.product(*per_elem):
        if len(set(combo)) != len(combo):
            continue
        m = dict(zip(srcs, combo))
        if _atoms_respected(m, src, dst):
            out.append(m)
    return out


def isomorphic_oracle(a: FinStructure, b: FinStructure) -> bool:
    if len(a) != len(b):
        return False
    return bool(embeddings_oracle(a, b))


# -- joint consistency oracle ------------------------------------------------------


def _subst(term, assignment: dict, pm: dict):
    kind, v = term
    if kind == "v":
        return assignment[v]
    return pm[v]


def _ground_all(phi, assignment: dict, pm: dict) -> list:
    out = []
    for lit in phi.literals:
        kind = lit[0]
        if kind == "rel":
            out.append(("rel", lit[1],
                        tuple(_subst(t, assignment, pm) for t in lit[2]), lit[3]))
        elif kind == "fun":
            out.append(("fun", lit[1],
                        tuple(_subst(t, assignment, pm) for t in lit[2]),
                        _subst(lit[3], assignment, pm)))
        elif kind == "pair":
            out.append(("pair", _subst(lit[1], assignment, pm),
                        tuple(_subst(t, assignment, pm) for t in lit[2])))
        else:
            out.append(("eq", _subst(lit[1], assignment, pm),
                        _subst(lit[2], assignment, pm), lit[3]))
    return out


def joint_oracle(t, phi, pattern, k: int):
    """Exhaustive search for a joint solution of phi against every row.

    Returns True/False, or None when the pattern itself is inconsistent
    at k rows (no array to solve against).
    """
    from finindep.indep.formulas import holds

    inst = instantiate_array(t, pattern, k)
    if isinstance(inst, Inconsistent):
        return None
    arr = inst.structure
    varnames = sorted(phi.variables())
    top = max(arr.sort_of, default=0) + 1
    # one private fresh element per variable: the bounded solution space the
    # consistency check is specified against
    pools = [list(arr.sort_of) + [top + i] for i, _ in enumerate(varnames)]
    pair_sorts = t.signature.pair_sort_names
    for combo in itertools.product(*pools):
        assignment = dict(zip(varnames, combo))
        fresh_sorts: dict = {}
        ok = True
        for v, e in assignment.items():
            want = phi.sort_of(v)
            if e in arr.sort_of:
                if arr.sort_of[e] != want:
                    ok = False
                    break
            else:
                if want in pair_sorts or fresh_sorts.get(e, want) != want:
                    ok = False
                    break
                fresh_sorts[e] = want
        if not ok:
            continue
        glits = []
        try:
            for pm in inst.row_maps:
                glits.extend(_ground_all(phi, assignment, pm))
        except KeyError:
            continue
        bld = extend_builder(arr)
        for e, sort in fresh_sorts.items():
            bld.add_element(sort, e)
        try:
            for g in glits:
                if g[0] == "rel" and g[3]:
                    for row in atom_variants(t, g[1], g[2]):
                        bld.add_rel(g[1], row)
                elif g[0] == "fun":
                    bld.add_fun(g[1], g[2], g[3])
            cand = bld.build()
        except SignatureError:
            continue
        if in_class(t, cand):
            continue
        if all(holds(cand, g) for g in glits):
            return True
    return False


# -- random instance generation ----------------------------------------------------


def random_formula_instances(scenarios: list, rng: random.Random, count: int):
    """Yield (theory, phi, pattern, k) with small formulas over scenario
    configurations: the diagram of a random tuple with some literals dropped,
    paired with a random array pattern for its parameters.
    """
    made = 0
    while made < count:
        sc = rng.choice(scenarios)
        t, amb = sc.theory, sc.configuration
        elems = list(amb.sort_of)
        left = tuple(rng.sample(elems, rng.randrange(1, 3)))
        rest = [e for e in elems if e not in left]
        if not rest:
            continue
        over = set(rng.sample(rest, rng.randrange(1, min(3, len(rest)) + 1)))
        over |= set(amb.consts.values()) - set(left)  # diagrams keep named points
        base = set(rng.sample(sorted(over), rng.randrange(0, len(over) + 1)))
        phi = diagram_formula(t, amb, left, over)
        lits = list(phi.literals)
        if len(lits) > 1:
            kept = rng.sample(lits, rng.randrange(1, len(lits) + 1))
            phi = type(phi)(tuple(l for l in lits if l in kept), phi.var_sorts)
        if not phi.params():
            continue
        coords = tuple(sorted(phi.params() - acl(t, amb, base).closure))
        if not coords:
            continue
        patterns = enumerate_patterns(t, amb, coords, base, pattern_budget=400)
        if not patterns:
            continue
        yield t, phi, rng.choice(patterns), rng.randrange(2, 5)
        made += 1


def random_structure_pair(t, rng: random.Random, size_bound: int = 4):
    """A pair of small class members; with probability 1/3 the second is a
    relabelled copy of the first, so both code-equal and code-distinct
    cases occur.
    """
    a = random_member(t, rng, size_bound)
    if rng.random() < 1 / 3 and len(a):
        elems = list(a.sort_of)
        top = max(elems) + 1
        shuffled = list(elems)
        rng.shuffle(shuffled)
        b = a.relabel({e: top + i for i, e in enumerate(shuffled)})
    else:
        b = random_member(t, rng, size_bound)
    return a, b
