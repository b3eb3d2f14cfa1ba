"""Free amalgamation and its axiom suite.

The free amalgam of two structures over a shared part takes the union of
their atoms and nothing else.  Free independence of sets A, B over C inside
an ambient is the algebraic-closure-aware reading: writing A* = acl(AC),
B* = acl(BC), C* = acl(C), it requires A* and B* to meet exactly in C* and
every atom of the substructure on acl(ABC) to live entirely inside A* or
entirely inside B*.

axiom_suite samples random class members and random instances and checks
the structural axioms a well-behaved independence relation built from free
amalgamation should satisfy.  Failures are reported with enough data to
replay them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .structures import (
    FinStructure,
    SignatureError,
    StructureBuilder,
    disjoint_union_over,
    find_embeddings,
)
from .theories import TheorySpec, in_class
from .typespace import acl, duplication_test, NotAlgebraicUpTo, same_type, same_type_across

AXIOM_IDS = (
    "invariance-surrogate",
    "monotonicity",
    "symmetry",
    "full-transitivity",
    "full-existence-closed",
    "stationarity-closed",
    "freedom",
    "closure",
)


def free_amalgam(t: TheorySpec, a: FinStructure, b: FinStructure, shared: dict):
    """Glue a and b along shared (b elem -> a elem) with no extra atoms.
    Returns (amalgam, embed_a, embed_b).  Only sensible for theories whose
    class is closed under this construction."""
    if "free_amalgamation" not in t.flags:
        raise SignatureError(f"{t.name} is not flagged for free amalgamation")
    return disjoint_union_over(a, b, shared)


def free_independent(t: TheorySpec, amb: FinStructure, a_set, b_set, c_set):
    """Acl-aware free independence of a_set and b_set over c_set in amb.
    Returns (bool, list of reasons)."""
    a_cl = acl(t, amb, set(a_set) | set(c_set)).closure
    b_cl = acl(t, amb, set(b_set) | set(c_set)).closure
    c_cl = acl(t, amb, set(c_set)).closure
    reasons = []
    extra = (a_cl & b_cl) - c_cl
    if extra:
        reasons.append(f"closures share {sorted(extra)} beyond acl(base)")
    joint = acl(t, amb, a_cl | b_cl).closure
    sub = amb.restrict(joint)
    for atom in sub.atoms():
        elems = sub.atom_elems(atom)
        if not (elems <= a_cl or elems <= b_cl):
            reasons.append(f"atom {atom} straddles the two sides")
    return (not reasons), reasons


# -- random class members ---------------------------------------------------------


def random_member(t: TheorySpec, rng: random.Random, size_bound: int = 5) -> FinStructure:
    """A random member of t's class, grown one element at a time from the
    constants, each candidate atom kept with probability 1/2 when legal."""
    b = StructureBuilder(t.signature)
    for cname, csort in t.signature.constants:
        b.set_constant(cname, b.add_element(csort))
    pair_sorts = t.signature.pair_sort_names
    growable = [s for s in t.signature.sorts
                if s not in pair_sorts and not (t.kind == "og" and s == "C")]
    n_new = rng.randint(1, size_bound)

    def legal(candidate: StructureBuilder) -> bool:
        try:
            return not in_class(t, candidate.build())
        except SignatureError:
            return False

    for _ in range(n_new):
        sort = rng.choice(growable)
        e = b.add_element(sort)
        others = [x for x in sorted(b.sort_of) if x != e and x not in
                  {p for ps in b.pairs.values() for p in ps}]
        for rname, argsorts in t.signature.relations:
            slots = [args for args in itertools.product(*(
                [e] if s == sort else [x for x in others if b.sort_of[x] == s]
                for s in argsorts)) if e in args]
            for args in slots:
                if len(set(args)) != len(args) and t.kind != "og":
                    continue
                if rng.random() < 0.5:
                    b.add_rel(rname, args)
                    if t.kind == "og" and rname == "R":
                        b.add_rel("R", (args[1], args[0], args[2]))
                    if not legal(b):
                        b.rels[rname].discard(args)
                        if t.kind == "og" and rname == "R":
                            b.rels["R"].discard((args[1], args[0], args[2]))
        for fname, argsorts, res in t.signature.functions:
            pool = [x for x in others + [e] if b.sort_of[x] in argsorts]
            for args in itertools.product(*(
                    [x for x in others + [e] if b.sort_of[x] == s] for s in argsorts)):
                if e not in args or not pool:
                    continue
                if rng.random() < 0.4:
                    val = rng.choice([x for x in others + [e] if b.sort_of[x] == res])
                    b.add_fun(fname, args, val)
                    if not legal(b):
                        b.funs[fname].discard((*args, val))
    for pname in sorted(pair_sorts):
        base_sort = t.signature.pair_base(pname)
        candidates = [x for x in sorted(b.sort_of) if b.sort_of[x] == base_sort]
        for _ in range(rng.randint(0, 2)):
            if len(candidates) >= 1 and rng.random() < 0.7:
                pts = rng.sample(candidates, min(len(candidates), 2))
                if b.pairs[pname] and rng.random() < 0.3:
                    pts = pts[:1]
                xy = frozenset(pts)
                if all(base != xy for base in b.pairs[pname].values()):
                    b.add_pair(pname, pts)
    out = b.build()
    assert not in_class(t, out)
    return out


def _rand_subset(rng: random.Random, pool, lam: float = 0.4) -> set:
    return {x for x in pool if rng.random() < lam}


# -- the axiom suite ---------------------------------------------------------------


@dataclass(frozen=True)
class AxiomFailure:
    axiom: str
    trial: int
    detail: str


@dataclass
class AxiomReport:
    theory: str
    seed: int
    trials: int
    checked: dict = field(default_factory=dict)  # axiom -> instances checked
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def axiom_suite(
    t: TheorySpec,
    axioms=("all",),
    trials: int = 100,
    size_bound: int = 5,
    seed: int = 0,
) -> AxiomReport:
    """Randomized structural checks of the free-independence axioms."""
    wanted = set(AXIOM_IDS) if "all" in axioms else set(axioms)
    unknown = wanted - set(AXIOM_IDS)
    if unknown:
        raise KeyError(f"unknown axioms {sorted(unknown)}")
    rng = random.Random(seed)
    rep = AxiomReport(theory=t.name, seed=seed, trials=trials,
                      checked={a: 0 for a in sorted(wanted)})

    def fi(amb, A, B, C):
        return free_independent(t, amb, A, B, C)[0]

    for trial in range(trials):
        amb = random_member(t, rng, size_bound)
        elems = list(amb.elements())
        C = _rand_subset(rng, elems, 0.25)
        A = _rand_subset(rng, elems, 0.35)
        B = _rand_subset(rng, elems, 0.35)

        if "invariance-surrogate" in wanted:
            rep.checked["invariance-surrogate"] += 1
            v = fi(amb, A, B, C)
            autos = find_embeddings(amb, amb, limit=8)
            g = autos[rng.randrange(len(autos))]
            v2 = fi(amb, {g[x] for x in A}, {g[x] for x in B}, {g[x] for x in C})
            if v != v2:
                rep.failures.append(AxiomFailure(
                    "invariance-surrogate", trial,
                    f"verdict changed under automorphism {g} on A={sorted(A)} "
                    f"B={sorted(B)} C={sorted(C)}"))

        if "symmetry" in wanted:
            rep.checked["symmetry"] += 1
            if fi(amb, A, B, C) != fi(amb, B, A, C):
                rep.failures.append(AxiomFailure(
                    "symmetry", trial, f"A={sorted(A)} B={sorted(B)} C={sorted(C)}"))

        if "monotonicity" in wanted and fi(amb, A, B, C):
            rep.checked["monotonicity"] += 1
            A1 = _rand_subset(rng, sorted(A), 0.6)
            B1 = _rand_subset(rng, sorted(B), 0.6)
            if not fi(amb, A1, B1, C):
                rep.failures.append(AxiomFailure(
                    "monotonicity", trial,
                    f"held for A={sorted(A)} B={sorted(B)} but not "
                    f"A'={sorted(A1)} B'={sorted(B1)} over C={sorted(C)}"))

        if "full-transitivity" in wanted:
            rep.checked["full-transitivity"] += 1
            Bfull = set(B) | set(C)
            Cmid = _rand_subset(rng, sorted(Bfull), 0.5)
            D = _rand_subset(rng, sorted(Cmid), 0.5)
            lhs = fi(amb, A, Bfull, D)
            rhs = fi(amb, A, Bfull, Cmid) and fi(amb, A, Cmid, D)
            if lhs != rhs:
                rep.failures.append(AxiomFailure(
                    "full-transitivity", trial,
                    f"A={sorted(A)} B={sorted(Bfull)} C={sorted(Cmid)} D={sorted(D)}: "
                    f"joint={lhs} stepwise={rhs}"))

        if "freedom" in wanted and fi(amb, A, B, C):
            rep.checked["freedom"] += 1
            core = C & (A | B)
            D = core | _rand_subset(rng, sorted(C - core), 0.5)
            if not fi(amb, A, B, D):
                rep.failures.append(AxiomFailure(
                    "freedom", trial,
                    f"A={sorted(A)} B={sorted(B)} C={sorted(C)} D={sorted(D)}"))

        if "full-existence-closed" in wanted and "free_amalgamation" in t.flags:
            rep.checked["full-existence-closed"] += 1
            msg = _check_full_existence(t, amb, rng)
            if msg:
                rep.failures.append(AxiomFailure("full-existence-closed", trial, msg))

        if "stationarity-closed" in wanted:
            rep.checked["stationarity-closed"] += 1
            msg = _check_stationarity(t, amb, rng, fi)
            if msg:
                rep.failures.append(AxiomFailure("stationarity-closed", trial, msg))

        if "closure" in wanted:
            rep.checked["closure"] += 1
            msg = _check_closure(t, amb, rng, fi)
            if msg:
                rep.failures.append(AxiomFailure("closure", trial, msg))

    return rep


def _check_full_existence(t, amb, rng):
    """Build the free amalgam of acl(C+a) and acl(C+B) over their common
    part and confirm class membership plus type preservation of a."""
    elems = list(amb.elements())
    C = acl(t, amb, _rand_subset(rng, elems, 0.2)).closure
    a = rng.choice(elems)
    A1 = acl(t, amb, C | {a}).closure
    B1 = acl(t, amb, C | _rand_subset(rng, elems, 0.3)).closure
    common = A1 & B1
    side_a = amb.restrict(A1)
    side_b = amb.restrict(B1)
    try:
        glued, emb_b, emb_a = free_amalgam(t, side_b, side_a, {x: x for x in common})
    except SignatureError as exc:
        return f"amalgam rejected: {exc}"
    bad = in_class(t, glued)
    if bad:
        return f"free amalgam left the class: {bad[0].detail}"
    ok, _ = same_type_across(
        t, glued, (emb_a[a],), amb, (a,), [(emb_b[c], c) for c in sorted(common)])
    if not ok:
        return f"copy of {a} changed type over the shared part"
    return None


def _check_stationarity(t, amb, rng, fi):
    """Two free-independent elements of the same type over a closed base
    must have the same type jointly with the other side."""
    elems = list(amb.elements())
    C = acl(t, amb, _rand_subset(rng, elems, 0.2)).closure
    btup = tuple(sorted(acl(t, amb, C | _rand_subset(rng, elems, 0.25)).closure - C))
    if not btup:
        return None
    pool = [e for e in elems if e not in C and e not in btup]
    for a, a2 in itertools.combinations(pool, 2):
        if not (fi(amb, {a}, set(btup), C) and fi(amb, {a2}, set(btup), C)):
            continue
        if not same_type(t, amb, (a,), (a2,), sorted(C))[0]:
            continue
        ok, _ = same_type(t, amb, (a, *btup), (a2, *btup), sorted(C))
        if not ok:
            return (f"{a} and {a2} agree over C={sorted(C)} but differ "
                    f"jointly with {btup}")
    return None


def _check_closure(t, amb, rng, fi):
    """The union of two closed, free-independent sets over a closed common
    base is closed, by the rule path and a duplication-oracle spot check."""
    elems = list(amb.elements())
    C = acl(t, amb, _rand_subset(rng, elems, 0.2)).closure
    A = acl(t, amb, C | _rand_subset(rng, elems, 0.3)).closure
    B = acl(t, amb, C | _rand_subset(rng, elems, 0.3)).closure
    if not fi(amb, A, B, C):
        return None
    union = A | B
    cl = acl(t, amb, union).closure
    if cl != union:
        return f"acl added {sorted(cl - union)} to {sorted(union)}"
    outside = sorted(set(elems) - union)
    for e in outside[:3]:
        if not isinstance(duplication_test(t, amb, e, union, bound=3), NotAlgebraicUpTo):
            return f"duplication oracle finds {e} algebraic over {sorted(union)}"
    return None
