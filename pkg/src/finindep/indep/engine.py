"""Dividing checks and the independence relations built on them.

Everything here is bounded search: patterns up to a budget, row counts up
to k_max, realizations over arrays of a fixed length.  A positive dividing
verdict is always certified by an explicit inconsistent array; a negative
one by realizations of the type along every candidate array.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..structures import (
    BudgetExceeded,
    FinStructure,
    SignatureError,
    extend_builder,
    find_embeddings,
)
from ..theories import TheorySpec, atom_variants, in_class
from ..typespace import acl, same_type_across
from .formulas import QFFormula, ExFormula, diagram_formula, ground, holds
from .patterns import ArrayInstance, ArrayPattern, Inconsistent, enumerate_patterns, instantiate_array

DEFAULT_K_MAX = 4
DEFAULT_ROWS = 4
DEFAULT_PATTERN_BUDGET = 10000
CLOSURE_GUARD = 16  # subset-quantified relations refuse larger closures


@dataclass(frozen=True)
class Consistent:
    assignment: dict  # variable name -> instance element id
    structure: FinStructure


@dataclass(frozen=True)
class JointInconsistent:
    k: int
    reason: str


@dataclass(frozen=True)
class Divides:
    pattern: ArrayPattern
    k: int
    reason: str


@dataclass(frozen=True)
class NoWitnessFound:
    k_max: int
    patterns_checked: int


@dataclass(frozen=True)
class Realization:
    structure: FinStructure
    image: tuple  # instance ids realizing the left tuple
    row_isos: tuple  # per row: mapping of closure ids to instance ids


@dataclass(frozen=True)
class NonDividingCertificate:
    rows: int
    realized: tuple  # (pattern, Realization) pairs, every enumerated pattern


@dataclass(frozen=True)
class FailedPattern:
    pattern: ArrayPattern
    rows: int
    reason: str


def _add_ground_literal(t: TheorySpec, bld, glit) -> None:
    kind = glit[0]
    if kind == "rel":
        _, name, row, pos = glit
        if pos:
            for variant in atom_variants(t, name, row):
                bld.add_rel(name, variant)
    elif kind == "fun":
        _, name, row, val = glit
        bld.add_fun(name, row, val)
    elif kind == "pair":
        _, p, base = glit
        if len(t.signature.pair_sorts) != 1:
            raise SignatureError("pair literal needs a unique pair sort")
        pname = t.signature.pair_sorts[0][0]
        bld.add_pair(pname, base, p)


def _negatives_hold(t: TheorySpec, s: FinStructure, glits) -> bool:
    for glit in glits:
        kind = glit[0]
        if kind == "rel" and not glit[3]:
            if atom_variants(t, glit[1], glit[2]) & s.rels.get(glit[1], frozenset()):
                return False
        elif kind == "eq":
            if not holds(s, glit):
                return False
    return True


def joint_consistent(t: TheorySpec, phi: QFFormula, pattern: ArrayPattern, k: int):
    """Whether one assignment of the free variables satisfies phi against
    the parameters of every row of a k-row array.

    Variables range over the array's own elements plus one fresh element
    each; the first satisfying assignment (in a fixed order) is returned.
    Parameters must be elements of the pattern's base or row diagram."""
    inst = instantiate_array(t, pattern, k)
    if isinstance(inst, Inconsistent):
        return JointInconsistent(k, f"array itself inconsistent: {inst.reason}")
    missing = phi.params() - set(inst.row_maps[0])
    if missing:
        raise SignatureError(f"parameters {sorted(missing)} outside base and row diagram")
    names = phi.variables()
    fresh_ids = {}
    bld0 = extend_builder(inst.structure)
    pair_sorts = t.signature.pair_sort_names
    for n in names:
        # a fresh pair element would need a registration over points the
        # assignment has not determined, so pair variables stay inside the array
        if phi.sort_of(n) not in pair_sorts:
            fresh_ids[n] = bld0.add_element(phi.sort_of(n))
    skeleton = bld0.build()
    domains = []
    for n in names:
        sort = phi.sort_of(n)
        pool = sorted(inst.structure.elements(sort))
        if n in fresh_ids:
            pool = pool + [fresh_ids[n]]
        domains.append(pool)
    for choice in itertools.product(*domains):
        assignment = dict(zip(names, choice))
        bld = extend_builder(skeleton)
        try:
            rows_lits = []
            for rm in inst.row_maps:
                # parameters translate through the row map before the shared
                # variable assignment is applied
                glits = [_ground_in_row(lit, assignment, rm) for lit in phi.literals]
                rows_lits.append(glits)
            for glits in rows_lits:
                for g in glits:
                    _add_ground_literal(t, bld, g)
            cand = bld.build()
        except SignatureError:
            continue
        # vars that picked an array element leave their fresh id unused
        drop = {f for f in fresh_ids.values() if f not in set(assignment.values())}
        cand = cand.restrict(set(cand.sort_of) - drop)
        if in_class(t, cand):
            continue
        ok = True
        for glits in rows_lits:
            if not _negatives_hold(t, cand, glits):
                ok = False
                break
            for g in glits:
                if g[0] in ("fun", "pair") and not holds(cand, g):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return Consistent(assignment, cand)
    return JointInconsistent(k, "no joint assignment over the array")


def _ground_in_row(lit, assignment: dict, pm: dict):
    """Ground a literal against one row: variables via the shared
    assignment, parameter ids via the row map."""

    def g(tm):
        return assignment[tm[1]] if tm[0] == "v" else pm[tm[1]]

    kind = lit[0]
    if kind == "rel":
        return ("rel", lit[1], tuple(g(x) for x in lit[2]), lit[3])
    if kind == "fun":
        return ("fun", lit[1], tuple(g(x) for x in lit[2]), g(lit[3]))
    if kind == "pair":
        return ("pair", g(lit[1]), tuple(g(x) for x in lit[2]))
    if kind == "eq":
        return ("eq", g(lit[1]), g(lit[2]), lit[3])
    raise SignatureError(f"bad literal kind {kind}")


def divides(
    t: TheorySpec,
    amb: FinStructure,
    phi: QFFormula,
    base,
    k_max: int = DEFAULT_K_MAX,
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
):
    """Search for an array witnessing that phi divides over base.

    Rows are copies of phi's parameter tuple; a pattern together with the
    least k at which no joint solution exists is returned, otherwise the
    bounded-search failure."""
    base_cl = acl(t, amb, set(base)).closure
    coords = tuple(sorted(phi.params() - base_cl))
    patterns = enumerate_patterns(t, amb, coords, base, pattern_budget)
    for pattern in patterns:
        for k in range(2, k_max + 1):
            if isinstance(instantiate_array(t, pattern, max(k, 3)), Inconsistent):
                break  # pattern not valid at this length
            res = joint_consistent(t, phi, pattern, k)
            if isinstance(res, JointInconsistent):
                return Divides(pattern, k, res.reason)
    return NoWitnessFound(k_max, len(patterns))


def nondividing_certificate(
    t: TheorySpec,
    amb: FinStructure,
    left: tuple,
    right: tuple,
    base,
    rows: int = DEFAULT_ROWS,
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
    combo_budget: int = 4096,
):
    """Certify that the type of left over base+right does not divide.

    Every array pattern for copies of right must admit a joint realization
    of the type; the realization may reuse array elements, share or split
    auxiliary closure elements, and re-embed each row by any isomorphism
    fixing base and row coordinates.  Returns a NonDividingCertificate or
    the first FailedPattern."""
    base = tuple(sorted(set(base)))
    base_cl = acl(t, amb, set(base)).closure
    row_cl = acl(t, amb, set(base) | set(right)).closure
    k_cl = acl(t, amb, set(base) | set(right) | set(left)).closure
    apart = tuple(sorted(k_cl - row_cl))
    k_sub = amb.restrict(k_cl)
    row_sub = amb.restrict(row_cl | base_cl)
    aux = tuple(e for e in apart if e not in set(left))
    patterns = enumerate_patterns(t, amb, right, base, pattern_budget)
    realized = []
    for pattern in patterns:
        inst = instantiate_array(t, pattern, rows)
        if isinstance(inst, Inconsistent):
            return FailedPattern(pattern, rows, f"array invalid at {rows} rows: {inst.reason}")
        real = _glue_realization(t, amb, pattern, inst, left, right, base,
                                 k_sub, row_sub, aux, combo_budget)
        if real is None:
            return FailedPattern(pattern, rows, "no joint realization of the type")
        realized.append((pattern, real))
    return NonDividingCertificate(rows, tuple(realized))


def _glue_realization(t, amb, pattern, inst, left, right, base, k_sub, row_sub,
                      aux, combo_budget):
    rows = len(inst.row_maps)
    base_cl = frozenset(pattern.base_struct.sort_of)
    # alignment candidates per row: copies of the row diagram inside the
    # array, base fixed pointwise, coordinates pinned to the row's copies
    alignments = []
    for i in range(rows):
        rm = inst.row_maps[i]
        target_ids = set(inst.base_map.values()) | {rm[e] for e in rm}
        target = inst.structure.restrict(target_ids)
        pinned = {c: inst.base_map[c] for c in base}
        for c in right:
            pinned[c] = rm[c] if c in rm else inst.base_map[c]
        embs = find_embeddings(row_sub, target, pinned=pinned, limit=16)
        if not embs:
            return None
        alignments.append(embs)

    share_space: list
    if len(aux) <= 3:
        share_space = list(itertools.product((True, False), repeat=len(aux)))
    else:
        share_space = [(True,) * len(aux), (False,) * len(aux)]

    tried = 0
    for shares in share_space:
        shared_aux = {a for a, s in zip(aux, shares) if s}
        for combo in itertools.product(*alignments):
            tried += 1
            if tried > combo_budget:
                return None
            bld = extend_builder(inst.structure)
            try:
                lmap = {}
                for e in left:
                    if e in pattern.base_struct.sort_of:
                        lmap[e] = inst.base_map[e]
                    elif e in pattern.const_elems:
                        lmap[e] = inst.row_maps[0][e]
                    elif e in inst.row_maps[0]:
                        lmap[e] = inst.row_maps[0][e]
                    else:
                        lmap[e] = bld.add_element(amb.sort_of[e])
                shared_map = {a: bld.add_element(amb.sort_of[a]) for a in sorted(shared_aux)}
                row_isos = []
                for i in range(rows):
                    rho = dict(combo[i])
                    rho.update(lmap)
                    rho.update(shared_map)
                    for a in sorted(set(aux) - shared_aux):
                        rho[a] = bld.add_element(amb.sort_of[a])
                    bld.copy_atoms_from(k_sub, rho)
                    row_isos.append(rho)
                cand = bld.build()
            except (SignatureError, KeyError):
                continue
            if in_class(t, cand):
                continue
            image = tuple(lmap[e] for e in left)
            ok = True
            for i in range(rows):
                coord_ids = inst.coord_ids(pattern, i)
                same, _ = same_type_across(
                    t, cand, image + coord_ids,
                    amb, tuple(left) + tuple(right),
                    base_pairs=[(inst.base_map[c], c) for c in base],
                )
                if not same:
                    ok = False
                    break
            if ok:
                return Realization(cand, image, tuple(tuple(sorted(r.items())) for r in row_isos))
    return None


# -- forking ---------------------------------------------------------------------


@dataclass(frozen=True)
class ForksReport:
    entailment_ok: bool
    failing_witness: tuple | None  # witness assignment breaking entailment
    disjunct_verdicts: tuple  # Divides / NoWitnessFound per disjunct

    @property
    def forks(self) -> bool:
        return self.entailment_ok and all(
            isinstance(v, Divides) for v in self.disjunct_verdicts
        )


def forks_witness(
    t: TheorySpec,
    amb: FinStructure,
    phi: ExFormula,
    disjuncts: tuple,
    base,
    k_max: int = DEFAULT_K_MAX,
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
) -> ForksReport:
    """Check a proposed forking witness: phi (with its existential witness
    variables ranging over the closure of base and parameters) must entail
    the disjunction, and every disjunct must divide over base.

    Entailment is literal-level: wherever the witness-only literals hold in
    the ambient, the remaining literals must include some disjunct's."""
    cl = acl(t, amb, set(base) | set(phi.matrix.params())).closure
    wnames = tuple(phi.witnesses)
    free = phi.free_variables()
    pools = [sorted(e for e in cl if amb.sort_of[e] == phi.matrix.sort_of(w))
             for w in wnames]
    failing = None
    entailment_ok = True
    # disjunct literals keep their free variables; entailment compares them
    # to phi's residual literals under matching variable names
    dis_lits = [frozenset(d.literals) for d in disjuncts]
    for choice in itertools.product(*pools):
        wassign = dict(zip(wnames, choice))
        witness_only = []
        residual = []
        for lit in phi.matrix.literals:
            names = {tm[1] for tm in _literal_vars(lit)}
            if names <= set(wnames):
                witness_only.append(ground(lit, wassign))
            else:
                residual.append(_partial_ground(lit, wassign))
        if not all(holds(amb, g) for g in witness_only):
            continue
        rset = frozenset(residual)
        if not any(ls <= rset for ls in dis_lits):
            entailment_ok = False
            failing = tuple(sorted(wassign.items()))
            break
    verdicts = tuple(
        divides(t, amb, d, base, k_max=k_max, pattern_budget=pattern_budget)
        for d in disjuncts
    )
    return ForksReport(entailment_ok, failing, verdicts)


def _literal_vars(lit):
    from .formulas import _literal_terms

    return [tm for tm in _literal_terms(lit) if tm[0] == "v"]


def _partial_ground(lit, assignment):
    """Ground only the assigned variables, leaving others symbolic."""

    def g(tm):
        if tm[0] == "v" and tm[1] in assignment:
            return ("e", assignment[tm[1]])
        return tm

    kind = lit[0]
    if kind == "rel":
        return ("rel", lit[1], tuple(g(x) for x in lit[2]), lit[3])
    if kind == "fun":
        return ("fun", lit[1], tuple(g(x) for x in lit[2]), g(lit[3]))
    if kind == "pair":
        return ("pair", g(lit[1]), tuple(g(x) for x in lit[2]))
    if kind == "eq":
        return ("eq", g(lit[1]), g(lit[2]), lit[3])
    raise SignatureError(f"bad literal kind {kind}")


# -- derived relations -----------------------------------------------------------


@dataclass(frozen=True)
class RelationVerdict:
    name: str
    independent: bool
    detail: str
    evidence: object = None


def a_indep(t: TheorySpec, amb: FinStructure, A, B, C) -> RelationVerdict:
    """Closure-intersection independence: acl(AC) meets acl(BC) in acl(C)."""
    ca = acl(t, amb, set(A) | set(C)).closure
    cb = acl(t, amb, set(B) | set(C)).closure
    cc = acl(t, amb, set(C)).closure
    extra = sorted((ca & cb) - cc)
    if extra:
        return RelationVerdict("a", False, f"shared closure elements {extra}", tuple(extra))
    return RelationVerdict("a", True, "closures meet only in the base closure")


def M_indep(t: TheorySpec, amb: FinStructure, A, B, C) -> RelationVerdict:
    """Closure independence over every intermediate base between C and
    acl(BC)."""
    cb = acl(t, amb, set(B) | set(C)).closure
    optional = sorted(cb - set(C))
    if len(optional) > CLOSURE_GUARD:
        raise BudgetExceeded(f"{len(optional)} closure elements exceed the subset guard")
    for r in range(len(optional) + 1):
        for picked in itertools.combinations(optional, r):
            D = set(C) | set(picked)
            v = a_indep(t, amb, A, B, D)
            if not v.independent:
                return RelationVerdict("M", False,
                                       f"fails over intermediate base {sorted(D)}: {v.detail}",
                                       tuple(sorted(D)))
    return RelationVerdict("M", True, "holds over every intermediate base")


def m_indep(t: TheorySpec, amb: FinStructure, A, B, C) -> RelationVerdict:
    """Closure independence over every base between C and B union C."""
    optional = sorted((set(B) | set(C)) - set(C))
    if len(optional) > CLOSURE_GUARD:
        raise BudgetExceeded(f"{len(optional)} elements exceed the subset guard")
    for r in range(len(optional) + 1):
        for picked in itertools.combinations(optional, r):
            D = set(C) | set(picked)
            v = a_indep(t, amb, A, B, D)
            if not v.independent:
                return RelationVerdict("m", False,
                                       f"fails over intermediate base {sorted(D)}: {v.detail}",
                                       tuple(sorted(D)))
    return RelationVerdict("m", True, "holds over every intermediate base")


def d_indep(
    t: TheorySpec,
    amb: FinStructure,
    A,
    B,
    C,
    rows: int = DEFAULT_ROWS,
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
) -> RelationVerdict:
    """Dividing independence of the type of A over B and C."""
    left = tuple(sorted(set(A)))
    right = tuple(sorted(set(B) - set(C)))
    res = nondividing_certificate(t, amb, left, right, C, rows=rows,
                                  pattern_budget=pattern_budget)
    if isinstance(res, NonDividingCertificate):
        return RelationVerdict("d", True,
                               f"type realized along all {len(res.realized)} arrays", res)
    return RelationVerdict("d", False, res.reason, res)


def da_indep(
    t: TheorySpec,
    amb: FinStructure,
    A,
    B,
    C,
    rows: int = DEFAULT_ROWS,
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
    cross_check: bool = True,
) -> RelationVerdict:
    """Dividing independence strengthened to the closure of the right side:
    the type of A over acl(BC) must not divide over C.

    Closure elements become coordinates of the right-hand tuple, so a
    realization must match them row by row; this is strictly harder than
    plain dividing independence whenever the closure adds elements whose
    type over C is not rigid."""
    left = tuple(sorted(set(A)))
    cb = acl(t, amb, set(B) | set(C)).closure
    right = tuple(sorted(cb - set(C)))
    res = nondividing_certificate(t, amb, left, right, C, rows=rows,
                                  pattern_budget=pattern_budget)
    if isinstance(res, NonDividingCertificate):
        return RelationVerdict("da", True,
                               f"type over the closure realized along all "
                               f"{len(res.realized)} arrays", res)
    evidence = {"failed": res}
    detail = res.reason
    if cross_check:
        phi = diagram_formula(t, amb, left, frozenset(C) | set(right))
        evidence["cross_check"] = divides(t, amb, phi, C, pattern_budget=pattern_budget)
        if isinstance(evidence["cross_check"], Divides):
            detail += "; diagram of the tuple divides, confirming the failure"
    return RelationVerdict("da", False, detail, evidence)
