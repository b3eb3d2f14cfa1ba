"""Free amalgamation and the randomized independence-axiom suite."""

import random

import pytest

from finindep.amalgam import axiom_suite, free_amalgam, free_independent, random_member
from finindep.theories import builtin, builtin_names, in_class


@pytest.mark.parametrize("name", builtin_names())
def test_random_members_are_class_members(name):
    t = builtin(name)
    rng = random.Random(5)
    for _ in range(30):
        assert not in_class(t, random_member(t, rng, 5))


@pytest.mark.parametrize("name", ["og", "incidence_4_2"])
def test_free_amalgam_glues_without_new_atoms(name):
    t = builtin(name)
    rng = random.Random(9)
    for _ in range(20):
        amb = random_member(t, rng, 5)
        elems = list(amb.sort_of)
        picked = set(rng.sample(elems, rng.randrange(0, len(elems) + 1)))
        picked |= amb.constant_elems  # shared part must cover the constants
        shared = {e: e for e in picked}
        # amalgamate the structure with itself over the shared part
        res, ea, eb = free_amalgam(t, amb, amb, shared)
        assert not in_class(t, res)
        # no relation row mixes strictly-left with strictly-right elements
        left_only = {v for k, v in ea.items() if k not in shared}
        right_only = {v for k, v in eb.items() if k not in shared}
        for rows in res.rels.values():
            for row in rows:
                assert not (set(row) & left_only and set(row) & right_only)


@pytest.mark.parametrize("name", ["og", "incidence_4_2"])
def test_axiom_suite_passes_on_free_amalgamation_theories(name):
    rep = axiom_suite(builtin(name), trials=60, size_bound=5, seed=1)
    assert rep.ok, rep.failures[:3]
    assert all(n > 0 for n in rep.checked.values())


@pytest.mark.parametrize("name", ["circular", "generic_function"])
def test_axiom_suite_detects_missing_freedom(name):
    # neither class amalgamates freely: gluing two cyclic orders (or two
    # function graphs) without new atoms leaves triples (values) undecided
    rep = axiom_suite(builtin(name), trials=60, size_bound=5, seed=1)
    assert not rep.ok
    assert {f.axiom for f in rep.failures} <= {"freedom", "full-existence-closed"}


def test_axiom_suite_rejects_unknown_axiom():
    with pytest.raises(KeyError):
        axiom_suite(builtin("og"), axioms=("nonsense",), trials=1)


def test_free_independence_is_symmetric_and_monotone():
    t = builtin("incidence_4_2")
    rng = random.Random(2)
    for _ in range(40):
        amb = random_member(t, rng, 5)
        elems = list(amb.sort_of)
        pick = lambda: set(rng.sample(elems, rng.randrange(0, len(elems) + 1)))
        A, B, C = pick(), pick(), pick()
        ab = free_independent(t, amb, A, B, C)[0]
        assert ab == free_independent(t, amb, B, A, C)[0]
        if ab:
            for Bs in (B - {e} for e in list(B)[:2]):
                assert free_independent(t, amb, A, Bs, C)[0]
