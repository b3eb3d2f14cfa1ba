"""Algebraic closure, duplication bounds, and type equality."""

import random

import pytest

from finindep.amalgam import random_member
from finindep.scenarios import load_scenario
from finindep.theories import builtin
from finindep.typespace import (
    Algebraic,
    NotAlgebraicUpTo,
    acl,
    acl_cross_check,
    duplication_test,
    same_type,
)


@pytest.fixture(scope="module")
def incidence():
    return load_scenario("incidence_4_2")


@pytest.fixture(scope="module")
def og():
    return load_scenario("og")


def test_incidence_closure_captures_determined_points(incidence):
    sc = incidence
    t, amb, n = sc.theory, sc.configuration, sc.names
    cl = acl(t, amb, {n["b0"], n["b1"]}).closure
    assert {n["d0"], n["d1"], n["d2"]} <= cl
    assert n["a0"] not in cl and n["e"] not in cl


def test_incidence_duplication_bounds(incidence):
    sc = incidence
    t, amb, n = sc.theory, sc.configuration, sc.names
    base = {n["b0"], n["b1"]}
    for d in ("d0", "d1", "d2"):
        res = duplication_test(t, amb, n[d], base, bound=4)
        assert isinstance(res, Algebraic) and res.count <= 3
    res = duplication_test(t, amb, n["a0"], base, bound=4)
    assert isinstance(res, NotAlgebraicUpTo)


def test_og_closure_is_trivial_beyond_constants(og):
    sc = og
    t, amb, n = sc.theory, sc.configuration, sc.names
    consts = set(amb.consts.values())
    cl = acl(t, amb, {n["a"]}).closure
    assert cl == {n["a"]} | consts


def test_og_random_closures_are_disintegrated():
    t = builtin("og")
    rng = random.Random(3)
    for _ in range(25):
        amb = random_member(t, rng, 5)
        consts = set(amb.consts.values())
        xs = set(rng.sample(list(amb.sort_of), rng.randrange(0, len(amb) + 1)))
        assert acl(t, amb, xs).closure == xs | consts
        assert acl_cross_check(t, amb, xs, bound=4) == []


def test_closure_is_monotone_and_idempotent(incidence):
    sc = incidence
    t, amb, n = sc.theory, sc.configuration, sc.names
    small = acl(t, amb, {n["b0"]}).closure
    big = acl(t, amb, {n["b0"], n["b1"]}).closure
    assert small <= big
    assert acl(t, amb, big).closure == big


def test_pair_points_enter_the_closure():
    sc = load_scenario("circular_pairs")
    t, amb, n = sc.theory, sc.configuration, sc.names
    cl = acl(t, amb, {n["b"]}).closure
    assert {n["d1"], n["d2"]} <= cl


def test_constants_swap_as_a_set(og):
    sc = og
    t, amb, n = sc.theory, sc.configuration, sc.names
    assert same_type(t, amb, (n["c0"],), (n["c1"],))[0]
    # pinning one edge breaks the symmetry: a sees b in color 0 only
    assert not same_type(t, amb, (n["c0"],), (n["c1"],), base=(n["a"], n["b"]))[0]


def test_same_type_respects_relations(incidence):
    sc = incidence
    t, amb, n = sc.theory, sc.configuration, sc.names
    # d0 lies on e, d2 does not, so over e they differ
    assert not same_type(t, amb, (n["d0"],), (n["d2"],), base=(n["e"],))[0]
    assert same_type(t, amb, (n["d0"],), (n["d1"],), base=(n["b0"], n["b1"]))[0]
