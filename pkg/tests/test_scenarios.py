"""Bundled scenarios: configurations load, claims evaluate, reports serialize."""

import pytest

from finindep.scenarios import catalog, load_scenario, run_scenario, sop3_witness_check
from finindep.theories import in_class


def test_catalog_is_stable():
    assert catalog() == ("circular_pairs", "generic_function_pairs", "og",
                         "og_sop3", "incidence_4_2")


@pytest.mark.parametrize("name", catalog())
def test_configurations_are_class_members(name):
    sc = load_scenario(name)
    assert not in_class(sc.theory, sc.configuration)
    assert set(sc.names.values()) <= set(sc.configuration.sort_of)


@pytest.mark.parametrize("name", catalog())
def test_all_claims_hold(name):
    rep = run_scenario(name, seed=0)
    bad = [r for r in rep.results if not r.ok]
    assert not bad, [f"{r.id}: {r.detail}" for r in bad]


def test_unknown_scenario_raises():
    with pytest.raises(KeyError):
        load_scenario("missing")


def test_report_serializes():
    rep = run_scenario("og_sop3", seed=0)
    d = rep.to_dict()
    assert d["scenario"] == "og_sop3" and d["ok"] is True
    assert all({"id", "kind", "expected", "actual", "ok"} <= set(r) for r in d["results"])


@pytest.mark.parametrize("n,expected", [(2, True), (3, True), (4, True)])
def test_strict_order_ladders(n, expected):
    assert sop3_witness_check(n) is expected


def test_corrupted_ladder_fails():
    assert sop3_witness_check(3, corrupt=True) is False
