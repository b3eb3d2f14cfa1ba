"""Packaged counterexample configurations with expected-verdict tables."""

from .runner import (
    Claim,
    ClaimResult,
    Report,
    Scenario,
    catalog,
    load_scenario,
    run_scenario,
    sop3_witness_check,
)

__all__ = [
    "Claim",
    "ClaimResult",
    "Report",
    "Scenario",
    "catalog",
    "load_scenario",
    "run_scenario",
    "sop3_witness_check",
]
