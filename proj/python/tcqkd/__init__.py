"""Tripartite counterfactual QKD simulator (C++ core)."""

from ._core import (
    ContractViolation,
    __version__,
    audit_counterfactuality,
    cqze_transfer,
    ideal_limit_check,
    round_distribution,
    run_session,
    sift,
    sweep_cycles,
)

__all__ = [
    "ContractViolation",
    "__version__",
    "audit_counterfactuality",
    "cqze_transfer",
    "ideal_limit_check",
    "round_distribution",
    "run_session",
    "sift",
    "sweep_cycles",
]
