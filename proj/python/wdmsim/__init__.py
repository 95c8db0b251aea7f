"""Multimedia traffic routing over IP/MPLS-over-WDM networks."""

from ._core import (
    AdmissionDecision,
    AuditError,
    NetworkState,
    NoTrafficError,
    PhysicalTopology,
    ValidationError,
    hourly_factor,
    k_shortest_paths,
    marginal_delay_length,
    onoff_mean_rate,
    propagation_delay_s,
    run_simulation,
)

__all__ = [
    "AdmissionDecision",
    "AuditError",
    "NetworkState",
    "NoTrafficError",
    "PhysicalTopology",
    "ValidationError",
    "hourly_factor",
    "k_shortest_paths",
    "marginal_delay_length",
    "onoff_mean_rate",
    "propagation_delay_s",
    "run_simulation",
]
