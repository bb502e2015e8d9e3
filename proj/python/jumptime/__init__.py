"""Quantum-jump transport on two-band lattices."""

from ._jumptime import (
    AmbiguityError,
    ConsistencyError,
    DarkDivergence,
    DarkTrapped,
    Dissipator,
    DomainError,
    Error,
    IntegrationError,
    Model,
    Sublattice,
    ValidationError,
    __version__,
    bloch_steady_state,
    canonical_config,
    jumptime_map_positions,
    jumptime_phase,
    k_cc,
    kernel,
    residual_terms,
    run_experiment,
    simulate,
    ssh_steady_current,
    topology_report,
    winding_number,
)

__all__ = [name for name in dir() if not name.startswith("_")]
