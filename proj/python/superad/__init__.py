"""Superadiabatic representations and transition wave packets for 1D
two-level semiclassical Schrodinger systems.

The heavy lifting lives in the compiled extension `_superad`; this package
re-exports its surface.
"""

from _superad import (  # noqa: F401
    DiabaticModel,
    Grid1D,
    LandauZener,
    OptimalRepresentation,
    PacketSpec,
    PoleParams,
    TransitionParams,
    coefficient_table,
    compare_point,
    derived_params,
    formula_transmitted,
    inverse_scaled_fourier,
    lz_probability,
    optimal_representation,
    packet_momentum,
    run_verify_quick,
    scaled_fourier,
    v_of_k,
)

__all__ = [
    "DiabaticModel",
    "Grid1D",
    "LandauZener",
    "OptimalRepresentation",
    "PacketSpec",
    "PoleParams",
    "TransitionParams",
    "coefficient_table",
    "compare_point",
    "derived_params",
    "formula_transmitted",
    "inverse_scaled_fourier",
    "lz_probability",
    "optimal_representation",
    "packet_momentum",
    "run_verify_quick",
    "scaled_fourier",
    "v_of_k",
]
