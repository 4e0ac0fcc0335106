"""Coupled-dipole Casimir and van der Waals solver."""

from ._core import (
    CasimirError,
    ConfigError,
    NumericalError,
    Scenario,
    ValidationError,
    coupling_matrix,
    delta_logdet,
    energy,
    epsilon,
    geometry,
    materials,
    oracle,
    presets,
    run,
    sweep,
)

__all__ = [
    "CasimirError",
    "ConfigError",
    "NumericalError",
    "Scenario",
    "ValidationError",
    "coupling_matrix",
    "delta_logdet",
    "energy",
    "epsilon",
    "geometry",
    "materials",
    "oracle",
    "presets",
    "run",
    "sweep",
]
