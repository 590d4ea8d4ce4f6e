"""Radial chemotaxis with indirect signal production (C++ core)."""

from ._kslab import (
    ModelParams,
    blowup_mass_threshold,
    certify,
    constants,
    critical_mass,
    omega_n,
    run_command,
    select_parameters,
    simulate,
    simulate_mass,
    sweep,
    theta,
    unit_ball_volume,
)

__all__ = [
    "ModelParams",
    "blowup_mass_threshold",
    "certify",
    "constants",
    "critical_mass",
    "omega_n",
    "run_command",
    "select_parameters",
    "simulate",
    "simulate_mass",
    "sweep",
    "theta",
    "unit_ball_volume",
]
