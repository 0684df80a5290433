"""Numerical tools for the nonlocal bushfire equation and its traveling fronts."""

from .exceptions import BlowUp, ConfigurationError, NumericalFailure, WitnessUnavailable
from .kernels import (
    Kernel,
    certify,
    load_tabulated,
    make_dirac_idealized,
    make_gaussian,
    make_step,
    make_tabulated,
    zero_kernel,
)
from .numerics import Field, Grid1D, convolve, convolve_plus, cumulative_from_anchor, trapezoid
from .pde import EvolutionSolver, ProblemSpec, ordering_check, simulate, simulate_frozen, step
from .stability import (
    Perturbation,
    instability_witness,
    small_support_check,
    stability_form,
)
from .waves import (
    TravelingWaveSolver,
    WaveParams,
    WaveProfile,
    extend_left,
    idealized_wave,
    picard_map,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUp",
    "ConfigurationError",
    "NumericalFailure",
    "WitnessUnavailable",
    "Kernel",
    "certify",
    "load_tabulated",
    "make_dirac_idealized",
    "make_gaussian",
    "make_step",
    "make_tabulated",
    "zero_kernel",
    "Field",
    "Grid1D",
    "convolve",
    "convolve_plus",
    "cumulative_from_anchor",
    "trapezoid",
    "EvolutionSolver",
    "ProblemSpec",
    "ordering_check",
    "simulate",
    "simulate_frozen",
    "step",
    "Perturbation",
    "instability_witness",
    "small_support_check",
    "stability_form",
    "TravelingWaveSolver",
    "WaveParams",
    "WaveProfile",
    "extend_left",
    "idealized_wave",
    "picard_map",
    "solve",
]
