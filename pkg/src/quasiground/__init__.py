"""Normalized ground states of a quasilinear Schrödinger equation by radial shooting."""

from .radial_field import FunctionalValues, ParameterError, Params, RadialProfile, functionals
from .dual_transform import ConvergenceError, phi, phi_inv, phi_values

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "FunctionalValues",
    "ParameterError",
    "Params",
    "RadialProfile",
    "functionals",
    "phi",
    "phi_inv",
    "phi_values",
]
