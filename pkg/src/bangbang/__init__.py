"""Minimum-time bang-bang control of a detuned qubit.

Drives the Bloch vector from the north pole to the equator with a transverse
field restricted to [0, omega_max]: regime classification and sequence
synthesis, a maximum-principle certificate, exact and RK4 propagation, and a
brute-force oracle with a simple suboptimal baseline.
"""
from ._backend import BACKEND
from .errors import BangBangError, CostateError, DomainError, InfeasibleError, NoRootError
from .oracle import SearchResult, brute_force, deviation, suboptimal_sequence
from .params import ProblemParams
from .pmp import VerificationReport, costate_backward, verify
from .simulate import Trajectory, propagate_exact, propagate_ode, terminal_residual
from .su2 import Amplitudes, BlochVector, FieldSegment, Level, Rotation, amplitudes_to_bloch, apply, compose
from .synthesis import (
    DurationSet,
    Regime,
    RegimeKind,
    SynthesisReport,
    Variant,
    classify,
    optimal_duration,
    r_max,
    r_min,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Amplitudes",
    "BangBangError",
    "BlochVector",
    "CostateError",
    "DomainError",
    "DurationSet",
    "FieldSegment",
    "InfeasibleError",
    "Level",
    "NoRootError",
    "ProblemParams",
    "Regime",
    "RegimeKind",
    "Rotation",
    "SearchResult",
    "SynthesisReport",
    "Trajectory",
    "Variant",
    "VerificationReport",
    "amplitudes_to_bloch",
    "apply",
    "brute_force",
    "classify",
    "compose",
    "costate_backward",
    "deviation",
    "optimal_duration",
    "propagate_exact",
    "propagate_ode",
    "r_max",
    "r_min",
    "suboptimal_sequence",
    "synthesize",
    "terminal_residual",
    "verify",
]
