"""Cavity field of a laser-driven equidistant three-level ladder emitter.

The main route solves reduced dressed-state equations on a truncated Fock
ladder (:mod:`ladder_cavity.dressed`); :mod:`ladder_cavity.oracle` integrates
the full master equation for validation.
"""

__version__ = "0.1.0"

from .dressed import (
    DressedState,
    SolverConfig,
    SteadyMethod,
    auto_truncate,
    evolve,
    generator,
    steady_state,
)
from .model import DressedParams, Severity, SystemParams, derive_dressed, secular_check
from .observables import UNDEFINED, emitter_summary, g2, mean_photon, observables
from .oracle import FullState, OracleParams, build_liouvillian, oracle_evolve, oracle_steady
from .sweep import SweepParam, SweepSpec, locate_minimum, run_sweep

__all__ = [
    "DressedParams",
    "DressedState",
    "FullState",
    "OracleParams",
    "Severity",
    "SolverConfig",
    "SteadyMethod",
    "SweepParam",
    "SweepSpec",
    "SystemParams",
    "UNDEFINED",
    "auto_truncate",
    "build_liouvillian",
    "derive_dressed",
    "emitter_summary",
    "evolve",
    "g2",
    "generator",
    "locate_minimum",
    "mean_photon",
    "observables",
    "oracle_evolve",
    "oracle_steady",
    "run_sweep",
    "secular_check",
    "steady_state",
]
