"""Gaussian water-wave packets in an effective linear potential.

Closed-form envelope evolution, a split-step spectral solver, virtual wave
gauges with Hilbert demodulation, and the trajectory and phase fits used to
read a force back out of gauge records.
"""

from .analytic import GaussianState, envelope, envelope_magnitude, envelope_phase, phase_at_maximum
from .fitting import TrajectoryRegressor, fit_trajectory
from .gauge import demodulate, synthesize_gauge
from .params import DimensionlessFrame, PhysicalParams
from .solver import EnvelopeField, GridSpec, SolverConfig, propagate

__version__ = "0.1.0"

__all__ = [
    "DimensionlessFrame",
    "EnvelopeField",
    "GaussianState",
    "GridSpec",
    "PhysicalParams",
    "SolverConfig",
    "TrajectoryRegressor",
    "demodulate",
    "envelope",
    "envelope_magnitude",
    "envelope_phase",
    "fit_trajectory",
    "phase_at_maximum",
    "propagate",
    "synthesize_gauge",
]
