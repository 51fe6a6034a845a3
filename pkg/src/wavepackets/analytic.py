"""Closed-form Gaussian envelope in a linear potential.

The envelope obeys ``i dA/dxi = (d^2/dtau^2 + F tau) A`` with initial
profile ``A(tau, 0) = exp(-tau^2/tau0^2) exp(-i p0 tau)``. Its modulus and
(unwrapped) phase are evaluated here without any grid, so these functions
serve as the reference for the spectral solver and the gauge pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidComparisonError, InvalidParameterError
from .params import DimensionlessFrame, PhysicalParams


@dataclass(frozen=True)
class GaussianState:
    """A Gaussian packet: frame (tau0, xi_s), initial momentum and force."""

    frame: DimensionlessFrame
    p0: float = 0.0
    F: float = 0.0

    def __post_init__(self):
        if not self.frame.xi_s > 0:
            raise InvalidParameterError("xi_s must be positive")

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "GaussianState":
        return cls(DimensionlessFrame(params), params.p0, params.F)

    @property
    def tau0(self) -> float:
        return self.frame.tau0

    @property
    def xi_s(self) -> float:
        return self.frame.xi_s


@dataclass(frozen=True)
class PhaseDecomposition:
    """Phase at the packet maximum split into its physical contributions."""

    gouy: np.ndarray | float
    kennard: np.ndarray | float
    momentum_linear: np.ndarray | float
    cross: np.ndarray | float

    @property
    def total(self):
        return self.gouy + self.kennard + self.momentum_linear + self.cross


def _xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise InvalidParameterError("xi must be non-negative")
    return xi


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def peak_position(state: GaussianState, xi):
    """Location ``2 p0 xi + F xi^2`` of the envelope maximum in tau."""
    xi = _xi(xi)
    return _out(2.0 * state.p0 * xi + state.F * xi ** 2)


def envelope_magnitude(state: GaussianState, tau, xi):
    """|A(tau, xi)|, a spreading Gaussian riding on the classical trajectory."""
    xi = _xi(xi)
    tau = np.asarray(tau, dtype=float)
    s2 = 1.0 + (xi / state.xi_s) ** 2
    shifted = tau - 2.0 * state.p0 * xi - state.F * xi ** 2
    return _out(s2 ** -0.25 * np.exp(-shifted ** 2 / (state.tau0 ** 2 * s2)))


def envelope_phase(state: GaussianState, tau, xi):
    """Unwrapped phase of A(tau, xi).

    Sum of the Gouy term, the chirp of the spreading packet, the potential
    term, the cubic Kennard term and the three momentum terms.
    """
    xi = _xi(xi)
    tau = np.asarray(tau, dtype=float)
    p0, F, xi_s = state.p0, state.F, state.xi_s
    s2 = 1.0 + (xi / xi_s) ** 2
    shifted = tau - 2.0 * p0 * xi - F * xi ** 2
    phase = (
        0.5 * np.arctan(xi / xi_s)
        - (xi / xi_s) * shifted ** 2 / (state.tau0 ** 2 * s2)
        - F * (tau - 2.0 * p0 * xi) * xi
        + F ** 2 * xi ** 3 / 3.0
        - p0 * tau
        + p0 ** 2 * xi
        - p0 * F * xi ** 2
    )
    return _out(phase)


def envelope(state: GaussianState, tau, xi):
    """Complex envelope ``|A| exp(i phi)``."""
    return envelope_magnitude(state, tau, xi) * np.exp(1j * np.asarray(envelope_phase(state, tau, xi)))


def decompose_phase_at_maximum(state: GaussianState, xi) -> PhaseDecomposition:
    xi = _xi(xi)
    p0, F = state.p0, state.F
    return PhaseDecomposition(
        gouy=_out(0.5 * np.arctan(xi / state.xi_s)),
        kennard=_out(-(2.0 / 3.0) * F ** 2 * xi ** 3),
        momentum_linear=_out(-p0 ** 2 * xi),
        cross=_out(-2.0 * p0 * F * xi ** 2),
    )


def phase_at_maximum(state: GaussianState, xi):
    """Phase of the envelope evaluated on its maximum ``tau = 2 p0 xi + F xi^2``.

    At the maximum the chirp term vanishes and the Kennard coefficient
    becomes -2/3 instead of +1/3.
    """
    return _out(decompose_phase_at_maximum(state, xi).total)


def flow_phase_difference(p0: float, F: float, xi):
    """Phase at the maximum with force ``F`` minus the same without force."""
    xi = _xi(xi)
    return _out(-(2.0 / 3.0) * F ** 2 * xi ** 3 - 2.0 * p0 * F * xi ** 2)


def _check_pair(state: GaussianState, state0: GaussianState):
    if state.frame != state0.frame or state.F != state0.F:
        raise InvalidComparisonError("states must share frame and force")
    if state0.p0 != 0:
        raise InvalidComparisonError("reference state must have zero momentum")


def galilean_amplitude_shift(state: GaussianState, state0: GaussianState, tau, xi):
    """Residual ``|A(tau, xi)| - |A0(tau - 2 p0 xi, xi)|`` (zero in exact arithmetic)."""
    _check_pair(state, state0)
    xi = _xi(xi)
    tau = np.asarray(tau, dtype=float)
    lhs = envelope_magnitude(state, tau, xi)
    rhs = envelope_magnitude(state0, tau - 2.0 * state.p0 * xi, xi)
    return _out(lhs - rhs)


def galilean_phase_relation(state: GaussianState, state0: GaussianState, tau, xi):
    """Residual of ``phi = phi0(tau - 2 p0 xi) - p0 tau + p0^2 xi - p0 F xi^2``."""
    _check_pair(state, state0)
    xi = _xi(xi)
    tau = np.asarray(tau, dtype=float)
    p0, F = state.p0, state.F
    lhs = envelope_phase(state, tau, xi)
    rhs = envelope_phase(state0, tau - 2.0 * p0 * xi, xi) - p0 * tau + p0 ** 2 * xi - p0 * F * xi ** 2
    return _out(lhs - rhs)
