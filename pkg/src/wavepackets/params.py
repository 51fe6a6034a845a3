"""Laboratory parameters, deep-water dispersion and the comoving frame.

The envelope of a weakly steep deep-water wave train is described in the
scaled coordinates

    xi  = eps**2 * k0 * x                  (propagation distance)
    tau = eps * omega0 * (x / c_g - t)     (retarded time, comoving frame)

with ``omega0**2 = k0 * g`` and ``c_g = omega0 / (2 k0)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

GRAVITY = 9.81

# the linear regime stops making sense well before this
EPSILON_MAX = 0.3
EPSILON_WARN = 0.15
EPSILON_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame constants of one wave-maker run.

    Parameters
    ----------
    k0 : float
        Carrier wavenumber [1/m].
    a0 : float
        Maximum envelope amplitude [m].
    t0 : float
        Initial pulse size [s].
    epsilon : float
        Wave steepness ``k0 * a0``. Given explicitly and cross-checked.
    Omega0 : float
        Detuning of the wave-maker frequency from the carrier [rad/s].
    F : float
        Dimensionless effective force of the linear potential.
    g : float
        Gravitational acceleration [m/s^2].
    """

    k0: float
    a0: float
    t0: float
    epsilon: float
    Omega0: float = 0.0
    F: float = 0.0
    g: float = GRAVITY

    def __post_init__(self):
        for name in ("k0", "g", "a0", "t0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive, got {value!r}", field=name)
        for name in ("epsilon", "Omega0", "F"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite", field=name)
        eps = self.epsilon
        if not 0 < eps < EPSILON_MAX:
            raise InvalidParameterError(
                f"epsilon must lie in (0, {EPSILON_MAX}), got {eps!r}", field="epsilon"
            )
        steepness = self.k0 * self.a0
        if abs(eps - steepness) / eps >= EPSILON_MATCH_RTOL:
            raise InvalidParameterError(
                f"epsilon={eps!r} is inconsistent with k0*a0={steepness!r}", field="epsilon"
            )
        if eps > EPSILON_WARN:
            warnings.warn(
                f"epsilon={eps} is large for the linear envelope model", RuntimeWarning, stacklevel=3
            )

    @property
    def omega0(self) -> float:
        return math.sqrt(self.k0 * self.g)

    @property
    def c_g(self) -> float:
        return self.omega0 / (2.0 * self.k0)

    @property
    def p0(self) -> float:
        return effective_momentum(self)

    def replace(self, **changes) -> "PhysicalParams":
        fields = dict(k0=self.k0, a0=self.a0, t0=self.t0, epsilon=self.epsilon,
                      Omega0=self.Omega0, F=self.F, g=self.g)
        fields.update(changes)
        return PhysicalParams(**fields)


def derive_frequencies(params: PhysicalParams) -> tuple[float, float]:
    """Return ``(omega0, c_g)`` from the deep-water dispersion relation."""
    k0, g = params.k0, params.g
    if not (k0 > 0 and g > 0):
        raise InvalidParameterError("k0 and g must be positive")
    omega0 = math.sqrt(k0 * g)
    return omega0, omega0 / (2.0 * k0)


def effective_momentum(params: PhysicalParams) -> float:
    """Dimensionless initial momentum ``Omega0 / (epsilon * omega0)``."""
    if params.epsilon == 0:
        raise InvalidParameterError("epsilon must be non-zero", field="epsilon")
    return params.Omega0 / (params.epsilon * params.omega0)


@dataclass(frozen=True)
class DimensionlessFrame:
    """Scaled comoving coordinates attached to a set of physical parameters."""

    params: PhysicalParams

    @property
    def tau0(self) -> float:
        p = self.params
        return p.epsilon * p.omega0 * p.t0

    @property
    def xi_s(self) -> float:
        return self.tau0 ** 2 / 4.0

    @property
    def xi_per_metre(self) -> float:
        p = self.params
        return p.epsilon ** 2 * p.k0

    @property
    def tau_per_second(self) -> float:
        """Magnitude of d(tau)/dt at fixed x."""
        p = self.params
        return p.epsilon * p.omega0

    def stretch(self, xi):
        """Width growth factor ``sqrt(1 + (xi/xi_s)**2)`` of a Gaussian packet."""
        return np.sqrt(1.0 + (np.asarray(xi, dtype=float) / self.xi_s) ** 2)


def to_dimensionless(frame: DimensionlessFrame, x, t):
    """Map laboratory ``(x [m], t [s])`` to ``(xi, tau)``.

    Scalars in give floats out; arrays broadcast.
    """
    p = frame.params
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    xi = p.epsilon ** 2 * p.k0 * x
    tau = p.epsilon * p.omega0 * (x / p.c_g - t)
    if xi.ndim == 0 and tau.ndim == 0:
        return float(xi), float(tau)
    return xi, tau


def from_dimensionless(frame: DimensionlessFrame, xi, tau):
    """Inverse of :func:`to_dimensionless`."""
    p = frame.params
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = xi / (p.epsilon ** 2 * p.k0)
    t = x / p.c_g - tau / (p.epsilon * p.omega0)
    if x.ndim == 0 and t.ndim == 0:
        return float(x), float(t)
    return x, t
