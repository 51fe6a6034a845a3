"""Split-step spectral propagation of the envelope equation.

Integrates ``i dA/dxi = (d^2/dtau^2 + F tau) A`` on a periodic tau grid by
Strang splitting: half a potential kick ``exp(-i F tau dxi/2)``, a full
kinetic step ``exp(+i Omega^2 dxi)`` in Fourier space, another half kick.
The kick uses the true (non-periodic) tau values, so the packet must stay
away from the grid edges; this is checked after every step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .analytic import GaussianState, envelope
from .errors import (
    BoundaryLeakError,
    EmptyFieldError,
    InvalidParameterError,
    NumericalInstabilityError,
)
from .params import DimensionlessFrame

log = logging.getLogger(__name__)

INIT_EDGE_TOL = 1e-8
MARGIN_LEAK_TOL = 1e-6
MAX_STEP_HALVINGS = 3


@dataclass(frozen=True)
class GridSpec:
    tau_min: float
    tau_max: float
    n: int

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise InvalidParameterError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.tau_max > self.tau_min:
            raise InvalidParameterError("tau_max must exceed tau_min")

    @property
    def d_tau(self) -> float:
        return (self.tau_max - self.tau_min) / self.n

    @property
    def tau(self) -> np.ndarray:
        return self.tau_min + self.d_tau * np.arange(self.n)


@dataclass(frozen=True, eq=False)
class EnvelopeField:
    """Complex envelope sampled on a uniform periodic tau grid at one xi."""

    grid: GridSpec
    xi: float
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.n,):
            raise InvalidParameterError("values do not match the grid size")

    @property
    def tau(self) -> np.ndarray:
        return self.grid.tau

    @property
    def d_tau(self) -> float:
        return self.grid.d_tau

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.d_tau)

    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.values)


@dataclass(frozen=True)
class SolverConfig:
    """Step size and safety tolerances.

    ``d_xi=None`` selects ``xi_s / 2000`` for the frame being propagated.
    ``boundary_margin`` is the fraction of the grid at each end that must
    stay below ``1e-6`` of the peak amplitude.
    """

    d_xi: float | None = None
    boundary_margin: float = 0.05
    norm_drift_tol: float = 1e-10

    def __post_init__(self):
        if self.d_xi is not None and not self.d_xi > 0:
            raise InvalidParameterError("d_xi must be positive", field="d_xi")
        if not 0 <= self.boundary_margin < 0.5:
            raise InvalidParameterError("boundary_margin must lie in [0, 0.5)", field="boundary_margin")
        if not self.norm_drift_tol > 0:
            raise InvalidParameterError("norm_drift_tol must be positive", field="norm_drift_tol")

    def step_for(self, frame: DimensionlessFrame) -> float:
        return self.d_xi if self.d_xi is not None else frame.xi_s / 2000.0


def max_travel(p0: float, F: float, xi_max: float) -> float:
    """Largest excursion ``|2 p0 xi + F xi^2|`` of the packet centre on [0, xi_max]."""
    candidates = [0.0, xi_max]
    if F != 0:
        vertex = -p0 / F
        if 0 < vertex < xi_max:
            candidates.append(vertex)
    return max(abs(2 * p0 * xi + F * xi ** 2) for xi in candidates)


def default_grid(frame: DimensionlessFrame, p0: float, F: float, xi_max: float,
                 half_width_tau0: float = 8.0, points_per_tau0: float = 32.0) -> GridSpec:
    """Symmetric grid wide enough for the spread packet over its whole path."""
    if xi_max < 0:
        raise InvalidParameterError("xi_max must be non-negative")
    tau0 = frame.tau0
    half = half_width_tau0 * tau0 * float(frame.stretch(xi_max)) + max_travel(p0, F, xi_max)
    target = tau0 / points_per_tau0
    n = max(16, 1 << math.ceil(math.log2(2 * half / target)))
    return GridSpec(-half, half, n)


def init_gaussian(frame: DimensionlessFrame, p0: float, grid: GridSpec) -> EnvelopeField:
    """Wave-maker profile ``exp(-tau^2/tau0^2) exp(-i p0 tau)`` at xi = 0."""
    tau = grid.tau
    values = np.exp(-tau ** 2 / frame.tau0 ** 2) * np.exp(-1j * p0 * tau)
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= INIT_EDGE_TOL:
        raise BoundaryLeakError(f"grid too narrow: edge amplitude {edge:.3g}")
    return EnvelopeField(grid, 0.0, values)


def init_from_state(state: GaussianState, grid: GridSpec, xi: float = 0.0) -> EnvelopeField:
    """Closed-form field at an arbitrary xi (used as a starting point or reference)."""
    return EnvelopeField(grid, float(xi), np.asarray(envelope(state, grid.tau, xi), dtype=complex))


class _Stepper:
    """Precomputed multipliers for one (grid, F, d_xi) combination."""

    def __init__(self, grid: GridSpec, F: float, d_xi: float):
        tau = grid.tau
        omega = 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.d_tau)
        self.d_xi = d_xi
        self.half_kick = np.exp(-0.5j * F * tau * d_xi)
        self.kinetic = np.exp(1j * omega ** 2 * d_xi)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        psi = np.fft.fft(values * self.half_kick)
        return np.fft.ifft(psi * self.kinetic) * self.half_kick


def _check(values: np.ndarray, grid: GridSpec, norm0: float, config: SolverConfig):
    norm = float(np.sum(np.abs(values) ** 2) * grid.d_tau)
    drift = abs(norm - norm0) / norm0
    if not drift <= config.norm_drift_tol:
        raise NumericalInstabilityError(f"relative norm drift {drift:.3g} exceeds {config.norm_drift_tol:.3g}")
    m = int(config.boundary_margin * grid.n)
    mag = np.abs(values)
    edge = mag[0] if m == 0 else max(mag[:m].max(), mag[-m:].max())
    if edge > MARGIN_LEAK_TOL * mag.max():
        raise BoundaryLeakError(f"packet reached the boundary margin (relative amplitude {edge / mag.max():.3g})")


def step(field: EnvelopeField, F: float, config: SolverConfig | None = None,
         d_xi: float | None = None) -> EnvelopeField:
    """Advance by one Strang step of size ``d_xi`` (default ``config.d_xi``)."""
    config = config or SolverConfig()
    h = d_xi if d_xi is not None else config.d_xi
    if h is None or not h > 0:
        raise InvalidParameterError("step needs a positive d_xi")
    norm0 = field.norm
    if norm0 <= 0:
        raise EmptyFieldError("cannot step an all-zero field")
    values = _Stepper(field.grid, F, h)(field.values)
    _check(values, field.grid, norm0, config)
    return EnvelopeField(field.grid, field.xi + h, values)


def _run(field: EnvelopeField, F: float, xi_target: float, h: float, config: SolverConfig) -> EnvelopeField:
    span = xi_target - field.xi
    n_full = int(math.floor(span / h * (1 + 1e-12)))
    rest = span - n_full * h
    if rest <= 1e-12 * max(h, abs(xi_target)):
        rest = 0.0
    norm0 = field.norm
    if norm0 <= 0:
        raise EmptyFieldError("cannot propagate an all-zero field")
    stepper = _Stepper(field.grid, F, h)
    values = field.values
    for _ in range(n_full):
        values = stepper(values)
        _check(values, field.grid, norm0, config)
    if rest > 0:
        values = _Stepper(field.grid, F, rest)(values)
        _check(values, field.grid, norm0, config)
    return EnvelopeField(field.grid, float(xi_target), values)


def propagate(field: EnvelopeField, F: float, xi_target: float, config: SolverConfig | None = None,
              frame: DimensionlessFrame | None = None) -> EnvelopeField:
    """Propagate ``field`` to ``xi_target``, landing exactly on it.

    The step is ``config.d_xi``; if that is None, ``frame`` must be given
    and ``xi_s / 2000`` is used. On a norm-drift failure the step is halved
    and the run restarted, at most three times.
    """
    config = config or SolverConfig()
    if xi_target < field.xi:
        raise InvalidParameterError("xi_target must not lie behind the field")
    if xi_target == field.xi:
        return field
    if config.d_xi is None:
        if frame is None:
            raise InvalidParameterError("propagate needs d_xi or a frame to derive it")
        h = config.step_for(frame)
    else:
        h = config.d_xi
    for attempt in range(MAX_STEP_HALVINGS + 1):
        try:
            return _run(field, F, xi_target, h, config)
        except NumericalInstabilityError:
            if attempt == MAX_STEP_HALVINGS:
                raise
            h /= 2
            log.warning("norm drift detected, retrying with d_xi=%g", h)
    raise AssertionError("unreachable")


def propagate_through(field: EnvelopeField, F: float, xi_stops, config: SolverConfig | None = None,
                      frame: DimensionlessFrame | None = None) -> list[EnvelopeField]:
    """Snapshots of the field at each of the increasing ``xi_stops``."""
    out = []
    for xi in xi_stops:
        field = propagate(field, F, float(xi), config, frame)
        out.append(field)
    return out


@dataclass(frozen=True)
class Observables:
    peak_tau: float
    centroid_tau: float
    rms_width: float
    peak_phase: float
    peak_abs: float


def log_parabolic_peak(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Sub-sample maximum of positive samples ``y`` via a parabola through ``log y``.

    Exact for Gaussian profiles. Returns ``(x_peak, y_peak)``.
    """
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        return float(x[i]), float(y[i])
    with np.errstate(divide="ignore"):
        l0, l1, l2 = np.log(y[i - 1:i + 2])
    denom = l0 - 2 * l1 + l2
    if not np.isfinite(denom) or denom >= 0:
        return float(x[i]), float(y[i])
    offset = 0.5 * (l0 - l2) / denom
    dx = x[i + 1] - x[i]
    log_peak = l1 - 0.25 * (l0 - l2) * offset
    return float(x[i] + offset * dx), float(np.exp(log_peak))


def quadratic_interp(x: np.ndarray, y: np.ndarray, x0: float) -> float:
    """Three-point Lagrange interpolation of uniformly sampled ``y`` at ``x0``."""
    dx = x[1] - x[0]
    j = int(np.clip(round((x0 - x[0]) / dx), 1, len(x) - 2))
    u = (x0 - x[j]) / dx
    return float(y[j - 1] * u * (u - 1) / 2 + y[j] * (1 - u * u) + y[j + 1] * u * (u + 1) / 2)


def sample_observables(field: EnvelopeField) -> Observables:
    """Peak position, centroid, rms width and phase at the peak."""
    mag = np.abs(field.values)
    weight = mag ** 2
    total = weight.sum()
    if not total > 0:
        raise EmptyFieldError("field is identically zero")
    tau = field.tau
    centroid = float(np.sum(tau * weight) / total)
    width = float(np.sqrt(np.sum((tau - centroid) ** 2 * weight) / total))
    peak_tau, peak_abs = log_parabolic_peak(tau, mag)
    i = int(np.argmax(mag))
    lo, hi = max(i - 2, 0), min(i + 3, field.grid.n)
    local_phase = np.unwrap(np.angle(field.values[lo:hi]))
    peak_phase = quadratic_interp(tau[lo:hi], local_phase, peak_tau)
    return Observables(peak_tau, centroid, width, peak_phase, peak_abs)


def write_field_csv(path, field: EnvelopeField, F: float, p0: float) -> None:
    """Snapshot dump: one metadata comment line, a header, then samples."""
    tau = field.tau
    phase = np.unwrap(np.angle(field.values))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"# xi={field.xi:.17g} F={F:.17g} p0={p0:.17g} tau_min={field.grid.tau_min:.17g} "
            f"tau_max={field.grid.tau_max:.17g} n={field.grid.n}\n"
        )
        fh.write("tau,re_A,im_A,abs_A,phase_unwrapped\n")
        for row in zip(tau, field.values.real, field.values.imag, np.abs(field.values), phase):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_field_csv(path) -> tuple[EnvelopeField, dict]:
    with open(path, encoding="utf-8") as fh:
        meta_line = fh.readline()
    meta = dict(item.split("=") for item in meta_line.lstrip("#").split())
    grid = GridSpec(float(meta["tau_min"]), float(meta["tau_max"]), int(meta["n"]))
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    field = EnvelopeField(grid, float(meta["xi"]), data[:, 1] + 1j * data[:, 2])
    return field, {k: float(v) for k, v in meta.items()}
