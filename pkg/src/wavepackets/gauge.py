"""Virtual wave gauges: synthesis of surface elevation and Hilbert demodulation.

A gauge at position ``x`` records

    eta(t) = a0 |A(tau, xi)| cos(k0 x - omega0 t + phi(tau, xi))

with ``(xi, tau)`` the comoving coordinates of ``(x, t)``. Demodulation
builds the analytic signal in the frequency domain, reads the envelope as
its modulus and the total phase ``k0 x - omega0 t + phi`` as minus its
argument (the carrier runs at positive frequency ``+omega0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from .analytic import GaussianState, envelope_magnitude, envelope_phase, peak_position
from .errors import AmbiguousPacketError, EmptyFieldError, SamplingError
from .params import DimensionlessFrame, to_dimensionless
from .solver import log_parabolic_peak, quadratic_interp

ENVELOPE_GATE = 0.1
RECORD_EDGE_TOL = 1e-4
SECONDARY_LOBE_LIMIT = 0.5
UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform time grid ``t_start + arange(n) / fs``."""

    fs: float
    t_start: float
    n: int

    @property
    def t(self) -> np.ndarray:
        return self.t_start + np.arange(self.n) / self.fs


@dataclass(frozen=True, eq=False)
class GaugeRecord:
    """Real elevation samples [m] at gauge position ``x`` [m]."""

    x: float
    fs: float
    k0: float
    omega0: float
    t: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        if self.t.shape != self.eta.shape or self.t.ndim != 1:
            raise SamplingError("t and eta must be 1-d arrays of equal length")
        if len(self.t) < 8:
            raise SamplingError("record too short")

    def check_uniform(self):
        dt = np.diff(self.t)
        if np.max(np.abs(dt * self.fs - 1.0)) > UNIFORM_RTOL * max(1.0, np.max(np.abs(self.t)) * self.fs):
            raise SamplingError("analytic signal needs uniformly sampled records")


@dataclass(frozen=True, eq=False)
class DemodulatedRecord:
    x: float
    t: np.ndarray
    envelope: np.ndarray
    phase_total: np.ndarray
    phase_residual: np.ndarray
    confidence: np.ndarray


@dataclass(frozen=True)
class PacketStatistics:
    t_mean: float
    t_peak: float
    phase_at_peak: float
    envelope_peak: float


def default_sampling(frame: DimensionlessFrame, p0: float, F: float, x: float,
                     rate_factor: float = 40.0, half_width_t0: float = 6.0) -> SamplingSpec:
    """Record centred on the expected arrival, ``half_width_t0`` stretched pulse sizes each side."""
    p = frame.params
    xi = frame.xi_per_metre * x
    tau_c = 2 * p0 * xi + F * xi ** 2
    t_centre = x / p.c_g - tau_c / frame.tau_per_second
    half = half_width_t0 * p.t0 * float(frame.stretch(xi))
    fs = rate_factor * p.omega0 / (2 * math.pi)
    n = int(math.ceil(2 * half * fs)) + 1
    return SamplingSpec(fs, t_centre - half, n)


def synthesize_gauge(frame: DimensionlessFrame, p0: float, F: float, x: float,
                     sampling: SamplingSpec | None = None) -> GaugeRecord:
    """Surface elevation of the closed-form Gaussian packet seen at ``x``."""
    p = frame.params
    sampling = sampling or default_sampling(frame, p0, F, x)
    detuning = abs(p0) * frame.tau_per_second
    nyquist_floor = 4 * (p.omega0 + detuning) / (2 * math.pi)
    if sampling.fs <= nyquist_floor:
        raise SamplingError(f"fs={sampling.fs:.4g} Hz undersamples the carrier (need > {nyquist_floor:.4g} Hz)")
    t = sampling.t
    xi, tau = to_dimensionless(frame, x, t)
    state = GaussianState(frame, p0, F)
    xi = float(np.broadcast_to(xi, t.shape)[0])
    mag = envelope_magnitude(state, tau, xi)
    phi = envelope_phase(state, tau, xi)
    eta = p.a0 * mag * np.cos(p.k0 * x - p.omega0 * t + phi)
    peak = np.max(np.abs(eta))
    if max(mag[0], mag[-1]) * p.a0 >= RECORD_EDGE_TOL * peak:
        raise SamplingError("record does not cover the packet")
    return GaugeRecord(float(x), sampling.fs, p.k0, p.omega0, t, eta)


def analytic_signal(record: GaugeRecord) -> np.ndarray:
    """One-sided-spectrum complex signal whose real part is ``record.eta``.

    Negative frequencies are zeroed, positive ones doubled, DC and (for
    even lengths) the Nyquist bin kept as they are.
    """
    record.check_uniform()
    x = np.asarray(record.eta, dtype=float)
    n = len(x)
    spectrum = np.fft.fft(x)
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1:n // 2] = 2.0
    else:
        h[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(spectrum * h)


def _bridge(phase: np.ndarray, gated: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Unwrap the gated samples and bridge the rest linearly."""
    idx = np.flatnonzero(gated)
    out = np.empty_like(phase)
    core = np.unwrap(phase[idx])
    out[idx] = core
    if len(idx) < 2:
        out[:] = core[0] if len(idx) else 0.0
        return out
    rest = np.flatnonzero(~gated)
    if len(rest) == 0:
        return out
    tr = t[rest]
    inside = (tr > t[idx[0]]) & (tr < t[idx[-1]])
    out[rest[inside]] = np.interp(tr[inside], t[idx], core)
    left = tr <= t[idx[0]]
    slope = (core[1] - core[0]) / (t[idx[1]] - t[idx[0]])
    out[rest[left]] = core[0] + slope * (tr[left] - t[idx[0]])
    right = tr >= t[idx[-1]]
    slope = (core[-1] - core[-2]) / (t[idx[-1]] - t[idx[-2]])
    out[rest[right]] = core[-1] + slope * (tr[right] - t[idx[-1]])
    return out


def demodulate(record: GaugeRecord, frame: DimensionlessFrame | None = None) -> DemodulatedRecord:
    """Envelope, total phase and carrier-free phase of a gauge record.

    Samples below 10% of the envelope peak are flagged low-confidence and
    their phase is bridged linearly. The residual phase is shifted by a
    multiple of 2 pi so that its value at the envelope maximum lies in
    (-pi, pi].
    """
    k0, omega0 = record.k0, record.omega0
    if frame is not None:
        k0, omega0 = frame.params.k0, frame.params.omega0
    z = analytic_signal(record)
    env = np.abs(z)
    peak = env.max()
    if not peak > 0:
        raise EmptyFieldError("record carries no signal")
    gated = env >= ENVELOPE_GATE * peak
    t = record.t
    total = _bridge(-np.angle(z), gated, t)
    residual = np.unwrap(total - (k0 * record.x - omega0 * t))
    i = int(np.argmax(env))
    shift = 2 * math.pi * math.ceil((residual[i] - math.pi) / (2 * math.pi))
    return DemodulatedRecord(record.x, t, env, total - shift, residual - shift, gated)


def packet_statistics(demod: DemodulatedRecord) -> PacketStatistics:
    """Mean arrival time, peak time and phase at the peak of one packet."""
    env = demod.envelope
    peak = env.max()
    if not peak > 0:
        raise EmptyFieldError("record carries no signal")
    lobes, props = find_peaks(env, height=SECONDARY_LOBE_LIMIT * peak)
    if len(lobes) > 1:
        raise AmbiguousPacketError(f"{len(lobes)} envelope lobes above {SECONDARY_LOBE_LIMIT:.0%} of the peak")
    t = demod.t
    w = env ** 2
    t_mean = float(trapezoid(t * w, t) / trapezoid(w, t))
    t_peak, env_peak = log_parabolic_peak(t, env)
    phase = quadratic_interp(t, demod.phase_residual, t_peak)
    return PacketStatistics(t_mean, t_peak, phase, env_peak)


def expected_arrival(frame: DimensionlessFrame, p0: float, F: float, x):
    """Laboratory time at which the envelope maximum passes ``x``."""
    xi = frame.xi_per_metre * np.asarray(x, dtype=float)
    tau_c = peak_position(GaussianState(frame, p0, F), xi)
    return np.asarray(x) / frame.params.c_g - np.asarray(tau_c) / frame.tau_per_second


def _fmt(values) -> str:
    return ",".join(f"{float(v):.17g}" for v in values)


def write_gauge_csv(path, record: GaugeRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,fs,k0,omega0\n")
        fh.write(_fmt([record.x, record.fs, record.k0, record.omega0]) + "\n")
        fh.write("t,eta\n")
        for row in zip(record.t, record.eta):
            fh.write(_fmt(row) + "\n")


def read_gauge_csv(path) -> GaugeRecord:
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        x, fs, k0, omega0 = (float(v) for v in fh.readline().split(","))
    data = np.loadtxt(path, delimiter=",", skiprows=3, ndmin=2)
    return GaugeRecord(x, fs, k0, omega0, data[:, 0].copy(), data[:, 1].copy())


def write_demodulated_csv(path, record: GaugeRecord, demod: DemodulatedRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,fs,k0,omega0\n")
        fh.write(_fmt([record.x, record.fs, record.k0, record.omega0]) + "\n")
        fh.write("t,eta,envelope,phase_total,phase_residual,confidence\n")
        for t, eta, env, tot, res, conf in zip(record.t, record.eta, demod.envelope, demod.phase_total,
                                               demod.phase_residual, demod.confidence):
            fh.write(_fmt([t, eta, env, tot, res]) + f",{int(conf)}\n")


def read_demodulated_csv(path) -> DemodulatedRecord:
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        x = float(fh.readline().split(",")[0])
    data = np.loadtxt(path, delimiter=",", skiprows=3, ndmin=2)
    return DemodulatedRecord(x, data[:, 0].copy(), data[:, 2].copy(), data[:, 3].copy(),
                             data[:, 4].copy(), data[:, 5].astype(bool))
