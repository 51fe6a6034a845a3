"""Trajectory fits and phase-curve analysis across a row of gauges.

The centre-of-mass arrival time of the packet along the tank is modelled as
``t(x) = a1 x + a2 x^2`` (launched at x = 0, t = 0). The linear coefficient
gives the group velocity through ``c_g = 1 / (a1 + 2 Omega0 / g)`` and the
quadratic one the force through ``F = -(omega0 / (eps^3 k0^2)) a2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, check_array

from .analytic import flow_phase_difference
from .errors import DegenerateFitError, InvalidComparisonError
from .gauge import GaugeRecord, demodulate, packet_statistics
from .params import DimensionlessFrame, PhysicalParams


def _positions(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return X
    if X.ndim == 2 and X.shape[1] == 1:
        return X[:, 0]
    raise ValueError("positions must be a 1-d array or a single-column matrix")


class TrajectoryRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``t = a1 x + a2 x^2`` (optionally ``+ a0``).

    The normal equations of the column-scaled basis are solved directly.

    Parameters
    ----------
    fit_intercept : bool, default=False
        Add a constant term. Useful as a diagnostic of misaligned records;
        the physical model goes through the origin.

    Attributes
    ----------
    coef_ : ndarray of shape (2,)
        ``(a1, a2)``.
    intercept_ : float
    residual_rms_ : float
        Root-mean-square residual against the fitted model.
    """

    def __init__(self, fit_intercept: bool = False):
        self.fit_intercept = fit_intercept

    def _design(self, x):
        cols = [x, x ** 2]
        if self.fit_intercept:
            cols.insert(0, np.ones_like(x))
        return np.column_stack(cols)

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(np.reshape(_positions(X), (-1, 1)), y, y_numeric=True)
        x = X[:, 0]
        design = self._design(x)
        if len(np.unique(x)) < 3:
            raise DegenerateFitError("need at least three distinct gauge positions")
        w = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        scale = np.sqrt(np.sum(w[:, None] * design ** 2, axis=0))
        scaled = design / scale
        gram = scaled.T @ (w[:, None] * scaled)
        rhs = scaled.T @ (w * y)
        if np.linalg.cond(gram) > 1e12:
            raise DegenerateFitError("design matrix is rank deficient")
        beta = np.linalg.solve(gram, rhs) / scale
        if self.fit_intercept:
            self.intercept_, self.coef_ = float(beta[0]), beta[1:]
        else:
            self.intercept_, self.coef_ = 0.0, beta
        residual = y - self._predict(x)
        self.residual_rms_ = float(np.sqrt(np.mean(residual ** 2)))
        self.n_features_in_ = 1
        return self

    def _predict(self, x):
        a1, a2 = self.coef_
        return self.intercept_ + a1 * x + a2 * x ** 2

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = check_array(np.reshape(_positions(X), (-1, 1)))[:, 0]
        return self._predict(x)


@dataclass(frozen=True)
class TrajectoryFit:
    a1: float
    a2: float
    residual_rms: float
    c_g_recovered: float
    F_recovered: float
    Omega0: float
    intercept: float = 0.0


def group_velocity_from_slope(a1: float, Omega0: float, g: float) -> float:
    return 1.0 / (a1 + 2.0 * Omega0 / g)


def force_from_curvature(a2: float, params: PhysicalParams) -> float:
    return -(params.omega0 / (params.epsilon ** 3 * params.k0 ** 2)) * a2


def fit_trajectory(points: Sequence[tuple[float, float]], Omega0: float, params: PhysicalParams,
                   fit_intercept: bool = False, weights=None) -> TrajectoryFit:
    """Fit ``(x, t_mean)`` pairs and convert the coefficients to ``(c_g, F)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, t_mean) pairs")
    model = TrajectoryRegressor(fit_intercept=fit_intercept).fit(pts[:, 0], pts[:, 1], sample_weight=weights)
    a1, a2 = (float(c) for c in model.coef_)
    return TrajectoryFit(
        a1=a1,
        a2=a2,
        residual_rms=model.residual_rms_,
        c_g_recovered=group_velocity_from_slope(a1, Omega0, params.g),
        F_recovered=force_from_curvature(a2, params),
        Omega0=Omega0,
        intercept=model.intercept_,
    )


def measure_gauges(records: Sequence[GaugeRecord], frame: DimensionlessFrame):
    """Packet statistics of each record, in input order."""
    return [packet_statistics(demodulate(r, frame)) for r in records]


def referenced_phases(x: np.ndarray, raw_phase: np.ndarray) -> np.ndarray:
    """Unwrap per-gauge peak phases along x and reference them to the x = 0 gauge.

    Consecutive gauges must be close enough that the phase changes by less
    than pi between them.
    """
    order = np.argsort(x)
    if x[order[0]] != 0:
        raise InvalidComparisonError("phase curves need a reference gauge at x = 0")
    phase = np.empty_like(raw_phase)
    phase[order] = np.unwrap(raw_phase[order])
    return phase - phase[order[0]]


@dataclass(frozen=True, eq=False)
class PhaseCurve:
    x: np.ndarray
    xi_samples: np.ndarray
    phi_with_flow: np.ndarray
    phi_without_flow: np.ndarray
    model_difference: np.ndarray

    @property
    def phi_difference(self) -> np.ndarray:
        return self.phi_with_flow - self.phi_without_flow

    @property
    def deviation(self) -> np.ndarray:
        return self.phi_difference - self.model_difference

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.deviation)))


def build_phase_curves(gauges_with_flow: Sequence[GaugeRecord], gauges_without_flow: Sequence[GaugeRecord],
                       frame: DimensionlessFrame, p0: float, F: float) -> PhaseCurve:
    """Measured peak phases with and without flow, and their difference against the model."""
    x_flow = np.array([r.x for r in gauges_with_flow])
    x_free = np.array([r.x for r in gauges_without_flow])
    if x_flow.shape != x_free.shape or not np.array_equal(x_flow, x_free):
        raise InvalidComparisonError("gauge sets must share positions")
    if len(x_flow) < 2:
        raise InvalidComparisonError("need at least two gauges")
    order = np.argsort(x_flow)
    x = x_flow[order]
    flow = np.array([s.phase_at_peak for s in measure_gauges(gauges_with_flow, frame)])[order]
    free = np.array([s.phase_at_peak for s in measure_gauges(gauges_without_flow, frame)])[order]
    xi = frame.xi_per_metre * x
    return PhaseCurve(
        x=x,
        xi_samples=xi,
        phi_with_flow=referenced_phases(x, flow),
        phi_without_flow=referenced_phases(x, free),
        model_difference=np.asarray(flow_phase_difference(p0, F, xi), dtype=float),
    )


@dataclass(frozen=True)
class MomentumPhaseFit:
    p0_squared: float
    stderr: float
    ci_low: float
    ci_high: float


def recover_momentum_phase(gauges: Sequence[GaugeRecord], frame: DimensionlessFrame,
                           F: float = 0.0, confidence: float = 0.95) -> MomentumPhaseFit:
    """Estimate ``p0^2`` from the free-propagation peak phase.

    After removing the Gouy term the phase at the maximum is ``-p0^2 xi``;
    the slope of a fit through the origin against ``-xi`` is returned with
    a Student-t confidence interval.
    """
    if F != 0:
        raise InvalidComparisonError("momentum phase is read from force-free gauges")
    if len(gauges) < 3:
        raise DegenerateFitError("need at least three gauges")
    x = np.array([r.x for r in gauges])
    raw = np.array([s.phase_at_peak for s in measure_gauges(gauges, frame)])
    phase = referenced_phases(x, raw)
    xi = frame.xi_per_metre * x
    y = phase - 0.5 * np.arctan(xi / frame.xi_s)
    u = -xi
    suu = float(np.dot(u, u))
    if suu == 0:
        raise DegenerateFitError("all gauges at x = 0")
    slope = float(np.dot(u, y) / suu)
    dof = len(u) - 1
    resid = y - slope * u
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / suu)
    half = float(stats.t.ppf(0.5 + confidence / 2, dof)) * stderr
    return MomentumPhaseFit(slope, stderr, slope - half, slope + half)
