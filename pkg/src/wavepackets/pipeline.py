"""Scenario execution in the three measurement modes.

``analytic``
    closed-form envelope evaluated at every gauge.
``numeric``
    the split-step solver propagated through the gauge positions.
``full-pipeline``
    surface elevation synthesized at every gauge, Hilbert-demodulated and
    reduced to arrival time and peak phase, as in the tank.

Every mode yields the same per-gauge quantities (mean arrival time, peak
phase, peak envelope), so trajectory fits and phase curves are written by
shared code.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic as an
from .config import Run, Scenario
from .fitting import TrajectoryFit, fit_trajectory, referenced_phases
from .gauge import (
    default_sampling,
    demodulate,
    packet_statistics,
    synthesize_gauge,
    write_demodulated_csv,
    write_gauge_csv,
)
from .solver import default_grid, init_gaussian, propagate_through, sample_observables, write_field_csv

log = logging.getLogger(__name__)


@dataclass
class Measurements:
    """Per-gauge reductions of one run, ordered by x."""

    x: np.ndarray
    xi: np.ndarray
    t_mean: np.ndarray
    peak_phase: np.ndarray
    peak_envelope: np.ndarray


@dataclass
class ScenarioResult:
    scenario: Scenario
    mode: str
    output_dir: Path
    fits: dict = field(default_factory=dict)
    measurements: dict = field(default_factory=dict)
    phase_curves: dict = field(default_factory=dict)
    files: list = field(default_factory=list)


def _f(v) -> str:
    return f"{float(v) + 0.0:.17g}"


def _xname(x: float) -> str:
    return f"x{x:07.3f}"


class _Output:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def path(self, rel: str) -> Path:
        p = self.root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        self.files.append(rel)
        return p

    def table(self, rel: str, header: list[str], rows, comments=()) -> None:
        with open(self.path(rel), "w", encoding="utf-8", newline="\n") as fh:
            for c in comments:
                fh.write(f"# {c}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(v if isinstance(v, str) else _f(v) for v in row) + "\n")


def _state(scenario: Scenario, run: Run) -> an.GaussianState:
    return an.GaussianState(scenario.frame, run.params.p0, run.params.F)


def measure_analytic(scenario: Scenario, run: Run, positions) -> Measurements:
    frame = scenario.frame
    state = _state(scenario, run)
    x = np.asarray(positions, dtype=float)
    xi = frame.xi_per_metre * x
    tau_c = an.peak_position(state, xi)
    t_mean = x / frame.params.c_g - tau_c / frame.tau_per_second
    return Measurements(x, xi, np.asarray(t_mean), np.asarray(an.phase_at_maximum(state, xi)),
                        frame.params.a0 * np.asarray(an.envelope_magnitude(state, tau_c, xi)))


def solve_numeric(scenario: Scenario, run: Run, positions):
    """Solver snapshots at each gauge position (sorted, x >= 0)."""
    frame = scenario.frame
    p0, F = run.params.p0, run.params.F
    xi = frame.xi_per_metre * np.asarray(positions, dtype=float)
    grid = default_grid(frame, p0, F, float(xi.max()), scenario.grid_half_width_tau0,
                        scenario.grid_points_per_tau0)
    field0 = init_gaussian(frame, p0, grid)
    return propagate_through(field0, F, xi, scenario.solver, frame)


def measure_numeric(scenario: Scenario, run: Run, positions, out: _Output | None = None,
                    snapshot_positions=()) -> Measurements:
    x = np.asarray(positions, dtype=float)
    fields = solve_numeric(scenario, run, x)
    if out is not None:
        wanted = set(np.round(snapshot_positions, 9))
        for xx, f in zip(x, fields):
            if round(float(xx), 9) in wanted:
                write_field_csv(out.path(f"fields/field_{run.tag}_{_xname(xx)}.csv"), f, run.params.F, run.params.p0)
    return measure_numeric_from_fields(scenario, x, fields)


def synthesize_run(scenario: Scenario, run: Run, positions):
    frame = scenario.frame
    p0, F = run.params.p0, run.params.F
    return [
        synthesize_gauge(frame, p0, F, float(x),
                         default_sampling(frame, p0, F, float(x), scenario.sample_rate_factor,
                                          scenario.record_half_width_t0))
        for x in positions
    ]


def measure_pipeline(scenario: Scenario, run: Run, positions, out: _Output | None = None,
                     dump_positions=()) -> Measurements:
    frame = scenario.frame
    x = np.asarray(positions, dtype=float)
    records = synthesize_run(scenario, run, x)
    wanted = set(np.round(dump_positions, 9))
    stats = []
    for rec in records:
        demod = demodulate(rec, frame)
        stats.append(packet_statistics(demod))
        if out is not None and round(rec.x, 9) in wanted:
            write_gauge_csv(out.path(f"gauges/gauge_{run.tag}_{_xname(rec.x)}.csv"), rec)
            write_demodulated_csv(out.path(f"demodulated/demod_{run.tag}_{_xname(rec.x)}.csv"), rec, demod)
    return Measurements(
        x, frame.xi_per_metre * x,
        np.array([s.t_mean for s in stats]),
        np.array([s.phase_at_peak for s in stats]),
        np.array([s.envelope_peak for s in stats]),
    )


def _measure(scenario, run, mode, positions, out, dump_positions):
    if mode == "analytic":
        return measure_analytic(scenario, run, positions)
    if mode == "numeric":
        snaps = dump_positions if scenario.write_snapshots else ()
        return measure_numeric(scenario, run, positions, out, snaps)
    return measure_pipeline(scenario, run, positions, out, dump_positions)


def _subset(m: Measurements, positions) -> Measurements:
    idx = np.searchsorted(m.x, positions)
    if not np.array_equal(m.x[idx], positions):
        raise ValueError("positions are not a subset of the measured gauges")
    return Measurements(m.x[idx], m.xi[idx], m.t_mean[idx], m.peak_phase[idx], m.peak_envelope[idx])


def run_scenario(scenario: Scenario, output_dir, mode: str | None = None) -> ScenarioResult:
    """Run every launch of ``scenario`` and write its tables under ``output_dir``."""
    mode = mode or scenario.mode
    out = _Output(output_dir)
    result = ScenarioResult(scenario, mode, out.root)
    p = scenario.params
    gauges = np.asarray(scenario.gauge_positions, dtype=float)
    dense = scenario.phase_positions()
    all_x = np.union1d(gauges, dense)

    for run in scenario.runs():
        log.info("run %s (%s)", run.tag, mode)
        m = _measure(scenario, run, mode, all_x, out, gauges)
        result.measurements[run.tag] = m
        traj = _subset(m, gauges)
        result.fits[run.tag] = fit_trajectory(list(zip(traj.x, traj.t_mean)), run.params.Omega0, p)
        phase_m = _subset(m, dense)
        phase = referenced_phases(phase_m.x, phase_m.peak_phase)
        model = an.phase_at_maximum(_state(scenario, run), phase_m.xi)
        result.phase_curves[run.tag] = (phase_m.x, phase_m.xi, phase, np.asarray(model))
        out.table(f"phase/phase_{run.tag}.csv", ["x", "xi", "phi_measured", "phi_model", "deviation"],
                  zip(phase_m.x, phase_m.xi, phase, model, phase - model),
                  comments=[f"Omega0={_f(run.params.Omega0)} F={_f(run.params.F)} p0={_f(run.params.p0)}",
                            "phi_model = 0.5*arctan(xi/xi_s) - (2/3)F^2 xi^3 - p0^2 xi - 2 p0 F xi^2"])

    rows = []
    for run in scenario.runs():
        m = _subset(result.measurements[run.tag], gauges)
        fit = result.fits[run.tag]
        for x, xi, t, env in zip(m.x, m.xi, m.t_mean, m.peak_envelope):
            rows.append([run.tag, run.params.Omega0, run.params.F, x, xi, t, fit.a1 * x + fit.a2 * x * x, env])
    out.table("trajectory.csv", ["run", "Omega0", "F", "x", "xi", "t_mean", "t_fit", "peak_envelope"], rows,
              comments=[f"mode={mode}", "t_fit = a1*x + a2*x^2"])

    difference_files = _write_differences(scenario, result, out)
    _write_fit_report(scenario, result, out)
    _write_manifest(scenario, result, out, difference_files)
    result.files = out.files
    return result


def _write_differences(scenario: Scenario, result: ScenarioResult, out: _Output) -> list[str]:
    if scenario.with_flow != "both":
        return []
    files = []
    for om in scenario.omega_detunings:
        free = next(r for r in scenario.runs() if r.params.Omega0 == om and r.params.F == 0.0)
        flow = next(r for r in scenario.runs() if r.params.Omega0 == om and r.params.F == scenario.force_F)
        x, xi, phi_free, _ = result.phase_curves[free.tag]
        _, _, phi_flow, _ = result.phase_curves[flow.tag]
        model = np.asarray(an.flow_phase_difference(flow.params.p0, scenario.force_F, xi))
        diff = phi_flow - phi_free
        rel = f"phase/difference_omega{om:+g}.csv"
        out.table(rel, ["x", "xi", "phi_no_flow", "phi_flow", "difference", "model", "deviation"],
                  zip(x, xi, phi_free, phi_flow, diff, model, diff - model),
                  comments=[f"Omega0={_f(om)} F={_f(scenario.force_F)} p0={_f(flow.params.p0)}",
                            "model = -(2/3) F^2 xi^3 - 2 p0 F xi^2"])
        result.phase_curves[f"difference_omega{om:+g}"] = (x, xi, diff, model)
        files.append(rel)
    return files


def _write_fit_report(scenario: Scenario, result: ScenarioResult, out: _Output) -> None:
    p = scenario.params
    header = ["run", "a1", "a2", "residual_rms", "c_g_recovered", "F_recovered", "F_injected",
              "Omega0", "epsilon", "k0", "g"]
    rows = []
    lines = [f"scenario: {scenario.name}", f"mode: {result.mode}",
             f"k0={p.k0:g} 1/m  g={p.g:g} m/s^2  a0={p.a0:g} m  t0={p.t0:g} s  epsilon={p.epsilon:g}",
             f"omega0=sqrt(k0 g)={p.omega0:.6f} rad/s  c_g=omega0/(2 k0)={p.c_g:.6f} m/s",
             "c_g_recovered = 1/(a1 + 2 Omega0/g);  F_recovered = -(omega0/(epsilon^3 k0^2)) a2", ""]
    for run in scenario.runs():
        fit: TrajectoryFit = result.fits[run.tag]
        rows.append([run.tag, fit.a1, fit.a2, fit.residual_rms, fit.c_g_recovered, fit.F_recovered,
                     run.params.F, run.params.Omega0, p.epsilon, p.k0, p.g])
        lines.append(
            f"{run.tag:>22}: a1={fit.a1:.6f} s/m  a2={fit.a2:.6f} s/m^2  rms={fit.residual_rms:.3e} s  "
            f"c_g={fit.c_g_recovered:.6f} m/s  F={fit.F_recovered:.4f} (injected {run.params.F:g})"
        )
    out.table("fit_report.csv", header, rows,
              comments=["c_g_recovered = 1/(a1 + 2*Omega0/g)", "F_recovered = -(omega0/(epsilon^3*k0^2))*a2"])
    with open(out.path("fit_report.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_manifest(scenario: Scenario, result: ScenarioResult, out: _Output, difference_files) -> None:
    runs = [r.tag for r in scenario.runs()]
    manifest = {
        "scenario": scenario.name,
        "mode": result.mode,
        "plots": [
            {"title": "mean arrival time along the tank", "file": "trajectory.csv", "x": "x",
             "y": ["t_mean", "t_fit"], "group_by": "run", "kind": "scatter+line"},
            {"title": "phase at the packet maximum", "files": [f"phase/phase_{t}.csv" for t in runs],
             "x": "xi", "y": ["phi_measured", "phi_model"], "kind": "scatter+line"},
        ],
    }
    if difference_files:
        manifest["plots"].append({"title": "phase difference with minus without flow", "files": difference_files,
                                  "x": "xi", "y": ["difference", "model"], "kind": "scatter+line"})
    with open(out.path("manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class ComparisonRow:
    run: str
    x: float
    envelope_deviation: float
    phase_deviation: float
    t_mean_deviation: float
    sample_period: float


@dataclass
class ComparisonReport:
    rows: list
    envelope_tol: float = 1e-6
    phase_tol: float = 1e-2

    @property
    def max_envelope(self) -> float:
        return max(r.envelope_deviation for r in self.rows)

    @property
    def max_phase(self) -> float:
        return max(r.phase_deviation for r in self.rows)

    @property
    def max_t_mean_in_samples(self) -> float:
        return max(r.t_mean_deviation / r.sample_period for r in self.rows)

    @property
    def ok(self) -> bool:
        return (self.max_envelope < self.envelope_tol and self.max_phase < self.phase_tol
                and self.max_t_mean_in_samples < 1.0)


def _wrap(a):
    return np.angle(np.exp(1j * np.asarray(a)))


def compare_modes(scenario: Scenario, output_dir=None) -> ComparisonReport:
    """Cross-check analytic, numeric and full-pipeline reductions gauge by gauge."""
    frame = scenario.frame
    x = np.asarray(scenario.gauge_positions, dtype=float)
    rows = []
    for run in scenario.runs():
        state = _state(scenario, run)
        fields = solve_numeric(scenario, run, x)
        ana = measure_analytic(scenario, run, x)
        num = measure_numeric_from_fields(scenario, x, fields)
        pipe = measure_pipeline(scenario, run, x)
        fs = default_sampling(frame, run.params.p0, run.params.F, 0.0, scenario.sample_rate_factor).fs
        for i, f in enumerate(fields):
            exact = np.asarray(an.envelope_magnitude(state, f.tau, f.xi))
            rows.append(ComparisonRow(
                run.tag, float(x[i]),
                float(np.max(np.abs(np.abs(f.values) - exact))),
                float(abs(_wrap(pipe.peak_phase[i] - ana.peak_phase[i]))),
                float(abs(num.t_mean[i] - pipe.t_mean[i])),
                1.0 / fs,
            ))
    report = ComparisonReport(rows)
    if output_dir is not None:
        out = _Output(output_dir)
        out.table("compare.csv", ["run", "x", "envelope_analytic_vs_numeric", "phase_analytic_vs_pipeline",
                                  "t_mean_numeric_vs_pipeline", "sample_period"],
                  [[r.run, r.x, r.envelope_deviation, r.phase_deviation, r.t_mean_deviation, r.sample_period]
                   for r in rows])
    return report


def measure_numeric_from_fields(scenario: Scenario, x, fields) -> Measurements:
    frame = scenario.frame
    obs = [sample_observables(f) for f in fields]
    centroid = np.array([o.centroid_tau for o in obs])
    return Measurements(x, frame.xi_per_metre * x, x / frame.params.c_g - centroid / frame.tau_per_second,
                        np.array([o.peak_phase for o in obs]), frame.params.a0 * np.array([o.peak_abs for o in obs]))
