"""Command-line front end.

    wavepackets list-scenarios
    wavepackets validate <config>
    wavepackets run <config> [--output-dir DIR] [--mode MODE] [--quiet]
    wavepackets compare <config> [--output-dir DIR] [--quiet]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import config as cfg
from .config import MODES
from .errors import ConfigError, InvalidParameterError, NumericalError
from .pipeline import compare_modes, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="wavepackets",
                                     description="Gaussian water-wave packets in an effective linear potential.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-scenarios", help="list bundled scenario files")

    p = sub.add_parser("validate", help="parse and validate a scenario")
    p.add_argument("config", help="scenario file or bundled scenario name")

    for name, helptext in (("run", "run a scenario and write its tables"),
                           ("compare", "cross-check analytic, numeric and full-pipeline modes")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="scenario file or bundled scenario name")
        p.add_argument("--output-dir", type=Path, default=None)
        p.add_argument("--quiet", action="store_true")
        if name == "run":
            p.add_argument("--mode", choices=MODES, default=None)
    return parser.parse_args(argv)


def _output_dir(args, scenario) -> Path:
    if args.output_dir is not None:
        return args.output_dir
    if scenario.output_dir:
        return Path(scenario.output_dir)
    return Path("out") / scenario.name


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO, format="%(message)s")

    def say(msg):
        if not quiet:
            print(msg)

    if args.command == "list-scenarios":
        for name in cfg.bundled_scenarios():
            print(name)
        return EXIT_OK

    try:
        scenario = cfg.load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        runs = ", ".join(r.tag for r in scenario.runs())
        say(f"{scenario.name}: ok ({len(scenario.gauge_positions)} gauges; runs: {runs})")
        return EXIT_OK

    out_dir = _output_dir(args, scenario)
    try:
        if args.command == "run":
            result = run_scenario(scenario, out_dir, args.mode)
            for tag, fit in result.fits.items():
                say(f"{tag}: a1={fit.a1:.5f} s/m a2={fit.a2:.5f} s/m^2 "
                    f"c_g={fit.c_g_recovered:.5f} m/s F={fit.F_recovered:.3f}")
            say(f"wrote {len(result.files)} files to {out_dir}")
            return EXIT_OK
        report = compare_modes(scenario, out_dir)
        say(f"max |A| deviation analytic vs numeric:         {report.max_envelope:.3e} (tol {report.envelope_tol:g})")
        say(f"max peak-phase deviation analytic vs pipeline: {report.max_phase:.3e} rad (tol {report.phase_tol:g})")
        say(f"max t_mean deviation numeric vs pipeline:      {report.max_t_mean_in_samples:.3e} samples (tol 1)")
        if not report.ok:
            print("mode comparison exceeded tolerance", file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvalidParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main(sys.argv[1:]))
