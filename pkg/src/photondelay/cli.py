"""Command-line front end: ``photondelay evolve|sweep|compare|figures``.

Every output is a comma-separated table whose ``#`` header echoes the
resolved configuration and grid, so files are self-describing and re-runs
are byte-identical. Exit codes: 0 success, 1 failed invariant or solver
error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import analytic, checks, observables
from .ode import IntegrationError, IntegratorSettings, evolve
from .params import ConfigError, SystemConfig, format_config, load_config, parse_config

COMMANDS = ("evolve", "sweep", "compare", "figures")
SOLVERS = ("analytic", "ode", "both")

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


@dataclass
class JobSpec:
    command: str
    config_path: str | None = None
    out_dir: str = "."
    solver: str = "analytic"
    t_range: tuple = (0.0, 0.7)
    t_count: int = 141
    delta_range: tuple = (-3.0, 3.0)  # units of gamma2
    delta_count: int = 121
    allow_truncated: bool = False
    jobs: int | None = None
    cfg: SystemConfig = field(default_factory=SystemConfig)

    def validate(self) -> "JobSpec":
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"unknown command {self.command!r}")
        if self.solver not in SOLVERS:
            problems.append(f"unknown solver {self.solver!r}")
        for name, (lo, hi), count in (("t", self.t_range, self.t_count),
                                      ("delta", self.delta_range, self.delta_count)):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                problems.append(f"{name} range [{lo}, {hi}] is empty")
            if count < 2:
                problems.append(f"{name} count must be >= 2")
        if self.t_range[0] < 0:
            problems.append("t range must start at t >= 0")
        if self.jobs is not None and self.jobs < 1:
            problems.append("--jobs must be >= 1")
        out = Path(self.out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            problems.append(f"cannot create output directory: {exc}")
        else:
            if not os.access(out, os.W_OK):
                problems.append(f"output directory {out} is not writable")
        if problems:
            raise ConfigError(problems)
        return self

    @property
    def times(self) -> np.ndarray:
        return np.linspace(*self.t_range, self.t_count)

    def deltas(self, cfg: SystemConfig) -> np.ndarray:
        return np.linspace(*self.delta_range, self.delta_count) * cfg.gamma2


# -- output helpers -------------------------------------------------------------


def packaged_config(name: str) -> SystemConfig:
    return parse_config(resources.files("photondelay.configs").joinpath(f"{name}.cfg").read_text())


def _header(command: str, cfg: SystemConfig, extra: dict | None = None) -> str:
    lines = [f"photondelay {command}"] + format_config(cfg).splitlines()
    lines += [f"{k} = {v}" for k, v in (extra or {}).items()]
    return "".join(f"# {line}\n" for line in lines)


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_table(path: Path, header: str, columns, rows) -> Path:
    buf = io.StringIO()
    buf.write(header)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue())
    return path


# -- evolve ---------------------------------------------------------------------


def _solve(spec: JobSpec, cfg: SystemConfig, solver: str, times: np.ndarray):
    if solver == "analytic":
        trace = analytic.analytic_trace(cfg, times, allow_truncated=spec.allow_truncated)
        intensity = observables.intensity_expectation(cfg, times, allow_truncated=spec.allow_truncated)
        return trace, intensity
    trace = evolve(cfg, IntegratorSettings(t_end=float(times[-1])), times)
    return trace, observables.intensity_from_modes(cfg, observables.DETECTOR_Z, trace.b)


def run_evolve(spec: JobSpec, cfg: SystemConfig | None = None, stem: str = "evolve") -> list[Path]:
    cfg = spec.cfg if cfg is None else cfg
    times = spec.times
    solvers = ("analytic", "ode") if spec.solver == "both" else (spec.solver,)
    grid = {"solver": spec.solver, "t_range": list(spec.t_range), "t_count": spec.t_count,
            "allow_truncated": spec.allow_truncated}
    out = Path(spec.out_dir)
    written, traces = [], {}
    for solver in solvers:
        trace, intensity = _solve(spec, cfg, solver, times)
        traces[solver] = trace
        p = trace.probabilities
        rows = zip(times, *trace.c.real, *trace.c.imag, *p, trace.norm2, intensity)
        cols = ["t", "re_c1", "re_c2", "re_c3", "im_c1", "im_c2", "im_c3", "p1", "p2", "p3", "norm2", "intensity"]
        header = _header("evolve", cfg, {**grid, "written_solver": solver})
        written.append(write_table(out / f"{stem}_{solver}.csv", header, cols, rows))
    if spec.solver == "both":
        a, o = traces["analytic"], traces["ode"]
        residual = np.max(np.abs(a.c - o.c), axis=0)
        rows = zip(times, *a.probabilities, *o.probabilities, residual)
        cols = ["t", "p1_analytic", "p2_analytic", "p3_analytic", "p1_ode", "p2_ode", "p3_ode", "residual"]
        written.append(write_table(out / f"{stem}_residual.csv", _header("evolve", cfg, grid), cols, rows))
    return written


# -- sweep ----------------------------------------------------------------------

SWEEP_EXTRA = ("delta_over_gamma2", "dt_group_x_gamma2", "dt_c3_closed_x_gamma2",
               "dt_c3_quad_x_gamma2", "dt_field_quad_x_gamma2")


def run_sweep(spec: JobSpec, cfg: SystemConfig | None = None, stem: str = "sweep") -> list[Path]:
    cfg = spec.cfg if cfg is None else cfg
    if cfg.gamma2 <= 0:
        raise ConfigError(["sweep grid is in units of gamma2, which must be positive"])
    reports = observables.sweep_detuning(cfg, spec.deltas(cfg), jobs=spec.jobs)
    g2 = cfg.gamma2
    rows = []
    for r in reports:
        rows.append(r.csv_row() + [r.delta / g2, r.dt_group * g2, r.dt_c3_closed * g2,
                                   r.dt_c3_quad * g2, r.dt_field_quad * g2])
    header = _header("sweep", cfg, {"delta_over_gamma2_range": list(spec.delta_range),
                                    "delta_count": spec.delta_count})
    path = Path(spec.out_dir) / f"{stem}.csv"
    return [write_table(path, header, list(observables.DelayReport.CSV_COLUMNS) + list(SWEEP_EXTRA), rows)]


# -- compare --------------------------------------------------------------------


def _write_checks(path: Path, header: str, results) -> Path:
    return write_table(path, header, checks.CheckResult.CSV_COLUMNS, [r.csv_row() for r in results])


def _report(results, stream) -> None:
    for r in results:
        print(f"{r.status.upper():4s} {r.name}: measured {r.measured:.3g}, threshold {r.threshold:.3g}"
              f"{' (' + r.detail + ')' if r.detail else ''}", file=stream)


def run_compare(spec: JobSpec, cfg: SystemConfig | None = None) -> tuple[list[Path], bool]:
    cfg = spec.cfg if cfg is None else cfg
    results = checks.run_suite(cfg, with_ode=spec.solver != "analytic")
    path = _write_checks(Path(spec.out_dir) / "compare.csv", _header("compare", cfg, {"solver": spec.solver}),
                         results)
    _report(results, sys.stdout)
    return [path], checks.all_passed(results)


# -- figures --------------------------------------------------------------------

FIG4_DETUNINGS = {"inside": 0.0, "outside": 1.5}  # units of gamma2


def _fig4_tables(spec: JobSpec, cfg: SystemConfig) -> list[Path]:
    times = np.linspace(0.5, 0.95, 181)
    written = []
    for label, ratio in FIG4_DETUNINGS.items():
        c = cfg.replace(delta=ratio * cfg.gamma2)
        p3 = np.abs(analytic.c3(c, times)) ** 2
        p3_free = np.abs(analytic.c3_free(c, times)) ** 2
        header = _header("figures", c, {"figure": 4, "regime": label})
        written.append(write_table(Path(spec.out_dir) / f"fig4_{label}.csv", header,
                                   ["t", "p3", "p3_no_scatterer"], zip(times, p3, p3_free)))
    return written


def run_figures(spec: JobSpec) -> tuple[list[Path], bool]:
    out = Path(spec.out_dir)
    fig1, fig3, fig4 = (packaged_config(n) for n in ("fig1", "fig3", "fig4"))
    written = run_sweep(spec, fig1, stem="fig1_sweep")
    written += run_evolve(spec, fig3, stem="fig3")
    written += _fig4_tables(spec, fig4)
    results = [checks.check_fig1_signs(fig1, spec.deltas(fig1)), checks.check_fig3_turn_on(fig3),
               checks.check_fig4_reshaping(fig4, *FIG4_DETUNINGS.values())]
    written.append(_write_checks(out / "figures_checks.csv", _header("figures", fig1), results))
    _report(results, sys.stdout)
    return written, checks.all_passed(results)


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photondelay", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value config file (default: packaged default)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--solver", choices=SOLVERS, default=None,
                        help="evolve: analytic; compare: both (analytic skips the ODE checks)")
    parser.add_argument("--jobs", type=int, default=None, help="sweep workers (default $PDL_DEFAULT_JOBS or 1)")
    parser.add_argument("--allow-truncated", action="store_true",
                        help="evaluate closed forms past their validity windows")
    parser.add_argument("--t-range", nargs=2, type=float, metavar=("T0", "T1"), default=(0.0, 0.7))
    parser.add_argument("--t-count", type=int, default=141)
    parser.add_argument("--delta-range", nargs=2, type=float, metavar=("D0", "D1"), default=(-3.0, 3.0),
                        help="detuning range in units of gamma2")
    parser.add_argument("--delta-count", type=int, default=121)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def spec_from_args(args) -> JobSpec:
    solver = args.solver or ("both" if args.command == "compare" else "analytic")
    cfg = load_config(args.config) if args.config else packaged_config("default")
    return JobSpec(args.command, args.config, args.out, solver, tuple(args.t_range), args.t_count,
                   tuple(args.delta_range), args.delta_count, args.allow_truncated, args.jobs, cfg).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        passed = True
        if spec.command == "evolve":
            written = run_evolve(spec)
        elif spec.command == "sweep":
            written = run_sweep(spec)
        elif spec.command == "compare":
            written, passed = run_compare(spec)
        else:
            written, passed = run_figures(spec)
    except (ConfigError, analytic.TruncationWindowError, OSError) as exc:
        print(f"photondelay: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"photondelay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.verbose:
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    if not passed:
        print("photondelay: invariant check failed", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
