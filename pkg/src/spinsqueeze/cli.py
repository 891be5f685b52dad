"""Command line entry point: ``spinsqueeze {simulate,sweep,frozen-compare,check,figures}``.

Units: kappa = 1 internally, so ``--omega`` is Omega/kappa and times are kappa*t.
Settings come from built-in defaults, then an optional JSON ``--config`` file,
then command line flags, later sources winning.

Exit codes: 0 ok, 1 check failure, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import __version__, frozen
from .checks import DEFAULT_J_LIST, TOLERANCES, format_report, run_checks
from .errors import NumericalError
from .output import atomic_write, csv_text, write_manifest
from .spin import SpinMagnitude
from .sweep import (
    SqueezingDynamics,
    default_time_grid,
    first_variance_minimum,
    first_xi_minimum,
    min_over_time,
    optimal_omega,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3, 4
MODES = ("simulate", "sweep", "frozen-compare", "check", "figures")
KAPPA = 1.0

SIMULATE_HEADER = [
    "kappa_t", "xi_s", "jx_mean", "jy_mean", "jz_mean",
    "var_jz", "var_jy", "cov_yz", "degenerate_mean",
]
SWEEP_HEADER = ["twice_j", "omega_opt_over_kappa", "kappa_t_star", "xi_min"]
TRACE_HEADER = ["twice_j", "omega_over_kappa", "xi_min", "kappa_t_star", "at_horizon"]
FROZEN_HEADER = ["kappa_t", "var_jz_exact", "var_jz_frozen", "xi_exact", "xi_frozen"]
FIGURE_OMEGAS = (0.0, 5.0, 15.0, 25.0)

DEFAULT_OUTPUTS = {
    "simulate": "simulate.csv",
    "sweep": "sweep.csv",
    "frozen-compare": "frozen_compare.csv",
    "check": "check.txt",
    "figures": "figures",
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "simulate"
    twice_j: int = 200
    omega_over_kappa: float = 15.0
    t_max_kappa: float | None = None
    n_coarse: int | None = None
    omega_range: tuple[float, float] = (0.5, 50.0)
    n_omega: int = 17
    j_list: tuple[int, ...] = (100, 200, 400, 1000)
    check_j_list: tuple[int, ...] = tuple(SpinMagnitude.from_j(j).twice_j for j in DEFAULT_J_LIST)
    workers: int = 1
    output_path: str | None = None
    trace_path: str | None = None
    tolerance_scale: float = 1.0

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if int(self.twice_j) != self.twice_j or self.twice_j < 1:
            raise UsageError(f"twice_j must be a positive integer, got {self.twice_j!r}")
        if not (math.isfinite(self.omega_over_kappa) and self.omega_over_kappa >= 0):
            raise UsageError(f"omega must be finite and >= 0, got {self.omega_over_kappa!r}")
        if self.mode == "frozen-compare" and self.omega_over_kappa == 0:
            raise UsageError("frozen-compare needs omega > 0 (frozen-spin model undefined at 0)")
        if self.t_max_kappa is not None and not (math.isfinite(self.t_max_kappa) and self.t_max_kappa > 0):
            raise UsageError(f"t_max must be positive, got {self.t_max_kappa!r}")
        if self.n_coarse is not None and (int(self.n_coarse) != self.n_coarse or self.n_coarse < 16):
            raise UsageError(f"n_coarse must be an integer >= 16, got {self.n_coarse!r}")
        lo, hi = self.omega_range
        if not 0 < lo < hi:
            raise UsageError(f"omega range must satisfy 0 < lo < hi, got {self.omega_range}")
        if self.n_omega < 17:
            raise UsageError(f"n_omega must be >= 17, got {self.n_omega}")
        if self.mode == "sweep" and not self.j_list:
            raise UsageError("sweep needs a non-empty J list")
        if self.mode == "check" and not self.check_j_list:
            raise UsageError("check needs a non-empty J list")
        if any(int(t) != t or t < 1 for t in self.j_list + self.check_j_list):
            raise UsageError("J list entries must be positive multiples of 1/2")
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.tolerance_scale <= 1:
            raise UsageError("tolerance scale must lie in [0, 1]; tolerances can only be tightened")
        if self.output_path is None:
            self.output_path = DEFAULT_OUTPUTS[self.mode]
        return self


def _parse_j(text: str) -> int:
    try:
        return SpinMagnitude.from_j(text.strip()).twice_j
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid J value {text!r}: {exc}") from None


def _parse_j_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(_parse_j(str(x)) for x in text)
    parts = [p for p in str(text).split(",") if p.strip()]
    return tuple(_parse_j(p) for p in parts)


def _parse_range(text) -> tuple[float, float]:
    vals = list(text) if isinstance(text, (list, tuple)) else str(text).split(",")
    if len(vals) != 2:
        raise UsageError(f"omega range needs two values lo,hi, got {text!r}")
    try:
        return float(vals[0]), float(vals[1])
    except ValueError:
        raise UsageError(f"omega range must be numeric, got {text!r}") from None


def _coerce(key: str, value):
    """Convert a config-file or flag value to the RunConfig field type."""
    try:
        if value is None:
            return None
        if key in ("j_list", "check_j_list"):
            return _parse_j_list(value)
        if key == "omega_range":
            return _parse_range(value)
        if key in ("twice_j", "n_coarse", "n_omega", "workers"):
            if isinstance(value, float) and not value.is_integer():
                raise UsageError(f"{key} must be an integer, got {value!r}")
            return int(value)
        if key in ("omega_over_kappa", "t_max_kappa", "tolerance_scale"):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad value for {key}: {value!r}") from None


def _load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    if "j" in data:
        if "twice_j" in data:
            raise UsageError("config file gives both j and twice_j")
        data["twice_j"] = _parse_j(str(data.pop("j")))
    known = {f.name for f in fields(RunConfig)} - {"mode"}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Spin squeezing under H = 2 kappa Jz^2 + Omega Jx (kappa = 1).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p, *, j=True, omega=True, grid=True):
        p.add_argument("--config", help="JSON file with RunConfig keys")
        p.add_argument("--out", dest="output_path", help="output path")
        if j:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--twice-j", dest="twice_j", type=int, help="2J (default 200, i.e. J=100)")
            g.add_argument("--j", dest="j_value", help="J, e.g. 100 or 5/2")
        if omega:
            p.add_argument("--omega", dest="omega_over_kappa", type=float, help="Omega/kappa")
        if grid:
            p.add_argument("--t-max", dest="t_max_kappa", type=float, help="horizon kappa*t_max")
            p.add_argument("--n-coarse", dest="n_coarse", type=int, help="coarse time samples")

    common(sub.add_parser("simulate", help="time series of xi_s and spin moments"))
    p = sub.add_parser("sweep", help="optimal Omega and minimal xi_s for a list of J")
    common(p, j=False, omega=False)
    p.add_argument("--j-list", dest="j_list", help="comma separated J values")
    p.add_argument("--omega-range", dest="omega_range", help="lo,hi in units of kappa")
    p.add_argument("--n-omega", dest="n_omega", type=int, help="log grid points (>= 17)")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--trace", dest="trace_path", help="also write every evaluated Omega here")
    common(sub.add_parser("frozen-compare", help="exact dynamics vs frozen-spin formulas"))
    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--config", help="JSON file with RunConfig keys")
    p.add_argument("--out", dest="output_path", help="report path")
    p.add_argument("--j-list", dest="check_j_list", help="comma separated J values")
    p.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                   help="multiply every tolerance by this factor in [0, 1]")
    p = sub.add_parser("figures", help="time series for Omega/kappa in {0, 5, 15, 25}")
    common(p, omega=False)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(_load_config_file(args.config))
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "j_value")}
    if getattr(args, "j_value", None) is not None:
        flags["twice_j"] = _parse_j(args.j_value)
    values.update(flags)
    values["mode"] = args.mode
    cfg = RunConfig(**{k: _coerce(k, v) if k != "mode" else v for k, v in values.items()})
    return cfg.validate()


def _check_writable(path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"output directory {parent} does not exist or is not writable")


def _config_echo(cfg: RunConfig) -> dict:
    echo = asdict(cfg)
    echo["j"] = str(Fraction(cfg.twice_j, 2))
    return echo


def _manifest(cfg: RunConfig, started: float, summary: dict, warnings: list[str], resolved: dict) -> dict:
    return {
        "artifact": "spinsqueeze",
        "version": __version__,
        "config": _config_echo(cfg),
        "resolved": resolved,
        "kappa": KAPPA,
        "tolerances": dict(TOLERANCES, time_bracket=1e-6, omega_relative=1e-2),
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
        "summary": summary,
        "warnings": warnings,
    }


def _simulate_rows(records):
    for r in records:
        e = r.expectations
        yield (r.t, r.xi_s, e.jx, e.jy, e.jz, r.var_jz, r.var_jy, r.cov_yz, bool(r.degenerate_mean))


def _grid_for(cfg: RunConfig, spin: SpinMagnitude, omega: float):
    grid = default_time_grid(spin, KAPPA, omega, cfg.t_max_kappa, cfg.n_coarse)
    try:
        grid.check_resolution(frozen.frequency(KAPPA, omega, spin.j))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return grid


def cmd_simulate(cfg: RunConfig, started: float) -> int:
    spin = SpinMagnitude(cfg.twice_j)
    omega = cfg.omega_over_kappa
    grid = _grid_for(cfg, spin, omega)
    dyn = SqueezingDynamics(spin, KAPPA, omega)
    records = dyn.records(grid.times())
    best = min_over_time(spin, KAPPA, omega, grid, dynamics=dyn)
    atomic_write(cfg.output_path, csv_text(SIMULATE_HEADER, _simulate_rows(records)))
    warnings = ["minimum of xi_s at the end of the horizon; increase t_max"] if best.at_horizon else []
    n_degenerate = sum(r.degenerate_mean for r in records)
    if n_degenerate:
        warnings.append(f"{n_degenerate} time points with vanishing mean spin (full-covariance minimum used)")
    summary = {
        "xi_min": best.xi_min,
        "kappa_t_star": best.t_star,
        "xi_min_sampled": min(r.xi_s for r in records),
        "fraction_squeezed": sum(r.xi_s < 1 for r in records) / len(records),
        "rows": len(records),
    }
    resolved = {"t_max_kappa": grid.t_max, "n_coarse": grid.n_coarse}
    write_manifest(cfg.output_path, _manifest(cfg, started, summary, warnings, resolved))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, started: float) -> int:
    rows, trace_rows, warnings, summary = [], [], [], {}
    for twice_j in cfg.j_list:
        spin = SpinMagnitude(twice_j)
        res = optimal_omega(
            spin, KAPPA, cfg.omega_range, t_max=cfg.t_max_kappa, n_coarse=cfg.n_coarse,
            n_grid=cfg.n_omega, workers=cfg.workers,
        )
        rows.append((twice_j, res.omega_opt, res.t_star, res.xi_min))
        trace_rows += [(twice_j, p.omega, p.xi_min, p.t_star, p.at_horizon) for p in res.trace]
        if res.at_boundary:
            warnings.append(f"J={spin}: optimum at the edge of the Omega range {cfg.omega_range}; widen it")
        if res.horizon_warnings:
            warnings.append(f"J={spin}: {res.horizon_warnings} Omega values had their minimum at the time horizon")
        summary[str(spin)] = {"omega_opt": res.omega_opt, "xi_min": res.xi_min, "kappa_t_star": res.t_star,
                              "evaluations": len(res.trace), "at_boundary": res.at_boundary}
    atomic_write(cfg.output_path, csv_text(SWEEP_HEADER, rows))
    if cfg.trace_path:
        atomic_write(cfg.trace_path, csv_text(TRACE_HEADER, trace_rows))
    resolved = {"t_max_kappa": cfg.t_max_kappa or "per-Omega default", "n_coarse": cfg.n_coarse or "per-Omega default"}
    write_manifest(cfg.output_path, _manifest(cfg, started, summary, warnings, resolved))
    return EXIT_OK


def cmd_frozen_compare(cfg: RunConfig, started: float) -> int:
    spin = SpinMagnitude(cfg.twice_j)
    omega = cfg.omega_over_kappa
    grid = _grid_for(cfg, spin, omega)
    model = frozen.FrozenSpinModel(KAPPA, omega, spin.j)
    dyn = SqueezingDynamics(spin, KAPPA, omega)
    times = grid.times()
    records = dyn.records(times)
    var_frozen, _ = frozen.predicted_variances(model, times)
    xi_frozen = frozen.predicted_xi(model, times)
    rows = [(r.t, r.var_jz, vf, r.xi_s, xf) for r, vf, xf in zip(records, var_frozen, xi_frozen)]

    best = min_over_time(spin, KAPPA, omega, grid, dynamics=dyn)
    var_first = first_variance_minimum(dyn, grid)
    xi_first = first_xi_minimum(dyn, grid)
    w = model.omega_freq
    w_est = math.pi / (2 * var_first.t_star) if var_first.t_star > 0 else float("nan")
    xi_pred = frozen.predicted_xi_min(model)
    summary = {
        "xi_min_exact": best.xi_min,
        "xi_min_frozen": xi_pred,
        "xi_min_relative_error": abs(best.xi_min - xi_pred) / xi_pred,
        "omega_freq_frozen": w,
        "omega_freq_exact": w_est,
        "omega_freq_relative_error": abs(w_est - w) / w,
        "kappa_t_first_var_min": var_first.t_star,
        "kappa_t_first_xi_min": xi_first.t_star,
        "kappa_t_star_frozen": frozen.optimal_times(model, 0),
    }
    comments = [f"{k}={v:.12g}" for k, v in summary.items()]
    atomic_write(cfg.output_path, csv_text(FROZEN_HEADER, rows, comments))
    warnings = []
    if omega < 10 * KAPPA:
        warnings.append("Omega/kappa < 10: frozen-spin approximation expected to be poor")
    resolved = {"t_max_kappa": grid.t_max, "n_coarse": grid.n_coarse}
    write_manifest(cfg.output_path, _manifest(cfg, started, summary, warnings, resolved))
    return EXIT_OK


def cmd_check(cfg: RunConfig, started: float) -> int:
    j_list = [SpinMagnitude(t) for t in cfg.check_j_list]
    results = run_checks(j_list, cfg.tolerance_scale)
    report = format_report(results)
    print(report)
    atomic_write(cfg.output_path, report + "\n")
    n_fail = sum(not r.passed for r in results)
    summary = {"checks": len(results), "failed": n_fail, "j_list": [str(s) for s in j_list]}
    write_manifest(cfg.output_path, _manifest(cfg, started, summary, [], {}))
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILED


def cmd_figures(cfg: RunConfig, started: float) -> int:
    """Time series for the Omega values used as stand-ins for the figure panels."""
    out_dir = Path(cfg.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    spin = SpinMagnitude(cfg.twice_j)
    summary = {}
    t_max = cfg.t_max_kappa or 0.5
    for omega in FIGURE_OMEGAS:
        grid = default_time_grid(spin, KAPPA, omega, t_max, cfg.n_coarse)
        records = SqueezingDynamics(spin, KAPPA, omega).records(grid.times())
        path = out_dir / f"timeseries_omega{omega:g}.csv"
        atomic_write(path, csv_text(SIMULATE_HEADER, _simulate_rows(records)))
        summary[f"{omega:g}"] = {"file": path.name, "xi_min_sampled": min(r.xi_s for r in records),
                                 "n_coarse": grid.n_coarse}
    manifest = _manifest(cfg, started, summary, [], {"t_max_kappa": t_max, "omegas": list(FIGURE_OMEGAS)})
    write_manifest(out_dir / "figures", manifest)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "frozen-compare": cmd_frozen_compare,
    "check": cmd_check,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
        if cfg.mode != "figures":
            _check_writable(cfg.output_path)
            if cfg.trace_path:
                _check_writable(cfg.trace_path)
        return COMMANDS[cfg.mode](cfg, started)
    except ValueError as exc:
        # UsageError, and parameter validation raised from the numerics layer
        print(f"spinsqueeze: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"spinsqueeze: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"spinsqueeze: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
