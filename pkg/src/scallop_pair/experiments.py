"""Batch experiments: phase sweeps, theory-vs-numerics reports, coupling
studies, and symmetry null tests, with CSV/JSON/SVG emission.

All physical quantities in config files carry unit suffixes in their field
names (lengths in micrometres, drag in N s / um^2, angles in radians) to
prevent unit drift. Emitted files contain no wall-clock data, so identical
configs produce byte-identical output.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _svg
from .dynamics import (
    constant_C_tilde,
    lambda_bounds,
    theoretical_midpoint_displacement,
)
from .geometry import ScallopPairParams
from .integrator import (
    ControlStroke,
    Trajectory,
    initial_state,
    integrate,
    square_vs_smooth_area_report,
)

#: Phase offsets of the standard sweep (multiples of pi).
DEFAULT_PHASES = tuple(
    math.pi * f for f in (0.0, 1 / 8, 1 / 6, 1 / 4, 1 / 3, 3 / 8, 1 / 2,
                          5 / 8, 2 / 3, 3 / 4, 5 / 6, 7 / 8, 1.0)
)

PAPER_CONVENTION = "paper_nondimensional"
DIMENSIONAL_CONVENTION = "dimensional"

_CONFIG_KEYS = {
    "L_um": ("L", float),
    "h_um": ("h", float),
    "a_um": ("a", float),
    "c_par_Ns_per_um2": ("c_par", float),
    "c_perp_Ns_per_um2": ("c_perp", float),
    "eps_rad": ("eps", float),
    "omega_freq_rad_per_s": ("omega_freq", float),
    "theta0_rad": ("theta0", float),
    "phases_rad": ("phases", tuple),
    "n_periods": ("n_periods", int),
    "dt_s": ("dt", lambda v: None if v is None else float(v)),
    "length_convention": ("length_convention", str),
    "output_dir": ("output_dir", str),
}


class ConfigError(ValueError):
    """Invalid run configuration (bad value, unknown key, failed precondition)."""


@dataclass(frozen=True)
class RunConfig:
    """One batch run: physical constants, stroke parameters, sweep phases.

    The defaults reproduce the standard validation setup: eps = 0.1,
    omega = 20, L = 10 um, h = 1 um, a = 0.25 um, c_perp = 2 c_par = 2,
    with analytic constants evaluated in the nondimensional convention
    (all lengths divided by L, so displacements come out in link lengths).
    """

    L: float = 10.0
    h: float = 1.0
    a: float = 0.25
    c_par: float = 1.0
    c_perp: float = 2.0
    eps: float = 0.1
    omega_freq: float = 20.0
    theta0: float = 0.0
    phases: tuple = DEFAULT_PHASES
    n_periods: int = 1
    dt: float | None = None
    length_convention: str = PAPER_CONVENTION
    output_dir: str = "."

    def __post_init__(self):
        if self.length_convention not in (PAPER_CONVENTION, DIMENSIONAL_CONVENTION):
            raise ConfigError(
                f"length_convention must be '{PAPER_CONVENTION}' or "
                f"'{DIMENSIONAL_CONVENTION}', got {self.length_convention!r}"
            )
        if not self.phases:
            raise ConfigError("phases list must not be empty")
        if self.n_periods < 1:
            raise ConfigError(f"n_periods must be >= 1, got {self.n_periods!r}")
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ConfigError(f"eps_rad must be non-negative, got {self.eps!r}")
        if not (self.omega_freq > 0 and math.isfinite(self.omega_freq)):
            raise ConfigError(f"omega_freq must be positive, got {self.omega_freq!r}")
        if self.dt is not None and not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt_s must be positive, got {self.dt!r}")
        try:
            self.params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        kwargs = {}
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            field, convert = _CONFIG_KEYS[key]
            try:
                kwargs[field] = convert(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")
        return cls.from_dict(raw)

    def params(self) -> ScallopPairParams:
        """Physical parameters under the configured length convention."""
        params = ScallopPairParams(L=self.L, h=self.h, a=self.a,
                                   c_par=self.c_par, c_perp=self.c_perp)
        if self.length_convention == PAPER_CONVENTION:
            return params.nondimensionalized()
        return params

    def stroke(self, phi: float) -> ControlStroke:
        return ControlStroke.sinusoidal(self.eps, self.omega_freq, phi)

    def stroke_equivalents(self) -> tuple[float, float]:
        """(gamma, tau) of the rectangle loop matched to the sinusoid:
        gamma = eps*omega, tau = pi/(2*omega)."""
        return self.eps * self.omega_freq, math.pi / (2.0 * self.omega_freq)


@dataclass(frozen=True)
class SweepRecord:
    """One phase point of a sweep (lengths in the run's length unit)."""

    phi: float
    delta_m_numeric: float
    delta_m_theory: float
    relative_error: float
    rotation_net: float
    runtime: float
    error: str | None = None


def _run_phase(config: RunConfig, params: ScallopPairParams, phi: float) -> SweepRecord:
    gamma, tau = config.stroke_equivalents()
    theory = theoretical_midpoint_displacement(phi, config.eps, gamma, gamma, tau, params)
    start = time.perf_counter()
    try:
        trajectory = integrate(
            initial_state(params, config.theta0, config.eps, phi),
            params, config.stroke(phi), n_periods=config.n_periods, dt=config.dt)
    except Exception as exc:  # per-phase isolation: record, keep sweeping
        return SweepRecord(phi=phi, delta_m_numeric=float("nan"),
                           delta_m_theory=theory, relative_error=float("nan"),
                           rotation_net=float("nan"),
                           runtime=time.perf_counter() - start,
                           error=f"{type(exc).__name__}: {exc}")
    numeric = trajectory.summary.delta_m
    return SweepRecord(
        phi=phi,
        delta_m_numeric=numeric,
        delta_m_theory=theory,
        relative_error=abs(numeric - theory) / max(theory, 1e-300),
        rotation_net=trajectory.summary.delta_theta1,
        runtime=time.perf_counter() - start,
    )


def phase_sweep(config: RunConfig, write: bool = True) -> list[SweepRecord]:
    """Net midpoint displacement versus phase offset, numeric and theoretical.

    Phases run concurrently; records are sorted by phi before any output is
    written, and the emitted CSV carries no timing data, so outputs are
    deterministic. Per-phase failures are recorded in the row's error field
    without aborting the sweep.
    """
    params = config.params()
    with ThreadPoolExecutor(max_workers=min(8, len(config.phases))) as pool:
        records = list(pool.map(lambda phi: _run_phase(config, params, phi),
                                config.phases))
    records.sort(key=lambda record: record.phi)
    if write:
        write_phase_sweep_outputs(records, config.output_dir)
    return records


def sin_squared_fit(phases, values) -> tuple[float, float]:
    """Least-squares amplitude of A*sin^2(phi) and the fit's R^2."""
    phases = np.asarray(phases, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = np.isfinite(values)
    phases, values = phases[keep], values[keep]
    basis = np.sin(phases) ** 2
    amplitude = float(values @ basis / (basis @ basis))
    residual = values - amplitude * basis
    total = float(np.sum((values - values.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual**2)) / total if total > 0 else float("nan")
    return amplitude, r_squared


def write_phase_sweep_outputs(records, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "phase_sweep.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("phi,delta_m_numeric,delta_m_theory,rel_err\n")
        for r in records:
            fh.write(f"{r.phi:.17g},{r.delta_m_numeric:.17g},"
                     f"{r.delta_m_theory:.17g},{r.relative_error:.17g}\n")
    phis = [r.phi for r in records]
    _svg.line_chart(
        out / "phase_sweep.svg",
        [(phis, [r.delta_m_numeric for r in records], "numeric", False),
         (phis, [r.delta_m_theory for r in records], "theory (sin^2)", True)],
        title="Net midpoint displacement per period vs phase offset",
        xlabel="phase offset (rad)", ylabel="displacement",
    )


def theory_vs_numeric_report(config: RunConfig, write: bool = True) -> dict:
    """Headline comparison at phi = pi/2 plus loop-area and rate checks.

    relative_error uses the numeric value as denominator. The rate check
    doubles omega at fixed eps (same physical stroke traversed twice as
    fast, same steps per period): the net displacement must be unchanged.
    The theory row also reports the gamma = eps*omega rectangle prediction
    at both rates with tau held fixed, where doubling omega quadruples the
    predicted displacement.
    """
    params = config.params()
    phi = math.pi / 2.0
    gamma, tau = config.stroke_equivalents()
    theory = theoretical_midpoint_displacement(phi, config.eps, gamma, gamma, tau, params)
    trajectory = integrate(initial_state(params, config.theta0, config.eps, phi),
                           params, config.stroke(phi), n_periods=config.n_periods,
                           dt=config.dt)
    numeric = trajectory.summary.delta_m

    fast = dataclasses.replace(config, omega_freq=2.0 * config.omega_freq)
    fast_trajectory = integrate(
        initial_state(params, fast.theta0, fast.eps, phi),
        params, fast.stroke(phi), n_periods=fast.n_periods, dt=None if config.dt is None else config.dt / 2.0)
    rate_abs_diff = abs(fast_trajectory.summary.delta_m - numeric)
    theory_fast_fixed_tau = theoretical_midpoint_displacement(
        phi, config.eps, 2.0 * gamma, 2.0 * gamma, tau, params)

    areas = square_vs_smooth_area_report(config.eps, config.omega_freq)
    if trajectory.summary.below_resolution or numeric == 0.0:
        relative_error = None  # undefined when there is no resolvable displacement
    else:
        relative_error = abs(numeric - theory) / numeric
    report = {
        "phi": phi,
        "delta_m_theory": theory,
        "delta_m_numeric": numeric,
        "relative_error": relative_error,
        "square_loop_area": areas.square_area,
        "circle_loop_area": areas.circle_area,
        "loop_area_relative_error": areas.relative_error,
        "rate_independence_abs_diff": rate_abs_diff,
        "rate_independence_rel_diff": rate_abs_diff / numeric if numeric > 0 else 0.0,
        "rate_independence_passed": bool(
            rate_abs_diff <= max(1e-10 * numeric,
                                 trajectory.summary.resolution_floor or 0.0)),
        "theory_scaling_double_omega_fixed_tau": (
            theory_fast_fixed_tau / theory if theory > 0 else None),
        "net_rotation_1": trajectory.summary.delta_theta1,
        "net_rotation_2": trajectory.summary.delta_theta2,
        "min_abs_det": trajectory.summary.min_abs_det,
    }
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def lambda_study(config: RunConfig, kappa: float = 10.0, grid_size: int = 199,
                 write: bool = True) -> dict:
    """Displacement constant versus coupling strength, with bounds from kappa.

    Tabulates the c_perp = 2 c_par constant on a uniform grid over (0, 1),
    locates the bounds implied by kappa*a < h < L/kappa, and verifies the
    constant is monotone so the bounds bracket its value on the admissible
    band. kappa must lie in the window where the upper bound exceeds 1/2.
    """
    params = config.params()
    try:
        bounds = lambda_bounds(kappa, params.a, params.L)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lo, hi = bounds.kappa_window
    if not lo < kappa < hi:
        raise ConfigError(
            f"kappa = {kappa!r} outside the admissible window ({lo:.6g}, {hi:.6g})"
        )
    grid = np.arange(1, grid_size + 1) / (grid_size + 1)
    values = np.array([constant_C_tilde(lam, params.L) for lam in grid])
    c_lower = constant_C_tilde(bounds.lambda_star_lower, params.L)
    c_upper = constant_C_tilde(bounds.lambda_star_upper, params.L)
    in_band = (grid > bounds.lambda_star_lower) & (grid < bounds.lambda_star_upper)
    band_ok = bool(np.all((values[in_band] > c_lower) & (values[in_band] < c_upper)))
    report = {
        "kappa": kappa,
        "kappa_window": [lo, hi],
        "lambda_star_lower": bounds.lambda_star_lower,
        "lambda_star_upper": bounds.lambda_star_upper,
        "C_tilde_at_lower": c_lower,
        "C_tilde_at_upper": c_upper,
        "grid_monotone_increasing": bool(np.all(np.diff(values) > 0)),
        "band_bracketing_ok": band_ok,
        "grid_size": int(grid_size),
    }
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "lambda_study.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("lambda,C_tilde\n")
            for lam, value in zip(grid, values):
                fh.write(f"{lam:.17g},{value:.17g}\n")
        _svg.line_chart(
            out / "lambda_study.svg",
            [(list(grid), list(values), "C_tilde(lambda)", False)],
            title="Displacement constant vs coupling strength (pole at 1)",
            xlabel="lambda", ylabel="C_tilde",
            vlines=[bounds.lambda_star_lower, bounds.lambda_star_upper, 1.0],
        )
        with open(out / "lambda_study.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def null_tests(config: RunConfig, tolerance_scale: float = 1.0,
               write: bool = True) -> dict:
    """Symmetry checks that must produce no net motion.

    (a) Decoupled pair (coupling forced to zero): each scallop performs a
    reciprocal one-variable stroke, so position and orientation must
    return after one period. (b) Synchronized stroke (phi = 0) at the
    configured coupling: one shared shape variable, so the state retraces
    one flow line and returns. Thresholds combine the hard bounds with ten
    times the step-halving noise estimate, scaled by tolerance_scale.
    """
    params = config.params()
    phi_ref = math.pi / 2.0

    decoupled = params.with_lambda(0.0)
    traj_a = integrate(initial_state(decoupled, config.theta0, config.eps, phi_ref),
                       decoupled, config.stroke(phi_ref), n_periods=config.n_periods,
                       dt=config.dt)
    drift_a = float(np.max(np.abs(
        traj_a.states_array[-1, :6] - traj_a.states_array[0, :6])))
    noise = traj_a.summary.resolution_floor or 0.0
    threshold_a = tolerance_scale * max(1e-9, 10.0 * noise)

    traj_sync = integrate(initial_state(params, config.theta0, config.eps, 0.0),
                          params, config.stroke(0.0), n_periods=config.n_periods,
                          dt=config.dt)
    traj_ref = integrate(initial_state(params, config.theta0, config.eps, phi_ref),
                         params, config.stroke(phi_ref), n_periods=config.n_periods,
                         dt=config.dt)
    sync_ratio = traj_sync.summary.delta_m / max(traj_ref.summary.delta_m, 1e-300)
    threshold_ratio = tolerance_scale * 1e-2

    report = {
        "decoupled_max_drift": drift_a,
        "decoupled_threshold": threshold_a,
        "decoupled_passed": bool(drift_a < threshold_a),
        "sync_displacement": traj_sync.summary.delta_m,
        "reference_displacement": traj_ref.summary.delta_m,
        "sync_ratio": sync_ratio,
        "sync_ratio_threshold": threshold_ratio,
        "sync_passed": bool(sync_ratio <= threshold_ratio),
    }
    report["all_passed"] = bool(report["decoupled_passed"] and report["sync_passed"])
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "null_tests.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def export_trajectory(config: RunConfig, phi: float = math.pi / 2.0,
                      write: bool = True) -> Trajectory:
    """Integrate one sinusoidal stroke and export the sampled trajectory."""
    params = config.params()
    trajectory = integrate(initial_state(params, config.theta0, config.eps, phi),
                           params, config.stroke(phi), n_periods=config.n_periods,
                           dt=config.dt)
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        trajectory.to_csv(out / "trajectory.csv")
    return trajectory
