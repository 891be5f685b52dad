"""Time series of xi_s, its minimum over time, and the search for the best Omega.

One spectral decomposition per (J, Omega) pair is shared by every time query,
so refined minimization re-evaluates xi_s exactly instead of interpolating.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import frozen
from .golden import golden_section
from .observables import SqueezingRecord, covariance, squeezing_records, xi_values
from .propagator import (
    HamiltonianParams,
    assemble_hamiltonian,
    diagonalize,
    eigen_coefficients,
    evolve_coefficients,
)
from .spin import SpinMagnitude, build_operators, lowest_jx_eigenstate

TIME_XTOL = 1e-6
OMEGA_RTOL = 1e-2
MIN_OMEGA_POINTS = 17
MIN_COARSE_POINTS = 16
DEFAULT_COARSE_POINTS = 400
SAMPLES_PER_PERIOD = 16
MAX_REFINED_WELLS = 12
TIE_TOL = 1e-12
CHUNK = 256


@dataclass(frozen=True)
class TimeGridSpec:
    t_max: float
    n_coarse: int = DEFAULT_COARSE_POINTS
    refine: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if int(self.n_coarse) != self.n_coarse or self.n_coarse < MIN_COARSE_POINTS:
            raise ValueError(f"n_coarse must be an integer >= {MIN_COARSE_POINTS}, got {self.n_coarse!r}")

    @property
    def spacing(self) -> float:
        return self.t_max / (self.n_coarse - 1)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, int(self.n_coarse))

    def check_resolution(self, omega_freq: float) -> None:
        """Coarse spacing must be at most a quarter of the frozen-spin half period."""
        if omega_freq > 0 and self.spacing > math.pi / (4 * omega_freq) * (1 + 1e-12):
            raise ValueError(
                f"time grid too coarse: spacing {self.spacing:.3g} > pi/(4 omega) = "
                f"{math.pi / (4 * omega_freq):.3g}; raise n_coarse to at least "
                f"{required_points(self.t_max, omega_freq)}"
            )


def required_points(t_max: float, omega_freq: float) -> int:
    if omega_freq <= 0:
        return MIN_COARSE_POINTS
    return max(MIN_COARSE_POINTS, math.ceil(4 * omega_freq * t_max / math.pi) + 1)


def default_horizon(spin: SpinMagnitude, kappa: float, omega: float) -> float:
    """max(2 pi/omega_freq, 3/(kappa sqrt J)); falls back to 1 when both vanish."""
    candidates = []
    if omega > 0:
        candidates.append(2 * math.pi / frozen.frequency(kappa, omega, spin.j))
    if kappa > 0:
        candidates.append(3 / (kappa * math.sqrt(spin.j)))
    return max(candidates) if candidates else 1.0


def default_time_grid(
    spin: SpinMagnitude, kappa: float, omega: float, t_max: float | None = None,
    n_coarse: int | None = None, refine: bool = True,
) -> TimeGridSpec:
    if t_max is None:
        t_max = default_horizon(spin, kappa, omega)
    if n_coarse is None:
        w = frozen.frequency(kappa, omega, spin.j)
        per_period = math.ceil(SAMPLES_PER_PERIOD * w * t_max / math.pi) + 1
        n_coarse = max(DEFAULT_COARSE_POINTS, per_period)
    return TimeGridSpec(t_max, n_coarse, refine)


class SqueezingDynamics:
    """Evolution of |J, m_x=-J> under one (kappa, Omega) pair."""

    def __init__(self, spin: SpinMagnitude, kappa: float = 1.0, omega: float = 0.0):
        if not isinstance(spin, SpinMagnitude):
            spin = SpinMagnitude(spin)
        self.spin = spin
        self.params = HamiltonianParams(kappa, omega)
        self.ops = build_operators(spin)
        self.psi0 = lowest_jx_eigenstate(spin, self.ops)

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def omega(self) -> float:
        return self.params.omega

    @property
    def omega_freq(self) -> float:
        return frozen.frequency(self.kappa, self.omega, self.spin.j)

    @cached_property
    def hamiltonian(self):
        return assemble_hamiltonian(self.spin, self.params)

    @cached_property
    def decomposition(self):
        return diagonalize(self.hamiltonian)

    @cached_property
    def coefficients(self) -> np.ndarray:
        return eigen_coefficients(self.decomposition, self.psi0)

    def states(self, times) -> np.ndarray:
        return evolve_coefficients(self.decomposition, self.coefficients, times)

    def xi(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(times.size)
        for start in range(0, times.size, CHUNK):
            sl = slice(start, start + CHUNK)
            out[sl] = xi_values(self.states(times[sl]), self.ops)
        return out

    def var_jz(self, t: float) -> float:
        return float(covariance(self.states(float(t)), self.ops)[2, 2])

    def records(self, times) -> list[SqueezingRecord]:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = []
        for start in range(0, times.size, CHUNK):
            sl = slice(start, start + CHUNK)
            out.extend(squeezing_records(self.states(times[sl]), self.ops, times[sl]))
        return out


def timeseries(spin, kappa: float, omega: float, grid: TimeGridSpec | None = None) -> list[SqueezingRecord]:
    dyn = SqueezingDynamics(spin, kappa, omega)
    if grid is None:
        grid = default_time_grid(dyn.spin, kappa, omega)
    return dyn.records(grid.times())


@dataclass(frozen=True)
class TimeMinimum:
    t_star: float
    xi_min: float
    coarse_t: float
    coarse_xi: float
    at_horizon: bool = False


def _local_minima(values: np.ndarray) -> list[int]:
    """Indices of samples not above either neighbour; endpoints compare one side."""
    n = values.size
    idx = []
    for k in range(n):
        left = values[k - 1] if k > 0 else np.inf
        right = values[k + 1] if k < n - 1 else np.inf
        if values[k] <= left and values[k] <= right:
            idx.append(k)
    return idx


def _refine_wells(func, times, values, candidates, xtol):
    """Golden-section refinement inside [t_{k-1}, t_{k+1}] for each candidate k."""
    best_t, best_v = None, np.inf
    n = times.size
    for k in candidates:
        lo = times[max(k - 1, 0)]
        hi = times[min(k + 1, n - 1)]
        t, v, _ = golden_section(func, lo, hi, xtol)
        if v < best_v:
            best_t, best_v = t, v
    return best_t, best_v


def _minimize_sampled(func_many, func_one, grid: TimeGridSpec, xtol: float, first_only=False):
    times = grid.times()
    values = func_many(times)
    floor = values.min()
    k0 = int(np.flatnonzero(values <= floor + TIE_TOL)[0])
    minima = _local_minima(values)
    if first_only:
        # first well whose minimum is strictly interior
        interior = [k for k in minima if 0 < k < times.size - 1]
        k0 = interior[0] if interior else k0
        candidates = [k0]
    else:
        candidates = sorted(minima, key=lambda k: (values[k], k))[:MAX_REFINED_WELLS]
    coarse_t, coarse_v = float(times[k0]), float(values[k0])
    t_star, v_star = coarse_t, coarse_v
    if grid.refine and candidates:
        t, v = _refine_wells(func_one, times, values, candidates, xtol)
        if v < v_star - TIE_TOL:
            t_star, v_star = float(t), float(v)
    last = times[-1]
    at_horizon = k0 == times.size - 1 or t_star >= last - grid.spacing
    return TimeMinimum(t_star, v_star, coarse_t, coarse_v, bool(at_horizon))


def _time_xtol(kappa: float) -> float:
    return TIME_XTOL / kappa if kappa > 0 else TIME_XTOL


def min_over_time(spin, kappa: float, omega: float, grid: TimeGridSpec | None = None,
                  dynamics: SqueezingDynamics | None = None) -> TimeMinimum:
    """Global minimum of xi_s over [0, t_max]: coarse scan, then golden-section refinement.

    The refined value never exceeds the coarse minimum. ``at_horizon`` flags a
    minimum sitting in the last coarse interval, meaning t_max was too short.
    """
    dyn = dynamics or SqueezingDynamics(spin, kappa, omega)
    if grid is None:
        grid = default_time_grid(dyn.spin, kappa, omega)
    grid.check_resolution(dyn.omega_freq)
    return _minimize_sampled(
        dyn.xi, lambda t: dyn.xi(t)[0], grid, _time_xtol(kappa)
    )


def first_xi_minimum(dyn: SqueezingDynamics, grid: TimeGridSpec) -> TimeMinimum:
    """Earliest interior local minimum of xi_s, refined."""
    return _minimize_sampled(dyn.xi, lambda t: dyn.xi(t)[0], grid, _time_xtol(dyn.kappa), first_only=True)


def first_variance_minimum(dyn: SqueezingDynamics, grid: TimeGridSpec) -> TimeMinimum:
    """Earliest interior local minimum of Var(Jz); ``xi_min`` holds the variance."""

    def many(ts):
        return np.array([r.var_jz for r in dyn.records(ts)])

    return _minimize_sampled(many, dyn.var_jz, grid, _time_xtol(dyn.kappa), first_only=True)


@dataclass(frozen=True)
class SweepPoint:
    omega: float
    xi_min: float
    t_star: float
    at_horizon: bool = False


@dataclass(frozen=True)
class SweepResult:
    spin: SpinMagnitude
    omega_opt: float
    t_star: float
    xi_min: float
    trace: tuple[SweepPoint, ...] = field(default_factory=tuple)
    at_boundary: bool = False
    horizon_warnings: int = 0

    @property
    def j(self) -> float:
        return self.spin.j


def _evaluate_omega(args) -> SweepPoint:
    twice_j, kappa, omega, t_max, n_coarse = args
    spin = SpinMagnitude(twice_j)
    grid = default_time_grid(spin, kappa, omega, t_max, n_coarse)
    res = min_over_time(spin, kappa, omega, grid)
    return SweepPoint(omega, res.xi_min, res.t_star, res.at_horizon)


def _map(func, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def optimal_omega(
    spin,
    kappa: float = 1.0,
    omega_range: tuple[float, float] = (0.5, 50.0),
    t_max: float | None = None,
    n_coarse: int | None = None,
    n_grid: int = MIN_OMEGA_POINTS,
    rtol: float = OMEGA_RTOL,
    workers: int = 1,
) -> SweepResult:
    """Omega minimizing the time-minimized xi_s, searched on a log grid then refined.

    ``t_max`` and ``n_coarse`` default per Omega (see :func:`default_time_grid`).
    Ties in xi_min go to the smaller Omega. An optimum on an end of
    ``omega_range`` sets ``at_boundary``.
    """
    if not isinstance(spin, SpinMagnitude):
        spin = SpinMagnitude(spin)
    lo, hi = map(float, omega_range)
    if not 0 < lo < hi:
        raise ValueError(f"omega_range must satisfy 0 < lo < hi, got {omega_range}")
    if n_grid < MIN_OMEGA_POINTS:
        raise ValueError(f"need at least {MIN_OMEGA_POINTS} Omega grid points, got {n_grid}")

    def job(omega):
        return (spin.twice_j, kappa, float(omega), t_max, n_coarse)

    omegas = np.geomspace(lo, hi, n_grid)
    points = _map(_evaluate_omega, [job(w) for w in omegas], workers)
    k = int(np.argmin([p.xi_min for p in points]))

    if 0 < k < n_grid - 1:
        cache = {}

        def objective(log_w):
            w = math.exp(log_w)
            cache[w] = _evaluate_omega(job(w))
            return cache[w].xi_min

        golden_section(
            objective, math.log(omegas[k - 1]), math.log(omegas[k + 1]),
            xtol=math.log1p(rtol),
        )
        points.extend(cache.values())

    trace = tuple(sorted(points, key=lambda p: p.omega))
    best = min(trace, key=lambda p: (p.xi_min, p.omega))
    return SweepResult(
        spin=spin,
        omega_opt=best.omega,
        t_star=best.t_star,
        xi_min=best.xi_min,
        trace=trace,
        at_boundary=best.omega in (omegas[0], omegas[-1]),
        horizon_warnings=sum(p.at_horizon for p in trace),
    )
