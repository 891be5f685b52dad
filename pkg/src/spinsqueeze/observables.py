"""Spin moments and the squeezing parameter xi_s.

xi_s = sqrt(2 * V_min / J), where V_min is the smallest variance of a spin
component perpendicular to the mean spin <J>. V_min is the lower eigenvalue
of the 2x2 symmetrized covariance block in a plane orthogonal to <J>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .spin import CollectiveOperators, check_state

IMAG_RESIDUE_TOL = 1e-12
DEGENERATE_MEAN_TOL = 1e-6
ALONG_X_TOL = 1e-12


@dataclass(frozen=True)
class SpinExpectations:
    jx: float
    jy: float
    jz: float

    @property
    def norm_of_mean(self) -> float:
        return float(np.sqrt(self.jx**2 + self.jy**2 + self.jz**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.jx, self.jy, self.jz])


@dataclass(frozen=True)
class PerpCovariance:
    e1: np.ndarray
    e2: np.ndarray
    c11: float
    c22: float
    c12: float
    degenerate_mean: bool = False

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """(smaller, larger) eigenvalue of [[c11, c12], [c12, c22]]."""
        return _eig2(self.c11, self.c22, self.c12)


@dataclass(frozen=True)
class SqueezingRecord:
    t: float
    xi_s: float
    min_perp_variance: float
    expectations: SpinExpectations
    covariance: np.ndarray
    degenerate_mean: bool = False

    @property
    def var_jz(self) -> float:
        return float(self.covariance[2, 2])

    @property
    def var_jy(self) -> float:
        return float(self.covariance[1, 1])

    @property
    def cov_yz(self) -> float:
        return float(self.covariance[1, 2])


def _eig2(c11, c22, c12):
    half_tr = (c11 + c22) / 2
    rad = np.hypot((c11 - c22) / 2, c12)
    return half_tr - rad, half_tr + rad


def _apply_spin_components(psi: np.ndarray, ops: CollectiveOperators):
    """Return (Jx psi, Jy psi, Jz psi); ``psi`` may hold states as columns."""
    b = ops.ladder_super if psi.ndim == 1 else ops.ladder_super[:, None]
    m = ops.jz_diag if psi.ndim == 1 else ops.jz_diag[:, None]
    raise_ = np.zeros_like(psi)
    lower = np.zeros_like(psi)
    raise_[1:] = b * psi[:-1]
    lower[:-1] = b * psi[1:]
    return (raise_ + lower) / 2, (raise_ - lower) / 2j, m * psi


def spin_moments(psi: np.ndarray, ops: CollectiveOperators) -> tuple[np.ndarray, np.ndarray]:
    """Means <J_a> and symmetrized second moments <(J_a J_b + J_b J_a)/2>.

    For a single state returns shapes (3,) and (3, 3); for a (dim, n) stack
    of states returns (3, n) and (3, 3, n).
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != ops.spin.dim:
        raise ValueError(f"dimension mismatch: operators {ops.spin.dim}, state {psi.shape[0]}")
    comps = _apply_spin_components(psi, ops)
    raw_means = np.array([np.sum(psi.conj() * u, axis=0) for u in comps])
    j = ops.spin.j
    resid = np.abs(raw_means.imag).max()
    if resid >= IMAG_RESIDUE_TOL * j:
        raise NumericalError(
            f"imaginary part {resid:.3e} in a spin expectation value; "
            "operator or state is corrupted"
        )
    # <J_a J_b + J_b J_a>/2 = Re <J_a psi | J_b psi> because J_a is Hermitian
    second = np.array(
        [[np.sum(ua.conj() * ub, axis=0).real for ub in comps] for ua in comps]
    )
    return raw_means.real, second


def expectations(psi: np.ndarray, ops: CollectiveOperators) -> SpinExpectations:
    psi = check_state(psi, ops.spin.dim)
    mean, _ = spin_moments(psi, ops)
    return SpinExpectations(*map(float, mean))


def covariance(psi: np.ndarray, ops: CollectiveOperators) -> np.ndarray:
    """Symmetrized 3x3 covariance C_ab = <{J_a, J_b}>/2 - <J_a><J_b>."""
    psi = check_state(psi, ops.spin.dim)
    mean, second = spin_moments(psi, ops)
    return second - np.outer(mean, mean)


def perpendicular_frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair spanning the plane orthogonal to ``direction``."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    if np.hypot(n[1], n[2]) <= ALONG_X_TOL:
        return np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(n)))] = 1.0
    e1 = seed - (seed @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2 / np.linalg.norm(e2)


def perpendicular_covariance(mean: np.ndarray, cov: np.ndarray, j: float) -> PerpCovariance:
    norm = float(np.linalg.norm(mean))
    if norm < DEGENERATE_MEAN_TOL * j:
        # no well-defined mean direction: use the principal axes of the full covariance
        w, v = np.linalg.eigh(cov)
        return PerpCovariance(v[:, 0], v[:, 1], float(w[0]), float(w[1]), 0.0, True)
    e1, e2 = perpendicular_frame(mean)
    return PerpCovariance(
        e1, e2, float(e1 @ cov @ e1), float(e2 @ cov @ e2), float(e1 @ cov @ e2)
    )


def _min_variance(mean, cov, j) -> tuple[float, bool]:
    perp = perpendicular_covariance(mean, cov, j)
    vmin = perp.c11 if perp.degenerate_mean else perp.eigenvalues[0]
    return float(vmin), perp.degenerate_mean


def _record(t, mean, cov, j) -> SqueezingRecord:
    vmin, degenerate = _min_variance(mean, cov, j)
    xi = float(np.sqrt(2 * max(vmin, 0.0) / j))
    return SqueezingRecord(
        t=float(t),
        xi_s=xi,
        min_perp_variance=vmin,
        expectations=SpinExpectations(*map(float, mean)),
        covariance=cov,
        degenerate_mean=degenerate,
    )


def squeezing_parameter(psi: np.ndarray, ops: CollectiveOperators, t: float = 0.0) -> SqueezingRecord:
    psi = check_state(psi, ops.spin.dim)
    mean, second = spin_moments(psi, ops)
    return _record(t, mean, second - np.outer(mean, mean), ops.spin.j)


def squeezing_records(states: np.ndarray, ops: CollectiveOperators, times) -> list[SqueezingRecord]:
    """Vectorized :func:`squeezing_parameter` over the columns of ``states``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if states.ndim != 2 or states.shape[1] != times.size:
        raise ValueError(f"need one state column per time: {states.shape} vs {times.size}")
    mean, second = spin_moments(states, ops)
    cov = second - mean[:, None, :] * mean[None, :, :]
    j = ops.spin.j
    return [_record(times[k], mean[:, k], np.ascontiguousarray(cov[:, :, k]), j)
            for k in range(times.size)]


def xi_values(states: np.ndarray, ops: CollectiveOperators) -> np.ndarray:
    """xi_s for each state column, skipping record construction."""
    mean, second = spin_moments(states, ops)
    if mean.ndim == 1:
        mean, second = mean[:, None], second[..., None]
    cov = second - mean[:, None, :] * mean[None, :, :]
    j = ops.spin.j
    out = np.empty(mean.shape[1])
    for k in range(out.size):
        vmin, _ = _min_variance(mean[:, k], cov[:, :, k], j)
        out[k] = np.sqrt(2 * max(vmin, 0.0) / j)
    return out
