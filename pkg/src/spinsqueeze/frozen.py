"""Frozen-spin approximation: Jx replaced by -J in the Heisenberg equations.

Jz and Jy then oscillate harmonically at omega = sqrt(Omega^2 + 4 kappa Omega J),
which gives closed forms for the variances, the optimal squeezing times and
the smallest reachable xi_s. Valid for Omega >> kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _require_nonnegative(**values):
    for name, val in values.items():
        if not math.isfinite(val) or val < 0:
            raise ValueError(f"{name} must be finite and >= 0, got {val!r}")


def frequency(kappa: float, omega: float, j: float) -> float:
    _require_nonnegative(kappa=kappa, omega=omega, j=j)
    return math.sqrt(omega**2 + 4 * kappa * omega * j)


@dataclass(frozen=True)
class FrozenSpinModel:
    kappa: float
    omega_drive: float
    j: float

    def __post_init__(self):
        _require_nonnegative(kappa=self.kappa, omega=self.omega_drive, j=self.j)
        if self.omega_drive == 0:
            raise ValueError("frozen-spin model needs Omega > 0 (Var(Jy) divides by Omega^2)")

    @property
    def omega_freq(self) -> float:
        return frequency(self.kappa, self.omega_drive, self.j)


def predicted_variances(model: FrozenSpinModel, t):
    """(Var Jz, Var Jy) at time ``t``, starting from Var = J/2 in both."""
    w = model.omega_freq
    ratio = (model.omega_drive / w) ** 2
    c2 = np.cos(w * np.asarray(t, dtype=float)) ** 2
    s2 = 1 - c2
    half_j = model.j / 2
    var_jz = half_j * (c2 + ratio * s2)
    var_jy = half_j * (c2 + s2 / ratio)
    if np.ndim(var_jz) == 0:
        return float(var_jz), float(var_jy)
    return var_jz, var_jy


def predicted_xi(model: FrozenSpinModel, t):
    """xi_s implied by the predicted Var(Jz), which is the perpendicular minimum."""
    var_jz, _ = predicted_variances(model, t)
    return np.sqrt(2 * np.asarray(var_jz) / model.j)


def predicted_xi_min(model: FrozenSpinModel) -> float:
    return model.omega_drive / model.omega_freq


def optimal_times(model: FrozenSpinModel, n: int = 0) -> float:
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return (2 * n + 1) * math.pi / (2 * model.omega_freq)


def asymptotic_xi(kappa: float, omega: float, j: float) -> float:
    """Large kappa*J/Omega limit of Omega/omega, (4 kappa J / Omega)^(-1/2)."""
    _require_nonnegative(kappa=kappa, omega=omega, j=j)
    if kappa * j == 0 or omega == 0:
        raise ValueError("asymptotic_xi needs kappa*J > 0 and Omega > 0")
    return (4 * kappa * j / omega) ** -0.5
