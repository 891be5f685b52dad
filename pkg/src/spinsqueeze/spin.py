"""Collective spin operators in the Dicke (Jz) basis.

Basis index ``i`` in ``[0, dim)`` labels the magnetic quantum number
``m = i - J`` in ascending order, so ``i = 0`` is ``m = -J``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal, LinAlgError

from .errors import NumericalError

STATE_NORM_TOL = 1e-10


@dataclass(frozen=True)
class SpinMagnitude:
    """Spin quantum number J, stored as the integer 2J."""

    twice_j: int

    def __post_init__(self):
        if isinstance(self.twice_j, bool) or int(self.twice_j) != self.twice_j:
            raise ValueError(f"twice_j must be an integer, got {self.twice_j!r}")
        object.__setattr__(self, "twice_j", int(self.twice_j))
        if self.twice_j < 1:
            raise ValueError(
                f"twice_j must be >= 1 (J=0 has no squeezing), got {self.twice_j}"
            )

    @classmethod
    def from_j(cls, j) -> "SpinMagnitude":
        """Build from J given as int, float or string such as ``"5/2"``."""
        frac = Fraction(str(j)) if isinstance(j, str) else Fraction(j)
        twice = 2 * frac
        if twice.denominator != 1:
            raise ValueError(f"J must be a multiple of 1/2, got {j!r}")
        return cls(int(twice))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def m(self) -> np.ndarray:
        """Magnetic quantum numbers, ascending."""
        return np.arange(self.dim) - self.j

    def index_of(self, m: float) -> int:
        i = m + self.j
        if i != int(i) or not 0 <= i < self.dim:
            raise ValueError(f"m={m} is not a valid projection for J={self.j}")
        return int(i)

    def __str__(self):
        return str(Fraction(self.twice_j, 2))


@dataclass(frozen=True)
class TridiagonalOperator:
    """Real symmetric tridiagonal matrix given by its diagonal and superdiagonal."""

    diag: np.ndarray
    super: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        sup = np.asarray(self.super, dtype=float)
        if diag.ndim != 1 or sup.ndim != 1 or sup.size != max(diag.size - 1, 0):
            raise ValueError(
                f"inconsistent tridiagonal shapes: diag {diag.shape}, super {sup.shape}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(sup))):
            raise ValueError("tridiagonal entries must be finite")
        diag.flags.writeable = False
        sup.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "super", sup)

    @property
    def dim(self) -> int:
        return self.diag.size

    def toarray(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.super, 1) + np.diag(self.super, -1)


@dataclass(frozen=True)
class CollectiveOperators:
    """Jz diagonal and the J+ ladder coefficients for one spin magnitude.

    ``ladder_super[i]`` is ``b_m = sqrt(J(J+1) - m(m+1))`` for ``m = i - J``,
    the matrix element connecting ``m`` to ``m + 1``.
    """

    spin: SpinMagnitude
    jz_diag: np.ndarray
    ladder_super: np.ndarray

    @cached_property
    def jx(self) -> TridiagonalOperator:
        return TridiagonalOperator(np.zeros(self.spin.dim), self.ladder_super / 2)

    @cached_property
    def jz(self) -> TridiagonalOperator:
        return TridiagonalOperator(self.jz_diag, np.zeros(self.spin.dim - 1))

    @cached_property
    def jz2(self) -> TridiagonalOperator:
        return TridiagonalOperator(self.jz_diag**2, np.zeros(self.spin.dim - 1))

    def dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense complex (Jx, Jy, Jz); meant for small-dim checks only."""
        jp = np.diag(self.ladder_super, -1).astype(complex)
        jm = jp.T.copy()
        jx = (jp + jm) / 2
        jy = (jp - jm) / 2j
        jz = np.diag(self.jz_diag).astype(complex)
        return jx, jy, jz


def build_operators(spin: SpinMagnitude) -> CollectiveOperators:
    if not isinstance(spin, SpinMagnitude):
        spin = SpinMagnitude(spin)
    j = spin.j
    m = spin.m
    lower = m[:-1]
    # J(J+1) - m(m+1) = (J - m)(J + m + 1) is exact in floating point
    ladder = np.sqrt((j - lower) * (j + lower + 1))
    jz = m.copy()
    jz.flags.writeable = False
    ladder.flags.writeable = False
    return CollectiveOperators(spin, jz, ladder)


def apply_tridiagonal(op: TridiagonalOperator, psi: np.ndarray) -> np.ndarray:
    """Tridiagonal matrix times vector, or times each column of a 2-D array."""
    psi = np.asarray(psi)
    if psi.shape[0] != op.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim}, state {psi.shape[0]}")
    d = op.diag if psi.ndim == 1 else op.diag[:, None]
    s = op.super if psi.ndim == 1 else op.super[:, None]
    out = d * psi
    out[:-1] += s * psi[1:]
    out[1:] += s * psi[:-1]
    return out


def check_state(psi: np.ndarray, dim: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state must be a 1-D vector, got shape {psi.shape}")
    if dim is not None and psi.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {psi.size}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > STATE_NORM_TOL:
        raise ValueError(f"state is not normalized: |psi| = {norm!r}")
    return psi


def lowest_jx_eigenstate(
    spin: SpinMagnitude, ops: CollectiveOperators | None = None
) -> np.ndarray:
    """Coherent state |J, m_x = -J> as complex amplitudes in the Jz basis.

    The global phase makes the m = -J amplitude real and positive. That
    amplitude is 2**-J in magnitude and underflows for J above ~540, so the
    sign is read off the dominant amplitude together with the alternating
    sign pattern (-1)**i of this eigenvector, which gives the same answer
    wherever the m = -J entry is representable.
    """
    if ops is None:
        ops = build_operators(spin)
    if ops.spin != spin:
        raise ValueError(f"operators built for J={ops.spin}, not J={spin}")
    j = spin.j
    try:
        w, v = eigh_tridiagonal(
            ops.jx.diag, ops.jx.super, select="i", select_range=(0, 1),
            lapack_driver="stemr",
        )
    except LinAlgError as exc:
        raise NumericalError(f"Jx eigensolver failed for J={spin}: {exc}") from exc
    if w.size < 2 or w[1] - w[0] < 0.5:
        raise NumericalError(f"Jx spectrum gap too small for J={spin}: {w}")
    vec = v[:, 0]
    k = int(np.argmax(np.abs(vec)))
    sign = np.sign(vec[k]) * (-1.0) ** k
    psi = (sign * vec / np.linalg.norm(vec)).astype(complex)

    resid = np.linalg.norm(apply_tridiagonal(ops.jx, psi) + j * psi)
    if resid >= 1e-10 * j:
        raise NumericalError(f"Jx eigenvector residual {resid:.3e} too large for J={spin}")
    if psi[0].real < 0:
        raise NumericalError(f"phase convention violated for J={spin}")
    return psi
