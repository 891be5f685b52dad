"""Invariant suite behind the ``check`` command."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import squeezing_parameter
from .propagator import (
    HamiltonianParams,
    assemble_hamiltonian,
    diagonalize,
    energy,
    evolve,
    evolve_diagonal_oracle,
    fidelity,
)
from .spin import SpinMagnitude, build_operators, lowest_jx_eigenstate

DEFAULT_J_LIST = ("1/2", "1", "10", "100")

TOLERANCES = {
    "commutator": 1e-12,  # relative to J^2
    "casimir": 1e-12,  # relative to J^2
    "norm": 1e-10,
    "energy": 1e-8,  # relative
    "oracle_infidelity": 1e-10,
    "xi_initial": 1e-8,
}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    j: str
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value < self.tolerance)


def _operator_algebra(spin, tol):
    jx, jy, jz = build_operators(spin).dense()
    j2 = spin.j**2
    comm = max(
        np.abs(jx @ jy - jy @ jx - 1j * jz).max(),
        np.abs(jy @ jz - jz @ jy - 1j * jx).max(),
        np.abs(jz @ jx - jx @ jz - 1j * jy).max(),
    )
    casimir = np.abs(jx @ jx + jy @ jy + jz @ jz - spin.j * (spin.j + 1) * np.eye(spin.dim)).max()
    return [
        CheckResult("operator-algebra", str(spin), "commutators / J^2", comm / j2, tol["commutator"]),
        CheckResult("operator-algebra", str(spin), "Casimir / J^2", casimir / j2, tol["casimir"]),
    ]


def _unitarity(spin, tol, omega=25.0, times=(0.1, 1.0, 10.0)):
    params = HamiltonianParams(1.0, omega)
    h = assemble_hamiltonian(spin, params)
    d = diagonalize(h)
    psi0 = lowest_jx_eigenstate(spin)
    e0 = energy(h, psi0)
    states = evolve(d, psi0, np.asarray(times))
    norm_err = np.abs(np.linalg.norm(states, axis=0) - 1).max()
    e_err = max(abs(energy(h, states[:, k]) - e0) for k in range(len(times))) / max(abs(e0), 1e-300)
    return [
        CheckResult("unitarity", str(spin), "| |psi(t)| - 1 |", norm_err, tol["norm"]),
        CheckResult("unitarity", str(spin), "relative <H> drift", e_err, tol["energy"]),
    ]


def _oracle(spin, tol, times=(0.01, 0.1, 1.0)):
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 0.0)))
    psi0 = lowest_jx_eigenstate(spin)
    worst = 0.0
    for t in times:
        worst = max(worst, 1 - fidelity(evolve(d, psi0, t), evolve_diagonal_oracle(spin, 1.0, psi0, t)))
    return [CheckResult("oracle-equivalence", str(spin), "1 - fidelity vs phases", worst, tol["oracle_infidelity"])]


def _initial_xi(spin, tol):
    ops = build_operators(spin)
    rec = squeezing_parameter(lowest_jx_eigenstate(spin, ops), ops)
    return [CheckResult("initial-squeezing", str(spin), "|xi_s(0) - 1|", abs(rec.xi_s - 1), tol["xi_initial"])]


def run_checks(j_list=DEFAULT_J_LIST, tolerance_scale: float = 1.0) -> list[CheckResult]:
    """Run every suite for every J; tolerances can only be tightened."""
    if not 0 <= tolerance_scale <= 1:
        raise ValueError(f"tolerance_scale must lie in [0, 1], got {tolerance_scale}")
    tol = {k: v * tolerance_scale for k, v in TOLERANCES.items()}
    results = []
    for j in j_list:
        spin = j if isinstance(j, SpinMagnitude) else SpinMagnitude.from_j(j)
        results += _operator_algebra(spin, tol)
        results += _unitarity(spin, tol)
        results += _oracle(spin, tol)
        results += _initial_xi(spin, tol)
    return results


def format_report(results: list[CheckResult]) -> str:
    header = f"{'suite':<20} {'J':>5}  {'check':<24} {'value':>11} {'tol':>9}  result"
    lines = [header, "-" * len(header)]
    for r in results:
        lines.append(
            f"{r.suite:<20} {r.j:>5}  {r.name:<24} {r.value:11.3e} {r.tolerance:9.1e}  "
            f"{'PASS' if r.passed else 'FAIL'}"
        )
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
