"""Exact and frozen-spin simulation of spin squeezing under 2*kappa*Jz^2 + Omega*Jx."""

from .errors import NumericalError
from .frozen import (
    FrozenSpinModel,
    asymptotic_xi,
    frequency,
    optimal_times,
    predicted_variances,
    predicted_xi,
    predicted_xi_min,
)
from .observables import (
    PerpCovariance,
    SpinExpectations,
    SqueezingRecord,
    covariance,
    expectations,
    squeezing_parameter,
)
from .propagator import (
    HamiltonianParams,
    SpectralDecomposition,
    assemble_hamiltonian,
    diagonalize,
    evolve,
    evolve_diagonal_oracle,
)
from .spin import (
    CollectiveOperators,
    SpinMagnitude,
    TridiagonalOperator,
    apply_tridiagonal,
    build_operators,
    lowest_jx_eigenstate,
)
from .sweep import (
    SqueezingDynamics,
    SweepResult,
    TimeGridSpec,
    min_over_time,
    optimal_omega,
    timeseries,
)

__version__ = "0.1.0"
