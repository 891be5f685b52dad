import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize_scalar

from spinsqueeze import NumericalError
from spinsqueeze.frozen import FrozenSpinModel, optimal_times, predicted_xi_min
from spinsqueeze.observables import (
    covariance,
    expectations,
    perpendicular_covariance,
    perpendicular_frame,
    squeezing_parameter,
    squeezing_records,
)
from spinsqueeze.propagator import HamiltonianParams, assemble_hamiltonian, diagonalize, evolve
from spinsqueeze.spin import CollectiveOperators, SpinMagnitude, build_operators, lowest_jx_eigenstate


def _scan_min_perp_variance(psi, spin, n_angles=2001):
    """Oracle: Var(cos a e1.J + sin a e2.J) scanned over angles with dense matrices,
    best grid point polished by bounded Brent."""
    jx, jy, jz = build_operators(spin).dense()
    mats = [jx, jy, jz]
    mean = np.array([np.vdot(psi, m @ psi).real for m in mats])
    n = mean / np.linalg.norm(mean)
    # any orthonormal pair works for the oracle; build it independently via SVD
    _, _, vt = np.linalg.svd(n[None, :])
    e1, e2 = vt[1], vt[2]
    a1 = sum(c * m for c, m in zip(e1, mats))
    a2 = sum(c * m for c, m in zip(e2, mats))

    def var(a):
        u = (np.cos(a) * a1 + np.sin(a) * a2) @ psi
        return np.vdot(u, u).real - np.vdot(psi, u).real ** 2

    grid = np.linspace(0, np.pi, n_angles)
    vals = [var(a) for a in grid]
    k = int(np.argmin(vals))
    step = grid[1] - grid[0]
    polished = minimize_scalar(var, bounds=(grid[k] - step, grid[k] + step), method="bounded",
                               options={"xatol": 1e-12})
    return min(vals[k], polished.fun)


def _random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def _oat_xi_squared(kappa_t, twice_j):
    """Closed form for H = 2 kappa Jz^2 from a coherent state on the equator."""
    n = twice_j
    mu_half = 2 * kappa_t
    a = 1 - np.cos(2 * mu_half) ** (n - 2)
    b = 4 * np.sin(mu_half) * np.cos(mu_half) ** (n - 2)
    return 1 + (n - 1) / 4 * a - (n - 1) / 4 * np.sqrt(a * a + b * b)


def test_expectations_on_dicke_bottom_state():
    spin = SpinMagnitude.from_j(7)
    ops = build_operators(spin)
    psi = np.zeros(spin.dim, complex)
    psi[0] = 1
    e = expectations(psi, ops)
    assert (e.jx, e.jy, e.jz) == (0, 0, -7)
    c = covariance(psi, ops)
    assert c[2, 2] == pytest.approx(0, abs=1e-14)
    assert c[0, 0] == pytest.approx(3.5) and c[1, 1] == pytest.approx(3.5)


@pytest.mark.parametrize("j", [1, 10, 100, 500])
def test_coherent_state_moments(j):
    spin = SpinMagnitude.from_j(j)
    ops = build_operators(spin)
    psi = lowest_jx_eigenstate(spin, ops)
    e = expectations(psi, ops)
    assert e.jx == pytest.approx(-j, rel=1e-12)
    assert e.norm_of_mean == pytest.approx(j, rel=1e-12)
    c = covariance(psi, ops)
    assert c[1, 1] == pytest.approx(j / 2, abs=1e-8)
    assert c[2, 2] == pytest.approx(j / 2, abs=1e-8)
    assert abs(c[1, 2]) < 1e-8
    rec = squeezing_parameter(psi, ops)
    assert rec.xi_s == pytest.approx(1, abs=1e-8)
    assert not rec.degenerate_mean


def test_spin_half_is_never_squeezed():
    spin = SpinMagnitude(1)
    ops = build_operators(spin)
    rng = np.random.default_rng(0)
    for _ in range(20):
        psi = _random_state(rng, 2)
        oracle = _scan_min_perp_variance(psi, spin)
        assert oracle == pytest.approx(0.25, abs=1e-12)
        rec = squeezing_parameter(psi, ops)
        assert rec.min_perp_variance == pytest.approx(0.25, abs=1e-12)
        assert rec.xi_s == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("twice_j", [2, 3, 6, 11])
def test_min_perp_variance_matches_angle_scan(twice_j):
    spin = SpinMagnitude(twice_j)
    ops = build_operators(spin)
    rng = np.random.default_rng(twice_j)
    for _ in range(3):
        psi = _random_state(rng, spin.dim)
        if expectations(psi, ops).norm_of_mean < 1e-3:
            continue
        oracle = _scan_min_perp_variance(psi, spin)
        assert squeezing_parameter(psi, ops).min_perp_variance == pytest.approx(oracle, abs=1e-10 * spin.j**2)


def test_evolved_state_matches_angle_scan():
    spin = SpinMagnitude.from_j(6)
    ops = build_operators(spin)
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 2.0)))
    psi = evolve(d, lowest_jx_eigenstate(spin, ops), 0.21)
    oracle = _scan_min_perp_variance(psi, spin)
    assert squeezing_parameter(psi, ops).min_perp_variance == pytest.approx(oracle, abs=1e-10)


@pytest.mark.parametrize("twice_j", [20, 200, 1000])
def test_one_axis_twisting_closed_form(twice_j):
    spin = SpinMagnitude(twice_j)
    ops = build_operators(spin)
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 0.0)))
    psi0 = lowest_jx_eigenstate(spin, ops)
    ts = np.array([1e-4, 3e-3, 0.017, 0.05, 0.2])
    recs = squeezing_records(evolve(d, psi0, ts), ops, ts)
    for rec, t in zip(recs, ts):
        assert rec.xi_s**2 == pytest.approx(_oat_xi_squared(t, twice_j), abs=1e-10)


def test_frozen_spin_regime_point():
    spin = SpinMagnitude.from_j(100)
    ops = build_operators(spin)
    model = FrozenSpinModel(1.0, 100.0, 100)
    t = optimal_times(model, 0)
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 100.0)))
    rec = squeezing_parameter(evolve(d, lowest_jx_eigenstate(spin, ops), t), ops, t)
    assert rec.xi_s == pytest.approx(predicted_xi_min(model), rel=0.05)
    assert predicted_xi_min(model) == pytest.approx(0.4472, abs=1e-4)


def test_degenerate_mean_falls_back_and_flags():
    spin = SpinMagnitude.from_j(1)
    ops = build_operators(spin)
    psi = np.array([0, 1, 0], complex)  # |m=0>, zero mean spin
    rec = squeezing_parameter(psi, ops)
    assert rec.degenerate_mean
    assert rec.min_perp_variance == pytest.approx(0, abs=1e-15)
    assert rec.xi_s == pytest.approx(0, abs=1e-7)


def test_imaginary_residue_is_diagnosed():
    spin = SpinMagnitude.from_j(2)
    good = build_operators(spin)
    bad = CollectiveOperators(spin, good.jz_diag * 1j, good.ladder_super)
    psi = np.eye(spin.dim, dtype=complex)[0]
    with pytest.raises(NumericalError):
        expectations(psi, bad)


def test_perpendicular_frame_along_x():
    e1, e2 = perpendicular_frame(np.array([-5.0, 0.0, 0.0]))
    np.testing.assert_array_equal(e1, [0, 1, 0])
    np.testing.assert_array_equal(e2, [0, 0, 1])


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 3, elements=st.floats(-10, 10)).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_perpendicular_frame_orthonormal(v):
    e1, e2 = perpendicular_frame(v)
    n = v / np.linalg.norm(v)
    assert abs(e1 @ e2) < 1e-12
    assert abs(np.linalg.norm(e1) - 1) < 1e-12 and abs(np.linalg.norm(e2) - 1) < 1e-12
    assert abs(e1 @ n) < 1e-12 and abs(e2 @ n) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=40), st.integers(min_value=0, max_value=2**32 - 1))
def test_random_state_invariants(twice_j, seed):
    spin = SpinMagnitude(twice_j)
    ops = build_operators(spin)
    psi = _random_state(np.random.default_rng(seed), spin.dim)
    e = expectations(psi, ops)
    c = covariance(psi, ops)
    j2 = spin.j**2
    assert e.norm_of_mean <= spin.j * (1 + 1e-12)
    np.testing.assert_allclose(c, c.T, atol=1e-12 * j2)
    assert np.linalg.eigvalsh(c).min() >= -1e-10 * j2
    perp = perpendicular_covariance(e.as_array(), c, spin.j)
    lo, hi = perp.eigenvalues
    assert lo >= -1e-10 * j2
    if not perp.degenerate_mean:
        # uncertainty relation for the two perpendicular components
        assert lo * hi >= e.norm_of_mean**2 / 4 - 1e-8 * j2


@pytest.mark.parametrize("t", [0.0, 0.004, 0.03, 0.4])
def test_drive_along_x_bounds_min_variance(t):
    spin = SpinMagnitude.from_j(40)
    ops = build_operators(spin)
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 12.0)))
    rec = squeezing_parameter(evolve(d, lowest_jx_eigenstate(spin, ops), t), ops, t)
    assert rec.min_perp_variance <= min(rec.var_jy, rec.var_jz) + 1e-12
    assert rec.xi_s == pytest.approx(np.sqrt(2 * rec.min_perp_variance / spin.j), abs=0)


@pytest.mark.parametrize("t", [0.01, 0.05, 0.3])
def test_xi_invariant_under_reflection_symmetries(t):
    spin = SpinMagnitude.from_j(30)
    ops = build_operators(spin)
    d = diagonalize(assemble_hamiltonian(spin, HamiltonianParams(1.0, 5.0)))
    psi0 = lowest_jx_eigenstate(spin, ops)
    psi = evolve(d, psi0, t)
    ref = squeezing_parameter(psi, ops).xi_s
    # m -> -m reverses the basis; Jx is unchanged, Jy and Jz flip sign
    assert squeezing_parameter(psi[::-1].copy(), ops).xi_s == pytest.approx(ref, abs=1e-10)
    # (-1)^i phases rotate by pi about z and send the lowest Jx eigenstate to the highest
    flip = (-1.0) ** np.arange(spin.dim)
    assert expectations(flip * psi0, ops).jx == pytest.approx(spin.j, rel=1e-12)
    assert squeezing_parameter(flip * psi, ops).xi_s == pytest.approx(ref, abs=1e-10)
