"""Anharmonic bound-state basis, displaced wavepackets, revival times.

Independent oracles:
  - a three-point finite-difference diagonalization of the same potential
    on refined grids; Richardson extrapolation in the step cancels the
    O(dx^2) error, and level spacings (zero-point offset removed) must
    match the analytic spectrum;
  - the quadratic spectrum itself: E_n - E_0 = omega n - a n^2 with
    omega = 2 a (lam - 1/2) and a = hbar beta^2 / (2 mu r0^2);
  - exact phase alignment at t = 4 pi for the default parameter set,
    whose level number lam - 1/2 = 21 is an integer.
"""

import os

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import eigh_tridiagonal

from qnldyn.errors import GridResolutionError
from qnldyn.morse import (
    MORSE_PRESETS,
    MorseParams,
    build_eigenbasis,
    cached_eigenbasis,
    default_grid,
    evolve_morse,
    load_morse_params,
    morse_autocorrelation,
    morse_moments_series,
    morse_revival_period,
    orthonormality_residue,
    perelomov_state,
    position_matrix,
    momentum_matrix,
    superpose_morse,
)
from qnldyn.series import SamplingPlan

PRESET = MORSE_PRESETS["default"]


def fd_level_spacings(params, grid, n_points):
    """Bound spectrum of -1/2 psi'' + D(1 - e^{-beta(x-r0)})^2 psi, E_0 removed."""
    g = np.linspace(grid[0], grid[-1], n_points)
    dx = g[1] - g[0]
    potential = params.D * (1.0 - np.exp(-params.beta * (g - params.r0))) ** 2
    energies, _ = eigh_tridiagonal(
        1.0 / dx**2 + potential,
        np.full(n_points - 1, -0.5 / dx**2),
        select="i",
        select_range=(0, params.n_max),
    )
    return energies - energies[0]


def test_preset_ladder_shape():
    assert_allclose(PRESET.lam, 21.5, atol=0.0)
    assert PRESET.n_max == 20
    assert PRESET.n_max % 2 == 0  # two-component superpositions need this
    assert_allclose(PRESET.anharmonicity, 0.5, atol=0.0)
    assert_allclose(PRESET.omega_e, 21.5, atol=1e-14)
    assert_allclose(PRESET.x_e, 1.0 / 43.0, atol=1e-16)
    assert PRESET.period_denominator == 1


def test_threshold_level_is_excluded():
    # lam - 1/2 integer: the state at that index is not normalizable
    params = MorseParams(D=231.125, beta=1.0, mu=1.0)
    assert params.level_number == 21.0
    assert params.n_max == 20
    # slightly deeper well: the extra level becomes bound, and the now
    # irrational level number triggers the approximate-revival warning
    with pytest.warns(UserWarning, match="not close to a small rational"):
        deeper = MorseParams(D=233.0, beta=1.0, mu=1.0)
    assert deeper.n_max == 21


def test_bound_energies_quadratic_in_n():
    energies = PRESET.bound_energies()
    n = np.arange(energies.size, dtype=float)
    assert_allclose(energies, 21.0 * n - 0.5 * n**2, atol=1e-10)
    assert energies[0] == 0.0


def test_spectrum_against_finite_difference(morse_basis):
    analytic = morse_basis.energies - morse_basis.energies[0]
    e12 = fd_level_spacings(PRESET, morse_basis.grid, 12000)
    e24 = fd_level_spacings(PRESET, morse_basis.grid, 24000)
    richardson = (4.0 * e24 - e12) / 3.0
    assert np.max(np.abs(richardson - analytic)) < 1e-5


def test_eigenbasis_orthonormal(morse_basis):
    assert orthonormality_residue(morse_basis) < 1e-10


def test_coarse_grid_is_rejected():
    with pytest.raises(GridResolutionError):
        build_eigenbasis(PRESET, default_grid(PRESET, 200))


def test_grid_validation():
    with pytest.raises(ValueError):
        build_eigenbasis(PRESET, np.array([0.0, 1.0, 3.0, 4.0] * 5))  # non-uniform
    with pytest.raises(ValueError):
        build_eigenbasis(PRESET, np.linspace(-1.0, 10.0, 8))  # too short


def test_position_matrix_symmetric(morse_basis):
    x = position_matrix(morse_basis)
    assert_allclose(x, x.T, atol=1e-12)


def test_momentum_matrix_hermitian(morse_basis):
    p = momentum_matrix(morse_basis)
    assert_allclose(p, p.conj().T, atol=1e-12)


def test_perelomov_zero_displacement_is_top_level(morse_basis):
    state = perelomov_state(0.0, morse_basis)
    expected = np.zeros(PRESET.n_max + 1, dtype=complex)
    expected[PRESET.n_max] = 1.0
    assert_allclose(state.coeffs, expected, atol=0.0)


def test_perelomov_normalized(morse_basis):
    for alpha in (0.2, 0.4, 1.0, 2.0):
        state = perelomov_state(alpha, morse_basis)
        assert_allclose(state.norm(), 1.0, atol=1e-12)


def test_superposition_support_masked_exactly(morse_basis):
    n = np.arange(PRESET.n_max + 1)
    for ell in (2, 4):
        state = superpose_morse(0.4, ell, morse_basis)
        off = state.coeffs[(PRESET.n_max - n) % ell != 0]
        assert np.all(off == 0.0)
        assert_allclose(state.norm(), 1.0, atol=1e-12)


def test_superposition_keeps_single_packet_ratios(morse_basis):
    single = perelomov_state(0.4, morse_basis)
    double = superpose_morse(0.4, 2, morse_basis)
    keep = np.nonzero(double.coeffs)[0]
    ratios = double.coeffs[keep] / single.coeffs[keep]
    assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_two_component_needs_even_top_level(morse_basis):
    with pytest.raises(ValueError):
        superpose_morse(0.4, 2, morse_basis, n_prime=19)


def test_revival_period_values():
    base = morse_revival_period(1, PRESET)
    assert_allclose(base, 4.0 * np.pi, atol=1e-14)
    assert_allclose(morse_revival_period(2, PRESET), np.pi, atol=1e-14)
    assert_allclose(morse_revival_period(3, PRESET), 2.0 * np.pi / 3.0, atol=1e-14)


def test_wavepacket_revives_exactly(morse_basis):
    state = perelomov_state(0.4, morse_basis)
    period = morse_revival_period(1, PRESET)
    assert abs(morse_autocorrelation(state, period)) > 1.0 - 1e-10
    # between revivals the packet is genuinely spread out
    probes = np.linspace(0.3, 6.0, 37)
    assert np.max(np.abs(morse_autocorrelation(state, probes))) < 0.95


def test_two_component_revives_at_quarter_period(morse_basis):
    state = superpose_morse(0.4, 2, morse_basis)
    quarter = morse_revival_period(1, PRESET) / 4.0
    assert abs(morse_autocorrelation(state, quarter)) > 1.0 - 1e-10
    assert_allclose(morse_revival_period(2, PRESET), quarter, atol=1e-14)


def test_evolution_preserves_norm_and_energy(morse_basis):
    state = perelomov_state(0.7, morse_basis)
    energy0 = float(np.sum(np.abs(state.coeffs) ** 2 * morse_basis.energies))
    for t in (0.9, 42.0, 1234.5):
        moved = evolve_morse(state, t)
        assert_allclose(moved.norm(), 1.0, atol=1e-12)
        energy = float(np.sum(np.abs(moved.coeffs) ** 2 * morse_basis.energies))
        assert abs(energy - energy0) < 1e-10


def test_moment_series_matches_pointwise_expectation(morse_basis):
    state = perelomov_state(0.4, morse_basis)
    plan = SamplingPlan(0.0, 0.17, 12)
    x_op = position_matrix(morse_basis)
    series = morse_moments_series(state, plan, "x")
    for k, t in enumerate(plan.times()):
        c = evolve_morse(state, t).coeffs
        assert_allclose(series.values[k], (c.conj() @ x_op @ c).real, atol=1e-12)


def test_moment_curves_close_after_one_period(morse_basis):
    state = perelomov_state(0.4, morse_basis)
    period = morse_revival_period(1, PRESET)
    n_samples = 801
    plan = SamplingPlan(0.0, period / (n_samples - 1), n_samples)
    for observable in ("x", "p"):
        series = morse_moments_series(state, plan, observable)
        assert abs(series.values[-1] - series.values[0]) < 1e-6


def test_autocorrelation_array_matches_scalars(morse_basis):
    state = perelomov_state(0.5, morse_basis)
    times = np.array([0.0, 0.31, 1.7])
    arr = morse_autocorrelation(state, times)
    for k, t in enumerate(times):
        assert_allclose(arr[k], morse_autocorrelation(state, float(t)), atol=1e-14)


def test_cached_eigenbasis_round_trip(tmp_path):
    cache = str(tmp_path)
    first = cached_eigenbasis(PRESET, cache_dir=cache, n_points=2000)
    files = os.listdir(cache)
    assert len(files) == 1
    second = cached_eigenbasis(PRESET, cache_dir=cache, n_points=2000)
    assert_allclose(second.energies, first.energies, atol=0.0)
    assert_allclose(second.grid, first.grid, atol=0.0)
    assert_allclose(second.psi, first.psi, atol=0.0)
    assert os.listdir(cache) == files  # second call reused the stored basis


def test_load_morse_params(tmp_path):
    path = tmp_path / "morse.cfg"
    path.write_text("# comment\npreset=default\nbeta = 1.0\n")
    params = load_morse_params(str(path))
    assert_allclose(params.D, PRESET.D)

    bad = tmp_path / "bad.cfg"
    bad.write_text("D=231.125\nwhat=1\n")
    with pytest.raises(ValueError, match="bad.cfg:2"):
        load_morse_params(str(bad))

    empty_val = tmp_path / "empty.cfg"
    empty_val.write_text("D=\n")
    with pytest.raises(ValueError, match="empty.cfg:1"):
        load_morse_params(str(empty_val))


def test_params_validation():
    with pytest.raises(ValueError):
        MorseParams(D=-1.0, beta=1.0, mu=1.0)
    with pytest.raises(ValueError):
        MorseParams(D=0.05, beta=1.0, mu=1.0)  # too shallow for a bound state
    with pytest.raises(ValueError):
        morse_revival_period(0, PRESET)
    with pytest.raises(ValueError):
        perelomov_state(0.4, build_eigenbasis(PRESET, default_grid(PRESET, 1000)), n_prime=30)
