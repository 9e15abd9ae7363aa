import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from giantspin import analytics
from giantspin.angle_model import (
    DEFAULT_GRID_POINTS,
    AngleHamiltonian,
    TrigPoly,
    angle_eigenvalues,
    angle_spectrum,
    angle_splitting,
    assemble,
    default_kmax,
    effective_mass,
    inverse_mass,
    inverse_mass_poly,
    phi_grid,
    potential,
    potential_poly,
    solve,
    solve_hamiltonian,
)
from giantspin.core import FE8, ModelDomainError, SpinParams, UnsupportedConfigurationError
from giantspin.linalg import eigvalsh

from oracles import angle_sector_mp, lowest_mp, plane_wave_quadrature

CUTOFF = analytics.field_cutoff(FE8)


def test_potential_examples(fe8):
    assert potential(0.0, fe8) == pytest.approx(-30.25, abs=1e-12)
    assert potential(math.pi / 2, fe8) == pytest.approx(-5.06, abs=1e-12)
    p = fe8.with_field(0.216)
    assert potential(math.pi, p) - potential(0.0, p) == pytest.approx(6.087, abs=1e-3)


def test_inverse_mass_examples(fe8):
    assert inverse_mass(math.pi / 2, fe8) == pytest.approx(0.184, abs=1e-14)
    assert inverse_mass(0.0, fe8) == pytest.approx(0.642, abs=1e-14)
    assert inverse_mass_poly(fe8.with_field(CUTOFF)).minimum() == pytest.approx(0.0, abs=1e-12)
    assert effective_mass(math.pi / 2, fe8) == pytest.approx(1 / 0.184)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 6), st.floats(-10, 10))
def test_trig_poly_matches_closed_forms(H, phi):
    p = FE8.with_field(H)
    ss = p.spin_square
    A = 2 * 0.6717 * H
    V = -(p.D - p.E) * ss * math.cos(phi) ** 2 - math.sqrt(ss) * A * math.cos(phi) - p.E * ss
    I = 2 * (p.D - p.E) * math.cos(phi) ** 2 + A / p.S * math.cos(phi) + 4 * p.E
    assert potential(phi, p) == pytest.approx(V, abs=1e-12)
    assert inverse_mass(phi, p) == pytest.approx(I, abs=1e-14)


@pytest.mark.parametrize("H", [0.0, 0.7, 3.0])
def test_fourier_coefficients_against_fft(fe8, H):
    p = fe8.with_field(H)
    phi = 2 * math.pi * np.arange(64) / 64
    for poly, f in ((potential_poly(p), potential), (inverse_mass_poly(p), inverse_mass)):
        fk = plane_wave_quadrature(f(phi, p))
        for k in range(-4, 5):
            assert poly.hat(k) == pytest.approx(fk[k].real, abs=1e-13)
            assert abs(fk[k].imag) < 1e-13


def test_trig_poly_minimum_against_grid():
    phi = np.linspace(-math.pi, math.pi, 200001)
    for poly in (TrigPoly(1.0, 0.3, 0.5), TrigPoly(1.0, -2.0, 0.2), TrigPoly(0.0, 0.1, -1.0)):
        assert poly.minimum() == pytest.approx(np.min(poly(phi)), abs=1e-9)
        assert poly.minimum() <= np.min(poly(phi)) + 1e-15


def test_plane_wave_elements(fe8):
    p = fe8.with_field(0.4)
    ham = assemble(p, 6)
    h = ham.plane_wave_matrix().entries
    kinetic = ham.plane_wave_matrix(kinetic_only=True).entries
    n = np.arange(-6, 7)
    I, V = inverse_mass_poly(p), potential_poly(p)
    for i, a in enumerate(n):
        assert kinetic[i, i] == pytest.approx(a * a * (p.D + 3 * p.E) / 2, abs=1e-15)
        for j, b in enumerate(n):
            expected = 0.5 * a * b * I.hat(a - b) + V.hat(a - b)
            assert h[i, j] == pytest.approx(expected, abs=1e-14)
    assert ham.plane_wave_matrix().bandwidth == 2


def test_zero_field_selection_rule(fe8):
    h = assemble(fe8, 10).plane_wave_matrix().entries
    assert np.all(np.diag(h, 1) == 0)
    assert np.any(np.diag(h, 2) != 0)


def test_constant_mode_entry(fe8):
    assert assemble(fe8, 8).even_block().entries[0, 0] == pytest.approx(-17.655, abs=1e-12)


def _trig_unitary(kmax):
    """Columns: cos basis (n = 0..kmax) then sin basis (n = 1..kmax) in plane waves."""
    size = 2 * kmax + 1
    u = np.zeros((size, size), dtype=complex)
    idx = {n: n + kmax for n in range(-kmax, kmax + 1)}
    u[idx[0], 0] = 1.0
    for n in range(1, kmax + 1):
        u[idx[n], n] = u[idx[-n], n] = math.sqrt(0.5)
        u[idx[n], kmax + n] = -1j * math.sqrt(0.5)
        u[idx[-n], kmax + n] = 1j * math.sqrt(0.5)
    return u


@pytest.mark.parametrize("H", [0.0, 0.9, 2.5])
def test_parity_rotation_is_exact(fe8, H):
    ham = assemble(fe8.with_field(H), 12)
    u = _trig_unitary(12)
    assert np.allclose(u.conj().T @ u, np.eye(25), atol=1e-15)
    rotated = u.conj().T @ ham.plane_wave_matrix().entries @ u
    assert np.max(np.abs(rotated.imag)) < 1e-12
    assert np.max(np.abs(rotated[:13, 13:])) < 1e-12
    assert rotated.real == pytest.approx(ham.trig_matrix().entries, abs=1e-12)


def test_zero_field_blocks_split_by_harmonic_parity(fe8):
    ham = assemble(fe8, 16)
    keys = sorted(ham.blocks())
    assert keys == ["even/even", "even/odd", "odd/even", "odd/odd"]
    levels = np.sort(np.concatenate([eigvalsh(b) for b, _ in ham.blocks().values()]))
    assert levels == pytest.approx(np.linalg.eigvalsh(ham.plane_wave_matrix().entries), abs=1e-11)
    assert sorted(assemble(fe8.with_field(0.2), 16).blocks()) == ["even", "odd"]


def test_spectral_convergence(fe8):
    base = angle_eigenvalues(fe8, 48, 10)
    for kmax in (64, 80, 96):
        nxt = angle_eigenvalues(fe8, kmax, 10)
        assert np.max(np.abs(nxt - base)) < 1e-10
        base = nxt


def test_variational_monotone_in_kmax(fe8):
    energies = [angle_eigenvalues(fe8, k, 1)[0] for k in range(2, 41)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1))
def test_kinetic_block_psd_below_cutoff(fraction):
    ham = assemble(FE8.with_field(fraction * CUTOFF), 24)
    assert not ham.mass_singular or fraction == 1
    for block in (ham.even_block(kinetic_only=True), ham.odd_block(kinetic_only=True)):
        lam = np.linalg.eigvalsh(block.entries)
        assert lam[0] >= -1e-12 * (1 + np.abs(lam).max())


def test_mass_singular_flag(fe8):
    assert not assemble(fe8.with_field(0.99 * CUTOFF), 8).mass_singular
    ham = assemble(fe8.with_field(1.1 * CUTOFF), 8)
    assert ham.mass_singular
    lam = np.linalg.eigvalsh(ham.even_block(kinetic_only=True).entries)
    assert lam[0] < 0


def test_extrema_at_zero_field(fe8):
    phi = np.linspace(-math.pi / 2 - 0.3, 3 * math.pi / 2 + 0.3, 20001)
    for f in (potential, effective_mass):
        # V and 1/I are both minimal at 0, pi and maximal at +-pi/2
        y = f(phi, fe8)
        dy = np.diff(y)
        changes = np.nonzero(np.sign(dy[1:]) != np.sign(dy[:-1]))[0] + 1
        minima = [phi[i] for i in changes if dy[i - 1] < 0]
        maxima = [phi[i] for i in changes if dy[i - 1] > 0]
        assert minima == pytest.approx([0.0, math.pi], abs=1e-3)
        assert maxima == pytest.approx([-math.pi / 2, math.pi / 2, 3 * math.pi / 2], abs=1e-3)
    assert inverse_mass(0.0, fe8) > inverse_mass(math.pi / 2, fe8)


@pytest.mark.parametrize("H", [0.3, 1.7])
def test_opposite_field_spectrum(fe8, H):
    ham = assemble(fe8.with_field(H), 48)
    mirrored = AngleHamiltonian(None, ham.V.shifted_by_pi(), ham.I.shifted_by_pi(), 48)
    assert mirrored.V.c1 == -ham.V.c1 and mirrored.I.c1 == -ham.I.c1
    a = np.linalg.eigvalsh(ham.trig_matrix().entries)[:12]
    b = np.linalg.eigvalsh(mirrored.trig_matrix().entries)[:12]
    assert a == pytest.approx(b, abs=1e-11)


def test_solve_ground_state_and_wavefunctions(fe8):
    levels = solve(fe8, 64, 4)
    energies = [e for e, _ in levels]
    assert energies == sorted(energies)
    assert energies[0] == pytest.approx(-27.6447, abs=5e-5)
    for e, wf in levels:
        assert wf.energy == e
        assert abs(wf.norm() - 1) < 1e-10
        assert abs(wf.grid_norm() - 1) < 1e-10
        assert len(wf.phi) == DEFAULT_GRID_POINTS
        assert np.all(np.isreal(wf.samples))
    wf0 = levels[0][1]
    assert wf0.parity == "even"
    assert wf0(0.0) > 0
    phi = np.linspace(-3, 3, 41)
    assert wf0(phi) == pytest.approx(wf0(-phi), abs=1e-14)
    assert wf0(0.0) == pytest.approx(wf0(math.pi), rel=1e-6)
    assert abs(wf0(math.pi / 2)) < 1e-3 * wf0(0.0)


def test_odd_states_are_sine_series(fe8):
    levels = solve(fe8, 32, 12)
    odd = [wf for _, wf in levels if wf.parity == "odd"]
    assert odd
    phi = np.linspace(-3, 3, 41)
    for wf in odd:
        assert wf(phi) == pytest.approx(-wf(-phi), abs=1e-14)
        assert wf(0.0) == pytest.approx(0.0, abs=1e-14)


def test_wavefunction_in_field_has_no_shift_label(fe8):
    _, wf = solve(fe8.with_field(0.5), 32, 1)[0]
    assert wf.harmonics is None
    assert abs(wf.norm() - 1) < 1e-10


def test_phi_grid_intervals():
    g = phi_grid(8)
    assert g[0] > -math.pi and g[-1] == pytest.approx(math.pi)
    f = phi_grid(8, "figure")
    assert f[0] > -math.pi / 2 and f[-1] == pytest.approx(3 * math.pi / 2)
    with pytest.raises(ValueError):
        phi_grid(0)


def test_angle_spectrum_residuals(fe8):
    sp = angle_spectrum(fe8, 64, 6)
    assert sp.max_residual < 1e-10 * (1 + assemble(fe8, 64).trig_matrix().frobenius_norm())
    assert sp.labels[0] == "even/even"
    v = sp.eigenvectors
    assert v.T @ v == pytest.approx(np.eye(6), abs=1e-12)


def test_splitting_against_high_precision(fe8):
    kmax = 64
    lows = {
        h: min(float(lowest_mp(angle_sector_mp(10, 0.275, 0.046, kmax, par, h))) for par in ("even", "odd"))
        for h in (0, 1)
    }
    ref = lows[1] - lows[0]
    delta = angle_splitting(fe8, kmax)
    assert delta > 0
    assert delta == pytest.approx(ref, rel=2e-5)


def test_splitting_stable_in_kmax(fe8):
    a, b = angle_splitting(fe8, 64), angle_splitting(fe8, 96)
    assert abs(a - b) / b < 1e-6


def test_splitting_vanishes_for_tiny_transverse_term():
    assert angle_splitting(SpinParams(10, 0.275, 1e-6), 64) < 1e-15


def test_splitting_rejects_field(fe8):
    with pytest.raises(UnsupportedConfigurationError):
        angle_splitting(fe8.with_field(0.1))


def test_domain_and_truncation_errors():
    with pytest.raises(ModelDomainError):
        assemble(SpinParams(10, 0.046, 0.046))
    with pytest.raises(ModelDomainError):
        solve(SpinParams(10, 0.0, 0.046))
    with pytest.raises(ValueError):
        assemble(FE8, 1)
    assert default_kmax(10) == 64
    assert default_kmax(20) >= 128


def test_solve_hamiltonian_accepts_raw_coefficients():
    ham = AngleHamiltonian(None, TrigPoly(0.0, 0.0, 0.0), TrigPoly(2.0, 0.0, 0.0), 8)
    energies = [e for e, _ in solve_hamiltonian(ham, 5)]
    # free rotor with I = 2: levels n^2, each n > 0 doubly degenerate
    assert energies == pytest.approx([0, 1, 1, 4, 4], abs=1e-14)
