import numpy as np
import pytest

from uscsim.fockspace import Truncation
from uscsim.model import (
    FluxPoint,
    HamiltonianVariant,
    ModeSpec,
    QubitSpec,
    analytic_geff,
    build_hamiltonian,
    derive_qubit,
    find_avoided_crossing,
    mode_frequency,
    solve_eigensystem,
)

FULL = HamiltonianVariant.RABI_ENERGY_BASIS


# ----------------------------------------------------------------------
# derived qubit quantities
# ----------------------------------------------------------------------

def test_derive_qubit_zero_flux(qubit_spec):
    dq = derive_qubit(qubit_spec, FluxPoint(0.0))
    assert dq.epsilon_ghz == 0.0
    assert dq.omega_q_ghz == pytest.approx(12.3)
    assert dq.theta_rad == pytest.approx(np.pi / 2)


def test_derive_qubit_at_minus_47(qubit_spec):
    # frozen from a direct evaluation of eps = 2 I_p dPhi / h
    dq = derive_qubit(qubit_spec, FluxPoint(-47.0))
    assert dq.epsilon_ghz == pytest.approx(-17.601055586047487, rel=1e-12)
    assert dq.omega_q_ghz == pytest.approx(21.4729401280573, rel=1e-12)
    assert dq.theta_rad == pytest.approx(2.5316579166212945, rel=1e-12)


def test_derive_qubit_flux_parity(qubit_spec):
    plus = derive_qubit(qubit_spec, FluxPoint(47.0))
    minus = derive_qubit(qubit_spec, FluxPoint(-47.0))
    assert plus.omega_q_ghz == pytest.approx(minus.omega_q_ghz, rel=1e-14)
    assert plus.epsilon_ghz == pytest.approx(-minus.epsilon_ghz, rel=1e-14)
    assert plus.theta_rad == pytest.approx(np.pi - minus.theta_rad, rel=1e-12)


def test_qubit_spec_validation():
    with pytest.raises(ValueError):
        QubitSpec(tunnel_splitting_ghz=-1.0, persistent_current_na=60.0)
    with pytest.raises(ValueError):
        QubitSpec(tunnel_splitting_ghz=12.3, persistent_current_na=60.0, loss_rate_ghz=-0.1)


# ----------------------------------------------------------------------
# V-shaped mode frequencies
# ----------------------------------------------------------------------

def test_mode_frequency_zero_flux_exact(qubit_spec, modes):
    dq = derive_qubit(qubit_spec, FluxPoint(0.0))
    assert mode_frequency(modes[0], dq, FluxPoint(0.0)) == pytest.approx(5.0, abs=1e-12)
    assert mode_frequency(modes[1], dq, FluxPoint(0.0)) == pytest.approx(9.7, abs=1e-12)


def test_mode_frequency_at_minus_47(qubit_spec, modes):
    f = FluxPoint(-47.0)
    dq = derive_qubit(qubit_spec, f)
    assert mode_frequency(modes[0], dq, f) == pytest.approx(5.076356761177416, rel=1e-12)
    assert mode_frequency(modes[1], dq, f) == pytest.approx(9.876411059897082, rel=1e-12)


def test_mode_frequency_even_in_flux(qubit_spec, modes):
    for mag in (13.0, 47.0, 80.0):
        wp = mode_frequency(modes[0], derive_qubit(qubit_spec, FluxPoint(mag)), FluxPoint(mag))
        wm = mode_frequency(modes[0], derive_qubit(qubit_spec, FluxPoint(-mag)), FluxPoint(-mag))
        assert wp == pytest.approx(wm, rel=1e-14)


def test_mode_frequency_beta_zero(qubit_spec):
    flat = ModeSpec(base_frequency_ghz=5.0, v_shape_beta_per_phi0=0.0, coupling_ghz=1.0)
    for flux in (0.0, -47.0, 200.0):
        dq = derive_qubit(qubit_spec, FluxPoint(flux))
        assert mode_frequency(flat, dq, FluxPoint(flux)) == 5.0


def test_mode_frequency_out_of_range(qubit_spec, modes):
    f = FluxPoint(-2000.0)
    dq = derive_qubit(qubit_spec, f)
    with pytest.raises(ValueError, match="outside the model range"):
        mode_frequency(modes[0], dq, f)


# ----------------------------------------------------------------------
# Hamiltonian variants
# ----------------------------------------------------------------------

def test_decoupled_spectrum(qubit_spec):
    bare = (
        ModeSpec(base_frequency_ghz=5.0, v_shape_beta_per_phi0=0.775, coupling_ghz=0.0),
        ModeSpec(base_frequency_ghz=9.7, v_shape_beta_per_phi0=0.919, coupling_ghz=0.0),
    )
    f = FluxPoint(-30.0)
    t = Truncation(3, 2)
    dq = derive_qubit(qubit_spec, f)
    w1 = mode_frequency(bare[0], dq, f)
    w2 = mode_frequency(bare[1], dq, f)
    expected = sorted(
        s * dq.omega_q_ghz / 2 + k * w1 + l * w2
        for s in (1, -1)
        for k in range(3)
        for l in range(2)
    )
    for variant in HamiltonianVariant:
        h = build_hamiltonian(variant, qubit_spec, bare, f, t)
        ev = np.linalg.eigvalsh(h)
        assert np.allclose(ev, expected, atol=1e-10)


def test_flux_and_energy_basis_agree(qubit_spec, modes, trunc):
    f = FluxPoint(-47.0)
    ha = build_hamiltonian(HamiltonianVariant.RABI_FLUX_BASIS, qubit_spec, modes, f, trunc)
    hb = build_hamiltonian(FULL, qubit_spec, modes, f, trunc)
    eva, evb = np.linalg.eigvalsh(ha), np.linalg.eigvalsh(hb)
    assert np.max(np.abs(eva - evb)) < 1e-10 * max(1.0, np.max(np.abs(eva)))


def test_noparity_matches_energy_basis_at_zero_flux(qubit_spec, modes, trunc):
    f = FluxPoint(0.0)
    ha = build_hamiltonian(FULL, qubit_spec, modes, f, trunc)
    hb = build_hamiltonian(HamiltonianVariant.NO_PARITY_BREAKING, qubit_spec, modes, f, trunc)
    assert np.allclose(ha, hb, atol=1e-12)


def test_all_variants_hermitian(qubit_spec, modes, trunc):
    f = FluxPoint(-47.0)
    for variant in HamiltonianVariant:
        h = build_hamiltonian(variant, qubit_spec, modes, f, trunc)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12


def test_spectrum_even_in_flux(qubit_spec, modes, trunc):
    evp = np.linalg.eigvalsh(build_hamiltonian(FULL, qubit_spec, modes, FluxPoint(33.7), trunc))
    evm = np.linalg.eigvalsh(build_hamiltonian(FULL, qubit_spec, modes, FluxPoint(-33.7), trunc))
    assert np.max(np.abs(evp - evm)) < 1e-10 * np.max(np.abs(evp))


# ----------------------------------------------------------------------
# eigensystem
# ----------------------------------------------------------------------

def test_solve_eigensystem_identity():
    eig = solve_eigensystem(np.eye(5))
    assert np.allclose(eig.energies_ghz, 1.0)
    assert np.allclose(eig.transitions_ghz, 0.0)


def test_solve_eigensystem_rejects_nonhermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="not Hermitian"):
        solve_eigensystem(m)


def test_eigensystem_phase_and_orthonormality():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    m = m + m.conj().T
    eig = solve_eigensystem(m)
    v = eig.vectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(12))) < 1e-10
    assert np.all(np.diff(eig.energies_ghz) >= -1e-12)
    for j in range(12):
        k = int(np.argmax(np.abs(v[:, j])))
        assert abs(v[k, j].imag) < 1e-12
        assert v[k, j].real > 0


def test_dressed_levels_at_minus_47(qubit_spec, modes, trunc):
    # frozen transition energies of the fitted device at the working flux
    eig = solve_eigensystem(build_hamiltonian(FULL, qubit_spec, modes, FluxPoint(-47.0), trunc))
    assert eig.transitions_ghz[1] == pytest.approx(4.9212268094707365, rel=1e-10)
    assert eig.transitions_ghz[2] == pytest.approx(9.731004042459524, rel=1e-10)
    assert eig.transitions_ghz[3] == pytest.approx(9.862871905752147, rel=1e-10)


def test_double_resonance_region(qubit_spec, modes, trunc):
    eig = solve_eigensystem(build_hamiltonian(FULL, qubit_spec, modes, FluxPoint(-47.0), trunc))
    w = eig.transitions_ghz
    assert abs(w[3] - 2 * w[1]) < 0.05


def test_decoupled_ground_state_is_product(qubit_spec):
    bare = (
        ModeSpec(base_frequency_ghz=5.0, v_shape_beta_per_phi0=0.775, coupling_ghz=0.0),
        ModeSpec(base_frequency_ghz=9.7, v_shape_beta_per_phi0=0.919, coupling_ghz=0.0),
    )
    t = Truncation(3, 2)
    eig = solve_eigensystem(build_hamiltonian(FULL, qubit_spec, bare, FluxPoint(-30.0), t))
    # qubit index 1 is the sigma_z eigenvalue -1 state, the ground state of
    # +wq/2 sigma_z; composite index is 1*n1*n2 for the photon vacuum
    ground = eig.vectors[:, 0]
    assert abs(ground[t.n1 * t.n2]) == pytest.approx(1.0, abs=1e-12)


# ----------------------------------------------------------------------
# analytic effective coupling
# ----------------------------------------------------------------------

def test_geff_vanishes_at_symmetry_point():
    assert analytic_geff(2.815, 2.180, 5.0, 12.3, np.pi / 2) == pytest.approx(0.0, abs=1e-15)


def test_geff_reflection_invariance():
    a = analytic_geff(2.815, 2.180, 4.94, 21.9, 2.53)
    b = analytic_geff(2.815, 2.180, 4.94, 21.9, np.pi - 2.53)
    assert a == pytest.approx(b, rel=1e-12)


def test_geff_pole_error():
    with pytest.raises(ValueError, match="pole"):
        analytic_geff(1.0, 1.0, 1.0, 1.0, 1.0)


def test_geff_frozen_value_at_gap_minimum(qubit_spec, modes):
    # value of the closed-form expression at the numerically located
    # crossing flux, frozen from an independent evaluation
    f = FluxPoint(-49.0)
    dq = derive_qubit(qubit_spec, f)
    w1 = mode_frequency(modes[0], dq, f)
    val = analytic_geff(2.815, 2.180, w1, dq.omega_q_ghz, dq.theta_rad)
    assert abs(val) == pytest.approx(0.15453496234544647, rel=1e-10)


# ----------------------------------------------------------------------
# avoided crossing
# ----------------------------------------------------------------------

def test_find_avoided_crossing_full_variant(qubit_spec, modes, trunc):
    grid = [FluxPoint(x) for x in np.arange(-60.0, -39.9, 0.25)]
    res = find_avoided_crossing(FULL, qubit_spec, modes, grid, trunc)
    assert res.flux_at_min_mphi0 == pytest.approx(-49.0, abs=0.5)
    assert res.min_gap_ghz == pytest.approx(0.129, abs=0.003)


def test_find_avoided_crossing_weak_variants(qubit_spec, modes, trunc):
    grid = [FluxPoint(x) for x in np.arange(-60.0, -29.0, 1.0)]
    for variant in (HamiltonianVariant.JAYNES_CUMMINGS, HamiltonianVariant.NO_PARITY_BREAKING):
        res = find_avoided_crossing(variant, qubit_spec, modes, grid, trunc)
        assert res.min_gap_ghz < 0.005
        assert res.min_gap_ghz >= 0.0


def test_find_avoided_crossing_not_bracketed(qubit_spec, modes, trunc):
    grid = [FluxPoint(x) for x in np.arange(-47.0, -39.9, 1.0)]
    with pytest.raises(ValueError, match="not bracketed"):
        find_avoided_crossing(FULL, qubit_spec, modes, grid, trunc)


def test_find_avoided_crossing_needs_three_points(qubit_spec, modes, trunc):
    with pytest.raises(ValueError, match="at least 3"):
        find_avoided_crossing(FULL, qubit_spec, modes, [FluxPoint(-50.0), FluxPoint(-45.0)], trunc)
