import numpy as np
import pytest

from uscsim.fockspace import Truncation, annihilation_matrix, embed, pauli_matrix


def test_truncation_dim():
    assert Truncation(6, 4).dim == 48
    assert Truncation(2, 2).dim == 8


def test_truncation_rejects_small_cutoffs():
    with pytest.raises(ValueError):
        Truncation(1, 4)
    with pytest.raises(ValueError):
        Truncation(6, 0)


def test_annihilation_cutoff_two_single_entry():
    a = annihilation_matrix(2)
    expected = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.array_equal(a, expected)


def test_annihilation_rejects_cutoff_below_two():
    with pytest.raises(ValueError):
        annihilation_matrix(1)


@pytest.mark.parametrize("cutoff", [2, 3, 6, 9])
def test_number_operator_diagonal(cutoff):
    a = annihilation_matrix(cutoff)
    n = a.conj().T @ a
    assert np.allclose(n, np.diag(np.arange(cutoff, dtype=float)))


def test_commutator_corner_entry():
    # [a, a+] is the identity except the last diagonal entry, which picks
    # up the truncation: 1 - cutoff at the corner.
    a = annihilation_matrix(4)
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(comm), [1, 1, 1, -3])


def test_pauli_ladder_anticommutator():
    sp, sm = pauli_matrix("plus"), pauli_matrix("minus")
    assert np.allclose(sp @ sm + sm @ sp, np.eye(2))


def test_pauli_z_and_x():
    assert np.allclose(pauli_matrix("z"), np.diag([1, -1]))
    sx = pauli_matrix("x")
    assert np.allclose(sx @ sx, np.eye(2))
    assert np.allclose(pauli_matrix("plus") + pauli_matrix("minus"), sx)


def test_pauli_unknown_label():
    with pytest.raises(ValueError):
        pauli_matrix("w")


def test_embed_identity_is_identity():
    out = embed(np.eye(2), "qubit", Truncation(3, 3))
    assert out.shape == (18, 18)
    assert np.array_equal(out, np.eye(18, dtype=complex))


def test_embed_mode1_hand_enumerated():
    # For n1 = n2 = 2 the composite index is q*4 + m1*2 + m2.  The mode-1
    # annihilation operator connects m1 = 1 to m1 = 0 with unit weight,
    # giving exactly the four entries (0,2), (1,3), (4,6), (5,7).
    t = Truncation(2, 2)
    out = embed(annihilation_matrix(2), "mode1", t)
    nz = {(int(r), int(c)) for r, c in zip(*np.nonzero(out))}
    assert nz == {(0, 2), (1, 3), (4, 6), (5, 7)}
    for r, c in nz:
        assert out[r, c] == 1.0


def test_embed_different_slots_commute():
    t = Truncation(3, 4)
    a1 = embed(annihilation_matrix(3), "mode1", t)
    a2dag = embed(annihilation_matrix(4).conj().T, "mode2", t)
    comm = a1 @ a2dag - a2dag @ a1
    assert np.max(np.abs(comm)) == 0.0


def test_embed_preserves_spectrum():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = m + m.conj().T
    t = Truncation(4, 3)
    big = embed(m, "mode1", t)
    small_ev = np.linalg.eigvalsh(m)
    big_ev = np.linalg.eigvalsh(big)
    mult = t.dim // 4
    expected = np.sort(np.repeat(small_ev, mult))
    assert np.allclose(big_ev, expected)


def test_embed_is_homomorphism_per_slot():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    t = Truncation(4, 3)
    lhs = embed(a @ b, "mode2", t)
    rhs = embed(a, "mode2", t) @ embed(b, "mode2", t)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_embed_shape_mismatch():
    with pytest.raises(ValueError):
        embed(np.eye(3), "qubit", Truncation(3, 3))
    with pytest.raises(ValueError):
        embed(np.eye(2), "mode1", Truncation(3, 3))
