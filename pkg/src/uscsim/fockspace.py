"""Tensor-product operator algebra on the qubit + two-mode Fock space.

The composite Hilbert space is ordered qubit (dim 2) x mode 1 x mode 2
throughout the package; every embedding and every Kronecker product in
other modules relies on this order.
"""

from dataclasses import dataclass

import numpy as np

SLOTS = ("qubit", "mode1", "mode2")


@dataclass(frozen=True)
class Truncation:
    """Photon-number cutoffs for the two resonator modes.

    A cutoff of n keeps Fock states 0..n-1.  Cutoffs below 2 cannot
    represent a single excitation and are rejected.
    """

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"photon cutoffs must be >= 2, got ({self.n1}, {self.n2})")

    @property
    def dim(self) -> int:
        """Total composite dimension 2 * n1 * n2."""
        return 2 * self.n1 * self.n2

    def slot_dim(self, slot: str) -> int:
        if slot == "qubit":
            return 2
        if slot == "mode1":
            return self.n1
        if slot == "mode2":
            return self.n2
        raise ValueError(f"unknown slot {slot!r}, expected one of {SLOTS}")


def annihilation_matrix(cutoff: int) -> np.ndarray:
    """Bosonic annihilation operator truncated to `cutoff` Fock states.

    Parameters
    ----------
    cutoff : int
        Number of retained Fock states, at least 2.

    Returns
    -------
    ndarray
        Complex matrix with a[n-1, n] = sqrt(n).
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1.0, cutoff)), k=1).astype(complex)


def pauli_matrix(which: str) -> np.ndarray:
    """Return a 2x2 Pauli or ladder matrix.

    Qubit basis index 0 is the +1 eigenstate of sigma_z, so `plus`
    raises index 1 into index 0 and `minus` lowers index 0 into 1.
    """
    if which == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if which == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if which == "z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if which == "plus":
        return np.array([[0, 1], [0, 0]], dtype=complex)
    if which == "minus":
        return np.array([[0, 0], [1, 0]], dtype=complex)
    raise ValueError(f"unknown Pauli label {which!r}")


def embed(op: np.ndarray, slot: str, trunc: Truncation) -> np.ndarray:
    """Embed a single-slot operator into the composite space.

    Kronecker products with identities fill the other slots, in the
    fixed order qubit x mode1 x mode2.

    Parameters
    ----------
    op : ndarray
        Square matrix whose dimension matches the slot (2, n1 or n2).
    slot : str
        One of "qubit", "mode1", "mode2".
    trunc : Truncation

    Returns
    -------
    ndarray
        D x D complex matrix, D = 2 * n1 * n2.
    """
    op = np.asarray(op, dtype=complex)
    want = trunc.slot_dim(slot)
    if op.shape != (want, want):
        raise ValueError(
            f"operator shape {op.shape} does not match slot {slot!r} of dimension {want}"
        )
    factors = {
        "qubit": np.eye(2, dtype=complex),
        "mode1": np.eye(trunc.n1, dtype=complex),
        "mode2": np.eye(trunc.n2, dtype=complex),
    }
    factors[slot] = op
    return np.kron(np.kron(factors["qubit"], factors["mode1"]), factors["mode2"])
