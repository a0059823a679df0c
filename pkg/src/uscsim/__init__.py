"""Driven-dissipative simulator for a two-mode resonator coupled to a flux qubit."""

__version__ = "0.1.0"

from .fockspace import Truncation, annihilation_matrix, embed, pauli_matrix
from .model import (
    FluxPoint,
    HamiltonianVariant,
    ModeSpec,
    QubitSpec,
    build_hamiltonian,
    derive_qubit,
    mode_frequency,
    solve_eigensystem,
)

__all__ = [
    "Truncation",
    "annihilation_matrix",
    "embed",
    "pauli_matrix",
    "FluxPoint",
    "HamiltonianVariant",
    "ModeSpec",
    "QubitSpec",
    "build_hamiltonian",
    "derive_qubit",
    "mode_frequency",
    "solve_eigensystem",
]
