"""Device model: flux-dependent parameters, Hamiltonians, eigensystems.

All energies and rates are cyclic frequencies in GHz (the 2*pi is never
stored).  Physical constants enter only through the flux-bias conversion
here and the thermal occupation in `dissipators`.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fockspace import Truncation, annihilation_matrix, embed, pauli_matrix

PLANCK_H = 6.62607015e-34       # J s
FLUX_QUANTUM = 2.067833848e-15  # Wb


# ----------------------------------------------------------------------
# parameter containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QubitSpec:
    """Flux qubit parameters: tunnel splitting, persistent current, loss rates."""

    tunnel_splitting_ghz: float
    persistent_current_na: float
    loss_rate_ghz: float = 0.0
    dephasing_rate_ghz: float = 0.0

    def __post_init__(self):
        if self.tunnel_splitting_ghz <= 0:
            raise ValueError("tunnel splitting must be positive")
        if self.persistent_current_na <= 0:
            raise ValueError("persistent current must be positive")
        if self.loss_rate_ghz < 0 or self.dephasing_rate_ghz < 0:
            raise ValueError("qubit rates must be nonnegative")


@dataclass(frozen=True)
class ModeSpec:
    """One resonator mode: zero-bias frequency, V-shape slope, qubit coupling."""

    base_frequency_ghz: float
    v_shape_beta_per_phi0: float
    coupling_ghz: float

    def __post_init__(self):
        if self.base_frequency_ghz <= 0:
            raise ValueError("mode frequency must be positive")
        if self.v_shape_beta_per_phi0 < 0:
            raise ValueError("beta must be nonnegative")
        if self.coupling_ghz < 0:
            raise ValueError("coupling must be nonnegative")


@dataclass(frozen=True)
class FluxPoint:
    """External flux offset from the qubit symmetry point, in milli-Phi0."""

    offset_mphi0: float

    def __post_init__(self):
        if not np.isfinite(self.offset_mphi0):
            raise ValueError("flux offset must be finite")


@dataclass(frozen=True)
class DerivedQubit:
    """Qubit bias quantities at one flux point (all cyclic GHz / radians)."""

    epsilon_ghz: float
    omega_q_ghz: float
    theta_rad: float


class HamiltonianVariant(Enum):
    RABI_FLUX_BASIS = "rabi-flux"
    RABI_ENERGY_BASIS = "rabi-energy"
    NO_PARITY_BREAKING = "no-parity"
    JAYNES_CUMMINGS = "jaynes-cummings"


@dataclass(frozen=True)
class Eigensystem:
    """Sorted eigenvalues, phase-fixed eigenvectors and transition energies.

    `transitions_ghz[j]` is the dressed frequency of level j measured from
    the ground state, so `transitions_ghz[0] == 0`.
    """

    energies_ghz: np.ndarray
    vectors: np.ndarray
    transitions_ghz: np.ndarray

    @property
    def nlevels(self) -> int:
        return len(self.energies_ghz)


@dataclass(frozen=True)
class Crossing:
    """Location and size of an avoided level crossing."""

    flux_at_min_mphi0: float
    min_gap_ghz: float


# ----------------------------------------------------------------------
# flux-dependent parameters
# ----------------------------------------------------------------------

def derive_qubit(spec: QubitSpec, flux: FluxPoint) -> DerivedQubit:
    """Qubit bias epsilon, splitting omega_q and mixing angle theta.

    epsilon = 2 I_p dPhi / h, converted to cyclic GHz; it is signed and
    odd in the flux offset.  theta = atan2(Delta, epsilon) lies in
    (0, pi) and equals pi/2 at the symmetry point.
    """
    dphi_wb = flux.offset_mphi0 * 1e-3 * FLUX_QUANTUM
    eps = 2.0 * spec.persistent_current_na * 1e-9 * dphi_wb / PLANCK_H / 1e9
    delta = spec.tunnel_splitting_ghz
    return DerivedQubit(
        epsilon_ghz=eps,
        omega_q_ghz=float(np.hypot(delta, eps)),
        theta_rad=float(np.arctan2(delta, eps)),
    )


def mode_frequency(mode: ModeSpec, dq: DerivedQubit, flux: FluxPoint) -> float:
    """Flux-dependent mode frequency from the V-shape dispersion.

    omega(dPhi) = omega(0) / sqrt(1 - beta |cos theta| |dPhi|), flux in
    Phi0 units.  |cos theta| keeps the result even in the flux offset.
    """
    pull = (
        mode.v_shape_beta_per_phi0
        * abs(np.cos(dq.theta_rad))
        * abs(flux.offset_mphi0) * 1e-3
    )
    radicand = 1.0 - pull
    if radicand <= 0.0:
        raise ValueError(
            f"flux offset {flux.offset_mphi0} mPhi0 is outside the model range: "
            f"V-shape radicand {radicand:.3g} <= 0"
        )
    return mode.base_frequency_ghz / float(np.sqrt(radicand))


# ----------------------------------------------------------------------
# Hamiltonians
# ----------------------------------------------------------------------

def build_hamiltonian(
    variant: HamiltonianVariant,
    qubit: QubitSpec,
    modes: tuple[ModeSpec, ModeSpec],
    flux: FluxPoint,
    trunc: Truncation,
) -> np.ndarray:
    """Assemble one of the four Hamiltonian variants at a flux point.

    Variants:
      RABI_FLUX_BASIS     -(Delta sx + eps sz)/2 + sum_n [w_n a+a + g_n (a+a*) sz]
      RABI_ENERGY_BASIS   wq/2 sz + sum_n [w_n a+a + g_n (a+a*)(-sin(t) sx + cos(t) sz)]
      NO_PARITY_BREAKING  energy basis without the cos(t) sz coupling term
      JAYNES_CUMMINGS     co-rotating -g_n sin(t) (a+ s- + a s+) coupling only

    Returns a Hermitian D x D matrix in cyclic GHz.
    """
    dq = derive_qubit(qubit, flux)
    w1 = mode_frequency(modes[0], dq, flux)
    w2 = mode_frequency(modes[1], dq, flux)
    g1 = modes[0].coupling_ghz
    g2 = modes[1].coupling_ghz

    a1 = embed(annihilation_matrix(trunc.n1), "mode1", trunc)
    a2 = embed(annihilation_matrix(trunc.n2), "mode2", trunc)
    sx = embed(pauli_matrix("x"), "qubit", trunc)
    sz = embed(pauli_matrix("z"), "qubit", trunc)

    h_modes = w1 * a1.conj().T @ a1 + w2 * a2.conj().T @ a2
    x1 = a1 + a1.conj().T
    x2 = a2 + a2.conj().T

    if variant is HamiltonianVariant.RABI_FLUX_BASIS:
        delta = qubit.tunnel_splitting_ghz
        return -0.5 * (delta * sx + dq.epsilon_ghz * sz) + h_modes + (g1 * x1 + g2 * x2) @ sz

    s, c = np.sin(dq.theta_rad), np.cos(dq.theta_rad)
    h_qubit = 0.5 * dq.omega_q_ghz * sz

    if variant is HamiltonianVariant.RABI_ENERGY_BASIS:
        coupling = -s * sx + c * sz
        return h_qubit + h_modes + (g1 * x1 + g2 * x2) @ coupling
    if variant is HamiltonianVariant.NO_PARITY_BREAKING:
        return h_qubit + h_modes + (g1 * x1 + g2 * x2) @ (-s * sx)
    if variant is HamiltonianVariant.JAYNES_CUMMINGS:
        sm = embed(pauli_matrix("minus"), "qubit", trunc)
        sp = embed(pauli_matrix("plus"), "qubit", trunc)
        jc1 = a1.conj().T @ sm + a1 @ sp
        jc2 = a2.conj().T @ sm + a2 @ sp
        return h_qubit + h_modes - s * (g1 * jc1 + g2 * jc2)
    raise ValueError(f"unknown Hamiltonian variant {variant!r}")


def solve_eigensystem(h: np.ndarray) -> Eigensystem:
    """Diagonalize a Hermitian matrix with a reproducible phase convention.

    Each eigenvector is rescaled by a unit phase so its largest-magnitude
    component is real and positive (ties broken toward the lowest index),
    which pins dressed matrix elements across LAPACK backends.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = float(np.max(np.abs(h - h.conj().T)))
    scale = max(1.0, float(np.max(np.abs(h))))
    if defect > 1e-9 * scale:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {defect:.3g}")

    energies, vectors = np.linalg.eigh(h)
    vectors = np.array(vectors, dtype=complex)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        k = int(np.argmax(np.abs(col)))
        phase = col[k] / abs(col[k])
        vectors[:, j] = col * np.conj(phase)
    return Eigensystem(
        energies_ghz=energies,
        vectors=vectors,
        transitions_ghz=energies - energies[0],
    )


# ----------------------------------------------------------------------
# effective coupling and anticrossing
# ----------------------------------------------------------------------

def analytic_geff(g1: float, g2: float, omega1: float, omega_q: float, theta: float) -> float:
    """Perturbative one-to-two-photon coupling strength (cyclic GHz).

    g_eff = 3 sqrt(2) g1^2 g2 wq^2 sin(2 theta) cos(theta)
            / (4 w1^4 - 5 w1^2 wq^2 + wq^4)
    """
    den = 4.0 * omega1**4 - 5.0 * omega1**2 * omega_q**2 + omega_q**4
    if abs(den) < 1e-12:
        raise ValueError("effective-coupling formula is at a pole: denominator is zero")
    num = 3.0 * np.sqrt(2.0) * g1**2 * g2 * omega_q**2 * np.sin(2.0 * theta) * np.cos(theta)
    return float(num / den)


def find_avoided_crossing(
    variant: HamiltonianVariant,
    qubit: QubitSpec,
    modes: tuple[ModeSpec, ModeSpec],
    fluxes: list[FluxPoint],
    trunc: Truncation,
) -> Crossing:
    """Locate the minimum of the dressed gap w~3 - w~2 over a flux grid.

    The grid minimizer is refined by a parabola through the minimum and
    its two neighbours; the refined gap is floored at zero since sorted
    eigenvalues cannot produce a negative gap.
    """
    if len(fluxes) < 3:
        raise ValueError("need at least 3 flux points to bracket a crossing")
    xs = np.array([f.offset_mphi0 for f in fluxes], dtype=float)
    gaps = np.empty(len(fluxes))
    for i, f in enumerate(fluxes):
        eig = solve_eigensystem(build_hamiltonian(variant, qubit, modes, f, trunc))
        gaps[i] = eig.transitions_ghz[3] - eig.transitions_ghz[2]

    i = int(np.argmin(gaps))
    if i == 0 or i == len(fluxes) - 1:
        raise ValueError(
            f"gap minimum sits on the scan boundary at {xs[i]} mPhi0; "
            "the crossing is not bracketed by the flux range"
        )

    # parabola through the three samples around the grid minimum
    a, b, c = np.polyfit(xs[i - 1 : i + 2], gaps[i - 1 : i + 2], 2)
    if a <= 0:
        return Crossing(float(xs[i]), float(gaps[i]))
    x_min = -b / (2.0 * a)
    y_min = c - b * b / (4.0 * a)
    return Crossing(float(x_min), float(max(y_min, 0.0)))
