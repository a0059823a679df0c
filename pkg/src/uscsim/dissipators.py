"""Bath couplings and the undriven Liouvillian in the dressed basis.

The dissipative generator keeps the full non-secular double sum over
dressed transition pairs, with loss rates that scale linearly in the
transition frequency and thermal factors evaluated at that frequency.
Levels far above the spectral window of interest are truncation
artifacts; the generator is therefore built on a reduced dressed space
holding only levels below a configurable energy window.

Everything is expressed in cyclic GHz.  Superoperators act on
column-stacked density matrices: vec(A rho B) = (B^T kron A) vec(rho).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .fockspace import Truncation, annihilation_matrix, embed, pauli_matrix
from .model import Eigensystem, QubitSpec

BOLTZMANN_K = 1.380649e-23  # J/K
PLANCK_H = 6.62607015e-34   # J s

# transition pairs closer than 1 kHz are treated as degenerate and are
# excluded from the dissipative sum (the thermal factor diverges there)
DEGENERACY_CUT_GHZ = 1e-6


@dataclass(frozen=True)
class BathSpec:
    """Loss rates of the waveguide ports and the internal reservoir."""

    kappa_in_ghz: float
    kappa_out_ghz: float
    kappa_int_ghz: float
    temperature_k: float

    def __post_init__(self):
        if min(self.kappa_in_ghz, self.kappa_out_ghz, self.kappa_int_ghz) < 0:
            raise ValueError("loss rates must be nonnegative")
        if self.temperature_k < 0:
            raise ValueError("temperature must be nonnegative")


class CouplingKind(Enum):
    R1_WAVEGUIDE = "r1"
    R2_INTERNAL = "r2"
    Q_QUBIT = "q"
    X_GENERIC = "x"


@dataclass(frozen=True)
class DressedOperator:
    """An operator rotated into the energy eigenbasis.

    `positive_part` keeps only the energy-lowering elements, the strictly
    upper triangle in ascending-energy ordering.
    """

    full_matrix: np.ndarray
    positive_part: np.ndarray

    def element(self, j: int, k: int) -> complex:
        return self.full_matrix[j, k]


@dataclass
class Superoperator:
    """Dense map on column-stacked density matrices of the retained levels."""

    matrix: np.ndarray
    levels: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nlevels(self) -> int:
        return len(self.levels)


# ----------------------------------------------------------------------
# vectorization helpers (column stacking)
# ----------------------------------------------------------------------

def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> a rho."""
    return np.kron(np.eye(a.shape[0], dtype=complex), a)


def spost(b: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> rho b."""
    return np.kron(b.T, np.eye(b.shape[0], dtype=complex))


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> a rho b."""
    return np.kron(b.T, a)


def lindblad(op: np.ndarray) -> np.ndarray:
    """D[O] rho = O rho O+ - (O+ O rho + rho O+ O) / 2."""
    odag = op.conj().T
    oo = odag @ op
    return sandwich(op, odag) - 0.5 * spre(oo) - 0.5 * spost(oo)


# ----------------------------------------------------------------------
# coupling operators and dressing
# ----------------------------------------------------------------------

def coupling_operator(
    kind: CouplingKind, omega1: float, omega2: float, trunc: Truncation
) -> np.ndarray:
    """Bare system operator through which a reservoir couples.

    The waveguide sees the two-mode field momentum, the internal
    reservoir the weighted field amplitude, the qubit reservoir sigma_z.
    Mode 2 carries the sqrt(omega2/omega1) weight in both field
    operators.
    """
    if omega1 <= 0 or omega2 <= 0:
        raise ValueError("mode frequencies must be positive")
    a1 = embed(annihilation_matrix(trunc.n1), "mode1", trunc)
    a2 = embed(annihilation_matrix(trunc.n2), "mode2", trunc)
    ratio = np.sqrt(omega2 / omega1)
    if kind in (CouplingKind.R1_WAVEGUIDE, CouplingKind.X_GENERIC):
        return 1j * (a1 - a1.conj().T) + 1j * ratio * (a2 - a2.conj().T)
    if kind is CouplingKind.R2_INTERNAL:
        return ratio * (a1 + a1.conj().T) + (a2 + a2.conj().T)
    if kind is CouplingKind.Q_QUBIT:
        return embed(pauli_matrix("z"), "qubit", trunc)
    raise ValueError(f"unknown coupling kind {kind!r}")


def dress(op: np.ndarray, eig: Eigensystem) -> DressedOperator:
    """Rotate an operator into the eigenbasis and split off its lowering part."""
    v = eig.vectors
    if op.shape != v.shape:
        raise ValueError(f"operator shape {op.shape} does not match eigenbasis {v.shape}")
    full = v.conj().T @ op @ v
    return DressedOperator(full_matrix=full, positive_part=np.triu(full, k=1))


def thermal_occupation(omega_ghz: float, temperature_k: float) -> float:
    """Bose occupation at a transition frequency, zero exactly at T = 0."""
    if omega_ghz <= 0:
        raise ValueError(f"frequency must be positive, got {omega_ghz}")
    if temperature_k == 0.0:
        return 0.0
    x = PLANCK_H * omega_ghz * 1e9 / (BOLTZMANN_K * temperature_k)
    if x > 700.0:
        return 0.0
    return 1.0 / np.expm1(x)


def rate_scaling(
    kind: CouplingKind,
    omega_ghz: float,
    baths: BathSpec,
    omega1: float,
    kappa_q_ghz: float = 0.0,
) -> float:
    """Frequency-scaled loss rate of one reservoir, kappa * omega / omega1."""
    if kind is CouplingKind.R1_WAVEGUIDE:
        base = baths.kappa_in_ghz + baths.kappa_out_ghz
    elif kind is CouplingKind.R2_INTERNAL:
        base = baths.kappa_int_ghz
    elif kind is CouplingKind.Q_QUBIT:
        base = kappa_q_ghz
    else:
        raise ValueError(f"no reservoir rate defined for {kind!r}")
    return base * omega_ghz / omega1


def retained_levels(eig: Eigensystem, window_ghz: float) -> np.ndarray:
    """Indices of dressed levels inside the energy window."""
    keep = np.flatnonzero(eig.transitions_ghz <= window_ghz + 1e-12)
    if len(keep) < 2:
        raise ValueError(
            f"energy window {window_ghz} GHz retains {len(keep)} level(s); need at least 2"
        )
    return keep


# ----------------------------------------------------------------------
# the undriven generator
# ----------------------------------------------------------------------

def build_static_liouvillian(
    eig: Eigensystem,
    baths: BathSpec,
    qubit: QubitSpec,
    omegas: tuple[float, float],
    trunc: Truncation,
    window_ghz: float | None = None,
    secular: bool = False,
) -> Superoperator:
    """Assemble the undriven generator on the retained dressed levels.

    The coherent part is diagonal in the eigenbasis.  Each reservoir
    contributes a double sum over lowering pairs (j, k>j) and (l, m>l)
    with the rate and thermal factor evaluated at the (l, m) transition
    frequency; the four cross-term brackets are accumulated through
    weighted lowering matrices, which reproduces the pair sum exactly.
    Setting `secular` drops all cross terms, keeping one Lindblad
    dissipator per transition pair.

    Parameters
    ----------
    eig : Eigensystem
        Full-space eigensystem at the working flux point.
    baths, qubit : rate containers
    omegas : (float, float)
        Bare flux-dependent mode frequencies (GHz) entering the coupling
        operators and the rate scaling.
    trunc : Truncation
    window_ghz : float, optional
        Energy window for retained levels; defaults to 3 * omegas[1].
    secular : bool
        Drop cross terms between different transition pairs.
    """
    w1, w2 = omegas
    if window_ghz is None:
        window_ghz = 3.0 * w2
    keep = retained_levels(eig, window_ghz)
    w = eig.transitions_ghz[keep]
    nk = len(keep)
    sel = np.ix_(keep, keep)

    hdiag = np.diag(w.astype(complex))
    lmat = -1j * (spre(hdiag) - spost(hdiag))

    skipped = 0
    reservoirs = (
        (CouplingKind.R1_WAVEGUIDE, baths.kappa_in_ghz + baths.kappa_out_ghz),
        (CouplingKind.R2_INTERNAL, baths.kappa_int_ghz),
        (CouplingKind.Q_QUBIT, qubit.loss_rate_ghz),
    )
    for kind, base_rate in reservoirs:
        xd = dress(coupling_operator(kind, w1, w2, trunc), eig).full_matrix[sel]
        s = np.zeros((nk, nk), dtype=complex)
        wn = np.zeros((nk, nk), dtype=complex)
        wp = np.zeros((nk, nk), dtype=complex)
        pair_rates = []
        for j in range(nk):
            for k in range(j + 1, nk):
                wkj = w[k] - w[j]
                if wkj < DEGENERACY_CUT_GHZ:
                    skipped += 1
                    continue
                rate = base_rate * wkj / w1
                nth = thermal_occupation(wkj, baths.temperature_k)
                s[j, k] = xd[j, k]
                wn[j, k] = rate * nth * xd[j, k]
                wp[j, k] = rate * (nth + 1.0) * xd[j, k]
                pair_rates.append((j, k, rate, nth))
        if base_rate == 0.0:
            continue
        if secular:
            for j, k, rate, nth in pair_rates:
                unit = np.zeros((nk, nk), dtype=complex)
                unit[j, k] = xd[j, k]
                lmat += rate * (nth + 1.0) * lindblad(unit)
                lmat += rate * nth * lindblad(unit.conj().T)
        else:
            sd = s.conj().T
            lmat += 0.5 * (
                sandwich(wn.conj().T, s) - spre(s @ wn.conj().T)
                + sandwich(wp, sd) - spre(sd @ wp)
                + sandwich(sd, wn) - spost(wn @ sd)
                + sandwich(s, wp.conj().T) - spost(wp.conj().T @ s)
            )

    if qubit.dephasing_rate_ghz > 0.0:
        xq = dress(coupling_operator(CouplingKind.Q_QUBIT, w1, w2, trunc), eig).full_matrix[sel]
        lmat += qubit.dephasing_rate_ghz * lindblad(np.diag(np.diag(xq)))

    return Superoperator(
        matrix=lmat,
        levels=keep,
        diagnostics={
            "retained_levels": nk,
            "total_levels": eig.nlevels,
            "window_ghz": float(window_ghz),
            "skipped_pairs": skipped,
            "secular": secular,
        },
    )


def transition_linewidth(
    p: int,
    q: int,
    eig: Eigensystem,
    dressed_r1: DressedOperator,
    dressed_r2: DressedOperator,
    baths: BathSpec,
    omega1: float,
) -> float:
    """Total linewidth of the p -> q dressed transition from both field reservoirs."""
    if p <= q:
        raise ValueError(f"need p > q, got p={p}, q={q}")
    wpq = eig.transitions_ghz[p] - eig.transitions_ghz[q]
    g1 = rate_scaling(CouplingKind.R1_WAVEGUIDE, wpq, baths, omega1) if wpq > 0 else 0.0
    g2 = rate_scaling(CouplingKind.R2_INTERNAL, wpq, baths, omega1) if wpq > 0 else 0.0
    return g1 * abs(dressed_r1.element(p, q)) ** 2 + g2 * abs(dressed_r2.element(p, q)) ** 2
