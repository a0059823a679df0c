"""Measured quantities of the driven model.

Everything here reduces a Floquet solution to the numbers an
experiment records: the transmission ratio of a weak probe, the
second-harmonic emission amplitude, the phase-sensitive gain of the
two-tone interference scheme, and the supporting spectroscopy scans
(dressed levels and transition matrix elements against flux).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dissipators import (
    BathSpec,
    CouplingKind,
    Superoperator,
    build_static_liouvillian,
    coupling_operator,
    dress,
    transition_linewidth,
)
from .fockspace import SLOTS, Truncation, annihilation_matrix, embed
from .floquet import (
    ANGULAR_PER_CYCLIC_GHZ,
    DriveTone,
    FloquetSolution,
    build_drive_harmonics,
    photon_rate_from_power,
    solve_stroboscopic_steady_state,
)
from .model import (
    Eigensystem,
    FluxPoint,
    HamiltonianVariant,
    ModeSpec,
    PLANCK_H,
    QubitSpec,
    build_hamiltonian,
    derive_qubit,
    mode_frequency,
    solve_eigensystem,
)


@dataclass(frozen=True)
class Device:
    """Static description of one simulated device."""

    qubit: QubitSpec
    modes: tuple[ModeSpec, ModeSpec]
    baths: BathSpec
    truncation: Truncation
    variant: HamiltonianVariant = HamiltonianVariant.RABI_ENERGY_BASIS
    window_ghz: float | None = None


@dataclass(frozen=True)
class OperatingPoint:
    """Everything the driven solves need at one flux value."""

    flux_mphi0: float
    l0: Superoperator
    eig: Eigensystem
    omega1_ghz: float
    omega2_ghz: float
    x_drive: np.ndarray
    x_plus: np.ndarray

    def linewidth(self, p: int, q: int, device: Device) -> float:
        d1 = _reduced_dressed(self, CouplingKind.R1_WAVEGUIDE, device)
        d2 = _reduced_dressed(self, CouplingKind.R2_INTERNAL, device)
        return transition_linewidth(
            p, q, self.eig, d1, d2, device.baths, self.omega1_ghz
        )


@dataclass(frozen=True)
class PhotonBudget:
    """Resolved strength of one tone at one operating point."""

    photon_rate_per_s: float
    power_w: float
    nbar: float


@dataclass(frozen=True)
class PowerSetting:
    """Probe strength given as watts, dBm, or a target mean occupation.

    The target-occupation form is resolved per operating point through
    the linewidth of the driven transition, so the same setting tracks
    a constant photon number across a flux sweep.
    """

    mode: str
    value: float

    def __post_init__(self) -> None:
        if self.mode not in ("watts", "dbm", "nbar"):
            raise ValueError("power mode must be watts, dbm, or nbar")
        if self.mode in ("watts", "nbar") and self.value < 0.0:
            raise ValueError("power value must be nonnegative")

    def resolve(
        self, frequency_ghz: float, kappa_ghz: float, linewidth_ghz: float
    ) -> PhotonBudget:
        if self.mode == "watts":
            power = self.value
            rate = photon_rate_from_power(power, frequency_ghz)
            nbar = mean_photons(rate, kappa_ghz, linewidth_ghz)
        elif self.mode == "dbm":
            power = 10.0 ** ((self.value - 30.0) / 10.0)
            rate = photon_rate_from_power(power, frequency_ghz)
            nbar = mean_photons(rate, kappa_ghz, linewidth_ghz)
        else:
            nbar = self.value
            power = power_for_photons(nbar, frequency_ghz, kappa_ghz, linewidth_ghz)
            rate = photon_rate_from_power(power, frequency_ghz)
        return PhotonBudget(rate, power, nbar)


@dataclass(frozen=True)
class SpectralPoint:
    flux_mphi0: float
    frequency_ghz: float
    s21: complex


@dataclass(frozen=True)
class ShgPoint:
    flux_mphi0: float
    two_f_ghz: float
    amplitude_au: float


@dataclass(frozen=True)
class InterferencePoint:
    phase_rad: float
    control_nbar: float
    gain: float


@dataclass(frozen=True)
class LevelPoint:
    flux_mphi0: float
    variant: str
    index: int
    omega_tilde_ghz: float
    conv_delta_ghz: float | None = None


@dataclass(frozen=True)
class MatrixElementPoint:
    flux_mphi0: float
    pair: str
    abs_sq: float


# ----------------------------------------------------------------------
# single-point observables
# ----------------------------------------------------------------------

def mean_photons(
    photon_rate_per_s: float, kappa_ghz: float, linewidth_ghz: float
) -> float:
    """Steady mean occupation of a driven transition on resonance."""
    if linewidth_ghz <= 0.0:
        raise ValueError("linewidth must be positive")
    alpha_sq = photon_rate_per_s / ANGULAR_PER_CYCLIC_GHZ
    return 4.0 * alpha_sq * kappa_ghz / linewidth_ghz**2


def power_for_photons(
    nbar: float, frequency_ghz: float, kappa_ghz: float, linewidth_ghz: float
) -> float:
    """Input power in watts that sustains a target mean occupation."""
    if linewidth_ghz <= 0.0:
        raise ValueError("linewidth must be positive")
    if kappa_ghz <= 0.0:
        raise ValueError("input coupling must be positive")
    if frequency_ghz <= 0.0:
        raise ValueError("frequency must be positive")
    rate = nbar * linewidth_ghz**2 * ANGULAR_PER_CYCLIC_GHZ / (4.0 * kappa_ghz)
    return rate * PLANCK_H * frequency_ghz * 1.0e9


def transmission_s21(
    solution: FloquetSolution,
    x_plus: np.ndarray,
    photon_rate_per_s: float,
    kappa_out_ghz: float,
    omega1_ghz: float,
) -> complex:
    """Complex transmission ratio of the first-harmonic probe.

    The output amplitude couples through the same frequency-scaled port
    strength as the reservoir, and the ratio to the input amplitude
    removes the photon-rate normalization entirely.
    """
    if photon_rate_per_s <= 0.0:
        raise ValueError(
            "transmission is an output to input ratio; it is undefined "
            "for a probe with zero photon rate"
        )
    f_probe = solution.omega_base_ghz
    alpha_sim = np.sqrt(photon_rate_per_s / ANGULAR_PER_CYCLIC_GHZ)
    tr = np.trace(x_plus @ solution.component(-1))
    return complex(
        np.sqrt(f_probe / omega1_ghz)
        * np.sqrt(kappa_out_ghz * f_probe / omega1_ghz)
        * tr
        / alpha_sim
    )


def shg_amplitude(solution: FloquetSolution, x_plus: np.ndarray) -> float:
    """Emission amplitude at twice the drive frequency, arbitrary units."""
    if solution.m_max < 2:
        raise ValueError(
            "second-harmonic amplitude needs the n = -2 component; "
            "increase m_max to at least 2"
        )
    return float(np.abs(np.trace(x_plus @ solution.component(-2))))


def interference_gain(amplitude_au: float, baseline_au: float) -> float:
    """Ratio of the two-tone output to the control-off baseline."""
    if baseline_au <= 0.0:
        raise ValueError("baseline amplitude must be positive")
    return amplitude_au / baseline_au


# ----------------------------------------------------------------------
# operating points
# ----------------------------------------------------------------------

def _reduced_dressed(point, kind: CouplingKind, device: Device):
    full = dress(
        coupling_operator(
            kind, point.omega1_ghz, point.omega2_ghz, device.truncation
        ),
        point.eig,
    )
    return full


def operating_point(device: Device, flux_mphi0: float) -> OperatingPoint:
    flux = FluxPoint(flux_mphi0)
    dq = derive_qubit(device.qubit, flux)
    w1 = mode_frequency(device.modes[0], dq, flux)
    w2 = mode_frequency(device.modes[1], dq, flux)
    h = build_hamiltonian(
        device.variant, device.qubit, device.modes, flux, device.truncation
    )
    eig = solve_eigensystem(h)
    l0 = build_static_liouvillian(
        eig,
        device.baths,
        device.qubit,
        (w1, w2),
        device.truncation,
        window_ghz=device.window_ghz,
    )
    xd = dress(
        coupling_operator(CouplingKind.R1_WAVEGUIDE, w1, w2, device.truncation),
        eig,
    )
    keep = l0.levels
    x_drive = xd.full_matrix[np.ix_(keep, keep)]
    x_plus = np.triu(x_drive, 1)
    return OperatingPoint(flux_mphi0, l0, eig, w1, w2, x_drive, x_plus)


def _map_points(worker, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, items))
    return [worker(item) for item in items]


# ----------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------

def s21_sweep(
    device: Device,
    fluxes_mphi0,
    freqs_ghz,
    power: PowerSetting,
    m_max: int = 2,
    threads: int = 1,
    tail_rtol: float = 1e-6,
) -> list[SpectralPoint]:
    """Transmission of a weak probe over a flux and frequency grid."""

    def one_flux(flux: float) -> list[SpectralPoint]:
        point = operating_point(device, flux)
        gamma10 = point.linewidth(1, 0, device)
        rows = []
        for f in freqs_ghz:
            budget = power.resolve(f, device.baths.kappa_in_ghz, gamma10)
            tone = DriveTone(harmonic=1, photon_rate_per_s=budget.photon_rate_per_s)
            harmonics = build_drive_harmonics(
                [tone],
                point.x_drive,
                device.baths.kappa_in_ghz,
                device.baths.kappa_out_ghz,
                f,
                point.omega1_ghz,
            )
            sol = solve_stroboscopic_steady_state(
                point.l0, harmonics, f, m_max, tail_rtol=tail_rtol
            )
            s21 = transmission_s21(
                sol,
                point.x_plus,
                budget.photon_rate_per_s,
                device.baths.kappa_out_ghz,
                point.omega1_ghz,
            )
            rows.append(SpectralPoint(flux, f, s21))
        return rows

    nested = _map_points(one_flux, list(fluxes_mphi0), threads)
    return [row for rows in nested for row in rows]


def shg_sweep(
    device: Device,
    fluxes_mphi0,
    freqs_ghz,
    power: PowerSetting,
    m_max: int = 3,
    threads: int = 1,
    tail_rtol: float = 1e-6,
) -> list[ShgPoint]:
    """Second-harmonic emission over a flux and drive-frequency grid."""

    def one_flux(flux: float) -> list[ShgPoint]:
        point = operating_point(device, flux)
        gamma10 = point.linewidth(1, 0, device)
        rows = []
        for f in freqs_ghz:
            budget = power.resolve(f, device.baths.kappa_in_ghz, gamma10)
            tone = DriveTone(harmonic=1, photon_rate_per_s=budget.photon_rate_per_s)
            harmonics = build_drive_harmonics(
                [tone],
                point.x_drive,
                device.baths.kappa_in_ghz,
                device.baths.kappa_out_ghz,
                f,
                point.omega1_ghz,
            )
            sol = solve_stroboscopic_steady_state(
                point.l0, harmonics, f, m_max, tail_rtol=tail_rtol
            )
            rows.append(ShgPoint(flux, 2.0 * f, shg_amplitude(sol, point.x_plus)))
        return rows

    nested = _map_points(one_flux, list(fluxes_mphi0), threads)
    return [row for rows in nested for row in rows]


def shg_power_sweep(
    device: Device,
    flux_mphi0: float,
    freq_ghz: float,
    nbars,
    m_max: int = 3,
    threads: int = 1,
    tail_rtol: float = 1e-6,
) -> list[tuple[float, float]]:
    """Second-harmonic amplitude against the driven occupation."""
    point = operating_point(device, flux_mphi0)
    gamma10 = point.linewidth(1, 0, device)

    def one_nbar(nbar: float) -> tuple[float, float]:
        budget = PowerSetting("nbar", nbar).resolve(
            freq_ghz, device.baths.kappa_in_ghz, gamma10
        )
        tone = DriveTone(harmonic=1, photon_rate_per_s=budget.photon_rate_per_s)
        harmonics = build_drive_harmonics(
            [tone],
            point.x_drive,
            device.baths.kappa_in_ghz,
            device.baths.kappa_out_ghz,
            freq_ghz,
            point.omega1_ghz,
        )
        sol = solve_stroboscopic_steady_state(
            point.l0, harmonics, freq_ghz, m_max, tail_rtol=tail_rtol
        )
        return (nbar, shg_amplitude(sol, point.x_plus))

    return _map_points(one_nbar, list(nbars), threads)


def interference_sweep(
    device: Device,
    flux_mphi0: float,
    freq_ghz: float,
    signal: PowerSetting,
    control: PowerSetting,
    phases_rad,
    m_max: int = 3,
    threads: int = 1,
    tail_rtol: float = 1e-6,
) -> list[InterferencePoint]:
    """Two-tone gain against the relative phase of the control tone.

    The signal tone sits at the base frequency and generates a second
    harmonic; the control tone is injected directly at twice the base
    frequency.  The reported gain is the emission amplitude at the
    doubled frequency relative to the control-off baseline.
    """
    point = operating_point(device, flux_mphi0)
    gamma10 = point.linewidth(1, 0, device)
    gamma30 = point.linewidth(3, 0, device)
    signal_budget = signal.resolve(freq_ghz, device.baths.kappa_in_ghz, gamma10)
    control_budget = control.resolve(
        2.0 * freq_ghz, device.baths.kappa_in_ghz, gamma30
    )
    signal_tone = DriveTone(
        harmonic=1, photon_rate_per_s=signal_budget.photon_rate_per_s
    )
    baseline_harmonics = build_drive_harmonics(
        [signal_tone],
        point.x_drive,
        device.baths.kappa_in_ghz,
        device.baths.kappa_out_ghz,
        freq_ghz,
        point.omega1_ghz,
    )
    baseline_sol = solve_stroboscopic_steady_state(
        point.l0, baseline_harmonics, freq_ghz, m_max, tail_rtol=tail_rtol
    )
    baseline = shg_amplitude(baseline_sol, point.x_plus)

    def one_phase(phase: float) -> InterferencePoint:
        control_tone = DriveTone(
            harmonic=2,
            phase_rad=phase,
            photon_rate_per_s=control_budget.photon_rate_per_s,
        )
        harmonics = build_drive_harmonics(
            [signal_tone, control_tone],
            point.x_drive,
            device.baths.kappa_in_ghz,
            device.baths.kappa_out_ghz,
            freq_ghz,
            point.omega1_ghz,
        )
        sol = solve_stroboscopic_steady_state(
            point.l0, harmonics, freq_ghz, m_max, tail_rtol=tail_rtol
        )
        amp = shg_amplitude(sol, point.x_plus)
        return InterferencePoint(phase, control_budget.nbar, interference_gain(amp, baseline))

    return _map_points(one_phase, list(phases_rad), threads)


# ----------------------------------------------------------------------
# spectroscopy scans
# ----------------------------------------------------------------------

def level_scan(
    device: Device,
    fluxes_mphi0,
    nlevels: int,
    convergence: bool = False,
    threads: int = 1,
) -> list[LevelPoint]:
    """Dressed transition frequencies against flux.

    With ``convergence`` each point also reports how much the
    transition moves when both photon cutoffs are raised by one, which
    is the standard truncation check.
    """
    if nlevels < 1:
        raise ValueError("nlevels must be positive")

    bigger = Truncation(device.truncation.n1 + 1, device.truncation.n2 + 1)

    def one_flux(flux: float) -> list[LevelPoint]:
        f = FluxPoint(flux)
        h = build_hamiltonian(
            device.variant, device.qubit, device.modes, f, device.truncation
        )
        eig = solve_eigensystem(h)
        if nlevels >= device.truncation.dim:
            raise ValueError("nlevels exceeds the truncated space")
        deltas = None
        if convergence:
            h2 = build_hamiltonian(
                device.variant, device.qubit, device.modes, f, bigger
            )
            eig2 = solve_eigensystem(h2)
            deltas = np.abs(
                eig.transitions_ghz[:nlevels + 1]
                - eig2.transitions_ghz[:nlevels + 1]
            )
        rows = []
        for j in range(1, nlevels + 1):
            rows.append(
                LevelPoint(
                    flux,
                    device.variant.value,
                    j,
                    float(eig.transitions_ghz[j]),
                    None if deltas is None else float(deltas[j]),
                )
            )
        return rows

    nested = _map_points(one_flux, list(fluxes_mphi0), threads)
    return [row for rows in nested for row in rows]


def _script_x(trunc: Truncation) -> np.ndarray:
    a1 = embed(annihilation_matrix(trunc.n1), SLOTS[1], trunc)
    a2 = embed(annihilation_matrix(trunc.n2), SLOTS[2], trunc)
    return a1 + a1.conj().T + a2 + a2.conj().T


def matrix_element_scan(
    device: Device,
    fluxes_mphi0,
    pairs: tuple[tuple[int, int], ...],
    operator: str = "x_generic",
    threads: int = 1,
) -> list[MatrixElementPoint]:
    """Squared dressed matrix elements of a field operator against flux.

    ``x_generic`` is the frequency-weighted field momentum the
    waveguide couples to; ``script_x`` is the plain sum of the two
    field quadratures.
    """
    if operator not in ("x_generic", "script_x"):
        raise ValueError("operator must be x_generic or script_x")
    for j, k in pairs:
        if j < 0 or k < 0 or j == k:
            raise ValueError("pairs must hold two distinct level indices")

    def one_flux(flux: float) -> list[MatrixElementPoint]:
        f = FluxPoint(flux)
        dq = derive_qubit(device.qubit, f)
        w1 = mode_frequency(device.modes[0], dq, f)
        w2 = mode_frequency(device.modes[1], dq, f)
        h = build_hamiltonian(
            device.variant, device.qubit, device.modes, f, device.truncation
        )
        eig = solve_eigensystem(h)
        if operator == "x_generic":
            op = coupling_operator(
                CouplingKind.X_GENERIC, w1, w2, device.truncation
            )
        else:
            op = _script_x(device.truncation)
        d = dress(op, eig)
        rows = []
        for j, k in pairs:
            rows.append(
                MatrixElementPoint(
                    flux, "%d-%d" % (j, k), float(np.abs(d.element(j, k)) ** 2)
                )
            )
        return rows

    nested = _map_points(one_flux, list(fluxes_mphi0), threads)
    return [row for rows in nested for row in rows]
