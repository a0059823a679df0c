"""Driven steady states of the static generator.

The periodically driven master equation is solved in the frequency
domain: the density matrix is expanded as rho(t) = sum_n rho_n
exp(i n w t) and the harmonic-balance equations

    (L0 - i n f) rho_n + sum_k [Lp_k rho_(n-k) + Lm_k rho_(n+k)] = 0

are truncated at |n| <= m_max and solved as one block-banded linear
system.  All generators are kept in cyclic gigahertz, so the frequency
f enters the diagonal blocks without unit constants.  A fixed-step
time integrator over the same generator provides an independent route
to the same harmonics for cross-checking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg.lapack import zgecon

from .dissipators import Superoperator, spost, spre
from .model import PLANCK_H

# conversion between an amplitude in root photons per second and the
# cyclic-gigahertz scale of the generators
ANGULAR_PER_CYCLIC_GHZ = 2.0 * np.pi * 1.0e9


@dataclass(frozen=True)
class DriveTone:
    """One periodic tone applied through a waveguide port.

    The tone oscillates at ``harmonic`` times the base frequency of the
    drive.  Its strength is given either as ``power_w`` (watts arriving
    at the port) or directly as ``photon_rate_per_s``; exactly one of
    the two must be set.
    """

    harmonic: int
    phase_rad: float = 0.0
    power_w: float | None = None
    photon_rate_per_s: float | None = None
    port: str = "in"

    def __post_init__(self) -> None:
        if self.harmonic < 1:
            raise ValueError("drive harmonic must be a positive integer")
        has_power = self.power_w is not None
        has_rate = self.photon_rate_per_s is not None
        if has_power == has_rate:
            raise ValueError(
                "exactly one of power_w and photon_rate_per_s must be set"
            )
        if has_power and self.power_w < 0.0:
            raise ValueError("drive power must be nonnegative")
        if has_rate and self.photon_rate_per_s < 0.0:
            raise ValueError("photon rate must be nonnegative")
        if self.port not in ("in", "out"):
            raise ValueError("port must be 'in' or 'out'")


@dataclass
class FloquetSolution:
    """Harmonic components of a periodic steady state."""

    omega_base_ghz: float
    m_max: int
    components: dict[int, np.ndarray]
    warnings: list[str] = field(default_factory=list)

    def component(self, n: int) -> np.ndarray:
        try:
            return self.components[n]
        except KeyError:
            k = next(iter(self.components.values())).shape[0]
            return np.zeros((k, k), dtype=complex)


def photon_rate_from_power(power_w: float, frequency_ghz: float) -> float:
    """Photon arrival rate in 1/s for a given power at one frequency."""
    if frequency_ghz <= 0.0:
        raise ValueError("frequency must be positive")
    if power_w < 0.0:
        raise ValueError("power must be nonnegative")
    return power_w / (PLANCK_H * frequency_ghz * 1.0e9)


def tone_amplitude_cyc(
    tone: DriveTone,
    kappa_in_ghz: float,
    kappa_out_ghz: float,
    omega_base_ghz: float,
    omega1_ghz: float,
) -> float:
    """Drive amplitude of a tone in cyclic gigahertz.

    The port coupling is frequency scaled in the same way as the
    reservoir rates, so a tone at k times the base frequency sees
    kappa * (k w / w1).
    """
    if omega_base_ghz <= 0.0 or omega1_ghz <= 0.0:
        raise ValueError("frequencies must be positive")
    f_tone = tone.harmonic * omega_base_ghz
    if tone.photon_rate_per_s is not None:
        rate = tone.photon_rate_per_s
    else:
        rate = photon_rate_from_power(tone.power_w, f_tone)
    kappa = kappa_in_ghz if tone.port == "in" else kappa_out_ghz
    return float(
        np.sqrt(rate * kappa * (f_tone / omega1_ghz) / ANGULAR_PER_CYCLIC_GHZ)
    )


def drive_superoperator(
    x_matrix: np.ndarray,
    amplitude_cyc_ghz: float,
    phase_rad: float,
    sign: int,
) -> np.ndarray:
    """Commutator superoperator for one rotating component of a tone.

    The tone is the sinusoid 2 a sin(w t + phi) X, so the exp(+i w t)
    component of -i [V(t), .] carries -a exp(+i phi) and the
    exp(-i w t) component +a exp(-i phi).  This pairing satisfies
    (Lp rho)^dagger = Lm rho^dagger, which is what makes the solved
    harmonics obey rho_(-n) = rho_n^dagger.  sign +1 selects the
    exp(+i w t) component, sign -1 its partner.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    pref = -sign * amplitude_cyc_ghz * np.exp(1j * sign * phase_rad)
    return pref * (spre(x_matrix) - spost(x_matrix))


def build_drive_harmonics(
    tones: tuple[DriveTone, ...] | list[DriveTone],
    x_matrix: np.ndarray,
    kappa_in_ghz: float,
    kappa_out_ghz: float,
    omega_base_ghz: float,
    omega1_ghz: float,
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Group the tones into superoperator pairs keyed by harmonic."""
    out: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for tone in tones:
        amp = tone_amplitude_cyc(
            tone, kappa_in_ghz, kappa_out_ghz, omega_base_ghz, omega1_ghz
        )
        lp = drive_superoperator(x_matrix, amp, tone.phase_rad, +1)
        lm = drive_superoperator(x_matrix, amp, tone.phase_rad, -1)
        if tone.harmonic in out:
            old_p, old_m = out[tone.harmonic]
            out[tone.harmonic] = (old_p + lp, old_m + lm)
        else:
            out[tone.harmonic] = (lp, lm)
    return out


def _trace_indices(nlevels: int) -> np.ndarray:
    return np.arange(nlevels) * (nlevels + 1)


def _checked_lu(matrix: np.ndarray):
    # pivoted LU can hide an exactly singular direction behind a
    # nonzero diagonal, so the reciprocal condition estimate is the
    # reliable detector here
    anorm = np.linalg.norm(matrix, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix, check_finite=False)
    rcond, info = zgecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < 1e-12:
        raise np.linalg.LinAlgError(
            "static generator has a degenerate kernel; the steady state "
            "is not unique"
        )
    return lu, piv


def stationary_state(l0: Superoperator) -> np.ndarray:
    """Unique kernel element of the static generator with unit trace."""
    nk = l0.nlevels
    a = l0.matrix.copy()
    a[0, :] = 0.0
    a[0, _trace_indices(nk)] = 1.0
    b = np.zeros(nk * nk, dtype=complex)
    b[0] = 1.0
    x = lu_solve(_checked_lu(a), b)
    return x.reshape(nk, nk, order="F")


def solve_stroboscopic_steady_state(
    l0: Superoperator,
    harmonics: dict[int, tuple[np.ndarray, np.ndarray]],
    omega_base_ghz: float,
    m_max: int,
    tail_rtol: float = 1e-6,
) -> FloquetSolution:
    """Harmonic components of the driven steady state.

    The block matrix is eliminated forward without block pivoting; the
    within-block factorizations still pivot.  This is stable as long as
    the drive blocks stay small against the detuned diagonal blocks,
    which holds for the weak-port drives this model describes.  Trace
    normalization replaces one scalar row of the n = 0 block row, which
    is the only left null direction of the assembled system.
    """
    if omega_base_ghz <= 0.0:
        raise ValueError("base frequency must be positive")
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    if harmonics and min(harmonics) < 1:
        raise ValueError("drive harmonics must be positive integers")

    nk = l0.nlevels
    dim = nk * nk
    if not harmonics or m_max == 0:
        comps = {0: stationary_state(l0)}
        for n in range(1, m_max + 1):
            comps[n] = np.zeros((nk, nk), dtype=complex)
            comps[-n] = np.zeros((nk, nk), dtype=complex)
        return FloquetSolution(omega_base_ghz, m_max, comps)

    band = max(harmonics)
    if m_max < band:
        raise ValueError(
            "m_max must be at least the largest drive harmonic"
        )

    nblocks = 2 * m_max + 1
    ident = np.eye(dim, dtype=complex)
    blocks: dict[tuple[int, int], np.ndarray] = {}
    for p in range(nblocks):
        n = p - m_max
        blocks[(p, p)] = l0.matrix - 1j * n * omega_base_ghz * ident
    for k, (lp, lm) in harmonics.items():
        for p in range(nblocks):
            if p - k >= 0:
                blocks[(p, p - k)] = blocks.get((p, p - k), 0.0) + lp
            if p + k < nblocks:
                blocks[(p, p + k)] = blocks.get((p, p + k), 0.0) + lm

    rhs = [np.zeros(dim, dtype=complex) for _ in range(nblocks)]
    p0 = m_max
    for j in range(max(0, p0 - band), min(nblocks, p0 + band + 1)):
        if (p0, j) in blocks:
            blocks[(p0, j)][0, :] = 0.0
    blocks[(p0, p0)][0, _trace_indices(nk)] = 1.0
    rhs[p0][0] = 1.0

    lus: list = [None] * nblocks
    for i in range(nblocks):
        lus[i] = _checked_lu(blocks[(i, i)])
        top = min(i + band, nblocks - 1)
        for r in range(i + 1, top + 1):
            if (r, i) not in blocks:
                continue
            x = lu_solve(lus[i], blocks.pop((r, i)).T, trans=1).T
            for c in range(i + 1, top + 1):
                if (i, c) not in blocks:
                    continue
                upd = x @ blocks[(i, c)]
                if (r, c) in blocks:
                    blocks[(r, c)] = blocks[(r, c)] - upd
                else:
                    blocks[(r, c)] = -upd
            rhs[r] = rhs[r] - x @ rhs[i]

    xs: list = [None] * nblocks
    for i in reversed(range(nblocks)):
        acc = rhs[i]
        for c in range(i + 1, min(i + band, nblocks - 1) + 1):
            if (i, c) in blocks:
                acc = acc - blocks[(i, c)] @ xs[c]
        xs[i] = lu_solve(lus[i], acc)

    comps = {
        p - m_max: xs[p].reshape(nk, nk, order="F") for p in range(nblocks)
    }
    sol = FloquetSolution(omega_base_ghz, m_max, comps)
    ref = np.linalg.norm(comps[0])
    edge = max(np.linalg.norm(comps[m_max]), np.linalg.norm(comps[-m_max]))
    if ref > 0.0 and edge > tail_rtol * ref:
        sol.warnings.append(
            "harmonic cutoff m_max=%d may be too small: edge component "
            "norm %.3e exceeds %.1e of the static component"
            % (m_max, edge / ref, tail_rtol)
        )
    return sol


def time_domain_oracle(
    l0: Superoperator,
    harmonics: dict[int, tuple[np.ndarray, np.ndarray]],
    omega_base_ghz: float,
    m_max: int,
    steps_per_period: int = 2048,
    samples_per_period: int = 256,
    settle_tol: float = 1e-8,
    max_periods: int = 5000,
) -> FloquetSolution:
    """Harmonics extracted from a direct time integration.

    A classical fixed-step fourth-order integrator propagates the full
    time-dependent generator from the undriven stationary state until
    two consecutive periods agree in Frobenius norm, then one more
    period is sampled uniformly and projected onto the harmonics.  The
    route shares nothing with the block-banded frequency-domain solve,
    so agreement between the two is a meaningful check.
    """
    if omega_base_ghz <= 0.0:
        raise ValueError("base frequency must be positive")
    if steps_per_period % samples_per_period != 0:
        raise ValueError("samples_per_period must divide steps_per_period")
    if samples_per_period <= 2 * m_max:
        raise ValueError("samples_per_period must exceed twice m_max")

    nk = l0.nlevels
    period_ns = 1.0 / omega_base_ghz
    dt = period_ns / steps_per_period
    twopi = 2.0 * np.pi
    l0m = l0.matrix
    terms = [
        (twopi * k * omega_base_ghz, lp, lm) for k, (lp, lm) in harmonics.items()
    ]

    def deriv(t: float, y: np.ndarray) -> np.ndarray:
        acc = l0m @ y
        for w, lp, lm in terms:
            ph = np.exp(1j * w * t)
            acc = acc + ph * (lp @ y) + np.conj(ph) * (lm @ y)
        return twopi * acc

    def advance(t0: float, y: np.ndarray, record: list | None) -> np.ndarray:
        stride = steps_per_period // samples_per_period
        for s in range(steps_per_period):
            t = t0 + s * dt
            if record is not None and s % stride == 0:
                record.append((t, y))
            k1 = deriv(t, y)
            k2 = deriv(t + 0.5 * dt, y + 0.5 * dt * k1)
            k3 = deriv(t + 0.5 * dt, y + 0.5 * dt * k2)
            k4 = deriv(t + dt, y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return y

    y = stationary_state(l0).reshape(-1, order="F")
    settled = False
    periods = 0
    for p in range(max_periods):
        prev = y
        y = advance(p * period_ns, y, None)
        periods = p + 1
        if np.linalg.norm(y - prev) < settle_tol:
            settled = True
            break
    if not settled:
        raise RuntimeError(
            "time integration did not settle to a periodic state within "
            "%d periods" % max_periods
        )

    record: list = []
    advance(periods * period_ns, y, record)
    comps = {}
    for n in range(-m_max, m_max + 1):
        acc = np.zeros(nk * nk, dtype=complex)
        for t, ys in record:
            acc += ys * np.exp(-1j * twopi * n * omega_base_ghz * t)
        comps[n] = (acc / len(record)).reshape(nk, nk, order="F")
    return FloquetSolution(omega_base_ghz, m_max, comps)
