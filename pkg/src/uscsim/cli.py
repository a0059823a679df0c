"""Command line front end: config parsing, sweep dispatch, table output.

The configuration format is a flat list of dotted ``key = value``
lines; ``#`` starts a comment and blank lines are skipped.  Every key
has a default matching the fitted device, so an empty document is a
complete configuration.  Unknown keys are rejected with the offending
line number.  The full key table lives in the README.

Tables are written as CSV (metadata in ``#`` comment lines, then a
header row) or as a JSON object with the same three parts.  Floats are
printed with ``repr``, which round-trips exactly, so repeated runs of
the same effective configuration produce byte-identical files no
matter how many worker threads are used.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .dissipators import BathSpec
from .fockspace import Truncation
from .model import HamiltonianVariant, ModeSpec, QubitSpec
from .observables import (
    Device,
    PowerSetting,
    interference_sweep,
    level_scan,
    matrix_element_scan,
    s21_sweep,
    shg_power_sweep,
    shg_sweep,
)

ARTIFACT_VERSION = "0.1.0"

COMMANDS = ("levels", "melems", "s21", "shg", "shg-power", "interference", "validate")

# exit codes of the command line tool
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3

THREADS_ENV_VAR = "USCSIM_THREADS"

_SOLVER_ERRORS = (np.linalg.LinAlgError, RuntimeError)


class ConfigError(Exception):
    """Raised for malformed documents and out-of-range values."""


# ----------------------------------------------------------------------
# configuration schema
# ----------------------------------------------------------------------
# kind -> ("float" | "int" | "str") with an "opt_" prefix when an empty
# value is allowed and maps to None.

_SCHEMA: dict[str, tuple[str, object]] = {
    "qubit.tunnel_splitting_ghz": ("float", 12.3),
    "qubit.persistent_current_na": ("float", 60.0),
    "qubit.loss_rate_ghz": ("float", 0.2),
    "qubit.dephasing_rate_ghz": ("float", 0.2),
    "mode1.base_frequency_ghz": ("float", 5.0),
    "mode1.v_shape_beta_per_phi0": ("float", 0.775),
    "mode1.coupling_ghz": ("float", 2.815),
    "mode2.base_frequency_ghz": ("float", 9.7),
    "mode2.v_shape_beta_per_phi0": ("float", 0.919),
    "mode2.coupling_ghz": ("float", 2.18),
    "bath.kappa_in_ghz": ("float", 0.00065),
    "bath.kappa_out_ghz": ("float", 0.00195),
    "bath.kappa_int_ghz": ("float", 0.0104),
    "bath.temperature_k": ("float", 0.02),
    "truncation.n1": ("int", 6),
    "truncation.n2": ("int", 4),
    "model.variant": ("str", "rabi-energy"),
    "model.window_ghz": ("opt_float", None),
    "floquet.m_max": ("opt_int", None),
    "floquet.tail_rtol": ("float", 1e-6),
    "sweep.flux.start_mphi0": ("float", -60.0),
    "sweep.flux.stop_mphi0": ("float", -35.0),
    "sweep.flux.steps": ("int", 26),
    "sweep.frequency.start_ghz": ("float", 4.7),
    "sweep.frequency.stop_ghz": ("float", 5.1),
    "sweep.frequency.steps": ("int", 41),
    "sweep.power.start_nbar": ("float", 0.01),
    "sweep.power.stop_nbar": ("float", 1.0),
    "sweep.power.steps": ("int", 9),
    "sweep.phase.start_rad": ("float", 0.0),
    "sweep.phase.stop_rad": ("float", 2.0 * math.pi),
    "sweep.phase.steps": ("int", 41),
    "drive.signal.power_mode": ("str", "nbar"),
    "drive.signal.power_value": ("float", 0.01),
    "drive.control.power_mode": ("str", "nbar"),
    "drive.control.power_value": ("float", 0.0),
    "point.flux_mphi0": ("float", -46.0),
    "point.frequency_ghz": ("opt_float", None),
    "levels.count": ("int", 3),
    "melems.pairs": ("str", "1-0,3-1,3-0"),
    "melems.operator": ("str", "x_generic"),
    "output.path": ("opt_str", None),
    "output.format": ("str", "csv"),
    "threads": ("int", 1),
}

# execution details that never change the physics rows; they are left
# out of the metadata echo so thread count and file placement cannot
# break byte-identical output
_METADATA_EXCLUDED = ("threads", "output.path")


@dataclass(frozen=True)
class SweepAxis:
    """One linearly spaced scan axis."""

    start: float
    stop: float
    steps: int

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs of one command invocation."""

    qubit: QubitSpec
    modes: tuple[ModeSpec, ModeSpec]
    baths: BathSpec
    truncation: Truncation
    variant: HamiltonianVariant
    window_ghz: float | None
    m_max: int | None
    tail_rtol: float
    flux: SweepAxis
    frequency: SweepAxis
    power: SweepAxis
    phase: SweepAxis
    signal: PowerSetting
    control: PowerSetting
    point_flux_mphi0: float
    point_frequency_ghz: float | None
    levels_count: int
    melems_pairs: tuple[tuple[int, int], ...]
    melems_operator: str
    output_path: str | None
    output_format: str
    threads: int

    def device(self) -> Device:
        return Device(
            self.qubit,
            self.modes,
            self.baths,
            self.truncation,
            self.variant,
            self.window_ghz,
        )


# ----------------------------------------------------------------------
# parsing and serialization
# ----------------------------------------------------------------------

def _convert(key: str, raw: str, lineno: int):
    kind = _SCHEMA[key][0]
    optional = kind.startswith("opt_")
    if raw == "":
        if optional:
            return None
        raise ConfigError(f"line {lineno}: key '{key}' has an empty value")
    base = kind.removeprefix("opt_")
    if base == "str":
        return raw
    try:
        if base == "int":
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: key '{key}' expects {'an integer' if base == 'int' else 'a number'},"
            f" got '{raw}'"
        ) from None


def _parse_text(text: str) -> dict:
    """Flat key -> typed value map with defaults filled in."""
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    seen: set[str] = set()
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {lineno}: expected 'key = value', got '{raw_line.strip()}'"
            )
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        seen.add(key)
        values[key] = _convert(key, raw, lineno)
    return values


def _build(field: str, ctor, *args, **kwargs):
    try:
        return ctor(*args, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{field}: {exc}") from None


def _parse_pairs(raw: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        parts = chunk.split("-")
        if len(parts) != 2:
            raise ConfigError(
                f"melems.pairs: expected entries like '3-1', got '{chunk}'"
            )
        try:
            j, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigError(
                f"melems.pairs: expected integer level indices, got '{chunk}'"
            ) from None
        if j < 0 or k < 0 or j == k:
            raise ConfigError(
                f"melems.pairs: indices must be distinct and nonnegative, got '{chunk}'"
            )
        pairs.append((j, k))
    return tuple(pairs)


def _axis(values: dict, prefix: str, unit: str) -> SweepAxis:
    start = values[f"{prefix}.start_{unit}"]
    stop = values[f"{prefix}.stop_{unit}"]
    steps = values[f"{prefix}.steps"]
    if steps < 1:
        raise ConfigError(f"{prefix}.steps: must be at least 1, got {steps}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ConfigError(f"{prefix}: start and stop must be finite")
    if start > stop:
        raise ConfigError(
            f"{prefix}: start must not exceed stop, got {start!r} > {stop!r}"
        )
    return SweepAxis(float(start), float(stop), int(steps))


def _assemble(values: dict) -> RunConfig:
    qubit = _build(
        "qubit",
        QubitSpec,
        values["qubit.tunnel_splitting_ghz"],
        values["qubit.persistent_current_na"],
        values["qubit.loss_rate_ghz"],
        values["qubit.dephasing_rate_ghz"],
    )
    modes = tuple(
        _build(
            name,
            ModeSpec,
            values[f"{name}.base_frequency_ghz"],
            values[f"{name}.v_shape_beta_per_phi0"],
            values[f"{name}.coupling_ghz"],
        )
        for name in ("mode1", "mode2")
    )
    baths = _build(
        "bath",
        BathSpec,
        values["bath.kappa_in_ghz"],
        values["bath.kappa_out_ghz"],
        values["bath.kappa_int_ghz"],
        values["bath.temperature_k"],
    )
    trunc = _build("truncation", Truncation, values["truncation.n1"], values["truncation.n2"])
    try:
        variant = HamiltonianVariant(values["model.variant"])
    except ValueError:
        names = ", ".join(v.value for v in HamiltonianVariant)
        raise ConfigError(
            f"model.variant: unknown variant '{values['model.variant']}'; choose one of {names}"
        ) from None
    window = values["model.window_ghz"]
    if window is not None and window <= 0.0:
        raise ConfigError(f"model.window_ghz: must be positive, got {window!r}")
    m_max = values["floquet.m_max"]
    if m_max is not None and m_max < 1:
        raise ConfigError(f"floquet.m_max: must be at least 1, got {m_max}")
    tail_rtol = values["floquet.tail_rtol"]
    if tail_rtol <= 0.0:
        raise ConfigError(f"floquet.tail_rtol: must be positive, got {tail_rtol!r}")
    signal = _build(
        "drive.signal",
        PowerSetting,
        values["drive.signal.power_mode"],
        values["drive.signal.power_value"],
    )
    control = _build(
        "drive.control",
        PowerSetting,
        values["drive.control.power_mode"],
        values["drive.control.power_value"],
    )
    point_freq = values["point.frequency_ghz"]
    if point_freq is not None and point_freq <= 0.0:
        raise ConfigError(f"point.frequency_ghz: must be positive, got {point_freq!r}")
    levels_count = values["levels.count"]
    if levels_count < 1:
        raise ConfigError(f"levels.count: must be at least 1, got {levels_count}")
    operator = values["melems.operator"]
    if operator not in ("x_generic", "script_x"):
        raise ConfigError(
            f"melems.operator: must be x_generic or script_x, got '{operator}'"
        )
    out_format = values["output.format"]
    if out_format not in ("csv", "json"):
        raise ConfigError(f"output.format: must be csv or json, got '{out_format}'")
    threads = values["threads"]
    if threads < 1:
        raise ConfigError(f"threads: must be at least 1, got {threads}")
    return RunConfig(
        qubit=qubit,
        modes=modes,
        baths=baths,
        truncation=trunc,
        variant=variant,
        window_ghz=None if window is None else float(window),
        m_max=None if m_max is None else int(m_max),
        tail_rtol=float(tail_rtol),
        flux=_axis(values, "sweep.flux", "mphi0"),
        frequency=_axis(values, "sweep.frequency", "ghz"),
        power=_axis(values, "sweep.power", "nbar"),
        phase=_axis(values, "sweep.phase", "rad"),
        signal=signal,
        control=control,
        point_flux_mphi0=float(values["point.flux_mphi0"]),
        point_frequency_ghz=None if point_freq is None else float(point_freq),
        levels_count=int(levels_count),
        melems_pairs=_parse_pairs(values["melems.pairs"]),
        melems_operator=operator,
        output_path=values["output.path"],
        output_format=out_format,
        threads=int(threads),
    )


def parse_config(text: str) -> RunConfig:
    """Parse a flat dotted-key document; defaults fill omitted keys."""
    return _assemble(_parse_text(text))


def _flatten(cfg: RunConfig) -> dict[str, object]:
    """Back to the flat key map, in schema order."""
    pairs = ",".join(f"{j}-{k}" for j, k in cfg.melems_pairs)
    values = {
        "qubit.tunnel_splitting_ghz": cfg.qubit.tunnel_splitting_ghz,
        "qubit.persistent_current_na": cfg.qubit.persistent_current_na,
        "qubit.loss_rate_ghz": cfg.qubit.loss_rate_ghz,
        "qubit.dephasing_rate_ghz": cfg.qubit.dephasing_rate_ghz,
        "mode1.base_frequency_ghz": cfg.modes[0].base_frequency_ghz,
        "mode1.v_shape_beta_per_phi0": cfg.modes[0].v_shape_beta_per_phi0,
        "mode1.coupling_ghz": cfg.modes[0].coupling_ghz,
        "mode2.base_frequency_ghz": cfg.modes[1].base_frequency_ghz,
        "mode2.v_shape_beta_per_phi0": cfg.modes[1].v_shape_beta_per_phi0,
        "mode2.coupling_ghz": cfg.modes[1].coupling_ghz,
        "bath.kappa_in_ghz": cfg.baths.kappa_in_ghz,
        "bath.kappa_out_ghz": cfg.baths.kappa_out_ghz,
        "bath.kappa_int_ghz": cfg.baths.kappa_int_ghz,
        "bath.temperature_k": cfg.baths.temperature_k,
        "truncation.n1": cfg.truncation.n1,
        "truncation.n2": cfg.truncation.n2,
        "model.variant": cfg.variant.value,
        "model.window_ghz": cfg.window_ghz,
        "floquet.m_max": cfg.m_max,
        "floquet.tail_rtol": cfg.tail_rtol,
        "sweep.flux.start_mphi0": cfg.flux.start,
        "sweep.flux.stop_mphi0": cfg.flux.stop,
        "sweep.flux.steps": cfg.flux.steps,
        "sweep.frequency.start_ghz": cfg.frequency.start,
        "sweep.frequency.stop_ghz": cfg.frequency.stop,
        "sweep.frequency.steps": cfg.frequency.steps,
        "sweep.power.start_nbar": cfg.power.start,
        "sweep.power.stop_nbar": cfg.power.stop,
        "sweep.power.steps": cfg.power.steps,
        "sweep.phase.start_rad": cfg.phase.start,
        "sweep.phase.stop_rad": cfg.phase.stop,
        "sweep.phase.steps": cfg.phase.steps,
        "drive.signal.power_mode": cfg.signal.mode,
        "drive.signal.power_value": cfg.signal.value,
        "drive.control.power_mode": cfg.control.mode,
        "drive.control.power_value": cfg.control.value,
        "point.flux_mphi0": cfg.point_flux_mphi0,
        "point.frequency_ghz": cfg.point_frequency_ghz,
        "levels.count": cfg.levels_count,
        "melems.pairs": pairs,
        "melems.operator": cfg.melems_operator,
        "output.path": cfg.output_path,
        "output.format": cfg.output_format,
        "threads": cfg.threads,
    }
    missing = set(_SCHEMA) - set(values)
    if missing:
        raise RuntimeError(f"schema keys without a serializer: {sorted(missing)}")
    return values


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical document; parse_config(serialize_config(c)) == c."""
    values = _flatten(cfg)
    lines = [f"{key} = {_format_value(values[key])}" for key in _SCHEMA]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# output tables
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class OutputTable:
    """One result table plus the configuration that produced it."""

    command: str
    header: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str]

    def to_csv(self) -> str:
        lines = [f"# {key} = {value}" for key, value in self.metadata.items()]
        lines.append(",".join(self.header))
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(
                    f"row width {len(row)} does not match header width {len(self.header)}"
                )
            lines.append(",".join(_format_value(cell) for cell in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def cell(v):
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                return None
            if isinstance(v, (np.integer, np.floating)):
                return v.item()
            return v

        doc = {
            "metadata": self.metadata,
            "header": list(self.header),
            "rows": [[cell(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown output format '{fmt}'")

    @property
    def any_failed(self) -> bool:
        if "failed" not in self.header:
            return False
        i = self.header.index("failed")
        return any(row[i] for row in self.rows)


def _metadata(command: str, cfg: RunConfig) -> dict[str, str]:
    meta = {"uscsim_version": ARTIFACT_VERSION, "command": command}
    values = _flatten(cfg)
    for key in _SCHEMA:
        if key in _METADATA_EXCLUDED:
            continue
        meta[key] = _format_value(values[key])
    return meta


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def _effective_m_max(cfg: RunConfig, command: str) -> int:
    if cfg.m_max is not None:
        return cfg.m_max
    return 2 if command == "s21" else 3


def _transition_ghz(device: Device, flux: float, level: int) -> float:
    rows = level_scan(device, [flux], level)
    return rows[level - 1].omega_tilde_ghz


def _run_levels(cfg: RunConfig) -> list[tuple]:
    rows = level_scan(
        cfg.device(), cfg.flux.grid(), cfg.levels_count, threads=cfg.threads
    )
    return [(r.flux_mphi0, r.variant, r.index, r.omega_tilde_ghz) for r in rows]


def _run_melems(cfg: RunConfig) -> list[tuple]:
    rows = matrix_element_scan(
        cfg.device(),
        cfg.flux.grid(),
        cfg.melems_pairs,
        operator=cfg.melems_operator,
        threads=cfg.threads,
    )
    return [(r.flux_mphi0, r.pair, r.abs_sq) for r in rows]


def _run_s21(cfg: RunConfig) -> list[tuple]:
    device = cfg.device()
    m_max = _effective_m_max(cfg, "s21")
    freqs = cfg.frequency.grid()
    out: list[tuple] = []
    for flux in cfg.flux.grid():
        try:
            points = s21_sweep(
                device,
                [flux],
                freqs,
                cfg.signal,
                m_max=m_max,
                threads=cfg.threads,
                tail_rtol=cfg.tail_rtol,
            )
        except _SOLVER_ERRORS:
            nan = float("nan")
            out.extend((float(flux), float(f), nan, nan, nan, 1) for f in freqs)
            continue
        out.extend(
            (p.flux_mphi0, p.frequency_ghz, p.s21.real, p.s21.imag, abs(p.s21), 0)
            for p in points
        )
    return out


def _run_shg(cfg: RunConfig) -> list[tuple]:
    device = cfg.device()
    m_max = _effective_m_max(cfg, "shg")
    freqs = cfg.frequency.grid()
    out: list[tuple] = []
    for flux in cfg.flux.grid():
        try:
            points = shg_sweep(
                device,
                [flux],
                freqs,
                cfg.signal,
                m_max=m_max,
                threads=cfg.threads,
                tail_rtol=cfg.tail_rtol,
            )
        except _SOLVER_ERRORS:
            nan = float("nan")
            out.extend((float(flux), 2.0 * float(f), nan, 1) for f in freqs)
            continue
        out.extend((p.flux_mphi0, p.two_f_ghz, p.amplitude_au, 0) for p in points)
    return out


def _run_shg_power(cfg: RunConfig) -> list[tuple]:
    device = cfg.device()
    m_max = _effective_m_max(cfg, "shg-power")
    flux = cfg.point_flux_mphi0
    freq = cfg.point_frequency_ghz
    if freq is None:
        freq = _transition_ghz(device, flux, 1)
    out: list[tuple] = []
    for nbar in cfg.power.grid():
        try:
            rows = shg_power_sweep(
                device,
                flux,
                freq,
                [nbar],
                m_max=m_max,
                threads=cfg.threads,
                tail_rtol=cfg.tail_rtol,
            )
        except _SOLVER_ERRORS:
            out.append((float(nbar), float("nan"), 1))
            continue
        out.extend((n, amp, 0) for n, amp in rows)
    return out


def _run_interference(cfg: RunConfig) -> list[tuple]:
    device = cfg.device()
    m_max = _effective_m_max(cfg, "interference")
    flux = cfg.point_flux_mphi0
    freq = cfg.point_frequency_ghz
    if freq is None:
        freq = 0.5 * _transition_ghz(device, flux, 3)
    phases = cfg.phase.grid()
    try:
        points = interference_sweep(
            device,
            flux,
            freq,
            cfg.signal,
            cfg.control,
            phases,
            m_max=m_max,
            threads=cfg.threads,
            tail_rtol=cfg.tail_rtol,
        )
    except _SOLVER_ERRORS:
        nan = float("nan")
        return [(float(p), nan, nan, 1) for p in phases]
    return [(p.phase_rad, p.control_nbar, p.gain, 0) for p in points]


def _run_validate(cfg: RunConfig) -> list[tuple]:
    from .validation import run_all_checks

    rows = []
    for check in run_all_checks(threads=cfg.threads):
        rows.append(
            (check.name, check.expected, check.actual, check.tolerance, check.passed)
        )
    return rows


_HEADERS = {
    "levels": ("flux_mphi0", "variant", "j", "omega_tilde_ghz"),
    "melems": ("flux_mphi0", "pair", "abs_sq"),
    "s21": ("flux_mphi0", "f_ghz", "re_s21", "im_s21", "abs_s21", "failed"),
    "shg": ("flux_mphi0", "two_f_ghz", "amplitude_au", "failed"),
    "shg-power": ("nbar1", "amplitude_au", "failed"),
    "interference": ("phase_rad", "control_nbar", "gain", "failed"),
    "validate": ("check_name", "expected", "actual", "tolerance", "pass"),
}

_RUNNERS = {
    "levels": _run_levels,
    "melems": _run_melems,
    "s21": _run_s21,
    "shg": _run_shg,
    "shg-power": _run_shg_power,
    "interference": _run_interference,
    "validate": _run_validate,
}


def run_command(command: str, cfg: RunConfig) -> OutputTable:
    """Execute one command and return its table."""
    if command not in _RUNNERS:
        raise ConfigError(
            f"unknown command '{command}'; choose one of {', '.join(COMMANDS)}"
        )
    rows = _RUNNERS[command](cfg)
    return OutputTable(
        command=command,
        header=_HEADERS[command],
        rows=rows,
        metadata=_metadata(command, cfg),
    )


# ----------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract reserves
    # 2 for validation failures, so route parse errors through our own
    # exception and exit with 1 instead
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="uscsim",
        description="Driven-dissipative spectra of a flux qubit coupled "
        "to a two-mode resonator.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to a key = value config document")
    parser.add_argument("--out", help="output file (default: config output.path or stdout)")
    parser.add_argument("--format", choices=("csv", "json"), dest="fmt")
    parser.add_argument("--flux-start", type=float)
    parser.add_argument("--flux-stop", type=float)
    parser.add_argument("--flux-steps", type=int)
    parser.add_argument("--fmin", type=float, help="frequency axis start, GHz")
    parser.add_argument("--fmax", type=float, help="frequency axis stop, GHz")
    parser.add_argument("--fsteps", type=int)
    parser.add_argument("--nbar", type=float, help="signal tone target occupation")
    parser.add_argument("--mmax", type=int, help="harmonic cutoff of the Floquet solver")
    parser.add_argument("--n1", type=int, help="photon cutoff of the low mode")
    parser.add_argument("--n2", type=int, help="photon cutoff of the high mode")
    parser.add_argument("--threads", type=int)
    return parser


_FLAG_KEYS = {
    "flux_start": "sweep.flux.start_mphi0",
    "flux_stop": "sweep.flux.stop_mphi0",
    "flux_steps": "sweep.flux.steps",
    "fmin": "sweep.frequency.start_ghz",
    "fmax": "sweep.frequency.stop_ghz",
    "fsteps": "sweep.frequency.steps",
    "mmax": "floquet.m_max",
    "n1": "truncation.n1",
    "n2": "truncation.n2",
    "threads": "threads",
}


def _config_from_args(args) -> RunConfig:
    if args.config is None:
        text = ""
    else:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    values = _parse_text(text)
    if args.threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is not None:
            try:
                values["threads"] = int(env)
            except ValueError:
                raise ConfigError(
                    f"{THREADS_ENV_VAR}: expected an integer, got '{env}'"
                ) from None
    for attr, key in _FLAG_KEYS.items():
        flag = getattr(args, attr)
        if flag is not None:
            values[key] = flag
    if args.nbar is not None:
        values["drive.signal.power_mode"] = "nbar"
        values["drive.signal.power_value"] = args.nbar
    if args.fmt is not None:
        values["output.format"] = args.fmt
    if args.out is not None:
        values["output.path"] = args.out
    return _assemble(values)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
    except _UsageError as exc:
        print(parser.format_usage(), end="", file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"uscsim: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        table = run_command(args.command, cfg)
    except _SOLVER_ERRORS as exc:
        # failures inside a sweep are flagged per row; reaching this
        # point means even the setup solve failed
        print(f"uscsim: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    text = table.render(cfg.output_format)
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    if args.command == "validate":
        passed_column = table.header.index("pass")
        if not all(row[passed_column] for row in table.rows):
            return EXIT_VALIDATION
    if table.any_failed:
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
