"""Config files, CSV tables and Touchstone v1 four-port files.

Config files are INI-style (``key = value`` in named sections) with the unit
carried in the key suffix, e.g. ``line_inductance_nH``. Numbers are parsed as
decimals and scaled exactly, so a DeviceParams written out and read back is
bit-identical.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .analysis import MagnitudeMap, SweepGrid, isolation_ratio, magnitude_db
from .core import DeviceParams, EdgeStyle
from .errors import ConfigError
from .junctions import SquidModel

FLOAT_FORMAT = ".9g"

# key -> (decimal exponent of the unit, kind)
DEVICE_KEYS = {
    "line_inductance_nH": ("line_inductance", -9, float),
    "line_capacitance_fF": ("line_capacitance", -15, float),
    "jj_self_capacitance_fF": ("jj_self_capacitance", -15, float),
    "squid_self_capacitance_fF": ("squid_self_capacitance", -15, float),
    "n_units": ("n_units", 0, int),
    "unit_pitch_um": ("unit_pitch", -6, float),
    "edge_style": ("edge_style", None, EdgeStyle),
}
DEVICE_OPTIONAL = {"edge_style"}

SQUID_KEYS = {
    "junction_critical_current_uA": ("junction_critical_current", -6, float),
    "asymmetry": ("asymmetry", 0, float),
    "self_capacitance_fF": ("self_capacitance", -15, float),
}

SWEEP_KEYS = {
    "f_start_GHz": 9, "f_stop_GHz": 9, "f_points": 0,
    "flux_start": 0, "flux_stop": 0, "flux_points": 0,
    "z0_ohm": 0,
}

SIMULATE_KEYS = {"flux": 0}

FIT_KEYS = {"data": None, "f_min_GHz": 9, "f_max_GHz": 9, "lcoup_max_nH": -9}
FIT_OPTIONAL = set(FIT_KEYS)

DESIGN_KEYS = {
    "f_target_GHz": 9,
    "z_target_ohm": 0,
    "chi_n_over_pi": 0,
    "n_units": 0,
    "line_inductance_nH": -9,
    "line_inductance_min_nH": -9,
    "line_inductance_max_nH": -9,
    "coupling_ratio": 0,
    "unit_pitch_um": -6,
    "table_f_GHz": 9,
}
DESIGN_REQUIRED = {"f_target_GHz", "z_target_ohm"}

SECTIONS = {
    "device": set(DEVICE_KEYS),
    "squid": set(SQUID_KEYS),
    "sweep": set(SWEEP_KEYS),
    "simulate": set(SIMULATE_KEYS),
    "fit": set(FIT_KEYS),
    "design": set(DESIGN_KEYS),
}

SWEEP_COLUMNS = [
    "f_Hz", "flux", "|S21|_dB", "|S31|_dB", "|S11|_dB", "|S41|_dB",
    "arg(S21)_deg", "arg(S31)_deg", "isolation_dB",
]
FIT_INPUT_COLUMNS = ["f_Hz", "|S21|", "|S31|"]


def fmt(x) -> str:
    return format(float(x), FLOAT_FORMAT)


# ---------------------------------------------------------------- numbers

def parse_number(text: str, exponent: int, where: str, integer=False):
    """Decimal text in the key's unit -> SI float, scaled without binary rounding."""
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise ConfigError(f"{where}: cannot parse {text!r} as a number") from None
    if not value.is_finite():
        raise ConfigError(f"{where}: value must be finite")
    if integer:
        if value != value.to_integral_value():
            raise ConfigError(f"{where}: expected an integer, got {text!r}")
        return int(value)
    return float(value.scaleb(exponent))


def format_number(value: float, exponent: int) -> str:
    """SI float -> shortest decimal text in the key's unit that parses back exactly."""
    d = Decimal(repr(float(value))).scaleb(-exponent)
    text = format(d.normalize(), "f") if abs(d.adjusted()) < 16 else str(d.normalize())
    return text


# ---------------------------------------------------------------- config

def load_config(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())


def parse_config(text: str) -> configparser.ConfigParser:
    """Parse config text; rejects unknown sections and keys."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - SECTIONS[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    return parser


def _section(cfg, name):
    if not cfg.has_section(name):
        raise ConfigError(f"missing section [{name}]")
    return cfg[name]


def _require(section, key, name):
    if key not in section:
        raise ConfigError(f"missing key '{key}' in [{name}]")
    return section[key]


def device_from_config(cfg) -> DeviceParams:
    sec = _section(cfg, "device")
    values = {}
    for key, (field_name, exponent, kind) in DEVICE_KEYS.items():
        if key not in sec:
            if key in DEVICE_OPTIONAL:
                continue
            raise ConfigError(f"missing key '{key}' in [device]")
        where = f"[device] {key}"
        if kind is EdgeStyle:
            try:
                values[field_name] = EdgeStyle(sec[key].strip().lower())
            except ValueError:
                raise ConfigError(f"{where}: expected 'plain' or 'symmetrized'") from None
        else:
            values[field_name] = parse_number(sec[key], exponent, where, integer=kind is int)
    return DeviceParams(**values)


def device_to_config(device: DeviceParams) -> str:
    lines = ["[device]"]
    for key, (field_name, exponent, kind) in DEVICE_KEYS.items():
        value = getattr(device, field_name)
        if kind is EdgeStyle:
            text = EdgeStyle(value).value
        elif kind is int:
            text = str(int(value))
        else:
            text = format_number(value, exponent)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def squid_from_config(cfg) -> SquidModel:
    sec = _section(cfg, "squid")
    values = {}
    for key, (field_name, exponent, _) in SQUID_KEYS.items():
        values[field_name] = parse_number(_require(sec, key, "squid"), exponent, f"[squid] {key}")
    try:
        squid = SquidModel(**values)
    except ValueError as exc:
        raise ConfigError(f"[squid]: {exc}") from None
    if cfg.has_section("device") and "squid_self_capacitance_fF" in cfg["device"]:
        device_value = parse_number(cfg["device"]["squid_self_capacitance_fF"], -15, "[device] squid_self_capacitance_fF")
        if device_value != squid.self_capacitance:
            raise ConfigError("[squid] self_capacitance_fF disagrees with [device] squid_self_capacitance_fF")
    return squid


def _numbers(cfg, name, keys, required, integer_keys=()):
    sec = _section(cfg, name)
    out = {}
    for key in required:
        _require(sec, key, name)
    for key, exponent in keys.items():
        if key not in sec or exponent is None:
            continue
        out[key] = parse_number(sec[key], exponent, f"[{name}] {key}", integer=key in integer_keys)
    return out


def frequency_axis(cfg):
    sec = _numbers(cfg, "sweep", SWEEP_KEYS, ["f_start_GHz", "f_stop_GHz", "f_points", "z0_ohm"],
                   integer_keys={"f_points", "flux_points"})
    return _axis(sec["f_start_GHz"], sec["f_stop_GHz"], sec["f_points"], "f"), sec["z0_ohm"]


def flux_axis(cfg):
    sec = _numbers(cfg, "sweep", SWEEP_KEYS, ["flux_start", "flux_stop", "flux_points"],
                   integer_keys={"f_points", "flux_points"})
    return _axis(sec["flux_start"], sec["flux_stop"], sec["flux_points"], "flux")


def _axis(start, stop, points, name):
    if points < 1:
        raise ConfigError(f"[sweep] {name}_points must be >= 1")
    if points == 1:
        return np.array([start])
    if not stop > start:
        raise ConfigError(f"[sweep] {name}_stop must exceed {name}_start")
    return np.linspace(start, stop, points)


# ---------------------------------------------------------------- CSV

def _write_csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def sweep_to_csv(grid: SweepGrid) -> str:
    """Frequency-major table of the sweep, one row per grid point."""
    iso = isolation_ratio(grid)
    s = grid.s
    db = {k: magnitude_db(np.abs(s[..., i, 0])) for k, i in (("21", 1), ("31", 2), ("11", 0), ("41", 3))}
    arg21 = np.degrees(np.angle(s[..., 1, 0]))
    arg31 = np.degrees(np.angle(s[..., 2, 0]))
    rows = []
    for i, f in enumerate(grid.frequencies):
        for j, phi in enumerate(grid.fluxes):
            rows.append([
                fmt(f), fmt(phi), fmt(db["21"][i, j]), fmt(db["31"][i, j]), fmt(db["11"][i, j]),
                fmt(db["41"][i, j]), fmt(arg21[i, j]), fmt(arg31[i, j]), fmt(iso[i, j]),
            ])
    return _write_csv(rows, SWEEP_COLUMNS)


def read_table(text: str, required):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("CSV is empty; a header row is required") from None
    header = [h.strip() for h in header]
    missing = [c for c in required if c not in header]
    if missing:
        raise ConfigError(f"CSV is missing column(s): {', '.join(missing)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ConfigError(f"CSV row {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            rows.append([float(x) for x in row])
        except ValueError:
            raise ConfigError(f"CSV row {lineno}: non-numeric field") from None
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def sweep_from_csv(text: str) -> MagnitudeMap:
    header, data = read_table(text, SWEEP_COLUMNS)
    col = {name: data[:, header.index(name)] for name in SWEEP_COLUMNS}
    freqs = np.unique(col["f_Hz"])
    fluxes = np.unique(col["flux"])
    if data.shape[0] != freqs.size * fluxes.size:
        raise ConfigError("sweep CSV is not a complete frequency x flux grid")
    shape = (freqs.size, fluxes.size)
    order = np.lexsort((col["flux"], col["f_Hz"]))
    s21_db = col["|S21|_dB"][order].reshape(shape)
    s31_db = col["|S31|_dB"][order].reshape(shape)
    holes = np.isnan(s21_db) | np.isnan(s31_db)
    return MagnitudeMap(
        frequencies=freqs,
        fluxes=fluxes,
        s21_mag=10.0 ** (s21_db / 20.0),
        s31_mag=10.0 ** (s31_db / 20.0),
        holes=holes,
    )


def fit_input_from_csv(text: str):
    """Measured magnitudes grouped by flux: {flux: (f_Hz, |S21|, |S31|)}.

    A file without a ``flux`` column is a single dataset keyed by NaN.
    """
    header, data = read_table(text, FIT_INPUT_COLUMNS)
    f = data[:, header.index("f_Hz")]
    s21 = data[:, header.index("|S21|")]
    s31 = data[:, header.index("|S31|")]
    if "flux" in header:
        flux = data[:, header.index("flux")]
    else:
        flux = np.full(f.shape, math.nan)
    groups = {}
    for value in (np.unique(flux) if not np.all(np.isnan(flux)) else [math.nan]):
        mask = np.isnan(flux) if math.isnan(value) else flux == value
        order = np.argsort(f[mask], kind="stable")
        groups[float(value)] = (f[mask][order], s21[mask][order], s31[mask][order])
    return groups


def fit_input_to_csv(frequencies, s21_mag, s31_mag, flux=None) -> str:
    header = ["f_Hz", "|S21|", "|S31|"] + (["flux"] if flux is not None else [])
    rows = []
    for k, f in enumerate(frequencies):
        row = [fmt(f), fmt(s21_mag[k]), fmt(s31_mag[k])]
        if flux is not None:
            row.append(fmt(np.broadcast_to(flux, np.shape(frequencies))[k]))
        rows.append(row)
    return _write_csv(rows, header)


def table_to_csv(header, rows) -> str:
    return _write_csv([[fmt(x) if isinstance(x, (float, np.floating, int)) and not isinstance(x, bool) else x
                        for x in row] for row in rows], header)


# ---------------------------------------------------------------- Touchstone

def write_touchstone(frequencies, s, z0, fmt_kind="MA", comments=()) -> str:
    """Touchstone v1 four-port text: one block of four lines per frequency."""
    fmt_kind = fmt_kind.upper()
    if fmt_kind not in ("MA", "RI"):
        raise ValueError("format must be MA or RI")
    z0 = np.broadcast_to(np.asarray(z0, dtype=float), (4,))
    if np.any(z0 != z0[0]):
        raise ValueError("Touchstone v1 needs one reference impedance for all ports")
    lines = [f"! {c}" for c in comments]
    lines.append(f"# GHZ S {fmt_kind} R {fmt(z0[0])}")
    s = np.asarray(s)
    for k, f in enumerate(frequencies):
        for i in range(4):
            parts = [fmt(f / 1e9)] if i == 0 else []
            for j in range(4):
                v = s[k, i, j]
                if fmt_kind == "MA":
                    parts += [fmt(abs(v)), fmt(math.degrees(math.atan2(v.imag, v.real)))]
                else:
                    parts += [fmt(v.real), fmt(v.imag)]
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def read_touchstone(text: str):
    """Parse a v1 four-port file; returns (frequencies_Hz, s[n,4,4], z0)."""
    unit, kind, z0 = "GHZ", "MA", 50.0
    tokens = []
    for raw in text.splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            opts = line[1:].upper().split()
            for i, opt in enumerate(opts):
                if opt in _FREQ_UNITS:
                    unit = opt
                elif opt in ("MA", "RI", "DB"):
                    kind = opt
                elif opt == "R":
                    z0 = float(opts[i + 1])
            continue
        tokens.extend(float(t) for t in line.split())
    width = 1 + 32
    if len(tokens) % width:
        raise ValueError("Touchstone data is not a whole number of 4-port records")
    data = np.array(tokens).reshape(-1, width)
    freqs = data[:, 0] * _FREQ_UNITS[unit]
    pairs = data[:, 1:].reshape(-1, 4, 4, 2)
    if kind == "RI":
        s = pairs[..., 0] + 1j * pairs[..., 1]
    else:
        mag = pairs[..., 0] if kind == "MA" else 10.0 ** (pairs[..., 0] / 20.0)
        s = mag * np.exp(1j * np.radians(pairs[..., 1]))
    return freqs, s, z0
