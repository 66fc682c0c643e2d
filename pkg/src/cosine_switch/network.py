"""Exact frequency-domain solver for the N-cell coupled LC ladder.

The two lines are cascaded as 4x4 ABCD matrices acting on the state
(V_a, V_c, I_a, I_c) at a cell boundary, from the left ports to the right
ports. Time convention is exp(+j omega t), so an inductor has impedance
+j omega L.

Port numbering: 1 and 4 are the left ends of lines a and c, 2 and 3 the right
ends of lines a and c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DeviceParams, EdgeStyle, validate_device
from .errors import InvalidDevice, SelfResonance, SingularConversion
from .junctions import SELF_RESONANCE_RTOL, SquidModel, squid_inverse_inductance

DEFAULT_Z0 = 50.0

# internal wave order is (left a, left c, right a, right c) = ports (1, 4, 2, 3)
_PORT_ORDER = np.array([0, 2, 3, 1])
_MIRROR = np.array([3, 2, 1, 0])


@dataclass(frozen=True)
class UnitCellElements:
    z_series: np.ndarray  # (..., 2, 2) ohm
    y_shunt: np.ndarray  # (..., 2, 2) siemens
    z_edge: np.ndarray  # (..., 2, 2) half-junction edge element, no coupling


@dataclass(frozen=True)
class FourPortSMatrix:
    s: np.ndarray
    z0: np.ndarray
    frequency: float
    flux: float = float("nan")

    def __getitem__(self, ports):
        """``sm[2, 1]`` is S21 (1-based port indices)."""
        i, j = ports
        return self.s[i - 1, j - 1]

    @property
    def s21(self):
        return self.s[1, 0]

    @property
    def s31(self):
        return self.s[2, 0]

    @property
    def s11(self):
        return self.s[0, 0]

    @property
    def s41(self):
        return self.s[3, 0]

    def unitarity_error(self) -> float:
        return unitarity_error(self.s)

    def reciprocity_error(self) -> float:
        return reciprocity_error(self.s)

    def mirror_error(self) -> float:
        return mirror_error(self.s)


def unitarity_error(s):
    s = np.asarray(s)
    eye = np.eye(s.shape[-1])
    gram = np.conj(np.swapaxes(s, -1, -2)) @ s
    return float(np.nanmax(np.abs(gram - eye)))


def reciprocity_error(s):
    s = np.asarray(s)
    return float(np.nanmax(np.abs(s - np.swapaxes(s, -1, -2))))


def mirror_error(s):
    """Deviation from invariance under the port swap 1<->4, 2<->3."""
    s = np.asarray(s)
    swapped = s[..., _MIRROR, :][..., :, _MIRROR]
    return float(np.nanmax(np.abs(s - swapped)))


def _check_device(device: DeviceParams):
    report = validate_device(device)
    if not report.ok:
        raise InvalidDevice(report.violations)


def _shunted(inductance, capacitance, omega, what):
    """Inductance in parallel with a capacitance; vectorized, raises at resonance."""
    inductance = np.asarray(inductance, dtype=float)
    factor = 1.0 - omega * omega * inductance * capacitance
    if np.any(np.abs(factor) < SELF_RESONANCE_RTOL):
        raise SelfResonance(f"{what} resonates with its self-capacitance")
    return inductance / factor


def _effective_elements(device: DeviceParams, coupling_inductance, omega):
    l_eff = _shunted(device.line_inductance, device.jj_self_capacitance, omega, "line junction")
    lc = np.asarray(coupling_inductance, dtype=float)
    if device.squid_self_capacitance:
        lc_eff = np.where(lc > 0, _shunted(lc, device.squid_self_capacitance, omega, "SQUID"), 0.0)
    else:
        lc_eff = lc
    return l_eff, lc_eff


def _elements(omega, l_eff, lc_eff, capacitance):
    omega, l_eff, lc_eff = np.broadcast_arrays(
        np.asarray(omega, dtype=float), np.asarray(l_eff, dtype=float), np.asarray(lc_eff, dtype=float)
    )
    shape = omega.shape
    jw = 1j * omega
    z = np.empty(shape + (2, 2), dtype=complex)
    z[..., 0, 0] = z[..., 1, 1] = jw * (l_eff + lc_eff)
    z[..., 0, 1] = z[..., 1, 0] = jw * lc_eff
    y = np.zeros(shape + (2, 2), dtype=complex)
    y[..., 0, 0] = y[..., 1, 1] = jw * capacitance
    edge = np.zeros(shape + (2, 2), dtype=complex)
    edge[..., 0, 0] = edge[..., 1, 1] = jw * l_eff / 2.0
    return UnitCellElements(z_series=z, y_shunt=y, z_edge=edge)


def build_unit_cell(device: DeviceParams, coupling_inductance, omega) -> UnitCellElements:
    """Series and shunt branches of one unit, with junction self-capacitances
    shunting their own inductors."""
    _check_device(device)
    l_eff, lc_eff = _effective_elements(device, coupling_inductance, omega)
    return _elements(omega, l_eff, lc_eff, device.line_capacitance)


def _series_abcd(z):
    t = np.zeros(z.shape[:-2] + (4, 4), dtype=complex)
    t[..., 0, 0] = t[..., 1, 1] = t[..., 2, 2] = t[..., 3, 3] = 1.0
    t[..., :2, 2:] = z
    return t


def _shunt_abcd(y):
    t = np.zeros(y.shape[:-2] + (4, 4), dtype=complex)
    t[..., 0, 0] = t[..., 1, 1] = t[..., 2, 2] = t[..., 3, 3] = 1.0
    t[..., 2:, :2] = y
    return t


def element_chain(cell: UnitCellElements, n_units: int, edge_style=EdgeStyle.SYMMETRIZED):
    """Ordered list of ABCD matrices from the left ports to the right ports."""
    series = _series_abcd(cell.z_series)
    shunt = _shunt_abcd(cell.y_shunt)
    if EdgeStyle(edge_style) is EdgeStyle.PLAIN:
        return [series, shunt] * n_units
    edge = _series_abcd(cell.z_edge)
    return [edge, shunt] + [series, shunt] * (n_units - 1) + [edge]


def cascade_elements(cell: UnitCellElements, n_units: int, edge_style=EdgeStyle.SYMMETRIZED):
    series = _series_abcd(cell.z_series)
    shunt = _shunt_abcd(cell.y_shunt)
    unit = series @ shunt
    if EdgeStyle(edge_style) is EdgeStyle.PLAIN:
        total = unit
        for _ in range(n_units - 1):
            total = total @ unit
        return total
    edge = _series_abcd(cell.z_edge)
    total = edge @ shunt
    for _ in range(n_units - 1):
        total = total @ unit
    return total @ edge


def cascade(device: DeviceParams, coupling_inductance, omega):
    """Total 4x4 transfer matrix of the device; vectorized over omega and L_coup."""
    cell = build_unit_cell(device, coupling_inductance, omega)
    return cascade_elements(cell, device.n_units, device.edge_style)


def _port_matrices(z0):
    z0 = np.broadcast_to(np.asarray(z0, dtype=float), (4,))
    if np.any(z0 <= 0):
        raise ValueError(f"reference impedances must be positive, got {z0}")
    # ports (1, 4) on the left, (2, 3) on the right
    root_left = np.sqrt(z0[[0, 3]])
    root_right = np.sqrt(z0[[1, 2]])
    p = np.zeros((4, 4))
    p[[0, 1], [0, 1]] = root_left
    p[[0, 1], [2, 3]] = root_left
    p[[2, 3], [0, 1]] = 1.0 / root_left
    p[[2, 3], [2, 3]] = -1.0 / root_left
    q = np.zeros((4, 4))
    q[[0, 1], [0, 1]] = root_right
    q[[0, 1], [2, 3]] = root_right
    q[[2, 3], [0, 1]] = -1.0 / root_right
    q[[2, 3], [2, 3]] = 1.0 / root_right
    return z0, p, q


def transfer_to_s(t, z0=DEFAULT_Z0):
    """Vectorized ABCD -> S conversion; returns (s, z0). Raises SingularConversion."""
    z0, p, q = _port_matrices(z0)
    t = np.asarray(t, dtype=complex)
    tq = t @ q
    lhs = np.empty(t.shape, dtype=complex)
    rhs = np.empty(t.shape, dtype=complex)
    lhs[..., :, :2] = p[:, 2:]
    lhs[..., :, 2:] = -tq[..., :, 2:]
    rhs[..., :, :2] = -p[:, :2]
    rhs[..., :, 2:] = tq[..., :, :2]
    try:
        s_int = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularConversion("transfer matrix has no scattering representation") from exc
    if not np.all(np.isfinite(s_int)):
        raise SingularConversion("transfer matrix has no scattering representation")
    s = s_int[..., _PORT_ORDER, :][..., :, _PORT_ORDER]
    return s, z0


def to_s_parameters(t, z0=DEFAULT_Z0, frequency=float("nan"), flux=float("nan")) -> FourPortSMatrix:
    s, z0 = transfer_to_s(t, z0)
    return FourPortSMatrix(s=s, z0=z0, frequency=frequency, flux=flux)


def solve_device(device: DeviceParams, squid: SquidModel, frequency, flux, z0=DEFAULT_Z0) -> FourPortSMatrix:
    """S-matrix of the switch at one frequency (Hz) and flux bias (units of flux quantum)."""
    from .junctions import squid_inductance

    lc = squid_inductance(squid, flux)
    omega = 2.0 * math.pi * frequency
    t = cascade(device, lc, omega)
    return to_s_parameters(t, z0, frequency=frequency, flux=flux)


def solve_with_coupling(device: DeviceParams, coupling_inductance, frequency, z0=DEFAULT_Z0) -> FourPortSMatrix:
    """S-matrix for a directly given bare coupling inductance."""
    t = cascade(device, coupling_inductance, 2.0 * math.pi * frequency)
    return to_s_parameters(t, z0, frequency=frequency)


def solve_grid(device: DeviceParams, squid: SquidModel, frequencies, fluxes, z0=DEFAULT_Z0):
    """Dense S table of shape (n_freq, n_flux, 4, 4) plus a boolean hole mask.

    Points the solver cannot certify (divergent SQUID, self-resonance,
    singular conversion) are NaN and flagged in the mask.
    """
    _check_device(device)
    f = np.asarray(frequencies, dtype=float)[:, None]
    phi = np.asarray(fluxes, dtype=float)[None, :]
    omega = 2.0 * np.pi * f
    shape = (f.shape[0], phi.shape[1])

    inv_lc = np.broadcast_to(squid_inverse_inductance(squid, phi), shape)
    holes = inv_lc <= 0
    with np.errstate(divide="ignore"):
        lc = np.where(holes, 0.0, 1.0 / np.where(holes, 1.0, inv_lc))

    line_factor = 1.0 - omega * omega * device.line_inductance * device.jj_self_capacitance
    squid_factor = 1.0 - omega * omega * lc * device.squid_self_capacitance
    holes = holes | (np.abs(line_factor) < SELF_RESONANCE_RTOL) | (np.abs(squid_factor) < SELF_RESONANCE_RTOL)
    safe_line = np.where(np.abs(line_factor) < SELF_RESONANCE_RTOL, 1.0, line_factor)
    safe_squid = np.where(np.abs(squid_factor) < SELF_RESONANCE_RTOL, 1.0, squid_factor)
    l_eff = np.broadcast_to(device.line_inductance / safe_line, shape)
    lc_eff = lc / safe_squid

    cell = _elements(np.broadcast_to(omega, shape), l_eff, lc_eff, device.line_capacitance)
    t = cascade_elements(cell, device.n_units, device.edge_style)
    try:
        s, z0 = transfer_to_s(t, z0)
    except SingularConversion:
        s = np.full(t.shape, np.nan, dtype=complex)
        for idx in np.ndindex(*shape):
            try:
                s[idx], z0 = transfer_to_s(t[idx], z0)
            except SingularConversion:
                holes[idx] = True
    holes = holes | ~np.all(np.isfinite(s), axis=(-1, -2))
    s[holes] = np.nan
    return s, holes


def bloch_wavenumbers(device: DeviceParams, coupling_inductance, omega):
    """Per-cell wavenumbers (k_minus, k_plus) of an infinite ladder of plain
    cells, from the eigenvalues exp(+-jk) of the cell transfer matrix."""
    cell = build_unit_cell(device, coupling_inductance, omega)
    unit = _series_abcd(cell.z_series) @ _shunt_abcd(cell.y_shunt)
    k = np.sort(np.abs(np.angle(np.linalg.eigvals(unit))))
    # eigenvalues come in +-k pairs; take one of each pair
    return float(k[0]), float(k[2])
