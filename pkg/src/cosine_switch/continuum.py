"""Closed-form continuum model of two inductively coupled lumped-element lines.

All functions take per-unit values. Pass bare (L, L_coup) or the
capacitance-corrected effective values; the choice is the caller's.
Wavenumbers are in radians per unit cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DeviceParams
from .errors import NonPositiveInput

# Phase of S31 relative to S21 for a switch in the cross-coupling regime.
OUTPUT_PHASE_DIFFERENCE = -math.pi / 2


@dataclass(frozen=True)
class ModeSolution:
    k_plus: float
    k_minus: float

    @property
    def carrier(self) -> float:
        return 0.5 * (self.k_minus + self.k_plus)

    @property
    def envelope(self) -> float:
        """Signed envelope wavenumber; non-positive for a non-negative coupling."""
        return 0.5 * (self.k_minus - self.k_plus)

    K = carrier
    chi = envelope


@dataclass(frozen=True)
class SplitPrediction:
    p21: float
    p31: float
    phase_diff: float = OUTPUT_PHASE_DIFFERENCE


@dataclass(frozen=True)
class SwitchingTime:
    tau_jj: float
    tau_12: float
    tau_13: float

    @property
    def total(self) -> float:
        return self.tau_jj + max(self.tau_12, self.tau_13)


def _require(positive=(), nonnegative=()):
    for name, value in positive:
        if np.any(np.asarray(value) <= 0):
            raise NonPositiveInput(f"{name} must be positive, got {value}")
    for name, value in nonnegative:
        if np.any(np.asarray(value) < 0):
            raise NonPositiveInput(f"{name} must be non-negative, got {value}")


def coupling_factor(inductance, coupling_inductance):
    """sqrt(1 + 2 L_coup / L): ratio of the coupled to the uncoupled mode wavenumber."""
    return np.sqrt(1.0 + 2.0 * np.asarray(coupling_inductance) / inductance)


def dispersion(omega, inductance, capacitance, coupling_inductance) -> ModeSolution:
    _require(positive=[("omega", omega), ("L", inductance), ("C", capacitance)],
             nonnegative=[("L_coup", coupling_inductance)])
    k_minus = omega * math.sqrt(inductance * capacitance)
    k_plus = k_minus * math.sqrt(1.0 + 2.0 * coupling_inductance / inductance)
    return ModeSolution(k_plus=k_plus, k_minus=k_minus)


def coupling_phase(omega, inductance, capacitance, coupling_inductance, n_units):
    """Accumulated envelope phase |chi| * N. Vectorized over omega and L_coup."""
    _require(positive=[("omega", omega), ("L", inductance), ("C", capacitance), ("N", n_units)],
             nonnegative=[("L_coup", coupling_inductance)])
    excess = coupling_factor(inductance, coupling_inductance) - 1.0
    out = 0.5 * excess * np.sqrt(inductance * capacitance) * np.asarray(omega) * n_units
    return float(out) if np.ndim(out) == 0 else out


def _cospi(y):
    """cos(pi y) with exact zeros and ones at half-integer and integer y."""
    quarter = round(2.0 * y)
    r = y - 0.5 * quarter
    c, s = math.cos(math.pi * r), math.sin(math.pi * r)
    return (c, -s, -c, s)[quarter % 4]


def split_prediction(chi_n) -> SplitPrediction:
    # reduce in units of pi so that chi_n = k pi / 4 lands exactly on a landmark
    c2 = _cospi(2.0 * chi_n / math.pi)
    return SplitPrediction(p21=0.5 * (1.0 + c2), p31=0.5 * (1.0 - c2))


def phase_velocities(inductance, capacitance, coupling_inductance, unit_pitch):
    """(constant, variable) phase velocity in m/s."""
    _require(positive=[("L", inductance), ("C", capacitance), ("m", unit_pitch)],
             nonnegative=[("L_coup", coupling_inductance)])
    v_const = unit_pitch / math.sqrt(inductance * capacitance)
    v_var = v_const / math.sqrt(1.0 + 2.0 * coupling_inductance / inductance)
    return v_const, v_var


def characteristic_impedance(inductance, capacitance, coupling_inductance=0.0):
    """Mean of the two mode impedances, 0.5 (sqrt(1 + 2 L_coup/L) + 1) sqrt(L/C)."""
    _require(positive=[("L", inductance), ("C", capacitance)],
             nonnegative=[("L_coup", coupling_inductance)])
    z = math.sqrt(inductance / capacitance)
    if coupling_inductance == 0:
        return z
    return 0.5 * (math.sqrt(1.0 + 2.0 * coupling_inductance / inductance) + 1.0) * z


def switching_time(device: DeviceParams, coupling_inductance_eff, squid_capacitance) -> SwitchingTime:
    """Plasma-time plus propagation-delay estimate of the switching time."""
    _require(positive=[("L_coup*", coupling_inductance_eff), ("C_SQUID", squid_capacitance)])
    v_const, v_var = phase_velocities(
        device.line_inductance, device.line_capacitance, coupling_inductance_eff, device.unit_pitch
    )
    length = device.unit_pitch * device.n_units
    return SwitchingTime(
        tau_jj=math.sqrt(coupling_inductance_eff * squid_capacitance),
        tau_12=length / v_const,
        tau_13=length / v_var,
    )
