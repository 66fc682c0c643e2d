"""Small-signal Josephson junction and SQUID inductance models."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import H_PLANCK, PHI0, DeviceParams
from .errors import FluxSingularity, NonPositiveCurrent, NonPositiveInput, SelfResonance

SELF_RESONANCE_RTOL = 1e-6


@dataclass(frozen=True)
class JunctionSpec:
    critical_current: float
    self_capacitance: float = 0.0

    def __post_init__(self):
        if not self.critical_current > 0:
            raise NonPositiveCurrent(f"critical_current must be positive, got {self.critical_current}")
        if self.self_capacitance < 0:
            raise NonPositiveInput("self_capacitance must be non-negative")

    @property
    def inductance(self) -> float:
        return jj_inductance(self.critical_current)


@dataclass(frozen=True)
class SquidModel:
    """Symmetric-loop dc SQUID used as the tunable coupling inductor.

    ``asymmetry`` is the junction asymmetry d = |I1 - I2| / (I1 + I2). It caps
    the inductance at half flux quantum instead of letting it diverge.
    """

    junction_critical_current: float
    asymmetry: float = 0.0
    self_capacitance: float = 0.0

    def __post_init__(self):
        if not self.junction_critical_current > 0:
            raise NonPositiveCurrent("junction_critical_current must be positive")
        if not 0.0 <= self.asymmetry < 1.0:
            raise NonPositiveInput(f"asymmetry must lie in [0, 1), got {self.asymmetry}")
        if self.self_capacitance < 0:
            raise NonPositiveInput("self_capacitance must be non-negative")

    @property
    def zero_flux_inductance(self) -> float:
        return PHI0 / (4.0 * math.pi * self.junction_critical_current)

    @property
    def max_inductance(self) -> float:
        if self.asymmetry == 0.0:
            return math.inf
        return self.zero_flux_inductance / math.sqrt(self.asymmetry)


@dataclass(frozen=True)
class EffectiveInductance:
    bare: float
    effective: float
    omega: float

    @property
    def frequency(self) -> float:
        return self.omega / (2.0 * math.pi)

    @property
    def capacitive(self) -> bool:
        """True above self-resonance, where the element behaves as a capacitor."""
        return self.effective < 0


def jj_inductance(critical_current):
    if np.any(np.asarray(critical_current) <= 0):
        raise NonPositiveCurrent(f"critical current must be positive, got {critical_current}")
    return PHI0 / (2.0 * math.pi * critical_current)


def ambegaokar_baratoff_ic(normal_resistance: float, gap_ev: float) -> float:
    """Critical current from normal-state resistance and the gap (in eV).

    Any series/contact resistance must already be subtracted.
    """
    if not normal_resistance > 0 or not gap_ev > 0:
        raise NonPositiveInput("normal_resistance and gap must be positive")
    # gap in eV is numerically the gap voltage Delta/e
    return math.pi * gap_ev / (2.0 * normal_resistance)


def _fold_flux(phi):
    phi = np.asarray(phi, dtype=float)
    r = np.abs(phi - np.floor(phi + 0.5))
    # cos(pi r) and sin(pi r), written so that r = 0.5 gives an exact zero
    return np.sin(np.pi * (0.5 - r)), np.sin(np.pi * r)


def squid_inverse_inductance(model: SquidModel, phi):
    """1 / L_SQUID(phi); zero where a symmetric SQUID diverges. Vectorized."""
    c, s = _fold_flux(phi)
    d = model.asymmetry
    root = (c * c + d * d * s * s) ** 0.25
    return root / model.zero_flux_inductance


def squid_inductance(model: SquidModel, phi):
    """Flux-tuned SQUID inductance, even and 1-periodic in ``phi`` (units of flux quantum)."""
    inv = squid_inverse_inductance(model, phi)
    if np.any(inv <= 0):
        raise FluxSingularity(f"SQUID inductance diverges at phi={phi} for a symmetric SQUID")
    out = 1.0 / inv
    return float(out) if np.ndim(out) == 0 else out


def effective_inductance(inductance: float, shunt_capacitance: float, omega: float) -> EffectiveInductance:
    """Inductor in parallel with its own junction capacitance."""
    if not inductance > 0:
        raise NonPositiveInput("inductance must be positive")
    inv = 1.0 / inductance - omega * omega * shunt_capacitance
    if abs(inv) < SELF_RESONANCE_RTOL / inductance:
        raise SelfResonance(
            f"L={inductance:.6g} H with C={shunt_capacitance:.6g} F resonates at omega={omega:.6g} rad/s"
        )
    return EffectiveInductance(inductance, 1.0 / inv, omega)


def linear_power_limit(
    device: DeviceParams,
    line_junction: JunctionSpec,
    z_line: float | None = None,
    safety_fraction: float = 1.0,
) -> float:
    """Power at which a matched travelling wave drives the line junctions to
    ``safety_fraction * I_c``. Order-of-magnitude estimate only.

    ``z_line`` defaults to sqrt(L/C) of ``device``.
    """
    if z_line is None:
        z_line = math.sqrt(device.line_inductance / device.line_capacitance)
    if not z_line > 0 or not 0 < safety_fraction <= 1:
        raise NonPositiveInput("z_line must be positive and 0 < safety_fraction <= 1")
    peak = safety_fraction * line_junction.critical_current
    return peak * peak * z_line / 2.0


def photon_flux(power: float, frequency: float) -> float:
    """Photons per second carried by ``power`` watts at ``frequency``."""
    if power < 0 or not frequency > 0:
        raise NonPositiveInput("power must be >= 0 and frequency > 0")
    return power / (H_PLANCK * frequency)
