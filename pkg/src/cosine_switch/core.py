"""Physical constants, unit conventions and the shared device data model.

Everything is stored in SI base units (H, F, Hz, W, m). Unit conversions
happen only in :mod:`cosine_switch.io`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields


@dataclass(frozen=True)
class PhysicalConstants:
    # CODATA 2018, 10 significant digits
    flux_quantum: float = 2.067833848e-15
    electron_charge: float = 1.602176634e-19
    planck_h: float = 6.626070150e-34


CONSTANTS = PhysicalConstants()
PHI0 = CONSTANTS.flux_quantum
E_CHARGE = CONSTANTS.electron_charge
H_PLANCK = CONSTANTS.planck_h


class EdgeStyle(str, enum.Enum):
    PLAIN = "plain"
    SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class DeviceParams:
    """Per-unit electrical parameters of the coupled-line switch.

    ``line_inductance`` and ``line_capacitance`` describe one unit of a single
    line. With ``EdgeStyle.SYMMETRIZED`` the first and last line junctions are
    split into two half-inductance junctions and the edge SQUID is dropped.
    """

    line_inductance: float
    line_capacitance: float
    n_units: int
    unit_pitch: float
    jj_self_capacitance: float = 0.0
    squid_self_capacitance: float = 0.0
    edge_style: EdgeStyle = EdgeStyle.SYMMETRIZED

    def replace(self, **changes) -> "DeviceParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return DeviceParams(**values)


@dataclass(frozen=True)
class FluxBias:
    normalized_flux: float

    @property
    def reduced(self) -> float:
        """Flux folded into [-0.5, 0.5)."""
        return self.normalized_flux - math.floor(self.normalized_flux + 0.5)


@dataclass(frozen=True)
class FrequencyPoint:
    f: float
    omega: float = field(init=False)

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError(f"frequency must be positive, got {self.f}")
        object.__setattr__(self, "omega", 2.0 * math.pi * self.f)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_device(params: DeviceParams) -> ValidationReport:
    """Check the DeviceParams invariants; never raises."""
    report = ValidationReport()

    def check(cond, message):
        try:
            passed = bool(cond())
        except (TypeError, ValueError):
            passed = False
        if not passed:
            report.violations.append(message)

    check(lambda: params.line_inductance > 0, "line_inductance must be positive")
    check(lambda: params.line_capacitance > 0, "line_capacitance must be positive")
    check(lambda: params.unit_pitch > 0, "unit_pitch must be positive")
    check(
        lambda: int(params.n_units) == params.n_units and params.n_units >= 1,
        "n_units must be an integer >= 1",
    )
    check(lambda: params.jj_self_capacitance >= 0, "jj_self_capacitance must be non-negative")
    check(lambda: params.squid_self_capacitance >= 0, "squid_self_capacitance must be non-negative")
    check(lambda: EdgeStyle(params.edge_style) is not None, "edge_style must be 'plain' or 'symmetrized'")
    return report


def dbm_to_watts(p_dbm):
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watts_to_dbm(p_watts):
    return 10.0 * math.log10(p_watts / 1e-3)


def reference_device(**overrides) -> DeviceParams:
    """The reference 24-unit device (0.28 nH, 300 fF, 34 um pitch)."""
    base = DeviceParams(
        line_inductance=0.28e-9,
        line_capacitance=300e-15,
        n_units=24,
        unit_pitch=34e-6,
    )
    return base.replace(**overrides)
