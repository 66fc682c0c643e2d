"""Flux-tunable coupled-line microwave switch: circuit model, solvers and design tools."""
from .analysis import (
    MagnitudeMap,
    OperatingPoint,
    SplitterPoint,
    SweepGrid,
    SwitchState,
    beamsplitter_point,
    find_operating_points,
    isolation_ratio,
    run_sweep,
)
from .continuum import (
    ModeSolution,
    SplitPrediction,
    SwitchingTime,
    characteristic_impedance,
    coupling_phase,
    dispersion,
    phase_velocities,
    split_prediction,
    switching_time,
)
from .core import (
    CONSTANTS,
    DeviceParams,
    EdgeStyle,
    FluxBias,
    FrequencyPoint,
    PhysicalConstants,
    ValidationReport,
    dbm_to_watts,
    reference_device,
    validate_device,
    watts_to_dbm,
)
from .errors import *  # noqa: F401,F403
from .fitting import (
    ChiExtraction,
    CouplingPhaseFitter,
    Design,
    DesignSpec,
    FitResult,
    extract_chi,
    fit_lcoup,
    flux_for_lcoup,
    synthesize,
)
from .junctions import (
    EffectiveInductance,
    JunctionSpec,
    SquidModel,
    ambegaokar_baratoff_ic,
    effective_inductance,
    jj_inductance,
    linear_power_limit,
    photon_flux,
    squid_inductance,
)
from .network import FourPortSMatrix, cascade, solve_device, solve_grid, transfer_to_s

__version__ = "0.1.0"
