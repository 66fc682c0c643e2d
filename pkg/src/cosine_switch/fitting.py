"""Inverse problems: coupling-phase extraction, coupling-inductance fits and
device synthesis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import DeviceParams, EdgeStyle
from .errors import DegenerateInput, Infeasible, NoBracket, NonPositiveInput, OutOfRange
from .junctions import SquidModel, squid_inverse_inductance

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ChiExtraction:
    frequencies: np.ndarray
    chi_n: np.ndarray
    branch_offsets: np.ndarray
    ambiguous_start: bool = False


@dataclass(frozen=True)
class FitResult:
    coupling_inductance: float  # bare, H
    coupling_inductance_eff: np.ndarray  # per frequency, H
    frequencies: np.ndarray
    chi_n_fit: np.ndarray
    residual: float  # RMS, rad
    covariance: float  # H^2


def _fold_value(j, raw):
    return j * HALF_PI + np.where(j % 2 == 0, raw, HALF_PI - raw)


def extract_chi(frequencies, s21_mag, s31_mag, ambiguity_margin=0.05) -> ChiExtraction:
    """Coupling phase chi*N from output magnitudes via the cos^2/sin^2 split.

    The principal value atan2(|S31|, |S21|) lies in [0, pi/2]; it is unfolded
    along frequency assuming a smooth curve that starts in [0, pi/2] at the
    lowest frequency. Branch offsets count the pi/2 folds crossed.
    """
    f = np.asarray(frequencies, dtype=float)
    a = np.asarray(s21_mag, dtype=float)
    b = np.asarray(s31_mag, dtype=float)
    if not (f.shape == a.shape == b.shape) or f.ndim != 1 or f.size == 0:
        raise ValueError("frequencies and magnitudes must be equal-length 1-D arrays")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("magnitudes must be non-negative")
    if np.any((a < 1e-12) & (b < 1e-12)):
        raise DegenerateInput("both |S21| and |S31| vanish at some frequency")
    order = np.argsort(f, kind="stable")
    f, a, b = f[order], a[order], b[order]

    total = np.sqrt(a * a + b * b)
    raw = np.arctan2(b / total, a / total)

    branches = np.zeros(f.size, dtype=int)
    chi = np.empty(f.size)
    chi[0] = raw[0]
    for i in range(1, f.size):
        expected = chi[i - 1] if i == 1 else 2.0 * chi[i - 1] - chi[i - 2]
        j_prev = branches[i - 1]
        options = np.array([j for j in (j_prev - 1, j_prev, j_prev + 1) if j >= 0])
        values = _fold_value(options, raw[i])
        best = int(np.argmin(np.abs(values - expected)))
        branches[i] = options[best]
        chi[i] = values[best]
    return ChiExtraction(
        frequencies=f,
        chi_n=chi,
        branch_offsets=branches,
        ambiguous_start=bool(raw[0] > HALF_PI - ambiguity_margin),
    )


def _effective_coupling(lc, omega, squid_capacitance):
    """Bare -> capacitance-corrected coupling inductance; NaN above self-resonance."""
    factor = 1.0 - omega * omega * lc * squid_capacitance
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(factor > 0, lc / factor, np.nan)


def model_chi_n(frequencies, coupling_inductance, line_inductance, line_capacitance, n_units, squid_capacitance=0.0):
    """chi*N predicted for a bare coupling inductance, with the SQUID capacitance correction."""
    omega = 2.0 * np.pi * np.asarray(frequencies, dtype=float)
    lc_eff = _effective_coupling(coupling_inductance, omega, squid_capacitance)
    excess = np.sqrt(1.0 + 2.0 * lc_eff / line_inductance) - 1.0
    return 0.5 * excess * math.sqrt(line_inductance * line_capacitance) * omega * n_units


def _model_slope(frequencies, lc, line_inductance, line_capacitance, n_units, squid_capacitance):
    omega = 2.0 * np.pi * np.asarray(frequencies, dtype=float)
    factor = 1.0 - omega * omega * lc * squid_capacitance
    lc_eff = lc / factor
    d_eff = 1.0 / (factor * factor)
    root = np.sqrt(1.0 + 2.0 * lc_eff / line_inductance)
    return 0.5 * math.sqrt(line_inductance * line_capacitance) * omega * n_units * d_eff / (line_inductance * root)


def fit_lcoup(
    extraction: ChiExtraction,
    line_inductance: float,
    line_capacitance: float,
    n_units: int,
    squid_capacitance: float = 0.0,
    bounds=(0.0, None),
) -> FitResult:
    """Least-squares bare coupling inductance reproducing the extracted chi*N.

    Uniform weights over the supplied frequencies. The upper bound defaults
    to 5 L and is widened twice (x4) if the optimum sits on it; the bound is
    always kept below the SQUID self-resonance of the highest frequency.
    """
    f = np.asarray(extraction.frequencies, dtype=float)
    data = np.asarray(extraction.chi_n, dtype=float)
    if f.size < 3:
        raise ValueError("need at least 3 frequency points")
    if not (line_inductance > 0 and line_capacitance > 0 and n_units > 0):
        raise NonPositiveInput("L, C and N must be positive")

    args = (line_inductance, line_capacitance, n_units, squid_capacitance)
    scale = line_inductance
    lo = float(bounds[0] or 0.0)
    hi = float(bounds[1]) if bounds[1] is not None else 5.0 * line_inductance
    ceiling = math.inf
    if squid_capacitance > 0:
        omega_max = 2.0 * math.pi * f.max()
        ceiling = 0.999 / (omega_max * omega_max * squid_capacitance)
    hi = min(hi, ceiling)

    def sse(lc):
        r = model_chi_n(f, lc, *args) - data
        return float(np.dot(r, r)) if np.all(np.isfinite(r)) else math.inf

    for attempt in range(3):
        res = minimize_scalar(
            lambda x: sse(x * scale), bounds=(lo / scale, hi / scale), method="bounded",
            options={"xatol": 1e-12},
        )
        lc = float(res.x) * scale
        if hi - lc > 1e-6 * (hi - lo) or attempt == 2 or hi >= ceiling:
            break
        hi = min(hi * 4.0, ceiling)
    if hi - lc <= 1e-6 * (hi - lo):
        raise NoBracket(f"residual decreases up to the search bound {hi:.6g} H", interval=(lo, hi))
    if sse(lo) <= sse(lc):
        lc = lo

    # Gauss-Newton polish: Brent stops near sqrt(eps) in the parameter
    for _ in range(30):
        if lc <= 0:
            break
        r = model_chi_n(f, lc, *args) - data
        jac = _model_slope(f, lc, *args)
        step = float(np.dot(r, jac) / np.dot(jac, jac))
        trial = min(max(lc - step, lo), hi)
        if not sse(trial) < sse(lc):
            break
        lc = trial

    r = model_chi_n(f, lc, *args) - data
    n = f.size
    if lc > 0:
        jac = _model_slope(f, lc, *args)
        covariance = float(np.dot(r, r) / (n - 1) / np.dot(jac, jac))
    else:
        covariance = 0.0
    omega = 2.0 * np.pi * f
    return FitResult(
        coupling_inductance=lc,
        coupling_inductance_eff=_effective_coupling(lc, omega, squid_capacitance),
        frequencies=f,
        chi_n_fit=model_chi_n(f, lc, *args),
        residual=float(np.sqrt(np.mean(r * r))),
        covariance=covariance,
    )


@dataclass(frozen=True)
class DesignSpec:
    frequency: float
    impedance: float
    chi_n: float = HALF_PI
    n_units: Optional[int] = None
    line_inductance: Optional[float] = None
    inductance_bounds: tuple = (None, None)
    coupling_bounds: tuple = (None, None)
    coupling_ratio: float = 0.45  # L_coup / L used to size N when N is free
    unit_pitch: float = 34e-6
    edge_style: EdgeStyle = EdgeStyle.SYMMETRIZED


@dataclass(frozen=True)
class Design:
    device: DeviceParams
    coupling_inductance: float
    spec: DesignSpec = field(repr=False)


def coupling_for_phase(chi_n, omega, inductance, capacitance, n_units):
    """Coupling inductance that accumulates ``chi_n`` over ``n_units`` cells at ``omega``."""
    return 0.5 * inductance * ((1.0 + 2.0 * chi_n / (math.sqrt(inductance * capacitance) * omega * n_units)) ** 2 - 1.0)


def required_units(frequency, inductance, capacitance, coupling_inductance, chi_n=HALF_PI):
    """(real, ceil) number of units needed to accumulate ``chi_n``."""
    if not (frequency > 0 and inductance > 0 and capacitance > 0 and coupling_inductance > 0 and chi_n > 0):
        raise NonPositiveInput("all inputs must be positive")
    omega = 2.0 * math.pi * frequency
    excess = math.sqrt(1.0 + 2.0 * coupling_inductance / inductance) - 1.0
    n = 2.0 * chi_n / (excess * math.sqrt(inductance * capacitance) * omega)
    return n, int(math.ceil(n - 1e-9))


def synthesize(spec: DesignSpec) -> Design:
    """Line inductance, capacitance, N and coupling inductance meeting an
    impedance and coupling-phase target at one frequency."""
    if not (spec.frequency > 0 and spec.impedance > 0):
        raise Infeasible("target frequency and impedance must be positive")
    if not 0 <= spec.chi_n <= math.pi:
        raise Infeasible(f"target coupling phase {spec.chi_n} outside [0, pi]")
    l_min, l_max = spec.inductance_bounds
    if spec.line_inductance is not None:
        inductance = spec.line_inductance
    elif l_max is not None:
        inductance = l_max
    elif l_min is not None:
        inductance = l_min
    else:
        raise Infeasible("line_inductance or an inductance bound is required")
    if (l_min is not None and inductance < l_min) or (l_max is not None and inductance > l_max) or inductance <= 0:
        raise Infeasible(f"line inductance {inductance:.6g} H violates bounds {spec.inductance_bounds}")
    capacitance = inductance / spec.impedance**2
    omega = 2.0 * math.pi * spec.frequency

    n_units = spec.n_units
    if n_units is None:
        if spec.chi_n == 0:
            n_units = 1
        else:
            _, n_units = required_units(
                spec.frequency, inductance, capacitance, spec.coupling_ratio * inductance, spec.chi_n
            )
    if n_units < 1:
        raise Infeasible("n_units must be >= 1")
    coupling = 0.0 if spec.chi_n == 0 else coupling_for_phase(spec.chi_n, omega, inductance, capacitance, n_units)
    c_min, c_max = spec.coupling_bounds
    if coupling < 0 or (c_min is not None and coupling < c_min) or (c_max is not None and coupling > c_max):
        raise Infeasible(f"required coupling inductance {coupling:.6g} H violates bounds {spec.coupling_bounds}")
    device = DeviceParams(
        line_inductance=inductance,
        line_capacitance=capacitance,
        n_units=int(n_units),
        unit_pitch=spec.unit_pitch,
        edge_style=spec.edge_style,
    )
    return Design(device=device, coupling_inductance=coupling, spec=spec)


def flux_for_lcoup(target, squid: SquidModel, omega, xtol=1e-9) -> float:
    """Flux in [0, 0.5] at which the capacitance-corrected SQUID inductance equals ``target``."""
    if not target > 0:
        raise NonPositiveInput("target inductance must be positive")
    w2c = omega * omega * squid.self_capacitance

    def g(phi):
        return float(squid_inverse_inductance(squid, phi)) - w2c

    g0, g_half = g(0.0), g(0.5)
    if g0 <= 0:
        raise OutOfRange("SQUID is above self-resonance at zero flux", (math.nan, math.nan))
    low = 1.0 / g0
    high = math.inf if g_half <= 0 else 1.0 / g_half
    goal = 1.0 / target
    if abs(target - low) <= 1e-12 * low:
        return 0.0
    if target < low or target > high:
        raise OutOfRange(f"target {target:.6g} H not reachable", (low, high))
    a, b = 0.0, 0.5
    while b - a > xtol:
        mid = 0.5 * (a + b)
        if g(mid) > goal:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


class CouplingPhaseFitter(RegressorMixin, BaseEstimator):
    """Estimator wrapper around :func:`fit_lcoup`.

    ``X`` holds frequencies in Hz (shape (n,) or (n, 1)) and ``y`` the
    extracted coupling phase chi*N. After fitting, ``coupling_inductance_``
    is the bare coupling inductance and ``predict`` returns chi*N.
    """

    def __init__(
        self,
        line_inductance=0.28e-9,
        line_capacitance=300e-15,
        n_units=24,
        squid_capacitance=0.0,
        lower_bound=0.0,
        upper_bound=None,
    ):
        self.line_inductance = line_inductance
        self.line_capacitance = line_capacitance
        self.n_units = n_units
        self.squid_capacitance = squid_capacitance
        self.lower_bound = lower_bound
        self.upper_bound = upper_bound

    def _frequencies(self, X):
        X = check_array(np.asarray(X, dtype=float).reshape(-1, 1) if np.ndim(X) == 1 else X)
        if X.shape[1] != 1:
            raise ValueError("X must hold a single frequency column")
        return X[:, 0]

    def fit(self, X, y):
        f = self._frequencies(X)
        f, y = check_X_y(f.reshape(-1, 1), y, y_numeric=True)
        extraction = ChiExtraction(frequencies=f[:, 0], chi_n=np.asarray(y, dtype=float),
                                   branch_offsets=np.zeros(len(y), dtype=int))
        result = fit_lcoup(
            extraction, self.line_inductance, self.line_capacitance, self.n_units,
            self.squid_capacitance, (self.lower_bound, self.upper_bound),
        )
        self.coupling_inductance_ = result.coupling_inductance
        self.residual_ = result.residual
        self.covariance_ = result.covariance
        self.n_features_in_ = 1
        return self

    def fit_magnitudes(self, X, s21_mag, s31_mag):
        """Extract chi*N from |S21|, |S31| and fit it."""
        f = self._frequencies(X)
        extraction = extract_chi(f, s21_mag, s31_mag)
        self.extraction_ = extraction
        return self.fit(extraction.frequencies, extraction.chi_n)

    def predict(self, X):
        check_is_fitted(self, "coupling_inductance_")
        f = self._frequencies(X)
        return model_chi_n(
            f, self.coupling_inductance_, self.line_inductance, self.line_capacitance,
            self.n_units, self.squid_capacitance,
        )

    def effective_coupling(self, X):
        check_is_fitted(self, "coupling_inductance_")
        omega = 2.0 * np.pi * self._frequencies(X)
        return _effective_coupling(self.coupling_inductance_, omega, self.squid_capacitance)


def synthetic_magnitudes(frequencies, coupling_inductance, line_inductance, line_capacitance, n_units,
                         squid_capacitance=0.0, noise=0.0, rng=None):
    """|S21|, |S31| of the lossless continuum switch, optionally with
    multiplicative Gaussian noise of relative size ``noise``."""
    chi = model_chi_n(frequencies, coupling_inductance, line_inductance, line_capacitance, n_units, squid_capacitance)
    s21 = np.abs(np.cos(chi))
    s31 = np.abs(np.sin(chi))
    if noise:
        rng = np.random.default_rng(rng)
        s21 = s21 * (1.0 + noise * rng.standard_normal(s21.shape))
        s31 = s31 * (1.0 + noise * rng.standard_normal(s31.shape))
    return np.abs(s21), np.abs(s31)


__all__ = [
    "ChiExtraction", "FitResult", "DesignSpec", "Design", "CouplingPhaseFitter",
    "extract_chi", "fit_lcoup", "model_chi_n", "synthesize", "required_units",
    "flux_for_lcoup", "synthetic_magnitudes", "coupling_for_phase",
]
