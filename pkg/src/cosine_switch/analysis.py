"""Flux-frequency sweeps, operating points, isolation and beamsplitter search."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DeviceParams
from .errors import NotBracketed
from .junctions import SquidModel
from .network import DEFAULT_Z0, solve_device, solve_grid

DB_CAP = 120.0
UNDERFLOW = 1e-12


class SwitchState(str, enum.Enum):
    THROUGH = "through"  # 1 -> 2
    CROSS = "cross"  # 1 -> 3


@dataclass(frozen=True)
class SweepGrid:
    frequencies: np.ndarray
    fluxes: np.ndarray
    s: np.ndarray  # (n_freq, n_flux, 4, 4), NaN at holes
    holes: np.ndarray
    z0: np.ndarray
    device: Optional[DeviceParams] = None
    squid: Optional[SquidModel] = None

    @property
    def shape(self):
        return self.holes.shape

    @property
    def s21_mag(self):
        return np.abs(self.s[..., 1, 0])

    @property
    def s31_mag(self):
        return np.abs(self.s[..., 2, 0])


@dataclass(frozen=True)
class MagnitudeMap:
    """|S21| and |S31| over a grid, e.g. re-read from a sweep CSV."""

    frequencies: np.ndarray
    fluxes: np.ndarray
    s21_mag: np.ndarray
    s31_mag: np.ndarray
    holes: np.ndarray


@dataclass(frozen=True)
class OperatingPoint:
    frequency: float
    flux: float
    state: SwitchState
    isolation: float
    bandwidth: float
    insertion_loss: float


@dataclass(frozen=True)
class SplitterPoint:
    frequency: float
    flux: float
    ratio: float
    total_loss: float


def _check_axis(values, name):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if np.any(np.diff(values) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return values


def run_sweep(device, squid, frequencies, fluxes, z0=DEFAULT_Z0, threads=1, chunk=4096) -> SweepGrid:
    """Evaluate the switch on every (frequency, flux) pair.

    Work is split into flux-column chunks; the result does not depend on
    ``threads`` or ``chunk``.
    """
    frequencies = _check_axis(frequencies, "frequencies")
    fluxes = _check_axis(fluxes, "fluxes")
    per_chunk = max(1, chunk // frequencies.size)
    bounds = [(i, min(i + per_chunk, fluxes.size)) for i in range(0, fluxes.size, per_chunk)]

    def work(bound):
        lo, hi = bound
        return solve_grid(device, squid, frequencies, fluxes[lo:hi], z0)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    s = np.concatenate([p[0] for p in parts], axis=1)
    holes = np.concatenate([p[1] for p in parts], axis=1)
    return SweepGrid(
        frequencies=frequencies,
        fluxes=fluxes,
        s=s,
        holes=holes,
        z0=np.broadcast_to(np.asarray(z0, dtype=float), (4,)).copy(),
        device=device,
        squid=squid,
    )


def magnitude_db(mag):
    with np.errstate(divide="ignore"):
        return np.clip(20.0 * np.log10(mag), -DB_CAP, DB_CAP)


def isolation_ratio(grid, return_flags=False):
    """20 log10(|S21| / |S31|) per grid point, capped at +-120 dB.

    Positive values favour the through port, negative the cross port. With
    ``return_flags`` the boolean underflow mask (a magnitude below 1e-12) is
    returned as well.
    """
    s21 = np.asarray(grid.s21_mag, dtype=float)
    s31 = np.asarray(grid.s31_mag, dtype=float)
    flags = (s31 < UNDERFLOW) | (s21 < UNDERFLOW)
    with np.errstate(divide="ignore", invalid="ignore"):
        iso = 20.0 * np.log10(s21 / s31)
    iso = np.where(s31 < UNDERFLOW, DB_CAP, iso)
    iso = np.where((s21 < UNDERFLOW) & ~(s31 < UNDERFLOW), -DB_CAP, iso)
    iso = np.clip(iso, -DB_CAP, DB_CAP)
    iso = np.where(grid.holes, np.nan, iso)
    if return_flags:
        return iso, flags & ~grid.holes
    return iso


def contiguous_run(mask, i):
    lo = hi = i
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    while hi < mask.size - 1 and mask[hi + 1]:
        hi += 1
    return lo, hi


def find_operating_points(grid, threshold_db=20.0):
    """Best through and cross flux for every frequency row of ``grid``.

    A point is kept when its isolation reaches ``threshold_db``. Its bandwidth
    is the contiguous frequency span, at the same flux, over which the
    isolation stays above threshold in the same direction.
    """
    if not threshold_db > 0:
        raise ValueError("threshold_db must be positive")
    iso = isolation_ratio(grid)
    freqs = np.asarray(grid.frequencies)
    fluxes = np.asarray(grid.fluxes)
    s21 = np.asarray(grid.s21_mag)
    s31 = np.asarray(grid.s31_mag)
    points = []
    for i, f in enumerate(freqs):
        row = iso[i]
        if np.all(np.isnan(row)):
            continue
        for state, j in ((SwitchState.THROUGH, int(np.nanargmax(row))), (SwitchState.CROSS, int(np.nanargmin(row)))):
            signed = row[j] if state is SwitchState.THROUGH else -row[j]
            if not signed >= threshold_db:
                continue
            column = iso[:, j] if state is SwitchState.THROUGH else -iso[:, j]
            lo, hi = contiguous_run(np.nan_to_num(column, nan=-np.inf) >= threshold_db, i)
            favoured = s21[i, j] if state is SwitchState.THROUGH else s31[i, j]
            points.append(
                OperatingPoint(
                    frequency=float(f),
                    flux=float(fluxes[j]),
                    state=state,
                    isolation=float(signed),
                    bandwidth=float(freqs[hi] - freqs[lo]),
                    insertion_loss=float(-magnitude_db(favoured)),
                )
            )
    return points


def _log_ratio(s21, s31):
    with np.errstate(divide="ignore"):
        return 2.0 * (np.log(s21) - np.log(s31))


def beamsplitter_point(grid, frequency, target_ratio, branch="auto", xtol=1e-10) -> SplitterPoint:
    """Flux at which |S21/S31|^2 equals ``target_ratio`` at ``frequency``.

    Along the flux axis the ratio first falls (towards the cross state) and
    then rises again. ``branch`` picks the crossing: "rising" is the family
    past the cross state (equal split at coupling phase 3pi/4), "falling" the
    one before it, "auto" prefers rising. The bracket found on the grid is
    refined by bisection on the full solver when the grid carries its model.
    """
    if not target_ratio > 0:
        raise ValueError("target_ratio must be positive")
    freqs = np.asarray(grid.frequencies)
    if not freqs[0] <= frequency <= freqs[-1]:
        raise ValueError(f"frequency {frequency} outside the swept band")
    fluxes = np.asarray(grid.fluxes)
    have_model = getattr(grid, "device", None) is not None and getattr(grid, "squid", None) is not None
    if have_model:
        s, holes = solve_grid(grid.device, grid.squid, [frequency], fluxes, grid.z0)
        s21, s31, holes = np.abs(s[0, :, 1, 0]), np.abs(s[0, :, 2, 0]), holes[0]
    else:
        i = int(np.argmin(np.abs(freqs - frequency)))
        s21, s31, holes = grid.s21_mag[i], grid.s31_mag[i], grid.holes[i]

    g = _log_ratio(s21, s31) - math.log(target_ratio)
    valid = ~holes & ~np.isnan(g)
    rising, falling = [], []
    for j in range(fluxes.size - 1):
        if not (valid[j] and valid[j + 1]):
            continue
        if g[j] < 0 <= g[j + 1]:
            rising.append(j)
        elif g[j] >= 0 > g[j + 1]:
            falling.append(j)
    if branch == "rising":
        candidates = rising
    elif branch == "falling":
        candidates = falling
    else:
        candidates = rising or falling
    if not candidates:
        raise NotBracketed(f"|S21/S31|^2 never crosses {target_ratio} at {frequency:.6g} Hz")
    j = candidates[0]
    lo, hi = float(fluxes[j]), float(fluxes[j + 1])
    g_lo = g[j]

    if have_model:
        def evaluate(phi):
            sm = solve_device(grid.device, grid.squid, frequency, phi, grid.z0)
            return abs(sm.s21), abs(sm.s31)

        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            a, b = evaluate(mid)
            g_mid = _log_ratio(a, b) - math.log(target_ratio)
            if (g_mid < 0) == (g_lo < 0):
                lo, g_lo = mid, g_mid
            else:
                hi = mid
        flux = 0.5 * (lo + hi)
        a, b = evaluate(flux)
    else:
        g_hi = g[j + 1]
        w = g_lo / (g_lo - g_hi)
        flux = lo + w * (hi - lo)
        a = s21[j] + w * (s21[j + 1] - s21[j])
        b = s31[j] + w * (s31[j + 1] - s31[j])
    return SplitterPoint(
        frequency=float(frequency),
        flux=float(flux),
        ratio=float((a / b) ** 2),
        total_loss=float(-10.0 * math.log10(a * a + b * b)),
    )
