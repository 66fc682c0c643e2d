"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Tolerances are pinned here. Reference numbers fall in two groups. Published
device numbers (photon flux, line impedance, switching-time scale) are
regression targets. Everything else is checked against an independent
oracle: the closed-form split law, the nodal-admittance solver in
test_network.py, or exact symmetry identities.
"""
import math
import shutil
import time
from pathlib import Path

import numpy as np
import pytest

from cosine_switch import (
    DesignSpec,
    SwitchState,
    characteristic_impedance,
    dbm_to_watts,
    extract_chi,
    fit_lcoup,
    find_operating_points,
    flux_for_lcoup,
    photon_flux,
    reference_device,
    run_sweep,
    solve_grid,
    split_prediction,
    switching_time,
    synthesize,
)
from cosine_switch.cli import main
from cosine_switch.fitting import coupling_for_phase, required_units, synthetic_magnitudes
from cosine_switch.network import mirror_error, reciprocity_error, solve_with_coupling, unitarity_error

from acceptance_log import record
from conftest import C_LINE, L_LINE

# ---- pinned tolerances
PHOTON_TARGET, PHOTON_RTOL = 2.5e6, 0.02
Z_TARGET, Z_RTOL = 30.0, 0.05
Z_FLUX_RTOL = 0.005
S31_MIN_N24, S21_MAX_N24, S31_TOL_N192 = 0.95, 0.02, 0.005
UNITARITY_TOL, SYMMETRY_TOL, FLUX_TOL = 1e-9, 1e-10, 1e-12
PHASE_TARGET_DEG, PHASE_TOL_DEG = -90.0, 10.0
ISOLATION_MIN_DB, BANDWIDTH_MIN_HZ = 20.0, 0.2e9
WORKING_FREQS = (4.8e9, 5.5e9, 6.0e9, 6.5e9, 7.0e9, 7.3e9)
FIT_RTOL_CLEAN, FIT_RTOL_NOISY, NOISE, SEED = 0.005, 0.03, 0.01, 20240611
N_TOL = 0.5
TAU_JJ = 12e-12
SWEEP_BUDGET_S = 5.0

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _matched(lc):
    return characteristic_impedance(L_LINE, C_LINE, lc)


def test_criterion_01_photon_flux():
    per_us = photon_flux(dbm_to_watts(-80.0), 6e9) * 1e-6
    ok = abs(per_us / PHOTON_TARGET - 1) <= PHOTON_RTOL
    record("1", ok, f"-80 dBm at 6 GHz = {per_us:.4g} photons/us (target {PHOTON_TARGET:.3g} +-2%)")
    assert ok


def test_criterion_02a_line_impedance():
    z = characteristic_impedance(L_LINE, C_LINE, 0.0)
    ok = abs(z - 30.55) < 0.01 and abs(z / Z_TARGET - 1) <= Z_RTOL
    record("2a", ok, f"Z(0.28 nH, 300 fF) = {z:.4g} ohm (target ~30 ohm +-5%)")
    assert ok


def test_criterion_02b_flux_induced_impedance_change(tunable_squid):
    # coupling inductances the fitter/designer produce across the working band
    lcs = [coupling_for_phase(math.pi / 2, 2 * math.pi * f, L_LINE, C_LINE, 24) for f in WORKING_FREQS]
    z = [_matched(lc) for lc in lcs]
    change = (max(z) - min(z)) / min(z)
    ok = change <= Z_FLUX_RTOL
    record("2b", ok, f"Z over L_coup {min(lcs)*1e9:.3g}-{max(lcs)*1e9:.3g} nH varies {change:.2%} (limit 0.5%)")
    assert ok


def test_criterion_03_split_law_against_discrete_solver(design):
    s = solve_with_coupling(design.device, design.coupling_inductance, 6e9, _matched(design.coupling_inductance))
    p31, p21 = abs(s.s31) ** 2, abs(s.s21) ** 2

    device192 = design.device.replace(n_units=192)
    lc192 = coupling_for_phase(math.pi / 2, 2 * math.pi * 6e9, L_LINE, C_LINE, 192)
    s192 = solve_with_coupling(device192, lc192, 6e9, _matched(lc192))
    err192 = abs(abs(s192.s31) ** 2 - 1)

    ok = p31 >= S31_MIN_N24 and p21 <= S21_MAX_N24 and err192 <= S31_TOL_N192
    record("3", ok, f"N=24 |S31|^2={p31:.4f} |S21|^2={p21:.2e}; N=192 ||S31|^2-1|={err192:.2e}")
    assert ok


def test_criterion_04_splitting_landmarks():
    got = [split_prediction(x) for x in (math.pi / 2, 3 * math.pi / 4, math.pi)]
    pairs = [(p.p21, p.p31) for p in got]
    ok = pairs == [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    record("4", ok, f"(p21, p31) at pi/2, 3pi/4, pi = {pairs}")
    assert ok


def test_criterion_05_symmetry_suite(tunable_device, tunable_squid, matched_z0):
    freqs = np.linspace(4e9, 8e9, 100)
    fluxes = np.linspace(0.0, 1.0, 100, endpoint=False)
    t0 = time.perf_counter()
    s, holes = solve_grid(tunable_device, tunable_squid, freqs, fluxes, matched_z0)
    s_shift, _ = solve_grid(tunable_device, tunable_squid, freqs, fluxes + 1.0, matched_z0)
    s_neg, _ = solve_grid(tunable_device, tunable_squid, freqs, -fluxes, matched_z0)
    elapsed = time.perf_counter() - t0
    u, r, m = unitarity_error(s), reciprocity_error(s), mirror_error(s)
    period, even = np.max(np.abs(s - s_shift)), np.max(np.abs(s - s_neg))
    ok = (not holes.any() and u < UNITARITY_TOL and r < SYMMETRY_TOL and m < SYMMETRY_TOL
          and period < FLUX_TOL and even < FLUX_TOL and elapsed < 5.0)
    record("5", ok, f"unitarity {u:.1e}, reciprocity {r:.1e}, mirror {m:.1e}, "
                    f"periodicity {period:.1e}, evenness {even:.1e} in {elapsed:.2f} s")
    assert ok


def test_criterion_06_output_phase_quadrature(design, tunable_device, tunable_squid):
    z0 = _matched(design.coupling_inductance)
    omega = 2 * math.pi * 6e9
    cross = flux_for_lcoup(design.coupling_inductance, tunable_squid, omega)
    # bias range used to move from the through state to the cross state at 6 GHz
    fluxes = np.linspace(0.0, cross, 300)
    s, _ = solve_grid(tunable_device, tunable_squid, [6e9], fluxes, z0)
    diff = np.degrees(np.angle(s[0, :, 2, 0] / s[0, :, 1, 0]))
    spread = np.max(np.abs(diff - PHASE_TARGET_DEG))
    ok = spread <= PHASE_TOL_DEG
    record("6", ok, f"arg(S31)-arg(S21) in [{diff.min():.2f}, {diff.max():.2f}] deg over flux 0..{cross:.4f}")
    assert ok


def test_criterion_07_tunable_cross_points(design, tunable_squid):
    device = design.device.replace(squid_self_capacitance=tunable_squid.self_capacitance)
    freqs = np.arange(4500, 7601, 10) * 1e6
    fluxes = np.arange(0.0, 0.5, 0.0005)
    t0 = time.perf_counter()
    grid = run_sweep(device, tunable_squid, freqs, fluxes, _matched(design.coupling_inductance), threads=4)
    points = find_operating_points(grid, ISOLATION_MIN_DB)
    elapsed = time.perf_counter() - t0
    parts, ok = [], elapsed < 30.0
    for f in WORKING_FREQS:
        hit = [p for p in points if p.state is SwitchState.CROSS and abs(p.frequency - f) < 1.0]
        good = bool(hit) and hit[0].isolation >= ISOLATION_MIN_DB and hit[0].bandwidth >= BANDWIDTH_MIN_HZ
        ok &= good
        parts.append(f"{f/1e9:g}GHz:" + (f"{hit[0].isolation:.0f}dB/{hit[0].bandwidth/1e9:.2f}GHz@{hit[0].flux:.4f}"
                                          if hit else "none"))
    record("7", ok, "cross points " + " ".join(parts) + f" ({elapsed:.1f} s)")
    assert ok


def test_criterion_08_fit_round_trip():
    f = np.linspace(4.8e9, 7.3e9, 51)
    truth, cs = 0.12e-9, 1e-12
    clean = synthetic_magnitudes(f, truth, L_LINE, C_LINE, 24, cs)
    noisy = synthetic_magnitudes(f, truth, L_LINE, C_LINE, 24, cs, noise=NOISE, rng=SEED)
    fit_clean = fit_lcoup(extract_chi(f, *clean), L_LINE, C_LINE, 24, cs).coupling_inductance
    fit_noisy = fit_lcoup(extract_chi(f, *noisy), L_LINE, C_LINE, 24, cs).coupling_inductance
    e1, e2 = abs(fit_clean / truth - 1), abs(fit_noisy / truth - 1)
    ok = e1 <= FIT_RTOL_CLEAN and e2 <= FIT_RTOL_NOISY
    record("8", ok, f"L_coup error noise-free {e1:.1e}, 1% noise (seed {SEED}) {e2:.2%}")
    assert ok


def test_criterion_09_design_round_trip():
    d = synthesize(DesignSpec(6e9, math.sqrt(L_LINE / C_LINE), chi_n=math.pi / 2, n_units=24, line_inductance=L_LINE))
    s = solve_with_coupling(d.device, d.coupling_inductance, 6e9, _matched(d.coupling_inductance))
    isolation = 20 * math.log10(abs(s.s31) / abs(s.s21))
    n_real, _ = required_units(6e9, d.device.line_inductance, d.device.line_capacitance, d.coupling_inductance)
    ok = isolation >= ISOLATION_MIN_DB and abs(n_real - 24) <= N_TOL
    record("9", ok, f"forward isolation {isolation:.1f} dB, required_units -> {n_real:.6f}")
    assert ok


def test_criterion_10_switching_time(design):
    lc = design.coupling_inductance
    c_squid = TAU_JJ**2 / lc  # chosen so that sqrt(L* C) is exactly 12 ps
    t = switching_time(reference_device(), lc, c_squid)
    order = round(math.log10(t.total))
    ok = abs(t.tau_jj / TAU_JJ - 1) < 1e-12 and order == -10
    record("10", ok, f"tau_JJ = {t.tau_jj*1e12:.3f} ps, tau_total = {t.total:.3g} s (order 1e{order})")
    assert ok


def _cli_bytes(tmp_path, threads, tag):
    cfg = tmp_path / "switch.ini"
    shutil.copy(CONFIGS / "switch.ini", cfg)
    outs = {}
    for verb, name in (("simulate", f"{tag}.s4p"), ("sweep", f"{tag}.csv")):
        path = tmp_path / name
        assert main([verb, "--config", str(cfg), "--out", str(path), "--threads", str(threads)]) == 0
        outs[verb] = path.read_bytes()
    return outs


def test_criterion_11_determinism(tmp_path, capsys):
    runs = [_cli_bytes(tmp_path, 1, "a"), _cli_bytes(tmp_path, 1, "b"), _cli_bytes(tmp_path, 4, "c"),
            _cli_bytes(tmp_path, 4, "d")]
    capsys.readouterr()
    ok = all(r == runs[0] for r in runs[1:])
    record("11", ok, f"simulate/sweep outputs identical over 2 runs x threads {{1, 4}} "
                     f"({len(runs[0]['sweep'])} CSV bytes)")
    assert ok


def test_criterion_12_performance(tunable_device, tunable_squid):
    freqs, fluxes = np.linspace(4e9, 8e9, 200), np.linspace(0, 0.5, 200, endpoint=False)
    run_sweep(tunable_device, tunable_squid, freqs[:2], fluxes[:2])  # warm-up
    t0 = time.perf_counter()
    run_sweep(tunable_device, tunable_squid, freqs, fluxes, 36.0)
    elapsed = time.perf_counter() - t0
    ok = elapsed < SWEEP_BUDGET_S
    record("12", ok, f"200 x 200 sweep at N=24 in {elapsed:.2f} s (budget {SWEEP_BUDGET_S:g} s)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
