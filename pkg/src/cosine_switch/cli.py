"""Command-line front end: ``cosine-switch {simulate,sweep,fit,design,points}``."""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .analysis import contiguous_run, find_operating_points, isolation_ratio, magnitude_db, run_sweep
from .continuum import characteristic_impedance
from .errors import ConfigError, SwitchError
from .fitting import DesignSpec, coupling_for_phase, extract_chi, fit_lcoup, flux_for_lcoup, synthesize
from .network import solve_device

THREADS_ENV = "COSINE_SWITCH_THREADS"


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("--threads must be >= 1")
    return n


def _write(path, text, default_name):
    path = Path(path or default_name)
    path.write_text(text)
    return path


def _row(values):
    return "  ".join(f"{v:>12}" for v in values)


def cmd_simulate(cfg, args, out):
    device = sio.device_from_config(cfg)
    squid = sio.squid_from_config(cfg)
    freqs, z0 = sio.frequency_axis(cfg)
    if args.z0 is not None:
        z0 = args.z0
    sim = sio._section(cfg, "simulate")
    flux = sio.parse_number(sio._require(sim, "flux", "simulate"), 0, "[simulate] flux")
    grid = run_sweep(device, squid, freqs, [flux], z0, threads=_threads(args))
    s = grid.s[:, 0]
    text = sio.write_touchstone(
        freqs, s, z0, comments=[f"coupled-line switch, flux = {sio.fmt(flux)} flux quanta", f"n_units = {device.n_units}"]
    )
    path = _write(args.out, text, "simulate.s4p")
    print(f"wrote {path} ({freqs.size} frequency points)", file=out)
    print(_row(["f_GHz", "|S21|_dB", "|S31|_dB", "|S11|_dB", "|S41|_dB"]), file=out)
    for k in sorted({0, freqs.size // 2, freqs.size - 1}):
        db = [magnitude_db(abs(s[k, i, 0])) for i in (1, 2, 0, 3)]
        print(_row([sio.fmt(freqs[k] / 1e9)] + [f"{v:.3f}" for v in db]), file=out)


def cmd_sweep(cfg, args, out):
    device = sio.device_from_config(cfg)
    squid = sio.squid_from_config(cfg)
    freqs, z0 = sio.frequency_axis(cfg)
    fluxes = sio.flux_axis(cfg)
    if args.z0 is not None:
        z0 = args.z0
    grid = run_sweep(device, squid, freqs, fluxes, z0, threads=_threads(args))
    path = _write(args.out, sio.sweep_to_csv(grid), "sweep.csv")
    print(f"wrote {path} ({freqs.size} x {fluxes.size} points, {int(grid.holes.sum())} holes)", file=out)


def cmd_points(cfg, args, out):
    if not args.data:
        raise ConfigError("points needs --data <sweep.csv>")
    grid = sio.sweep_from_csv(Path(args.data).read_text())
    points = find_operating_points(grid, args.threshold)
    header = ["f_Hz", "flux", "state", "isolation_dB", "bandwidth_Hz", "insertion_loss_dB"]
    rows = [[p.frequency, p.flux, p.state.value, p.isolation, p.bandwidth, p.insertion_loss] for p in points]
    text = sio.table_to_csv(header, rows)
    if args.out:
        _write(args.out, text, "points.csv")
    out.write(text)


def cmd_fit(cfg, args, out):
    device = sio.device_from_config(cfg)
    sec = cfg["fit"] if cfg.has_section("fit") else {}
    data_path = args.data or (sec.get("data") if sec else None)
    if not data_path:
        raise ConfigError("fit needs measured data: --data <csv> or 'data' in [fit]")
    data_path = Path(data_path)
    if not data_path.is_absolute() and args.data is None and args.config:
        data_path = Path(args.config).parent / data_path
    limits = sio._numbers(cfg, "fit", sio.FIT_KEYS, []) if cfg.has_section("fit") else {}
    groups = sio.fit_input_from_csv(data_path.read_text())

    table, curves = [], []
    for flux, (f, s21, s31) in groups.items():
        keep = np.ones(f.shape, dtype=bool)
        if "f_min_GHz" in limits:
            keep &= f >= limits["f_min_GHz"]
        if "f_max_GHz" in limits:
            keep &= f <= limits["f_max_GHz"]
        extraction = extract_chi(f[keep], s21[keep], s31[keep])
        result = fit_lcoup(
            extraction, device.line_inductance, device.line_capacitance, device.n_units,
            device.squid_self_capacitance, (0.0, limits.get("lcoup_max_nH")),
        )
        centre = result.coupling_inductance_eff[result.frequencies.size // 2]
        table.append([flux, result.coupling_inductance * 1e9, centre * 1e9, result.residual,
                      result.covariance * 1e18, int(extraction.ambiguous_start)])
        for k, fk in enumerate(result.frequencies):
            curves.append([flux, fk, extraction.chi_n[k] / math.pi, result.chi_n_fit[k] / math.pi,
                           result.coupling_inductance_eff[k] * 1e9])
    header = ["flux", "L_coup_nH", "L_coup_star_center_nH", "residual_rad", "covariance_nH2", "ambiguous_start"]
    text = sio.table_to_csv(header, table)
    path = _write(args.out, text, "fit.csv")
    curves_path = path.with_name(path.stem + "_curves.csv")
    curves_path.write_text(sio.table_to_csv(
        ["flux", "f_Hz", "chi_n_over_pi_data", "chi_n_over_pi_fit", "L_coup_star_nH"], curves))
    out.write(text)
    print(f"wrote {path} and {curves_path}", file=out)


def _design_spec(cfg):
    sec = sio._section(cfg, "design")
    for key in sio.DESIGN_REQUIRED:
        sio._require(sec, key, "design")
    vals = sio._numbers(cfg, "design", {k: v for k, v in sio.DESIGN_KEYS.items() if k != "table_f_GHz"}, [],
                        integer_keys={"n_units"})
    kwargs = dict(frequency=vals["f_target_GHz"], impedance=vals["z_target_ohm"])
    if "chi_n_over_pi" in vals:
        kwargs["chi_n"] = vals["chi_n_over_pi"] * math.pi
    if "n_units" in vals:
        kwargs["n_units"] = vals["n_units"]
    if "line_inductance_nH" in vals:
        kwargs["line_inductance"] = vals["line_inductance_nH"]
    kwargs["inductance_bounds"] = (vals.get("line_inductance_min_nH"), vals.get("line_inductance_max_nH"))
    if "coupling_ratio" in vals:
        kwargs["coupling_ratio"] = vals["coupling_ratio"]
    if "unit_pitch_um" in vals:
        kwargs["unit_pitch"] = vals["unit_pitch_um"]
    table = None
    if "table_f_GHz" in sec:
        table = [sio.parse_number(t, 9, "[design] table_f_GHz") for t in sec["table_f_GHz"].split(",") if t.strip()]
    return DesignSpec(**kwargs), table


def cmd_design(cfg, args, out):
    spec, table = _design_spec(cfg)
    squid = sio.squid_from_config(cfg)
    design = synthesize(spec)
    device = design.device.replace(squid_self_capacitance=squid.self_capacitance)
    lc = design.coupling_inductance
    omega = 2.0 * math.pi * spec.frequency
    flux = flux_for_lcoup(lc, squid, omega)
    z0 = args.z0 if args.z0 is not None else characteristic_impedance(device.line_inductance, device.line_capacitance, lc)

    sm = solve_device(device, squid, spec.frequency, flux, z0)
    isolation = 20.0 * math.log10(abs(sm.s21) / abs(sm.s31))
    band = np.linspace(0.7 * spec.frequency, 1.3 * spec.frequency, 601)
    grid = run_sweep(device, squid, band, [flux], z0, threads=_threads(args))
    # span around the target over which the cross port wins by 20 dB
    crossing = np.nan_to_num(-isolation_ratio(grid)[:, 0], nan=-np.inf) >= 20.0
    centre = int(np.argmin(np.abs(band - spec.frequency)))
    lo, hi = contiguous_run(crossing, centre)
    bandwidth = band[hi] - band[lo] if crossing[centre] else 0.0

    print(sio.device_to_config(device), file=out)
    print(f"L_coup_nH = {sio.fmt(lc * 1e9)}", file=out)
    print(f"flux = {sio.fmt(flux)}", file=out)
    print(f"z0_ohm = {sio.fmt(z0)}", file=out)
    print(f"isolation_dB = {sio.fmt(isolation)}", file=out)
    print(f"bandwidth_20dB_Hz = {sio.fmt(bandwidth)}", file=out)

    rows = []
    for f in table or [spec.frequency * r for r in (0.8, 0.9, 1.0, 1.1, 1.2)]:
        need = coupling_for_phase(spec.chi_n, 2.0 * math.pi * f, device.line_inductance, device.line_capacitance, device.n_units)
        try:
            phi = sio.fmt(flux_for_lcoup(need, squid, 2.0 * math.pi * f))
        except SwitchError:
            phi = "unreachable"
        rows.append([f, need * 1e9, phi])
    text = sio.table_to_csv(["f_Hz", "L_coup_star_nH", "flux"], rows)
    out.write(text)
    if args.out:
        _write(args.out, sio.device_to_config(device) + "\n" + "".join(
            f"# {line}\n" for line in text.splitlines()), "design.ini")


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "design": cmd_design,
    "points": cmd_points,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cosine-switch", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="INI config file with unit-suffixed keys")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--threads", type=int, help=f"worker threads (fallback: ${THREADS_ENV})")
    parser.add_argument("--z0", type=float, help="override port reference impedance (ohm)")
    parser.add_argument("--data", help="input CSV for fit (measured magnitudes) or points (sweep table)")
    parser.add_argument("--threshold", type=float, default=20.0, help="isolation threshold in dB for points")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.z0 is not None and not args.z0 > 0:
            raise ConfigError("--z0 must be positive")
        if args.command == "points":
            cfg = sio.parse_config("")
        else:
            if not args.config:
                raise ConfigError(f"{args.command} needs --config <path>")
            cfg = sio.load_config(args.config)
        COMMANDS[args.command](cfg, args, out)
    except (SwitchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2 if isinstance(exc, ConfigError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
