"""Command-line front end.

    biphoton spectrum  [--config F] [--model M] [--temperature T] [--out DIR]
    biphoton hom-map   [--config F] [--model M] [--out DIR]
    biphoton sweep     [--config F] [--model M[,M...]] [--wd-list ...] [--wp-list ...]
    biphoton reconstruct MAP.csv [--b-over-F X] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import _kernels, io
from .analysis import MODELS, compute_spectrum, l2_distance, sweep_widths, to_temporal, tuning_ratio, width_report
from .config import ConfigError, RunConfig, load_config
from .hom import (
    CalibrationError,
    CoverageWarning,
    NyquistError,
    hom_map,
    recover_spectral_intensity,
    walkoff_compensation,
)
from .physics import EvanescentError, PolingError
from .projection import ConvergenceError, ZeroNormError, project_spectrum
from .toymodel import toy_constants, toy_wavefunction

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
NUMERIC_ERRORS = (ConvergenceError, ZeroNormError, NyquistError, PolingError, EvanescentError, FloatingPointError)

# default sweep: 25 log-spaced detection waists, 2..60 um
DEFAULT_WD_UM = tuple(float(x) for x in np.geomspace(2.0, 60.0, 25))


def _float_list(text):
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("waist list is empty")
    if min(vals) <= 0:
        raise argparse.ArgumentTypeError("waists must be positive")
    return vals


def _model_list(text):
    vals = [m for m in text.split(",") if m]
    bad = [m for m in vals if m not in MODELS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"unknown model(s) {bad}; choose from {', '.join(MODELS)}")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--threads", type=int, default=None, help="numba worker threads")

    ap = argparse.ArgumentParser(prog="biphoton", description="Type-II SPDC biphoton spectra and HOM maps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="spectral and temporal wavefunction")
    p.add_argument("--model", choices=MODELS, default="toy")
    p.add_argument("--temperature", type=float, default=None, help="crystal temperature [C]")

    p = sub.add_parser("hom-map", parents=[common], help="coincidence map over delay and temperature")
    p.add_argument("--model", choices=MODELS, default="toy")

    p = sub.add_parser("sweep", parents=[common], help="widths versus beam waists")
    p.add_argument("--model", type=_model_list, default=["toy", "numeric-approx"], help="comma-separated models")
    p.add_argument("--wd-list", type=_float_list, default=list(DEFAULT_WD_UM), help="detection waists [um]")
    p.add_argument("--wp-list", type=_float_list, default=None, help="pump waists [um]")
    p.add_argument("--temperature", type=float, default=None)

    p = sub.add_parser("reconstruct", parents=[common], help="recover |Phi|^2 from a HOM map CSV")
    p.add_argument("map_file", type=Path)
    p.add_argument("--b-over-F", dest="b_over_F", type=float, default=None, help="calibration b/F [rad/(s K)]")
    p.add_argument("--t0", type=float, default=None, help="degeneracy temperature [C]")
    return ap


def _provider(model, cfg, disp, grid):
    if model == "toy":
        k = toy_constants(cfg.pump, cfg.detection, cfg.crystal, disp)
        return lambda T: toy_wavefunction(grid, k, T, disp)
    if model == "numeric-approx":
        return lambda T: project_spectrum(grid, T, cfg.pump, cfg.detection, cfg.crystal, disp, cfg.quadrature)
    ex = disp.with_mode("exact") if disp.mode != "exact" else disp
    return lambda T: project_spectrum(grid, T, cfg.pump, cfg.detection, cfg.crystal, ex, cfg.quadrature,
                                      integrand="exact")


def cmd_spectrum(args, cfg):
    disp = cfg.dispersion()
    T = args.temperature if args.temperature is not None else cfg.raw["scan"]["temperature_C"]
    T = disp.T0 if T is None else T
    grid = cfg.omega_grid(disp)
    spec = compute_spectrum(args.model, cfg.pump, cfg.detection, cfg.crystal, disp, T, grid, cfg.quadrature)
    temporal = to_temporal(spec)
    report = width_report(spec, cfg.pump, cfg.detection, args.model)
    out = args.out
    io.write_spectrum_csv(out / f"spectrum_{args.model}.csv", spec, cfg.pump.wavelength)
    io.write_temporal_csv(out / f"temporal_{args.model}.csv", temporal)
    summary = {"config": cfg.to_dict(), "model": args.model, "temperature_C": T, "widths": io.report_dict(report)}
    footer = None
    if args.model != "toy":
        toy = compute_spectrum("toy", cfg.pump, cfg.detection, cfg.crystal, disp, T, grid)
        summary["l2_vs_toy"] = l2_distance(spec, toy)
        footer = f"L2 distance {args.model} vs toy: {summary['l2_vs_toy']:.3e}"
    io.write_json(out / f"widths_{args.model}.json", summary)
    print(f"mean lambda {report.mean_lambda * 1e9:.4f} nm  delta lambda {report.delta_lambda * 1e9:.4f} nm  "
          f"delta t {report.delta_t * 1e15:.1f} fs")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if footer:
        print(footer)
    return EXIT_OK


def cmd_hom_map(args, cfg):
    disp = cfg.dispersion()
    grid = cfg.omega_grid(disp)
    offset = walkoff_compensation(cfg.crystal, disp)
    meta = {
        "config": cfg.to_dict(),
        "model": args.model,
        "b_over_F": disp.thermal_detuning_b / disp.F,
        "T0": disp.T0,
        "delay_offset_s": offset,
    }
    hmap = hom_map(_provider(args.model, cfg, disp, grid), cfg.tau_grid(), cfg.temperature_grid(), offset, meta)
    path = args.out / "hom_map.csv"
    io.write_hom_csv(path, hmap)
    print(f"{hmap.shape[0]} x {hmap.shape[1]} map -> {path}  (min C = {hmap.values.min():.4f})")
    return EXIT_OK


def cmd_sweep(args, cfg):
    disp = cfg.dispersion()
    wd = [w * 1e-6 for w in args.wd_list]
    wp = [w * 1e-6 for w in (args.wp_list or [cfg.pump.waist * 1e6])]
    n = cfg.raw["scan"]["omega_points"] or 2048
    reports = []
    for model in args.model:
        reports += sweep_widths(wd, wp, model, cfg.crystal, disp, cfg.pump.wavelength, args.temperature,
                                cfg.quadrature, n)
    path = args.out / "widths.csv"
    io.write_width_csv(path, reports)
    io.write_json(path.with_suffix(".json"), {"config": cfg.to_dict(), "models": args.model,
                                              "w_d_um": args.wd_list, "w_p_um": [w * 1e6 for w in wp]})
    failed = [r for r in reports if not r.ok]
    for r in failed:
        print(f"point failed: {r.model} w_p={r.w_p * 1e6:g} um w_d={r.w_d * 1e6:g} um: {r.error}", file=sys.stderr)
    for model in args.model:
        sel = [r for r in reports if r.model == model]
        ratio = tuning_ratio(sel)
        verdict = "met" if ratio >= 5 else "not met"
        print(f"{model}: delta lambda tuning max/min = {ratio:.2f} (factor of five {verdict}); "
              f"delta t max/min = {tuning_ratio(sel, 'delta_t'):.2f}")
    return EXIT_NUMERIC if failed and len(failed) == len(reports) else EXIT_OK


def cmd_reconstruct(args, cfg):
    hmap = io.read_hom_csv(args.map_file)
    b_over_F = args.b_over_F if args.b_over_F is not None else hmap.metadata.get("b_over_F")
    if b_over_F is None:
        raise ConfigError(
            f"{args.map_file}: no metadata sidecar with b_over_F; pass --b-over-F (rad/(s K)) to calibrate "
            "the temperature axis"
        )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CoverageWarning)
        rec = recover_spectral_intensity(hmap, b_over_F, args.t0)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    path = args.out / "recovered.csv"
    io.write_recovered_csv(path, rec)
    print(f"recovered |Phi|^2 on {rec.omega.size} detunings -> {path}")
    conf = hmap.metadata.get("config")
    model = hmap.metadata.get("model")
    if conf and model in MODELS:
        src = RunConfig.from_dict(conf)
        disp = src.dispersion()
        grid = src.omega_grid(disp)
        truth = compute_spectrum(model, src.pump, src.detection, src.crystal, disp, disp.T0, grid, src.quadrature)
        ref = np.interp(rec.omega, grid, truth.intensity)
        ref /= np.sum(ref) * abs(rec.omega[1] - rec.omega[0])
        err = float(np.linalg.norm(rec.intensity - ref) / np.linalg.norm(ref))
        print(f"round-trip L2 error vs forward {model} spectrum: {err:.3%}")
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "hom-map": cmd_hom_map, "sweep": cmd_sweep, "reconstruct": cmd_reconstruct}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    _kernels.set_threads(args.threads)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, CalibrationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, io.MalformedCSVError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
