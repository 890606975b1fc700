"""Batch experiment harness.

    gsmspdc run <experiment> --config <path> [--out <dir>] [--seed <u64>]
                [--threads <n>]

Experiments: pump-visibility, pump-invariance, fringes, visibility-curve,
profile, conditional, frames-synth, coincidence.  Each run writes CSV data
and/or 16-bit PGM images plus run_manifest.json with the resolved parameters,
seed, and SHA-256 hashes of every output.  Reruns with the same config and
seed are byte-identical.

Exit codes: 0 success, 2 configuration error, 3 convergence failure,
4 I/O failure.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, counting, interference, profiles
from .config import Resolver, crystal_from, load_config, pumps_from
from .errors import ConfigError, ConvergenceError, FitError
from .iofmt import write_csv, write_json, write_manifest, write_pgm16
from .pump import (CharacterizationSetup, coherence_from, correlation_length,
                   propagate_to_crystal, pump_visibility)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

OUTPUT_DIR_ENV = "GSMSPDC_OUT"


def _slits_values(res: Resolver):
    res.require_section("slits")
    a = res.get("slits", "a", 0.15e-3)
    d_values = res.get_list("slits", "d_values", [0.25e-3, 0.5e-3, 0.75e-3])
    z = res.get("slits", "z", 0.10)
    z1 = res.get("slits", "z1", 0.20)
    return a, d_values, z, z1


def run_pump_visibility(res: Resolver, out: Path, threads: int):
    res.require_section("pump")
    lambda_p = res.get("pump", "lambda_p", 405e-9)
    f_char = res.get("pump", "f_char", 0.150)
    a_s_values = res.get_list("pump", "a_s_values", [0.25e-3, 0.5e-3, 1.0e-3])
    d12_max = res.get("pump", "d12_max", 2.0e-3)
    n_d12 = int(res.get("pump", "d12_samples", 64))
    rows = []
    for a_s in a_s_values:
        for d12 in np.linspace(0.0, d12_max, n_d12):
            setup = CharacterizationSetup(a_s=a_s, f=f_char, d12=float(d12))
            rows.append((a_s, d12, pump_visibility(setup, lambda_p)))
    path = out / "pump_visibility.csv"
    write_csv(path, ["a_s_m", "d12_m", "visibility"], rows)
    return [path]


def run_pump_invariance(res: Resolver, out: Path, threads: int):
    res.require_section("pump")
    lambda_p = res.get("pump", "lambda_p", 405e-9)
    w0 = res.get("pump", "w0", 0.5e-3)
    f_char = res.get("pump", "f_char", 0.150)
    demag = res.get("pump", "demag", 8.0)
    a_s_values = res.get_list("pump", "a_s_values", [0.25e-3, 0.5e-3, 1.0e-3])
    w_at_lens = w0 * demag
    rows = []
    for a_s in a_s_values:
        l_c_lens = correlation_length(a_s, f_char, lambda_p)
        pump = propagate_to_crystal(l_c_lens, w_at_lens, demag, lambda_p)
        rows.append((a_s, l_c_lens, pump.w0, pump.l_c, coherence_from(pump).A))
    path = out / "pump_invariance.csv"
    write_csv(path, ["a_s_m", "l_c_lens_m", "w0_crystal_m", "l_c_crystal_m", "A"],
              rows)
    return [path]


def run_fringes(res: Resolver, out: Path, threads: int):
    pumps = pumps_from(res)
    crystal = crystal_from(res)
    a, d_values, z, z1 = _slits_values(res)
    samples = int(res.get("grid", "detector_samples", 1001))
    order = int(res.get("grid", "order", 24))
    d = d_values[0]
    slits = interference.SlitGeometry(a=a, d=d, z=z, z1=z1)
    rows = []
    for pump in pumps:
        scan = interference.fringe_profile(pump, crystal, slits,
                                           samples=samples, order=order)
        A = scan.meta["A"]
        for x, value in zip(scan.xs, scan.values):
            rows.append((A, d, x, value))
    path = out / "fringes.csv"
    write_csv(path, ["A", "d_m", "x_m", "intensity_norm"], rows)
    return [path]


def run_visibility_curve(res: Resolver, out: Path, threads: int):
    pumps = pumps_from(res)
    crystal = crystal_from(res)
    a, d_values, z, z1 = _slits_values(res)
    samples = int(res.get("grid", "detector_samples", 1001))
    order = int(res.get("grid", "order", 24))
    rows = interference.visibility_curve(pumps, d_values, a=a, z=z, z1=z1,
                                         crystal=crystal, samples=samples,
                                         order=order)
    path = out / "visibility_curve.csv"
    write_csv(path, ["A", "d_m", "visibility", "fringe_period_m"],
              [(r["A"], r["d_m"], r["visibility"], r["fringe_period_m"])
               for r in rows])
    return [path]


def run_profile(res: Resolver, out: Path, threads: int):
    pumps = pumps_from(res)
    crystal = crystal_from(res)
    res.require_section("grid")
    samples = int(res.get("grid", "samples", 256))
    extent = res.get("grid", "extent", 0.0)
    order = int(res.get("grid", "order", 32))
    computed = [profiles.singles_profile(
        pump, crystal, which="both",
        extent=None if extent <= 0 else extent,
        samples=samples, order=order, threads=threads) for pump in pumps]
    paths = []
    for prof in computed:
        stem = f"profile_A{prof.meta['A']:.4g}"
        img = out / f"{stem}.pgm"
        write_pgm16(img, prof.grid)
        sidecar = out / f"{stem}.json"
        write_json(sidecar, prof.meta)
        paths.extend([img, sidecar])
    return paths


def run_conditional(res: Resolver, out: Path, threads: int):
    pumps = pumps_from(res)
    crystal = crystal_from(res)
    samples = int(res.get("grid", "detector_samples", 801))
    rows = []
    for pump in pumps:
        q_s = profiles.overlap_point(crystal, pump.k_p)
        scan = profiles.conditional_scan(pump, crystal, q_s, samples=samples)
        A = scan.meta["A"]
        for q, value in zip(scan.xs, scan.values):
            rows.append((A, q, value))
    path = out / "conditional.csv"
    write_csv(path, ["A", "q_ix_radpm", "density_per_radpm"], rows)
    return [path]


def _counting_params(res: Resolver):
    res.require_section("counting")
    return {
        "n_frames": int(res.get("counting", "n_frames", 2000)),
        "pairs_per_frame": res.get("counting", "pairs_per_frame", 20.0),
        "noise": res.get("counting", "noise", 1e-3),
        "seed": int(res.get("counting", "seed", 12345)),
        "n_px": int(res.get("counting", "n_px", 48)),
        "f_collim": res.get("counting", "f_collim", 0.200),
    }


def _synthesis_joint(pump, crystal, n_px):
    """Joint pixel distribution over (signal x, idler x) at the overlap point."""
    from .pump import csd_coefficients
    from .spdc import joint_momentum_rate

    q_s0, _ = profiles.overlap_point(crystal, pump.k_p)
    coeffs = csd_coefficients(pump)
    sigma = 1.0 / (2.0 * np.sqrt(coeffs.b1 - coeffs.b2))
    qs = np.linspace(q_s0 - 5 * sigma, q_s0 + 5 * sigma, n_px)
    qi = np.linspace(-q_s0 - 5 * sigma, -q_s0 + 5 * sigma, n_px)
    joint = joint_momentum_rate((qs[:, None], 0.0), (qi[None, :], 0.0),
                                pump, crystal)
    return joint, qs, qi


def run_frames_synth(res: Resolver, out: Path, threads: int):
    pumps = pumps_from(res)
    crystal = crystal_from(res)
    params = _counting_params(res)
    pump = pumps[0]
    joint, qs, qi = _synthesis_joint(pump, crystal, params["n_px"])
    lambda_s = 2.0 * pump.lambda_p
    pitch = float(profiles.momentum_to_position(qi[1] - qi[0],
                                                params["f_collim"], lambda_s))
    stack = counting.synth_frames(joint, params["pairs_per_frame"],
                                  params["noise"], params["n_frames"],
                                  params["seed"], pixel_pitch=pitch)
    path = out / "frames.bin"
    counting.save_frames(stack, path)
    grid = out / "frames_grid.csv"
    write_csv(grid, ["j_px", "q_sx_radpm", "q_ix_radpm"],
              [(k, qs[k], qi[k]) for k in range(params["n_px"])])
    return [path, grid]


def run_coincidence(res: Resolver, out: Path, threads: int):
    params = _counting_params(res)
    frames_file = res.get("counting", "frames_file", str(out / "frames.bin"),
                          cast=str)
    stack = counting.load_frames(frames_file)
    signal_px = int(res.get("counting", "signal_px", -1))
    if signal_px < 0:
        totals = stack.frames[:, 0, :].sum(axis=0)
        signal_px = int(np.argmax(totals))
    scan = counting.conditional_map(stack, (0, signal_px), row=1)
    path = out / "coincidence.csv"
    write_csv(path, ["j_px", "C_counts2", "stderr_counts2"],
              [(int(j), c, e) for j, c, e in
               zip(scan.xs, scan.values, scan.meta["stderr"])])
    paths = [path]
    try:
        fit = analysis.fit_gaussian(scan)
        summary = out / "coincidence_fit.json"
        write_json(summary, {
            "signal_px": signal_px, "amplitude": fit.amplitude,
            "mean_px": fit.mean, "sigma_px": fit.sigma,
            "fwhm_px": fit.fwhm, "offset": fit.offset,
            "residual_rms": fit.residual_rms,
        })
        paths.append(summary)
    except FitError:
        pass  # scan may legitimately be featureless (e.g. noise-only stacks)
    return paths


EXPERIMENTS = {
    "pump-visibility": run_pump_visibility,
    "pump-invariance": run_pump_invariance,
    "fringes": run_fringes,
    "visibility-curve": run_visibility_curve,
    "profile": run_profile,
    "conditional": run_conditional,
    "frames-synth": run_frames_synth,
    "coincidence": run_coincidence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsmspdc", description="Partially coherent SPDC experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("experiment", choices=sorted(EXPERIMENTS))
    run.add_argument("--config", required=True, help="INI config file")
    run.add_argument("--out", default=None,
                     help=f"output directory (default: config, then "
                          f"${OUTPUT_DIR_ENV}, then ./out)")
    run.add_argument("--seed", type=int, default=None,
                     help="override [counting] seed")
    run.add_argument("--threads", type=int, default=1,
                     help="worker threads for profile grids")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        raw = load_config(args.config)
        if args.seed is not None:
            raw.setdefault("counting", {})["seed"] = str(args.seed)
        res = Resolver(raw)
        out_dir = (args.out
                   or raw.get("output", {}).get("directory")
                   or os.environ.get(OUTPUT_DIR_ENV)
                   or "out")
        res.resolved["output.directory"] = str(out_dir)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = EXPERIMENTS[args.experiment](res, out, max(1, args.threads))
        write_manifest(out, args.experiment, res.resolved, written)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FitError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
