"""Command-line front end producing reproducible figure-data pipelines.

Subcommands: diffract | sesans | fit | donut | xi.  Each run takes one JSON
config file (sections "grating", "instrument", "simulation"); command-line
flags override config keys, which override built-in defaults.  Every run
writes a manifest recording outputs, wall time, toolkit version and a hash
of the input files.  Exit codes: 0 success, 2 user/config error,
3 numerical failure.  Output files are written atomically.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diffraction import (NotADonutError, diffraction_pattern, donut_peak_radius,
                          radial_profile)
from .grating import GratingSpec, pad_window, phase_map
from .instrument import InstrumentConfig, fit_depth
from .sesans import (SesansCurve, convolve_resolution, polarization_map,
                     polarization_slice, stack_product, tof_curve, model_curve_at)
from .specfun import donut_profile


class ConfigError(Exception):
    """User or configuration error; maps to exit code 2."""


_SIM_DEFAULTS = {
    "lambda_nm": 0.4,
    "samples_per_period": 64,
    "pad_factor": 4,
    "nbins": 128,
    "orientation_deg": 0.0,
    "mode": "map",
    "resolution": False,
    "stack": 1,
    "n_lambda": 96,
    "donut_R": 0.4,
    "donut_orders": [[1, 1]],
    "donut_qmax_scaled": 20.0,
    "donut_npoints": 256,
    "depth_range_nm": [3000.0, 6500.0],
    "depth_grid": 13,
}


def _atomic_write(path: Path, writer):
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    os.replace(tmp, path)
    sidecar = tmp.with_name(tmp.name + ".json")  # curve writers add one
    if sidecar.exists():
        os.replace(sidecar, path.with_name(path.name + ".json"))


def _load_config(path_str: str):
    path = Path(path_str)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if "grating" not in raw:
        raise ConfigError("config must contain a 'grating' section")
    try:
        spec = GratingSpec.from_config(raw["grating"])
        inst = InstrumentConfig.from_config(raw.get("instrument", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    sim = dict(_SIM_DEFAULTS)
    extra = set(raw.get("simulation", {})) - set(_SIM_DEFAULTS)
    if extra:
        raise ConfigError(f"unknown simulation keys: {sorted(extra)}")
    sim.update(raw.get("simulation", {}))
    return spec, inst, sim, path


def _hash_inputs(paths) -> str:
    digest = hashlib.sha256()
    for p in paths:
        digest.update(Path(p).read_bytes())
    return digest.hexdigest()


def _write_manifest(out_dir: Path, command: str, config_path, outputs, t0,
                    extra_inputs=()):
    manifest = {
        "command": command,
        "config_path": str(config_path),
        "outputs": [str(o) for o in outputs],
        "wall_time_s": time.perf_counter() - t0,
        "toolkit_version": __version__,
        "content_hash": _hash_inputs([config_path, *extra_inputs]),
    }
    path = out_dir / "manifest.json"
    _atomic_write(path, lambda p: p.write_text(json.dumps(manifest, indent=2) + "\n",
                                               encoding="utf-8"))
    missing = [o for o in outputs if not Path(o).exists()]
    if missing:
        raise RuntimeError(f"declared outputs missing: {missing}")
    return path


def _sidecar(spec, inst):
    return {"spec": spec.to_config(), "instrument": inst.to_config()}


def cmd_diffract(args) -> int:
    t0 = time.perf_counter()
    spec, inst, sim, cfg_path = _load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pm = phase_map(spec, sim["lambda_nm"],
                   samples_per_period=int(sim["samples_per_period"]))
    pm = pad_window(pm, int(sim["pad_factor"]))
    dp = diffraction_pattern(pm)

    outputs = []
    grid_path = out_dir / "pattern.grid"
    _atomic_write(grid_path, dp.save_grid)
    outputs.append(grid_path)

    summary = {"lambda_nm": sim["lambda_nm"], "orders": {}}
    for n in (1, 3):
        prof = radial_profile(dp, n, side=1, nbins=int(sim["nbins"]))
        prof_path = out_dir / f"profile_n{n}.csv"
        _atomic_write(prof_path, prof.to_csv)
        outputs.append(prof_path)
        try:
            radius = donut_peak_radius(prof)
            summary["orders"][str(n)] = {"peak_radius_per_nm": radius}
        except NotADonutError:
            summary["orders"][str(n)] = {"peak_radius_per_nm": None,
                                         "not_a_donut": True}
    summary_path = out_dir / "summary.json"
    _atomic_write(summary_path,
                  lambda p: p.write_text(json.dumps(summary, indent=2) + "\n",
                                         encoding="utf-8"))
    outputs.append(summary_path)
    _write_manifest(out_dir, "diffract", cfg_path, outputs, t0)
    return 0


def _slice_xi(smap, orientation):
    w, h = smap.extent
    cos_t, sin_t = abs(math.cos(orientation)), abs(math.sin(orientation))
    xi_max = min(w / 2 / max(cos_t, 1e-12), h / 2 / max(sin_t, 1e-12))
    step = min(w / smap.xi_x_axis.size, h / smap.xi_y_axis.size)
    n = int(xi_max / step)
    return np.arange(-n, n) * step


def cmd_sesans(args) -> int:
    t0 = time.perf_counter()
    spec, inst, sim, cfg_path = _load_config(args.config)
    if args.mode:
        sim["mode"] = args.mode
    if args.orientation is not None:
        sim["orientation_deg"] = args.orientation
    if args.resolution:
        sim["resolution"] = args.resolution == "on"
    if args.stack is not None:
        sim["stack"] = args.stack
    if sim["mode"] not in ("map", "slice", "tof"):
        raise ConfigError(f"unknown sesans mode: {sim['mode']}")
    if int(sim["stack"]) < 1:
        raise ConfigError("stack count must be >= 1")
    orientation = math.radians(float(sim["orientation_deg"]))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    if sim["mode"] == "map":
        pm = phase_map(spec, sim["lambda_nm"],
                       samples_per_period=int(sim["samples_per_period"]))
        smap = polarization_map(pm)
        path = out_dir / "map.csv"
        _atomic_write(path, smap.to_csv)
        meta = {"lambda_nm": sim["lambda_nm"], **_sidecar(spec, inst)}
        meta_path = out_dir / "map.csv.json"
        _atomic_write(meta_path,
                      lambda p: p.write_text(json.dumps(meta, indent=2) + "\n",
                                             encoding="utf-8"))
        outputs += [path, meta_path]
    else:
        if sim["mode"] == "slice":
            pm = phase_map(spec, sim["lambda_nm"],
                           samples_per_period=int(sim["samples_per_period"]))
            smap = polarization_map(pm)
            curve = polarization_slice(smap, orientation, _slice_xi(smap, orientation))
        else:
            curve = tof_curve(spec, inst, orientation, n_lambda=int(sim["n_lambda"]),
                              samples_per_period=int(sim["samples_per_period"]))
        stack = int(sim["stack"])
        if stack > 1:
            curve = stack_product([curve] * stack)
        if sim["resolution"]:
            curve = convolve_resolution(curve, inst.frac_resolution)
        path = out_dir / f"{sim['mode']}.csv"
        sidecar = {**_sidecar(spec, inst), "stack": int(sim["stack"])}
        _atomic_write(path, lambda p: curve.to_csv(p, sidecar=sidecar))
        outputs += [path, Path(str(path) + ".json")]

    _write_manifest(out_dir, "sesans", cfg_path, outputs, t0)
    return 0


def _read_curve_csv(path_str: str, xi_col: str, pol_col: str):
    path = Path(path_str)
    if not path.is_file():
        raise ConfigError(f"data file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    names = [c.strip() for c in header.split(",")]
    if xi_col not in names or pol_col not in names:
        raise ConfigError(f"data file must have '{xi_col}' and '{pol_col}' columns; "
                          f"found {names}")
    body = path.read_text(encoding="utf-8").splitlines()[1:]
    if len([ln for ln in body if ln.strip()]) < 10:
        raise ConfigError("data file must contain at least 10 rows")
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    if data.size == 0 or data.shape[0] < 10:
        raise ConfigError("data file must contain at least 10 rows")
    return data[:, names.index(xi_col)], data[:, names.index(pol_col)], path


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    spec, inst, sim, cfg_path = _load_config(args.config)
    xi, pol, data_path = _read_curve_csv(args.data, args.xi_col, args.pol_col)
    orientation = math.radians(float(sim["orientation_deg"]))
    measured = SesansCurve(xi=xi, pol=pol, orientation=orientation, mode="tof",
                           lambda_nm=np.sqrt(np.maximum(xi, 0.0) / inst.xi0_per_nm),
                           xi0_per_nm=inst.xi0_per_nm, band_nm=inst.band_nm)
    lo, hi = sim["depth_range_nm"]
    report = fit_depth(measured, spec, inst, (float(lo), float(hi)),
                       n_grid=int(sim["depth_grid"]),
                       samples_per_period=int(sim["samples_per_period"]))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "fit_report.json"
    _atomic_write(report_path, report.to_json)

    from dataclasses import replace as dc_replace
    best_spec = dc_replace(spec, depth_nm=report.d_best_nm)
    order = np.argsort(measured.xi)
    model = model_curve_at(best_spec, inst, orientation, measured.xi[order],
                           samples_per_period=int(sim["samples_per_period"]))
    model = convolve_resolution(model, inst.frac_resolution)
    overlay = np.column_stack([measured.xi[order], measured.pol[order], model.pol])
    overlay_path = out_dir / "fit_overlay.csv"
    _atomic_write(overlay_path,
                  lambda p: np.savetxt(p, overlay, delimiter=",",
                                       header="xi_nm,pol_data,pol_model",
                                       comments="", fmt="%.17g"))
    _write_manifest(out_dir, "fit", cfg_path, [report_path, overlay_path], t0,
                    extra_inputs=[data_path])
    return 0


def cmd_donut(args) -> int:
    t0 = time.perf_counter()
    spec, inst, sim, cfg_path = _load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    R = float(sim["donut_R"])
    contrast = complex(np.exp(-1j * spec.sld_per_nm2 * sim["lambda_nm"]
                              * spec.depth_nm) - 1.0)
    q_max = float(sim["donut_qmax_scaled"]) / R
    q = np.linspace(0.0, q_max, int(sim["donut_npoints"]))
    outputs = []
    for n, m in sim["donut_orders"]:
        prof = donut_profile(int(n), int(m), R, q, contrast,
                             wavelength_nm=sim["lambda_nm"],
                             period_nm=spec.period_nm)
        path = out_dir / f"donut_n{int(n)}_m{int(m)}.csv"
        _atomic_write(path, prof.to_csv)
        outputs.append(path)
    _write_manifest(out_dir, "donut", cfg_path, outputs, t0)
    return 0


def cmd_xi(args) -> int:
    t0 = time.perf_counter()
    spec, inst, sim, cfg_path = _load_config(args.config)
    lo, hi = inst.xi_range()
    payload = {
        "xi0_configured_per_nm": inst.xi0_per_nm,
        "xi0_computed_per_nm": inst.computed_xi0(),
        "band_nm": list(inst.band_nm),
        "xi_range_nm": [lo, hi],
        "frac_resolution": inst.frac_resolution,
    }
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "xi.json"
    _atomic_write(path, lambda p: p.write_text(json.dumps(payload, indent=2) + "\n",
                                               encoding="utf-8"))
    print(json.dumps(payload, indent=2))
    _write_manifest(out_dir, "xi", cfg_path, [path], t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexsans",
        description="Forked-grating diffraction and SESANS simulation pipelines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out-dir", default=".", help="output directory")

    p = sub.add_parser("diffract", help="far-field pattern grid and order profiles")
    common(p)

    p = sub.add_parser("sesans", help="polarization maps, slices and TOF curves")
    common(p)
    p.add_argument("--mode", choices=("map", "slice", "tof"))
    p.add_argument("--orientation", type=float, metavar="DEG",
                   help="encoding direction; 0 = perpendicular to grooves")
    p.add_argument("--resolution", choices=("on", "off"))
    p.add_argument("--stack", type=int, metavar="N_G",
                   help="number of stacked identical gratings")

    p = sub.add_parser("fit", help="fit the groove depth to a measured curve")
    common(p)
    p.add_argument("--data", required=True, help="measured curve CSV")
    p.add_argument("--xi-col", default="xi_nm")
    p.add_argument("--pol-col", default="pol")

    p = sub.add_parser("donut", help="analytic Bragg-donut radial profiles")
    common(p)

    p = sub.add_parser("xi", help="entanglement-length calculator")
    common(p)
    return parser


_HANDLERS = {
    "diffract": cmd_diffract,
    "sesans": cmd_sesans,
    "fit": cmd_fit,
    "donut": cmd_donut,
    "xi": cmd_xi,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OverflowError, FloatingPointError) as exc:
        print(json.dumps({"error": "numerical", "message": str(exc)}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
