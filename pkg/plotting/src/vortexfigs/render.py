"""Render simulation exports into figures.

A recipe is a JSON file:

    {"kind": "qmap" | "ximap" | "curves" | "donut_compare",
     "inputs": ["path", ...],
     "style": {"title": "...", "log": true, "labels": ["..."]},
     "output": "figure.png"}

Input formats (produced by the simulation CLI):
  - binary intensity grid: little-endian header int64 nx, int64 ny,
    float64 dqx, float64 dqy, float64 lambda_nm, then ny*nx float64
    row-major intensities;
  - curve CSV with columns xi_nm,pol[,lambda_nm] and an optional JSON
    sidecar at <path>.json carrying orientation/mode metadata;
  - map CSV with columns xi_x_nm,xi_y_nm,pol;
  - radial profile CSVs: analytic (q_prime,intensity,re_amplitude,
    im_amplitude) and numeric (q_prime,intensity,count).
"""

from __future__ import annotations

import argparse
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("qmap", "ximap", "curves", "donut_compare")


class RecipeError(ValueError):
    """Bad recipe or input file; the message names what is wrong."""


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    inputs: list
    output: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RecipeError(f"unknown figure kind '{self.kind}'; expected one of {KINDS}")
        if not self.inputs:
            raise RecipeError("recipe lists no inputs")
        missing = [str(p) for p in self.inputs if not Path(p).is_file()]
        if missing:
            raise RecipeError(f"input files not found: {missing}")

    @classmethod
    def load(cls, path) -> "FigureRecipe":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(raw) - {"kind", "inputs", "output", "style"}
        if unknown:
            raise RecipeError(f"unknown recipe fields: {sorted(unknown)}")
        try:
            return cls(kind=raw["kind"], inputs=list(raw["inputs"]),
                       output=raw["output"], style=raw.get("style", {}))
        except KeyError as exc:
            raise RecipeError(f"recipe is missing required field {exc}") from exc


def read_grid(path):
    """Binary intensity grid -> (intensity, qx_axis, qy_axis, lambda_nm)."""
    blob = Path(path).read_bytes()
    head = struct.calcsize("<qqddd")
    nx, ny, dqx, dqy, lam = struct.unpack("<qqddd", blob[:head])
    data = np.frombuffer(blob[head:], dtype="<f8")
    if data.size != nx * ny:
        raise RecipeError(f"{path}: grid body has {data.size} values, "
                          f"header promises {nx}*{ny}")
    qx = (np.arange(nx) - nx // 2) * dqx
    qy = (np.arange(ny) - ny // 2) * dqy
    return data.reshape(ny, nx), qx, qy, lam


def read_csv(path, expected_columns):
    """CSV with a header row; raises naming the offending columns."""
    with open(path, encoding="utf-8") as fh:
        names = [c.strip() for c in fh.readline().strip().split(",")]
    if list(names[:len(expected_columns)]) != list(expected_columns):
        raise RecipeError(f"{path}: expected columns {list(expected_columns)}, "
                          f"found {names}")
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    return data, names


def read_sidecar(path) -> dict:
    sidecar = Path(str(path) + ".json")
    if sidecar.is_file():
        return json.loads(sidecar.read_text(encoding="utf-8"))
    return {}


def _csv_header(path):
    with open(path, encoding="utf-8") as fh:
        return [c.strip() for c in fh.readline().strip().split(",")]


def _render_qmap(recipe, ax):
    intensity, qx, qy, lam = read_grid(recipe.inputs[0])
    data = intensity
    if recipe.style.get("log", True):
        floor = data[data > 0].min() if np.any(data > 0) else 1.0
        data = np.log10(np.maximum(data, floor))
    im = ax.imshow(data, origin="lower", aspect="equal", cmap="inferno",
                   extent=(qx[0], qx[-1], qy[0], qy[-1]))
    ax.set_xlabel("q_x (1/nm)")
    ax.set_ylabel("q_y (1/nm)")
    ax.set_title(recipe.style.get("title", f"diffraction intensity, lambda = {lam} nm"))
    plt.colorbar(im, ax=ax, label="log10 intensity" if recipe.style.get("log", True)
                 else "intensity")


def _render_ximap(recipe, ax):
    data, _ = read_csv(recipe.inputs[0], ("xi_x_nm", "xi_y_nm", "pol"))
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    grid = data[:, 2].reshape(ys.size, xs.size)
    im = ax.imshow(grid, origin="lower", aspect="equal", cmap="RdBu_r",
                   vmin=-1.0, vmax=1.0,
                   extent=(xs[0] / 1000, xs[-1] / 1000, ys[0] / 1000, ys[-1] / 1000))
    ax.set_xlabel("xi_x (um)")
    ax.set_ylabel("xi_y (um)")
    ax.set_title(recipe.style.get("title", "SESANS polarization map"))
    plt.colorbar(im, ax=ax, label="P/P0")


def _render_curves(recipe, ax):
    labels = recipe.style.get("labels") or [Path(p).stem for p in recipe.inputs]
    if len(labels) != len(recipe.inputs):
        raise RecipeError("style.labels length does not match inputs")
    dashes = ["-", "--", "-.", ":"]
    for k, path in enumerate(recipe.inputs):
        data, _ = read_csv(path, ("xi_nm", "pol"))
        meta = read_sidecar(path)
        label = labels[k]
        if meta.get("resolution_applied"):
            label += " (resolution)"
        ax.plot(data[:, 0] / 1000.0, data[:, 1], dashes[k % len(dashes)],
                label=label)
    ax.set_xlabel("xi (um)")
    ax.set_ylabel("P/P0")
    ax.set_ylim(recipe.style.get("ylim", (None, None)))
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(recipe.style.get("title", "SESANS polarization"))


def split_donut_inputs(paths):
    """Classify donut-comparison inputs by their header columns."""
    analytic, numeric = [], []
    for path in paths:
        names = _csv_header(path)
        if names == ["q_prime", "intensity", "re_amplitude", "im_amplitude"]:
            analytic.append(path)
        elif names == ["q_prime", "intensity", "count"]:
            numeric.append(path)
        else:
            raise RecipeError(f"{path}: not a donut profile; found columns {names}")
    if not analytic or not numeric:
        raise RecipeError("donut_compare needs at least one analytic "
                          "(q_prime,intensity,re_amplitude,im_amplitude) and one "
                          "numeric (q_prime,intensity,count) profile")
    return analytic, numeric


def _load_family(paths, columns):
    curves = []
    for path in paths:
        data, _ = read_csv(path, columns)
        good = np.isfinite(data[:, 1])
        curves.append((data[good, 0], data[good, 1]))
    # each family is scaled to the peak of its own first member
    scale = curves[0][1].max()
    return [(q, i / scale) for q, i in curves]


def _render_donut_compare(recipe, ax):
    analytic_paths, numeric_paths = split_donut_inputs(recipe.inputs)
    analytic = _load_family(analytic_paths,
                            ("q_prime", "intensity", "re_amplitude", "im_amplitude"))
    numeric = _load_family(numeric_paths, ("q_prime", "intensity", "count"))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for k, (q, i) in enumerate(analytic):
        ax.plot(q * 1000, i, "-", color=colors[k % len(colors)],
                label=f"closed form ({Path(analytic_paths[k]).stem})")
    for k, (q, i) in enumerate(numeric):
        ax.plot(q * 1000, i, "--", color=colors[k % len(colors)],
                label=f"numeric ({Path(numeric_paths[k]).stem})")
    ax.set_xlabel("q' (1/um)")
    ax.set_ylabel("intensity (norm.)")
    ax.legend(frameon=False, fontsize=7)
    ax.set_title(recipe.style.get("title", "Bragg-donut radial profiles"))


_RENDERERS = {
    "qmap": _render_qmap,
    "ximap": _render_ximap,
    "curves": _render_curves,
    "donut_compare": _render_donut_compare,
}


def render(recipe: FigureRecipe) -> Path:
    """Render one recipe; returns the output path."""
    fig, ax = plt.subplots(figsize=recipe.style.get("figsize", (5.0, 4.0)),
                           dpi=recipe.style.get("dpi", 150))
    try:
        _RENDERERS[recipe.kind](recipe, ax)
        fig.tight_layout()
        out = Path(recipe.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vortexfigs",
                                     description="Render a figure recipe")
    parser.add_argument("recipe", help="JSON recipe file")
    args = parser.parse_args(argv)
    try:
        out = render(FigureRecipe.load(args.recipe))
    except RecipeError as exc:
        print(f"recipe error: {exc}")
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
