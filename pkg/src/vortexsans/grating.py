"""Forked-grating indicator functions and accumulated-phase maps.

A forked grating with period ``p`` and topological charge ``m`` follows the
profile ``cos(alpha)`` with ``alpha = (2 pi / p) x - m phi``; the groove
pattern gains ``m`` extra grooves across the central defect.  A neutron of
wavelength ``lambda`` accumulates the phase ``-rho * lambda * d`` wherever it
traverses etched material of depth ``d`` and scattering length density
``rho``, so the transverse phase profile is ``Phi = -rho lambda d chi`` with
``chi`` the groove indicator in [0, 1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .specfun import half_period_weight

PROFILES = ("rectangular", "triangular", "trapezoidal")

#: silicon coherent scattering length density, nm^-2
SLD_SILICON = 2.07e-4

# Config keys, in canonical order.
_CONFIG_KEYS = (
    "period_nm", "charge", "depth_nm", "duty", "profile", "trapezoid_c",
    "plaquette_w_nm", "plaquette_h_nm", "hole_radius_nm",
    "tiles_x", "tiles_y", "sld_per_nm2",
)


@dataclass(frozen=True)
class GratingSpec:
    """Geometry and material of one forked-grating plaquette array.

    The duty cycle applies to the rectangular profile; the triangular and
    trapezoidal profiles are the 50%-duty forms (the trapezoid plateau width
    is set by ``trapezoid_c`` instead).
    """

    period_nm: float
    charge: int
    depth_nm: float
    duty: float = 0.5
    profile: str = "rectangular"
    trapezoid_c: float = 1.0
    plaquette_w_nm: float = 10000.0
    plaquette_h_nm: float = 10000.0
    hole_radius_nm: float = 500.0
    tiles_x: int = 1
    tiles_y: int = 1
    sld_per_nm2: float = SLD_SILICON

    def __post_init__(self):
        if self.period_nm <= 0:
            raise ValueError("period_nm must be positive")
        if self.depth_nm < 0:
            raise ValueError("depth_nm must be nonnegative")
        if not 0.0 < self.duty < 1.0:
            raise ValueError("duty must lie in (0, 1)")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")
        if self.trapezoid_c < 1.0:
            raise ValueError("trapezoid_c must be >= 1")
        if self.plaquette_w_nm <= 0 or self.plaquette_h_nm <= 0:
            raise ValueError("plaquette dimensions must be positive")
        if self.hole_radius_nm < 0:
            raise ValueError("hole_radius_nm must be nonnegative")
        if self.hole_radius_nm >= min(self.plaquette_w_nm, self.plaquette_h_nm) / 2:
            raise ValueError("hole_radius_nm must be smaller than half the plaquette")
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ValueError("tile counts must be positive integers")
        if int(self.charge) != self.charge:
            raise ValueError("charge must be an integer")

    def to_config(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in _CONFIG_KEYS}

    @classmethod
    def from_config(cls, cfg: dict) -> "GratingSpec":
        unknown = set(cfg) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown grating config keys: {sorted(unknown)}")
        return cls(**cfg)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_config(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GratingSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_config(json.load(fh))


@dataclass(frozen=True)
class PhaseMap:
    """Accumulated neutron phase on a uniform transverse grid.

    ``values[j, i]`` is the phase (radians, in [-rho lambda d, 0]) at the
    cell center ``(x_i, y_j)``; x runs along axis 1.  ``window_w_nm`` and
    ``window_h_nm`` give the full grid extent, which equals the tiled sample
    area unless the map was padded with empty beam (see :func:`pad_window`).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    values: np.ndarray
    wavelength_nm: float
    spec: GratingSpec | None = None
    window_w_nm: float = field(default=0.0)
    window_h_nm: float = field(default=0.0)

    def __post_init__(self):
        if self.values.shape != (self.ny, self.nx):
            raise ValueError("values shape must be (ny, nx)")
        if self.window_w_nm == 0.0:
            object.__setattr__(self, "window_w_nm", self.nx * self.dx)
        if self.window_h_nm == 0.0:
            object.__setattr__(self, "window_h_nm", self.ny * self.dy)
        self.values.flags.writeable = False

    @property
    def x_axis(self) -> np.ndarray:
        """Cell-center x coordinates (nm), origin at the grid center."""
        return (np.arange(self.nx) + 0.5) * self.dx - self.window_w_nm / 2

    @property
    def y_axis(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy - self.window_h_nm / 2


def azimuthal_arg(x, y, p, m):
    """Grating argument ``alpha = (2 pi / p) x - m phi`` (radians).

    ``phi`` is the two-argument arctangent of (y, x) with range (-pi, pi]
    and phi(0, 0) = 0, so the branch is quadrant-correct everywhere.
    Accepts scalars or arrays.
    """
    if p <= 0:
        raise ValueError("period must be positive")
    return 2.0 * np.pi * np.asarray(x) / p - m * np.arctan2(y, x)


def indicator(spec: GratingSpec, x, y):
    """Groove indicator chi(x, y) in [0, 1] relative to the plaquette center.

    Rectangular grooves are 1 where ``cos(alpha) > cos(pi * duty)``,
    triangular grooves follow ``max(0, 1 - (2/pi) arccos(cos alpha))``, and
    trapezoidal grooves clip ``c`` times the triangular profile at 1.  Inside
    the central etch hole the material is removed, so chi = 1 there.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    alpha = azimuthal_arg(x, y, spec.period_nm, spec.charge)
    cos_a = np.cos(alpha)
    if spec.profile == "rectangular":
        chi = (cos_a > math.cos(math.pi * spec.duty)).astype(float)
    else:
        tri = np.maximum(0.0, 1.0 - (2.0 / np.pi) * np.arccos(np.clip(cos_a, -1, 1)))
        if spec.profile == "triangular":
            chi = tri
        else:
            chi = np.minimum(1.0, spec.trapezoid_c * tri)
    if spec.hole_radius_nm > 0:
        chi = np.where(x * x + y * y < spec.hole_radius_nm**2, 1.0, chi)
    return chi if chi.shape else float(chi)


def fourier_weight(n: int) -> float:
    """Fourier coefficient sinc(n pi / 2) of the 50%-duty rectangular grooves.

    Vanishes for even n, which is why only odd diffraction orders appear;
    integer orders are evaluated exactly.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    return half_period_weight(n)


def phase_map(spec: GratingSpec, wavelength_nm: float, nx: int | None = None,
              ny: int | None = None, *, samples_per_period: int = 64) -> PhaseMap:
    """Phase Phi = -rho lambda d chi sampled at cell centers over the tiled area.

    When nx/ny are omitted the grid is sized for ``samples_per_period``
    samples across each grating period.  Both must be multiples of the tile
    counts; the plaquette motif is computed once and repeated bit-exactly.
    Fewer than 8 samples per period is rejected: the rectangular profile is
    discontinuous and coarser grids alias the Bragg orders.
    """
    if wavelength_nm <= 0:
        raise ValueError("wavelength must be positive")
    if nx is None:
        nx = spec.tiles_x * max(2, round(samples_per_period * spec.plaquette_w_nm / spec.period_nm))
    if ny is None:
        ny = spec.tiles_y * max(2, round(samples_per_period * spec.plaquette_h_nm / spec.period_nm))
    if nx % spec.tiles_x or ny % spec.tiles_y:
        raise ValueError("grid dimensions must be multiples of the tile counts")
    npx, npy = nx // spec.tiles_x, ny // spec.tiles_y
    dx = spec.plaquette_w_nm / npx
    dy = spec.plaquette_h_nm / npy
    if spec.period_nm / dx < 8 or spec.period_nm / dy < 8:
        raise ValueError("fewer than 8 samples per period aliases the Bragg orders")

    x = (np.arange(npx) + 0.5) * dx - spec.plaquette_w_nm / 2
    y = (np.arange(npy) + 0.5) * dy - spec.plaquette_h_nm / 2
    chi = indicator(spec, x[np.newaxis, :], y[:, np.newaxis])
    tile = -spec.sld_per_nm2 * wavelength_nm * spec.depth_nm * chi
    values = np.tile(tile, (spec.tiles_y, spec.tiles_x))
    return PhaseMap(nx=nx, ny=ny, dx=dx, dy=dy, values=values,
                    wavelength_nm=wavelength_nm, spec=spec)


def pad_window(pm: PhaseMap, factor: int) -> PhaseMap:
    """Embed the sample in a ``factor``-times larger illuminated window.

    The padding carries zero phase (beam passing beside the etched area), so
    the far field of the single motif is sampled ``factor`` times more finely
    in q.  Use this to resolve the donut structure of individual orders; the
    unpadded map corresponds to an infinite periodic array.
    """
    if factor < 1 or int(factor) != factor:
        raise ValueError("pad factor must be a positive integer")
    if factor == 1:
        return pm
    nx, ny = pm.nx * factor, pm.ny * factor
    values = np.zeros((ny, nx))
    j0 = (ny - pm.ny) // 2
    i0 = (nx - pm.nx) // 2
    values[j0:j0 + pm.ny, i0:i0 + pm.nx] = pm.values
    return PhaseMap(nx=nx, ny=ny, dx=pm.dx, dy=pm.dy, values=values,
                    wavelength_nm=pm.wavelength_nm, spec=pm.spec)


def crop_to_disc(pm: PhaseMap, radius_nm: float) -> PhaseMap:
    """Keep grooves only inside a centered disc; the rest transmits freely.

    A disc-limited grating is the configuration the closed-form donut
    amplitude describes exactly, so this is the natural aperture for
    analytic-versus-numeric comparisons.
    """
    if radius_nm <= 0:
        raise ValueError("disc radius must be positive")
    X = pm.x_axis[np.newaxis, :]
    Y = pm.y_axis[:, np.newaxis]
    values = np.where(X * X + Y * Y <= radius_nm**2, pm.values, 0.0)
    return PhaseMap(nx=pm.nx, ny=pm.ny, dx=pm.dx, dy=pm.dy, values=values,
                    wavelength_nm=pm.wavelength_nm, spec=pm.spec)
