"""SESANS polarization from phase maps.

The empty-beam-normalized polarization equals the real part of the
autocorrelation of ``exp(i Phi)`` at transverse separation xi, divided by
its zero-separation value; the division carries the full cross section
including the transmitted beam, which is what pins P(0) to 1.  The
autocorrelation is computed as transform, squared modulus, inverse
transform (the projection-slice route), with the tiled grid treated as one
period of an infinite array.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._workers import worker_count
from .grating import GratingSpec, PhaseMap, phase_map
from .instrument import InstrumentConfig, xi_of_lambda

MODES = ("monochromatic", "tof")


@dataclass(frozen=True)
class SesansMap:
    """Polarization over a grid of 2D entanglement-length offsets."""

    xi_x_axis: np.ndarray
    xi_y_axis: np.ndarray
    pol: np.ndarray
    wavelength_nm: float
    spec: GratingSpec | None = None

    def __post_init__(self):
        for arr in (self.xi_x_axis, self.xi_y_axis, self.pol):
            arr.flags.writeable = False

    @property
    def extent(self):
        """(width, height) of the periodic map domain in nm."""
        dx = float(self.xi_x_axis[1] - self.xi_x_axis[0])
        dy = float(self.xi_y_axis[1] - self.xi_y_axis[0])
        return self.xi_x_axis.size * dx, self.xi_y_axis.size * dy

    def to_csv(self, path):
        nx = self.xi_x_axis.size
        ny = self.xi_y_axis.size
        col_x = np.tile(self.xi_x_axis, ny)
        col_y = np.repeat(self.xi_y_axis, nx)
        rows = np.column_stack([col_x, col_y, self.pol.ravel()])
        np.savetxt(path, rows, delimiter=",", header="xi_x_nm,xi_y_nm,pol",
                   comments="", fmt="%.17g")


@dataclass(frozen=True)
class SesansCurve:
    """Polarization versus entanglement length along one orientation.

    ``orientation`` is the angle of the encoding direction: 0 puts xi along
    x (perpendicular to the grooves), pi/2 along y (parallel).  In TOF mode
    each xi corresponds to its own wavelength through xi = xi0 lambda^2 and
    ``lambda_nm`` is an array.
    """

    xi: np.ndarray
    pol: np.ndarray
    orientation: float
    mode: str
    lambda_nm: float | np.ndarray
    xi0_per_nm: float | None = None
    band_nm: tuple | None = None
    resolution_applied: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.xi.flags.writeable = False
        self.pol.flags.writeable = False

    def to_csv(self, path, sidecar: dict | None = None):
        """Write xi_nm,pol(,lambda_nm in TOF mode); optional JSON sidecar.

        The sidecar lands at <path>.json and records the spec, instrument,
        orientation and resolution metadata passed in.
        """
        if self.mode == "tof":
            rows = np.column_stack([self.xi, self.pol, np.asarray(self.lambda_nm)])
            header = "xi_nm,pol,lambda_nm"
        else:
            rows = np.column_stack([self.xi, self.pol])
            header = "xi_nm,pol"
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt="%.17g")
        meta = {
            "orientation_rad": self.orientation,
            "mode": self.mode,
            "resolution_applied": self.resolution_applied,
        }
        if self.mode == "tof":
            meta["xi0_per_nm"] = self.xi0_per_nm
            meta["band_nm"] = list(self.band_nm) if self.band_nm else None
        else:
            meta["lambda_nm"] = float(np.asarray(self.lambda_nm).ravel()[0])
        if sidecar:
            meta.update(sidecar)
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")


def _correlation_grid(field: np.ndarray) -> np.ndarray:
    """Re of the circular autocorrelation of field, normalized to 1 at zero shift."""
    power = np.abs(np.fft.fft2(field)) ** 2
    corr = np.fft.ifft2(power)
    pol = corr.real / corr.real[0, 0]
    if not np.all(np.isfinite(pol)):
        raise ValueError("autocorrelation produced non-finite values")
    return pol


def polarization_map(pm: PhaseMap) -> SesansMap:
    """Full 2D SESANS polarization of a phase map.

    pol(xi_x, xi_y) = Re C(xi)/C(0) with C the periodic autocorrelation of
    exp(i Phi); the map is periodic in both axes with the grid extent.
    """
    pol = _correlation_grid(np.exp(1j * pm.values))
    pol = np.fft.fftshift(pol)
    xi_x = (np.arange(pm.nx) - pm.nx // 2) * pm.dx
    xi_y = (np.arange(pm.ny) - pm.ny // 2) * pm.dy
    return SesansMap(xi_x_axis=xi_x, xi_y_axis=xi_y, pol=pol,
                     wavelength_nm=pm.wavelength_nm, spec=pm.spec)


def _bilinear_periodic(pol: np.ndarray, x0: float, y0: float, dx: float, dy: float,
                       x, y):
    """Bilinear interpolation with periodic wraparound on a shifted map grid."""
    ny, nx = pol.shape
    fx = (np.asarray(x, dtype=float) - x0) / dx
    fy = (np.asarray(y, dtype=float) - y0) / dy
    ix = np.floor(fx).astype(int)
    iy = np.floor(fy).astype(int)
    tx = fx - ix
    ty = fy - iy
    ix0 = np.mod(ix, nx)
    ix1 = np.mod(ix + 1, nx)
    iy0 = np.mod(iy, ny)
    iy1 = np.mod(iy + 1, ny)
    return ((1 - ty) * ((1 - tx) * pol[iy0, ix0] + tx * pol[iy0, ix1])
            + ty * ((1 - tx) * pol[iy1, ix0] + tx * pol[iy1, ix1]))


def polarization_slice(smap: SesansMap, orientation: float, xi) -> SesansCurve:
    """Polarization along the ray (xi cos t, xi sin t) by bilinear interpolation.

    Requested xi must stay within the map extent; the periodic continuation
    is physical but out-of-extent requests are rejected so accidental wraps
    surface early.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    w, h = smap.extent
    xs = xi * math.cos(orientation)
    ys = xi * math.sin(orientation)
    if (np.any(xs < smap.xi_x_axis[0]) or np.any(xs > smap.xi_x_axis[0] + w)
            or np.any(ys < smap.xi_y_axis[0]) or np.any(ys > smap.xi_y_axis[0] + h)):
        raise ValueError("requested xi extends beyond the map extent")
    pol = _bilinear_periodic(smap.pol, float(smap.xi_x_axis[0]), float(smap.xi_y_axis[0]),
                             float(smap.xi_x_axis[1] - smap.xi_x_axis[0]),
                             float(smap.xi_y_axis[1] - smap.xi_y_axis[0]), xs, ys)
    return SesansCurve(xi=xi, pol=np.asarray(pol), orientation=orientation,
                       mode="monochromatic", lambda_nm=smap.wavelength_nm)


def autocorrelation_oracle(pm: PhaseMap, xi_x: float, xi_y: float) -> float:
    """Direct-sum polarization at one lattice shift, for testing the FFT route.

    Shifts must be integer multiples of the grid spacing; wraparound is
    periodic and the value is normalized by the zero-shift sum.
    """
    sx = xi_x / pm.dx
    sy = xi_y / pm.dy
    if abs(sx - round(sx)) > 1e-9 or abs(sy - round(sy)) > 1e-9:
        raise ValueError("oracle shifts must be integer multiples of the grid spacing")
    field = np.exp(1j * pm.values)
    shifted = np.roll(field, (-int(round(sy)), -int(round(sx))), axis=(0, 1))
    num = np.sum(shifted * np.conj(field)).real
    den = np.sum(field * np.conj(field)).real
    return float(num / den)


def _tof_polarization(spec: GratingSpec, inst: InstrumentConfig, orientation: float,
                      lambdas: np.ndarray, samples_per_period: int = 64) -> np.ndarray:
    """Polarization at xi(lambda) for each wavelength, one map per wavelength.

    The indicator grid is wavelength independent, so the unit-depth phase is
    built once and rescaled per wavelength.  xi beyond the map extent wraps
    periodically, which is exact for the registry-tiled sample.
    """
    base = phase_map(spec, 1.0, samples_per_period=samples_per_period)
    unit_phase = base.values  # proportional to lambda; rescale per wavelength
    cos_t, sin_t = math.cos(orientation), math.sin(orientation)

    def one(lam: float) -> float:
        xi = xi_of_lambda(inst.xi0_per_nm, lam)
        pol = _correlation_grid(np.exp(1j * lam * unit_phase))
        # unshifted grid: index 0 is zero shift, so wrap is a plain modulo
        return float(_bilinear_periodic(pol, 0.0, 0.0, base.dx, base.dy,
                                        xi * cos_t, xi * sin_t))

    n_workers = min(worker_count(), lambdas.size)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            values = list(pool.map(one, lambdas))
    else:
        values = [one(lam) for lam in lambdas]
    return np.asarray(values)


def tof_curve(spec: GratingSpec, inst: InstrumentConfig, orientation: float = 0.0,
              n_lambda: int = 96, samples_per_period: int = 64) -> SesansCurve:
    """Time-of-flight curve over the instrument wavelength band.

    Wavelengths are sampled uniformly; xi = xi0 lambda^2 makes the xi grid
    nonuniform, as delivered by a pulsed source.  The per-wavelength contrast
    produces the sloped background without further modeling.
    """
    lo, hi = inst.band_nm
    if n_lambda < 2:
        raise ValueError("need at least two wavelength samples")
    lambdas = np.linspace(lo, hi, n_lambda)
    pol = _tof_polarization(spec, inst, orientation, lambdas, samples_per_period)
    xi = xi_of_lambda(inst.xi0_per_nm, lambdas)
    return SesansCurve(xi=xi, pol=pol, orientation=orientation, mode="tof",
                       lambda_nm=lambdas, xi0_per_nm=inst.xi0_per_nm,
                       band_nm=(lo, hi))


def model_curve_at(spec: GratingSpec, inst: InstrumentConfig, orientation: float,
                   xi, samples_per_period: int = 64) -> SesansCurve:
    """TOF-mode polarization evaluated at given xi points (lambda = sqrt(xi/xi0)).

    This is the forward model used when comparing against measured curves,
    whose xi grids are set by the instrument.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi < 0):
        raise ValueError("xi must be nonnegative")
    lambdas = np.sqrt(xi / inst.xi0_per_nm)
    pol = _tof_polarization(spec, inst, orientation, lambdas, samples_per_period)
    return SesansCurve(xi=xi, pol=pol, orientation=orientation, mode="tof",
                       lambda_nm=lambdas, xi0_per_nm=inst.xi0_per_nm,
                       band_nm=inst.band_nm)


def convolve_resolution(curve: SesansCurve, frac_width: float) -> SesansCurve:
    """Smooth a curve with the xi-proportional Gaussian instrument resolution.

    sigma(xi) = frac_width * xi; the kernel is renormalized to unit mass over
    the sampled support (trapezoid weights handle nonuniform TOF grids).
    Applying resolution twice is rejected.
    """
    if curve.resolution_applied:
        raise ValueError("resolution already applied to this curve")
    if not 0.0 <= frac_width <= 0.2:
        raise ValueError("frac_width must lie in [0, 0.2]")
    xi = curve.xi
    if np.any(np.diff(xi) <= 0):
        raise ValueError("curve must be strictly increasing in xi")
    if frac_width == 0.0:
        return replace(curve, xi=xi.copy(), pol=curve.pol.copy(),
                       resolution_applied=True)
    # trapezoid quadrature weights for the sampled support
    w = np.empty_like(xi)
    w[1:-1] = 0.5 * (xi[2:] - xi[:-2])
    w[0] = 0.5 * (xi[1] - xi[0])
    w[-1] = 0.5 * (xi[-1] - xi[-2])
    out = np.empty_like(curve.pol)
    for i, x0 in enumerate(xi):
        sigma = frac_width * x0
        if sigma == 0.0:
            out[i] = curve.pol[i]
            continue
        kern = np.exp(-0.5 * ((xi - x0) / sigma) ** 2) * w
        out[i] = np.dot(kern, curve.pol) / kern.sum()
    return replace(curve, xi=xi.copy(), pol=out, resolution_applied=True)


def stack_product(curves: list) -> SesansCurve:
    """Polarization of stacked identical-geometry gratings: elementwise product.

    All curves must share the xi grid, orientation and mode; the product is
    exact and order independent.
    """
    if not curves:
        raise ValueError("need at least one curve")
    first = curves[0]
    pol = first.pol.copy()
    for c in curves[1:]:
        if c.xi.shape != first.xi.shape or not np.array_equal(c.xi, first.xi):
            raise ValueError("curves must share the same xi grid")
        if c.orientation != first.orientation or c.mode != first.mode:
            raise ValueError("curves must share orientation and mode")
        if c.resolution_applied != first.resolution_applied:
            raise ValueError("mixing resolution-convolved and raw curves")
        pol *= c.pol
    return replace(first, xi=first.xi.copy(), pol=pol)
