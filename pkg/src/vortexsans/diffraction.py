"""Far-field diffraction in the phase-object approximation.

The scattering amplitude is the transverse Fourier transform of the
unit-modulus field ``exp(i Phi)`` scaled by ``-i / lambda``; the q axes
follow the forward-transform kernel ``exp(-i q . r)`` with ``q`` equal to
2 pi times the DFT frequency.  The transmitted beam sits at q = 0 and stays
part of the pattern.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .grating import GratingSpec, PhaseMap
from .specfun import half_period_weight


class NotADonutError(ValueError):
    """Raised when a radial profile has no interior intensity maximum."""


def transmitted_amplitude(rho: float, wavelength_nm: float, depth_nm: float) -> complex:
    """Amplitude of the unscattered beam, (exp(-i rho lambda d) + 1) / 2.

    Vanishes for a pi-shift grating (rho lambda d = pi).
    """
    return (np.exp(-1j * rho * wavelength_nm * depth_nm) + 1.0) / 2.0


def order_weight(n: int, rho: float, wavelength_nm: float, depth_nm: float) -> complex:
    """Field weight of diffraction order n, (exp(-i rho lambda d) - 1)/2 * sinc(n pi/2).

    Exactly zero for even n; magnitudes fall off as 1/n through the odd
    orders.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    contrast = np.exp(-1j * rho * wavelength_nm * depth_nm) - 1.0
    return 0.5 * contrast * half_period_weight(n)


def order_angle(n: int, wavelength_nm: float, period_nm: float) -> float:
    """Small-angle deviation of order n from the beam axis, n lambda / p (rad)."""
    if period_nm <= 0:
        raise ValueError("period must be positive")
    return n * wavelength_nm / period_nm


@dataclass(frozen=True)
class DiffractionPattern:
    """Complex far-field amplitude and intensity on a centered (qx, qy) grid."""

    qx_axis: np.ndarray
    qy_axis: np.ndarray
    amplitude: np.ndarray
    intensity: np.ndarray
    wavelength_nm: float
    source_spec: GratingSpec | None = None
    apodized: bool = False

    def __post_init__(self):
        for arr in (self.qx_axis, self.qy_axis, self.amplitude, self.intensity):
            arr.flags.writeable = False

    @property
    def dqx(self) -> float:
        return float(self.qx_axis[1] - self.qx_axis[0])

    @property
    def dqy(self) -> float:
        return float(self.qy_axis[1] - self.qy_axis[0])

    def save_grid(self, path):
        """Write the intensity grid with a little-endian binary header.

        Layout: int64 nx, int64 ny, float64 dqx, float64 dqy, float64
        lambda_nm, then ny*nx float64 intensities in row-major order.
        """
        ny, nx = self.intensity.shape
        header = struct.pack("<qqddd", nx, ny, self.dqx, self.dqy, self.wavelength_nm)
        body = self.intensity.astype("<f8").tobytes(order="C")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(body)


def load_grid(path):
    """Read a grid written by :meth:`DiffractionPattern.save_grid`.

    Returns (intensity, qx_axis, qy_axis, wavelength_nm).
    """
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<qqddd"))
        nx, ny, dqx, dqy, lam = struct.unpack("<qqddd", header)
        body = np.frombuffer(fh.read(), dtype="<f8").reshape(ny, nx)
    qx = (np.arange(nx) - nx // 2) * dqx
    qy = (np.arange(ny) - ny // 2) * dqy
    return body, qx, qy, lam


def diffraction_pattern(pm: PhaseMap, apodize: bool = False) -> DiffractionPattern:
    """Far-field pattern of a phase map via the 2D FFT.

    ``apodize`` multiplies the field by a raised-cosine window to suppress
    the sinc artifacts of the square grid boundary; the default keeps the
    physical hard aperture.  The Parseval identity
    sum(I) dqx dqy = (2 pi / lambda)^2 * area holds for unapodized maps.
    """
    if not np.all(np.isfinite(pm.values)):
        raise ValueError("phase map contains non-finite values")
    field = np.exp(1j * pm.values)
    if apodize:
        wx = 0.5 * (1.0 - np.cos(2.0 * np.pi * (np.arange(pm.nx) + 0.5) / pm.nx))
        wy = 0.5 * (1.0 - np.cos(2.0 * np.pi * (np.arange(pm.ny) + 0.5) / pm.ny))
        field = field * np.outer(wy, wx)
    amp = np.fft.fftshift(np.fft.fft2(field)) * (-1j / pm.wavelength_nm) * pm.dx * pm.dy
    qx = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(pm.nx, d=pm.dx))
    qy = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(pm.ny, d=pm.dy))
    return DiffractionPattern(qx_axis=qx, qy_axis=qy, amplitude=amp,
                              intensity=np.abs(amp) ** 2,
                              wavelength_nm=pm.wavelength_nm,
                              source_spec=pm.spec, apodized=apodize)


@dataclass(frozen=True)
class RadialProfile:
    """Azimuthally averaged intensity about one diffraction-order center.

    Empty bins keep NaN intensity and zero count; they are flagged rather
    than interpolated.
    """

    order_n: int
    side: int
    q_prime: np.ndarray
    intensity: np.ndarray
    counts: np.ndarray

    def to_csv(self, path):
        rows = np.column_stack([self.q_prime, self.intensity, self.counts])
        np.savetxt(path, rows, delimiter=",", header="q_prime,intensity,count",
                   comments="", fmt="%.17g")


def radial_profile(dp: DiffractionPattern, n: int, side: int = 1,
                   nbins: int = 128) -> RadialProfile:
    """Bin-averaged intensity versus radius q' about the order-n center.

    The annulus is capped at half the order spacing (pi / p) so neighboring
    orders stay out of each other's profiles.
    """
    if dp.source_spec is None:
        raise ValueError("pattern carries no grating provenance; period unknown")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if nbins < 1:
        raise ValueError("nbins must be positive")
    p = dp.source_spec.period_nm
    center = side * 2.0 * np.pi * n / p
    if not dp.qx_axis[0] <= center <= dp.qx_axis[-1]:
        raise ValueError("order center lies outside the q grid")
    cap = np.pi / p
    dq = np.hypot(dp.qx_axis[np.newaxis, :] - center, dp.qy_axis[:, np.newaxis])
    mask = dq < cap
    edges = np.linspace(0.0, cap, nbins + 1)
    idx = np.minimum(np.digitize(dq[mask], edges) - 1, nbins - 1)
    sums = np.bincount(idx, weights=dp.intensity[mask], minlength=nbins)
    counts = np.bincount(idx, minlength=nbins)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return RadialProfile(order_n=n, side=side, q_prime=centers,
                         intensity=means, counts=counts)


def donut_peak_radius(profile: RadialProfile) -> float:
    """q' of the profile maximum, refined by 3-point parabolic interpolation.

    A profile whose maximum sits on the boundary of the occupied bins has no
    donut (an ordinary Bragg peak is maximal at q' = 0) and raises
    :class:`NotADonutError`.
    """
    if profile.q_prime.size < 8:
        raise ValueError("profile needs at least 8 bins")
    occupied = np.flatnonzero(profile.counts > 0)
    if occupied.size < 3:
        raise ValueError("profile needs at least 3 occupied bins")
    q = profile.q_prime[occupied]
    y = profile.intensity[occupied]
    k = int(np.argmax(y))
    if k == 0 or k == y.size - 1:
        raise NotADonutError("no interior intensity maximum; not a donut")
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:
        return float(q[k])
    shift = 0.5 * (y0 - y2) / denom
    left = q[k] - q[k - 1]
    right = q[k + 1] - q[k]
    return float(q[k] + shift * (right if shift > 0 else left))
