"""Simulation toolkit for neutron diffraction and SESANS from forked phase gratings.

A forked phase grating (FDG) imprints an azimuthally winding phase on a
transmitted neutron beam, so its diffraction orders carry orbital angular
momentum and appear as annular "Bragg donuts" instead of point Bragg peaks.
This package builds the grating phase maps, propagates them to the far field
in the phase-object approximation, evaluates the closed-form donut profiles,
and predicts spin-echo small-angle scattering (SESANS) polarization signals,
including time-of-flight operation, instrument resolution, grating stacking,
and groove-depth fitting.

All lengths are in nanometers, angles in radians, and momentum transfer in
inverse nanometers unless a name says otherwise.
"""

__version__ = "0.1.0"

from .grating import GratingSpec, PhaseMap, phase_map
from .diffraction import DiffractionPattern, diffraction_pattern
from .sesans import SesansCurve, SesansMap, polarization_map
from .instrument import InstrumentConfig

__all__ = [
    "GratingSpec",
    "PhaseMap",
    "phase_map",
    "DiffractionPattern",
    "diffraction_pattern",
    "SesansCurve",
    "SesansMap",
    "polarization_map",
    "InstrumentConfig",
    "__version__",
]
