"""Regenerate the committed figure fixtures from the simulation toolkit.

Run from this directory:  python make_fixtures.py

The rendering package consumes only the files written here (the toolkit's
export formats); regeneration requires the `vortexsans` package.
"""

from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).parent / "fixtures"


def main():
    from vortexsans.diffraction import diffraction_pattern, radial_profile
    from vortexsans.grating import GratingSpec, crop_to_disc, pad_window, phase_map
    from vortexsans.instrument import InstrumentConfig
    from vortexsans.sesans import convolve_resolution, polarization_map, tof_curve
    from vortexsans.specfun import donut_profile

    FIXTURES.mkdir(exist_ok=True)

    # intensity grid: one charge-1 plaquette in a padded window
    spec = GratingSpec(period_nm=2000.0, charge=1, depth_nm=5000.0,
                       plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                       hole_radius_nm=500.0)
    dp = diffraction_pattern(pad_window(phase_map(spec, 0.4, samples_per_period=16), 4))
    dp.save_grid(FIXTURES / "pattern.grid")

    # polarization map at full pi contrast
    deep = GratingSpec(period_nm=2000.0, charge=1, depth_nm=38000.0,
                       plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                       hole_radius_nm=500.0)
    polarization_map(phase_map(deep, 0.4, samples_per_period=16)).to_csv(
        FIXTURES / "map_m1.csv")

    # TOF curves for two charges, with instrument resolution
    inst = InstrumentConfig()
    for m, depth in ((1, 5500.0), (2, 3900.0)):
        s = GratingSpec(period_nm=2000.0, charge=m, depth_nm=depth,
                        plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                        hole_radius_nm=500.0)
        curve = convolve_resolution(
            tof_curve(s, inst, 0.0, n_lambda=48, samples_per_period=16),
            inst.frac_resolution)
        curve.to_csv(FIXTURES / f"tof_m{m}.csv",
                     sidecar={"spec": s.to_config(), "instrument": inst.to_config()})

    # matched analytic/numeric donut profiles over a shared disc aperture
    disc_nm = 4000.0
    for m in (1, 2, 3):
        s = GratingSpec(period_nm=1000.0, charge=m, depth_nm=5000.0,
                        plaquette_w_nm=12000.0, plaquette_h_nm=12000.0,
                        hole_radius_nm=0.0)
        pm = crop_to_disc(phase_map(s, 0.4, samples_per_period=16), disc_nm)
        pattern = diffraction_pattern(pad_window(pm, 10))
        prof = radial_profile(pattern, 1, nbins=200)
        prof.to_csv(FIXTURES / f"donut_numeric_m{m}.csv")
        contrast = complex(np.exp(-1j * s.sld_per_nm2 * 0.4 * s.depth_nm) - 1.0)
        donut_profile(1, m, disc_nm, prof.q_prime, contrast,
                      wavelength_nm=0.4).to_csv(FIXTURES / f"donut_analytic_m{m}.csv")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
