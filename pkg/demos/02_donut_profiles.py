"""Closed-form Bragg-donut profiles against the brute-force FFT.

The radial intensity of one diffraction order from a disc-limited forked
grating has a closed form: a generalized hypergeometric 1F2 with the
winding |n*m| in its parameters.  Here both routes are evaluated for
charges 1..3 with the same 4 um disc aperture and no fitted parameter,
then written as CSV pairs for the donut-comparison figure.  The peak
radius grows by a near-constant step per unit charge.
"""

from pathlib import Path

import numpy as np

from vortexsans.diffraction import (diffraction_pattern, donut_peak_radius,
                                    radial_profile)
from vortexsans.grating import GratingSpec, crop_to_disc, pad_window, phase_map
from vortexsans.specfun import donut_profile

out_dir = Path(__file__).parent / "output" / "02_donut_profiles"
out_dir.mkdir(parents=True, exist_ok=True)

DISC_NM = 4000.0
LAM = 0.4
peaks = {}
for m in (1, 2, 3):
    spec = GratingSpec(period_nm=1000.0, charge=m, depth_nm=5000.0,
                       plaquette_w_nm=12000.0, plaquette_h_nm=12000.0,
                       hole_radius_nm=0.0)
    pm = crop_to_disc(phase_map(spec, LAM, samples_per_period=16), DISC_NM)
    dp = diffraction_pattern(pad_window(pm, 10))
    prof = radial_profile(dp, 1, nbins=200)
    prof.to_csv(out_dir / f"numeric_m{m}.csv")
    peaks[m] = donut_peak_radius(prof)

    contrast = complex(np.exp(-1j * spec.sld_per_nm2 * LAM * spec.depth_nm) - 1.0)
    analytic = donut_profile(1, m, DISC_NM, prof.q_prime, contrast,
                             wavelength_nm=LAM)
    analytic.to_csv(out_dir / f"analytic_m{m}.csv")

print("numeric donut peak radii (per nm):")
for m, r in peaks.items():
    print(f"  m={m}: {r:.3e}" + ("" if m == 1 else
          f"   ratio to m=1: {r / peaks[1]:.2f}"))
print("note the affine growth: each unit of charge adds a near-constant step")
print(f"wrote analytic/numeric CSV pairs to {out_dir}")
