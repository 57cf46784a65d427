"""2D SESANS polarization maps as topological fingerprints.

At 38 um groove depth and 0.4 nm wavelength the grating imprints a phase of
-pi wherever there is a groove, maximizing contrast.  The polarization map
over the 2D entanglement-length plane is periodic with the 10 um plaquette
and differs strongly between topological charges: slices along the
perpendicular orientation separate charges 1, 2, 3 at a glance.
"""

from pathlib import Path

import numpy as np

from vortexsans.grating import GratingSpec, phase_map
from vortexsans.sesans import polarization_map, polarization_slice

out_dir = Path(__file__).parent / "output" / "03_polarization_maps"
out_dir.mkdir(parents=True, exist_ok=True)

slices = {}
for m in (1, 2, 3):
    spec = GratingSpec(period_nm=2000.0, charge=m, depth_nm=38000.0,
                       plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                       hole_radius_nm=500.0)
    smap = polarization_map(phase_map(spec, 0.4, samples_per_period=32))
    if m in (1, 2):
        smap.to_csv(out_dir / f"map_m{m}.csv")
    xi = smap.xi_x_axis[smap.xi_x_axis >= 0.0]
    curve = polarization_slice(smap, 0.0, xi)
    curve.to_csv(out_dir / f"slice_m{m}.csv", sidecar={"spec": spec.to_config()})
    slices[m] = curve.pol

for a, b in ((1, 2), (1, 3), (2, 3)):
    sep = np.max(np.abs(slices[a] - slices[b]))
    print(f"max |P_m{a} - P_m{b}| along the perpendicular slice: {sep:.3f}")
print(f"wrote maps (m=1,2) and slices (m=1..3) to {out_dir}")
print("render with:  python -m vortexfigs <recipe>   (kinds: ximap, curves)")
