"""
A disc above a cosine source
============================

How much of the emission hemisphere does a disc of radius 1 catch as it is
raised and slid sideways?  The value is normalised so the hemisphere is 1.
"""

import numpy as np

from cosine_solid_angle import DiscGeometry, omega_circ
from cosine_solid_angle.analytic import circ_values, delta_aperture

# On the axis a disc at height l = r catches exactly half.
print("on axis, l = r:", omega_circ(DiscGeometry(1, 0, 1)).value)

# Lying in the source plane the answer is 0, 1/2 or 1 depending on whether
# the source is outside, on the rim of, or under the disc.
for d in (2.0, 1.0, 0.5):
    print(f"l = 0, d = {d}:", omega_circ(DiscGeometry(1, d, 0)).value)

# circ_values is vectorised, so a whole height scan is one call.
heights = np.linspace(0, 4, 9)
for d in (0.5, 2.0):
    row = circ_values(heights, 1.0, d)
    print(f"d = {d}:", np.array2string(row, precision=4))

# Off to the side (d > r) the curve first rises and then falls.  Its peak is
# where the aperture angle delta is largest, at l = sqrt(d^2 - r^2).
d = 2.0
peak = np.sqrt(d * d - 1)
print(f"peak height for d = {d}: {peak:.4f}, omega there = {omega_circ(DiscGeometry(1, d, peak)).value:.6f}")

# The same value follows from the plane angle the disc subtends.
delta = delta_aperture(DiscGeometry(1, d, peak))
print("(1 - cos delta) / 2 =", 0.5 * (1 - np.cos(delta)))
