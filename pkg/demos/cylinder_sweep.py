"""
Sliding a cylinder past the source
==================================

Two unit-radius detectors, 5 and 10 long, are moved along their axis.  l1 is
the height of the top face; the bottom face sits at l1 - length.  Each row is
one step of the sweep with the branch of the dispatch that produced it.
"""

import math
import sys

from cosine_solid_angle import sweep

specs = {
    (5.0, 1.5): sweep.SweepSpec("l1", -2, 20, 23, {"r": 1.0, "d": 1.5, "length": 5.0}),
    (10.0, 1.5): sweep.SweepSpec("l1", -2, 20, 23, {"r": 1.0, "d": 1.5, "length": 10.0}),
    (5.0, 0.5): sweep.SweepSpec("l1", -2, 20, 23, {"r": 1.0, "d": 0.5, "length": 5.0}),
}
runs = {key: sweep.run_sweep(spec) for key, spec in specs.items()}

# Source beside the detector: the value climbs towards arcsin(r/d)/pi while
# the detector straddles the source plane, then drops once it lifts off.
print(f"asymptote arcsin(1/1.5)/pi = {math.asin(1 / 1.5) / math.pi:.4f}")
print(f"{'l1':>5} {'len 5':>8} {'len 10':>8}  regime (len 5)")
for a, b in zip(runs[(5.0, 1.5)], runs[(10.0, 1.5)]):
    print(f"{a.varying:5.0f} {a.omega:8.4f} {b.omega:8.4f}  {a.regime}")

# Up to l1 = 5 both detectors reach below the source plane and only their
# upper part matters, so the two columns above agree there.

# Source under the detector: every upward ray hits until the bottom face
# passes the source, after which only that face is seen.
print()
for rec in runs[(5.0, 0.5)][::2]:
    print(f"l1 = {rec.varying:5.0f}  omega = {rec.omega:.4f}  {rec.regime}")

# The same data as CSV, ready for plotting.
sys.stdout.write(sweep.emit(runs[(5.0, 1.5)][:4], "csv", precision=6).decode())
