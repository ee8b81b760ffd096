"""
Checking the closed forms three ways
====================================

The closed-form value for one detector is compared with a ray-casting Monte
Carlo estimate, a one-dimensional azimuthal quadrature, and a direct
two-dimensional integration whose angular limits come from bisection.
"""

import math

from cosine_solid_angle import CylinderGeometry, omega_total, oracle

geom = CylinderGeometry(r=1.0, d=2.0, l1=6.0, l2=1.0)
exact = omega_total(geom).value
print(f"closed form     {exact:.12f}")

quad = oracle.quad_total(geom, oracle.QuadConfig(abs_tol=1e-12))
print(f"quadrature      {quad.value:.12f}  delta {quad.value - exact:+.1e}")

direct = oracle.direct_2d_omega(geom, oracle.QuadConfig(abs_tol=1e-10))
print(f"direct 2-D      {direct.value:.12f}  delta {direct.value - exact:+.1e}")

# The MC estimate is reproducible: the same (seed, samples, chunks) gives the
# same hit count whether or not the chunks run in parallel.
for workers in (1, 4):
    mc = oracle.mc_omega(geom, oracle.McConfig(samples=2_000_000, seed=42), workers=workers)
    z = (mc.value - exact) / mc.stderr
    print(f"monte carlo x{workers}  {mc.value:.6f} +- {mc.stderr:.6f}  ({z:+.2f} sigma)")

# In steradians rather than hemisphere units:
print(f"{exact * 2 * math.pi:.6f} sr")
