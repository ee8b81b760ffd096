"""
A source spread over a disc
===========================

A cosine emitter spread evenly over a disc of radius r_s faces a coaxial
detector disc of radius r_d at distance l.  The closed form is checked
against averaging the point-source disc result over the source disc, and
against a Monte Carlo that samples both the emission point and the direction.
"""

from cosine_solid_angle import SpreadGeometry, omega_spread, oracle

cases = [
    SpreadGeometry(1e-3, 1.0, 1.0),  # nearly a point: on-axis value 1/2
    SpreadGeometry(1.0, 1.0, 1e-4),  # discs almost touching: nearly everything lands
    SpreadGeometry(1.0, 2.0, 2.0),
    SpreadGeometry(3.0, 0.5, 0.2),
]

for g in cases:
    exact = omega_spread(g).value
    quad = oracle.quad_spread(g).value
    mc = oracle.mc_omega_spread(g, oracle.McConfig(samples=1_000_000, seed=1))
    print(
        f"r_s={g.r_s:<6g} r_d={g.r_d:<4g} l={g.l:<7g} closed {exact:.8f}  "
        f"averaged {quad:.8f}  mc {mc.value:.5f} +- {mc.stderr:.5f}"
    )

# A version of the formula with an extra factor 1/2 would give 0.25 for the
# first case and 0.5 for the second, contradicting both limits.
