"""Randomised oracle-versus-closed-form concordance runs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, oracle
from .errors import ConvergenceError
from .geom import CylinderGeometry, DiscGeometry


@dataclass
class Suite:
    name: str
    threshold: str
    passed: int = 0
    failed: int = 0
    worst: float = 0.0
    failures: list = field(default_factory=list)

    def record(self, ok, discrepancy, case):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(case)
        if not math.isnan(discrepancy):
            self.worst = max(self.worst, discrepancy)

    @property
    def total(self):
        return self.passed + self.failed

    def line(self):
        return f"{self.name}: {self.passed}/{self.total} pass ({self.threshold}), worst |delta| = {self.worst:.3e}"


def random_case(rng: np.random.Generator):
    """(r, d, l) with d/r log-uniform in [0.1, 10] (kept 1e-3 away from 1) and l/r in [0.01, 100]."""
    r = 10 ** rng.uniform(-0.3, 0.3)
    while True:
        ratio = 10 ** rng.uniform(-1, 1)
        if abs(ratio - 1) > 1e-3:
            break
    return r, r * ratio, r * 10 ** rng.uniform(-2, 2)


def random_cylinder(rng: np.random.Generator):
    r, d, l1 = random_case(rng)
    length = r * 10 ** rng.uniform(-1, 1)
    return CylinderGeometry(r, d, l1, l1 - length)


def quadrature_suites(cases: int, seed: int, cfg: oracle.QuadConfig, quad_limit: float, direct_limit: float):
    """Azimuthal-quadrature and direct 2-D suites over ``cases`` random geometries."""
    rng = np.random.default_rng(seed)
    quad = Suite("quad_azimuthal", f"|delta| <= {quad_limit:g}")
    direct = Suite("direct_2d", f"|delta| <= {direct_limit:g}")
    for _ in range(cases):
        r, d, l = random_case(rng)
        cyl = random_cylinder(rng)
        disc = DiscGeometry(r, d, l)
        exact_disc = analytic.omega_circ(disc).value
        try:
            if d > r:
                delta = max(
                    abs(oracle.quad_azimuthal("cyl0", l, r, d, cfg).value - analytic.omega_cyl0(l, r, d).value),
                    abs(oracle.quad_azimuthal("circ_dgr", l, r, d, cfg).value - exact_disc),
                )
            else:
                delta = abs(oracle.quad_azimuthal("circ_rgd", l, r, d, cfg).value - exact_disc)
        except ConvergenceError:
            delta = math.inf
        quad.record(delta <= quad_limit, delta, (r, d, l))
        try:
            delta = max(
                abs(oracle.direct_2d_omega(disc, cfg).value - exact_disc),
                abs(oracle.direct_2d_omega(cyl, cfg).value - analytic.omega_total(cyl).value),
            )
        except ConvergenceError:
            delta = math.inf
        direct.record(delta <= direct_limit, delta, (disc, cyl))
    return quad, direct


def mc_suite(cases: int, samples: int, seed: int, min_fraction: float = 0.96):
    """Monte Carlo suite: each case passes when |mc - analytic| <= 4 sigma.

    The suite passes when at least ``min_fraction`` of the cases do. Returns
    (suite, suite_ok).
    """
    rng = np.random.default_rng(seed)
    suite = Suite("monte_carlo", f"|delta| <= 4 sigma in >= {min_fraction:.0%} of cases")
    for i in range(cases):
        if i % 2:
            geom = random_cylinder(rng)
            exact = analytic.omega_total(geom).value
        else:
            geom = DiscGeometry(*random_case(rng))
            exact = analytic.omega_circ(geom).value
        cfg = oracle.McConfig(samples, int(rng.integers(2**63)))
        res = oracle.mc_omega(geom, cfg)
        # an empty or full tally has zero plug-in variance; fall back to the exact binomial sigma
        sigma = max(res.stderr, math.sqrt(exact * (1 - exact) / samples))
        delta = abs(res.value - exact)
        suite.record(delta <= 4 * sigma, delta, geom)
    return suite, suite.passed >= math.ceil(min_fraction * cases)
