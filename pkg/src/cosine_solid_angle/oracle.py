"""Numerical estimators used to cross-check the closed forms.

None of these call the closed-form cylinder or disc formulas, except
:func:`quad_spread`, which integrates the point-source disc result over the
source disc (that is the step it verifies).

* Monte Carlo: cosine-distributed rays, hit fraction against the ray predicates.
* Azimuthal quadrature: one-dimensional integrals over the azimuth of the
  chord lengths rho_+/- of the cylinder cross-section.
* Direct 2-D: outer azimuthal quadrature of sin^2(theta_max) - sin^2(theta_min),
  where the theta limits come from bisection on the hit predicate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import analytic
from .analytic import SolidAngleResult, circ_values
from .errors import DomainError
from .geom import (
    CylinderGeometry,
    DiscGeometry,
    Direction,
    SpreadGeometry,
    hits_disc,
    hits_solid_cylinder,
    validate,
)
from .quadrature import QuadConfig, adaptive_simpson

__all__ = [
    "McConfig",
    "QuadConfig",
    "sample_cosine_direction",
    "cosine_directions",
    "chunk_rng",
    "mc_omega",
    "mc_omega_spread",
    "rho_pm",
    "azimuthal_integrals",
    "quad_azimuthal",
    "quad_total",
    "direct_2d_omega",
    "quad_spread",
]

_BATCH = 1 << 18
_BISECT_STEPS = 80
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    chunks: int = 16

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("samples must be >= 1000")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.chunks < 1:
            raise ValueError("chunks must be >= 1")

    def chunk_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.chunks)
        return [base + (i < extra) for i in range(self.chunks)]


# -- sampling ---------------------------------------------------------------


def sample_cosine_direction(u1: float, u2: float) -> Direction:
    """Map two uniforms on [0, 1) to a direction with density cos(theta)/pi.

    sin^2(theta) = u1 is uniform, which is the inverse CDF of the cosine law.
    """
    if not (0.0 <= u1 < 1.0 and 0.0 <= u2 < 1.0):
        raise ValueError("u1 and u2 must lie in [0, 1)")
    return Direction(math.asin(math.sqrt(u1)), (2 * math.pi * u2) % (2 * math.pi))


def cosine_directions(u1, u2):
    """Vectorised :func:`sample_cosine_direction`; returns (ux, uy, uz) arrays."""
    sin_t = np.sqrt(u1)
    cos_t = np.sqrt(1.0 - u1)
    phi = 2 * np.pi * u2
    return sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Counter-based generator for one chunk, derived from (seed, chunk index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _count_chunk(count_hits, seed, chunk, size, width):
    rng = chunk_rng(seed, chunk)
    hits = 0
    left = size
    while left:
        k = min(left, _BATCH)
        hits += int(count_hits(rng.random((k, width))))
        left -= k
    return hits


def _run_chunks(count_hits, cfg, width, workers):
    jobs = [(cfg.seed, i, n, width) for i, n in enumerate(cfg.chunk_sizes()) if n]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _count_chunk(count_hits, *job), jobs))
    else:
        counts = [_count_chunk(count_hits, *job) for job in jobs]
    return sum(counts)


def _binomial(hits, n):
    p = hits / n
    return SolidAngleResult(p, "mc", math.sqrt(p * (1 - p) / n))


def mc_omega(geometry, cfg: McConfig = McConfig(), workers: int = 1) -> SolidAngleResult:
    """Monte Carlo hit fraction for a cylinder or disc.

    Hit counts are bit-identical for a given (seed, samples, chunks) whatever
    ``workers`` is.
    """
    validate(geometry)
    if isinstance(geometry, CylinderGeometry):
        g = geometry

        def count_hits(u):
            ux, uy, uz = cosine_directions(u[:, 0], u[:, 1])
            return np.count_nonzero(hits_solid_cylinder(ux, uy, uz, g.r, g.d, g.l1, g.l2))

    elif isinstance(geometry, DiscGeometry):
        g = geometry

        def count_hits(u):
            ux, uy, uz = cosine_directions(u[:, 0], u[:, 1])
            return np.count_nonzero(hits_disc(ux, uy, uz, g.r, g.d, g.l))

    else:
        raise TypeError("mc_omega takes a CylinderGeometry or DiscGeometry")
    return _binomial(_run_chunks(count_hits, cfg, 2, workers), cfg.samples)


def mc_omega_spread(geom: SpreadGeometry, cfg: McConfig = McConfig(), workers: int = 1) -> SolidAngleResult:
    """Monte Carlo for the coaxial disc source: uniform source point, then a cosine ray."""
    validate(geom)
    rs, rd, l = geom.r_s, geom.r_d, geom.l

    def count_hits(u):
        rho = rs * np.sqrt(u[:, 0])
        psi = 2 * np.pi * u[:, 1]
        ux, uy, uz = cosine_directions(u[:, 2], u[:, 3])
        t = l / uz
        x = rho * np.cos(psi) + t * ux
        y = rho * np.sin(psi) + t * uy
        return np.count_nonzero(x * x + y * y <= rd * rd)

    return _binomial(_run_chunks(count_hits, cfg, 4, workers), cfg.samples)


# -- azimuthal quadrature ---------------------------------------------------


def _radicand(phi, r, d):
    rad = r * r - (d * np.sin(phi)) ** 2
    slack = 4 * np.spacing(r * r)
    return np.where((rad < 0) & (rad >= -slack), 0.0, rad)


def _sign(sign):
    if sign in ("+", 1, +1.0):
        return 1.0
    if sign in ("-", -1, -1.0):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def rho_pm(phi: float, r: float, d: float, sign="+") -> float:
    """Distance from the source to the cylinder wall along azimuth ``phi``.

    ``sign='-'`` gives the near crossing, ``'+'`` the far one. Only the far
    crossing exists when the source is inside (d < r).
    """
    s = _sign(sign)
    if s < 0 and d < r:
        raise DomainError("rho_- is undefined for d < r")
    rad = float(_radicand(phi, r, d))
    if rad < 0:
        raise DomainError(f"azimuth {phi} misses the cylinder (radicand {rad:g} < 0)")
    return d * math.cos(phi) + s * math.sqrt(rad)


def _rho_array(phi, r, d, s):
    return d * np.cos(phi) + s * np.sqrt(_radicand(phi, r, d))


def _integral_to_tangency(g, phi_o, tol, cfg):
    # phi = phi_o (1 - s^2) turns the square-root behaviour at the tangency into a smooth one
    def h(s):
        return g(phi_o * (1 - s * s)) * 2 * phi_o * s

    return adaptive_simpson(h, 0.0, 1.0, tol, cfg.max_depth, cfg.max_evals)


def azimuthal_integrals(l: float, r: float, d: float, cfg: QuadConfig = QuadConfig(), tol=None) -> dict:
    """Raw integrals A(phi_end) = int_0^phi_end l^2 / (l^2 + rho^2) dphi.

    For d > r returns ``A_minus_phi_o`` and ``A_plus_phi_o`` (integrated up to
    the tangency azimuth); for d < r returns ``A_plus_pi``.
    """
    if not (r > 0 and l > 0 and d >= 0):
        raise DomainError("azimuthal integrals need r > 0, l > 0, d >= 0")
    if d == r:
        raise DomainError("azimuthal integrals are singular at d = r")
    tol = cfg.abs_tol if tol is None else tol
    l2 = l * l
    if d > r:
        phi_o = math.asin(r / d)
        out = {}
        for key, s in (("A_minus_phi_o", -1.0), ("A_plus_phi_o", 1.0)):
            def g(phi, s=s):
                rho = _rho_array(phi, r, d, s)
                return l2 / (l2 + rho * rho)

            out[key] = _integral_to_tangency(g, phi_o, tol, cfg)
        return out

    def g(phi):
        rho = _rho_array(phi, r, d, 1.0)
        return l2 / (l2 + rho * rho)

    return {"A_plus_pi": adaptive_simpson(g, 0.0, math.pi, tol, cfg.max_depth, cfg.max_evals)}


Target = Literal["cyl0", "circ_dgr", "circ_rgd"]


def quad_azimuthal(target: Target, l: float, r: float, d: float, cfg: QuadConfig = QuadConfig()) -> SolidAngleResult:
    """Solid angle from the one-dimensional azimuthal integrals.

    cyl0:      A_-(phi_o) / pi
    circ_dgr:  (A_-(phi_o) - A_+(phi_o)) / pi
    circ_rgd:  1 - A_+(pi) / pi
    """
    if target in ("cyl0", "circ_dgr") and not d > r:
        raise DomainError(f"{target} needs d > r")
    if target == "circ_rgd" and not d < r:
        raise DomainError("circ_rgd needs d < r")
    if target not in ("cyl0", "circ_dgr", "circ_rgd"):
        raise ValueError(f"unknown target {target!r}")
    # each raw integral is divided by pi, and circ_dgr takes a difference of two
    a = azimuthal_integrals(l, r, d, cfg, tol=cfg.abs_tol * math.pi / 2)
    if target == "cyl0":
        value = a["A_minus_phi_o"] / math.pi
    elif target == "circ_dgr":
        value = (a["A_minus_phi_o"] - a["A_plus_phi_o"]) / math.pi
    else:
        value = 1 - a["A_plus_pi"] / math.pi
    return SolidAngleResult(min(1.0, max(0.0, value)), "quadrature")


def quad_total(geom: CylinderGeometry, cfg: QuadConfig = QuadConfig()) -> SolidAngleResult:
    """Whole-detector value assembled from azimuthal quadratures, branch by branch."""
    regime = analytic.classify(geom)
    r, d, l1, l2 = geom.r, geom.d, geom.l1, geom.l2
    if regime == "below-plane":
        value = 0.0
    elif regime == "enclosing":
        value = 1.0
    elif regime == "skew-half":
        value = quad_azimuthal("cyl0", l1, r, d, cfg).value
    elif regime == "disc-only":
        value = quad_azimuthal("circ_rgd", l2, r, d, cfg).value
    else:
        value = (
            quad_azimuthal("cyl0", l1, r, d, cfg).value
            - quad_azimuthal("cyl0", l2, r, d, cfg).value
            + quad_azimuthal("circ_dgr", l2, r, d, cfg).value
        )
    return SolidAngleResult(min(1.0, max(0.0, value)), "quadrature")


# -- direct 2-D integration -------------------------------------------------


def _direction_arrays(theta, phi):
    s = np.sin(theta)
    uz = np.where(theta == _HALF_PI, 0.0, np.cos(theta))
    return s * np.cos(phi), s * np.sin(phi), uz


def _seed(phi, hit, d, z_mid):
    """Direction towards the point of the meridian half-plane closest to the
    detector axis, at mid height. When it misses, the whole meridian misses."""
    s_star = np.maximum(d * np.cos(phi), 0.0)
    theta_seed = np.arctan2(s_star, z_mid)
    return theta_seed, hit(theta_seed, phi)


def _meridian_band(phi, hit, d, z_mid):
    """sin^2(theta_max) - sin^2(theta_min) along each azimuth in ``phi``."""
    phi = np.asarray(phi, dtype=float)
    theta_seed, seed_hit = _seed(phi, hit, d, z_mid)

    zero = np.zeros_like(phi)
    right = np.full_like(phi, _HALF_PI)
    up_hit = hit(zero, phi)
    flat_hit = hit(right, phi)

    lo, hi = zero.copy(), theta_seed.copy()
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        h = hit(mid, phi)
        hi = np.where(h, mid, hi)
        lo = np.where(h, lo, mid)
    theta_min = np.where(up_hit, 0.0, hi)

    lo, hi = theta_seed.copy(), right.copy()
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        h = hit(mid, phi)
        lo = np.where(h, mid, lo)
        hi = np.where(h, hi, mid)
    theta_max = np.where(flat_hit, _HALF_PI, lo)

    band = np.sin(theta_max) ** 2 - np.sin(theta_min) ** 2
    return np.where(seed_hit, band, 0.0)


def direct_2d_omega(geometry, cfg: QuadConfig = QuadConfig()) -> SolidAngleResult:
    """Integrate the defining double integral with theta limits found by bisection."""
    validate(geometry)
    if isinstance(geometry, DiscGeometry):
        if geometry.l <= 0:
            raise DomainError("direct 2-D integration needs a disc above the source plane")
        r, d, l = geometry.r, geometry.d, geometry.l

        def hit(theta, phi):
            return hits_disc(*_direction_arrays(theta, phi), r, d, l)

        z_mid = l
    elif isinstance(geometry, CylinderGeometry):
        r, d, l1, l2 = geometry.r, geometry.d, geometry.l1, geometry.l2
        if l1 <= 0:
            return SolidAngleResult(0.0, "direct2d")

        def hit(theta, phi):
            return hits_solid_cylinder(*_direction_arrays(theta, phi), r, d, l1, l2)

        z_mid = 0.5 * (max(l2, 0.0) + l1)
    else:
        raise TypeError("direct_2d_omega takes a CylinderGeometry or DiscGeometry")

    def seen(phi):
        return bool(_seed(np.array([phi]), hit, d, z_mid)[1][0])

    # azimuthal support is [0, phi_edge] by mirror symmetry in y
    if seen(math.pi):
        phi_edge = math.pi
    elif not seen(0.0):
        return SolidAngleResult(0.0, "direct2d")
    else:
        lo, hi = 0.0, math.pi
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if seen(mid):
                lo = mid
            else:
                hi = mid
        phi_edge = lo

    def band(phi):
        return _meridian_band(phi, hit, d, z_mid)

    integral = _integral_to_tangency(band, phi_edge, cfg.abs_tol * math.pi, cfg)
    return SolidAngleResult(min(1.0, max(0.0, integral / math.pi)), "direct2d")


# -- spread source ----------------------------------------------------------


def quad_spread(geom: SpreadGeometry, cfg: QuadConfig = QuadConfig()) -> SolidAngleResult:
    """Average of the point-source disc solid angle over the source disc.

    Nested adaptive quadrature over source radius and source azimuth of
    rho * omega_circ(l, r_d, rho), normalised by pi r_s^2.
    """
    validate(geom)
    rs, rd, l = geom.r_s, geom.r_d, geom.l
    area = math.pi * rs * rs
    inner_tol = cfg.abs_tol * rs

    def ring(rho):
        out = np.empty_like(rho)
        for i, p in enumerate(rho):
            def integrand(psi, p=p):
                # the disc value depends only on the source radius, not its azimuth
                return p * circ_values(l, rd, np.full_like(psi, p))

            out[i] = adaptive_simpson(integrand, 0.0, 2 * math.pi, inner_tol, cfg.max_depth, cfg.max_evals)
        return out

    total = adaptive_simpson(ring, 0.0, rs, cfg.abs_tol * area, cfg.max_depth, cfg.max_evals)
    return SolidAngleResult(min(1.0, max(0.0, total / area)), "quadrature")
