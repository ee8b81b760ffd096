"""Detector geometries and ray intersection predicates.

Coordinate frame: the point source sits at the origin and emits into z >= 0.
Cylinder and disc axes are parallel to z and lie in the xz half-plane at
x = d >= 0.

The array predicates (``hits_*``) accept direction components as numpy
arrays and are what the Monte Carlo and 2-D quadrature oracles call. The
``ray_hits_*`` functions are scalar conveniences taking a :class:`Direction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometry

__all__ = [
    "CylinderGeometry",
    "DiscGeometry",
    "SpreadGeometry",
    "Direction",
    "validate",
    "hits_solid_cylinder",
    "hits_cylinder_surface",
    "hits_disc",
    "ray_hits_solid_cylinder",
    "ray_hits_disc",
]


@dataclass(frozen=True)
class CylinderGeometry:
    """Finite cylinder with end discs at z = l2 (lower) and z = l1 (upper)."""

    r: float
    d: float
    l1: float
    l2: float

    @property
    def length(self) -> float:
        return self.l1 - self.l2

    def scaled(self, s: float) -> "CylinderGeometry":
        return CylinderGeometry(self.r * s, self.d * s, self.l1 * s, self.l2 * s)


@dataclass(frozen=True)
class DiscGeometry:
    """Disc of radius r in the plane z = l, centred at (d, 0, l)."""

    r: float
    d: float
    l: float

    def scaled(self, s: float) -> "DiscGeometry":
        return DiscGeometry(self.r * s, self.d * s, self.l * s)


@dataclass(frozen=True)
class SpreadGeometry:
    """Coaxial source disc (radius r_s, at z = 0) and detector disc (r_d, at z = l)."""

    r_s: float
    r_d: float
    l: float

    def scaled(self, s: float) -> "SpreadGeometry":
        return SpreadGeometry(self.r_s * s, self.r_d * s, self.l * s)


@dataclass(frozen=True)
class Direction:
    """Unit vector in the upper hemisphere, by polar angle and azimuth."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi!r}")

    @property
    def vector(self) -> tuple[float, float, float]:
        s = math.sin(self.theta)
        z = 0.0 if self.theta == math.pi / 2 else math.cos(self.theta)
        return (s * math.cos(self.phi), s * math.sin(self.phi), z)


def _check_finite(name, value):
    if not math.isfinite(value):
        raise InvalidGeometry(name, f"must be finite, got {value!r}")


def validate(geometry):
    """Return ``geometry`` unchanged if its invariants hold, else raise InvalidGeometry."""
    if isinstance(geometry, CylinderGeometry):
        for name in ("r", "d", "l1", "l2"):
            _check_finite(name, getattr(geometry, name))
        if geometry.r <= 0:
            raise InvalidGeometry("r", "radius must be > 0")
        if geometry.d < 0:
            raise InvalidGeometry("d", "axis distance must be >= 0")
        if geometry.l1 <= geometry.l2:
            raise InvalidGeometry("l1<=l2", "upper end disc must lie above the lower one")
    elif isinstance(geometry, DiscGeometry):
        for name in ("r", "d", "l"):
            _check_finite(name, getattr(geometry, name))
        if geometry.r <= 0:
            raise InvalidGeometry("r", "radius must be > 0")
        if geometry.d < 0:
            raise InvalidGeometry("d", "axis distance must be >= 0")
        if geometry.l < 0:
            raise InvalidGeometry("l", "disc height must be >= 0")
    elif isinstance(geometry, SpreadGeometry):
        for name in ("r_s", "r_d", "l"):
            _check_finite(name, getattr(geometry, name))
        if geometry.r_s <= 0:
            raise InvalidGeometry("r_s", "source radius must be > 0")
        if geometry.r_d <= 0:
            raise InvalidGeometry("r_d", "detector radius must be > 0")
        if geometry.l <= 0:
            raise InvalidGeometry("l", "separation must be > 0")
    else:
        raise TypeError(f"not a geometry: {type(geometry).__name__}")
    return geometry


def _lateral_interval(ux, uy, r, d):
    """Parameter interval [t_lo, t_hi] over which the ray lies inside the infinite cylinder.

    Empty intervals are returned as (inf, -inf).
    """
    a = ux * ux + uy * uy
    b = d * ux
    c = (d - r) * (d + r)
    disc = b * b - a * c
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.maximum(disc, 0.0))
        q = b + np.copysign(sq, b)
        t1 = q / a
        t2 = np.where(q != 0, c / q, 0.0)
    lo = np.minimum(t1, t2)
    hi = np.maximum(t1, t2)

    vertical = a == 0
    inside_axis = c <= 0
    empty = (~vertical & (disc < 0)) | (vertical & ~inside_axis)
    lo = np.where(vertical & inside_axis, -np.inf, lo)
    hi = np.where(vertical & inside_axis, np.inf, hi)
    lo = np.where(empty, np.inf, lo)
    hi = np.where(empty, -np.inf, hi)
    return lo, hi


def _slab_interval(uz, zlo, zhi):
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = zlo / uz
        hi = zhi / uz
    flat = uz == 0
    in_slab = (zlo <= 0) & (0 <= zhi)
    lo = np.where(flat, np.where(in_slab, -np.inf, np.inf), lo)
    hi = np.where(flat, np.where(in_slab, np.inf, -np.inf), hi)
    return lo, hi


def hits_solid_cylinder(ux, uy, uz, r, d, l1, l2):
    """Vectorised test for rays from the origin meeting the closed solid cylinder.

    Direction components must have ``uz >= 0``. Returns a boolean array.
    """
    ux, uy, uz = np.asarray(ux, float), np.asarray(uy, float), np.asarray(uz, float)
    lat_lo, lat_hi = _lateral_interval(ux, uy, r, d)
    slab_lo, slab_hi = _slab_interval(uz, l2, l1)
    lo = np.maximum(lat_lo, slab_lo)
    hi = np.minimum(lat_hi, slab_hi)
    return (lo <= hi) & (hi > 0)


def hits_cylinder_surface(ux, uy, uz, r, d, l1, l2):
    """Vectorised test against the boundary surface only (lateral wall plus end discs).

    Independent of :func:`hits_solid_cylinder`; used to check that the two agree.
    """
    ux, uy, uz = np.asarray(ux, float), np.asarray(uy, float), np.asarray(uz, float)
    a = ux * ux + uy * uy
    b = d * ux
    c = (d - r) * (d + r)
    disc = b * b - a * c
    hit = np.zeros(np.broadcast(ux, uy, uz).shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.maximum(disc, 0.0))
        for t in ((b - sq) / a, (b + sq) / a):
            z = t * uz
            ok = (a > 0) & (disc >= 0) & (t > 0) & (z >= l2) & (z <= l1)
            hit |= ok
        # a vertical ray runs along the wall only when the source sits on it
        hit |= (a == 0) & (c == 0) & (l1 > 0)
        for zc in (l1, l2):
            t = zc / uz
            x = t * ux - d
            y = t * uy
            ok = (uz > 0) & (t > 0) & (x * x + y * y <= r * r)
            hit |= ok
    return hit


def hits_disc(ux, uy, uz, r, d, l):
    """Vectorised test for rays from the origin crossing the disc at height l."""
    ux, uy, uz = np.asarray(ux, float), np.asarray(uy, float), np.asarray(uz, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = l / uz
        x = t * ux - d
        y = t * uy
        upward = (uz > 0) & (x * x + y * y <= r * r)
    if l != 0:
        return upward
    # in-plane rays for a disc lying in the source plane
    lat_lo, lat_hi = _lateral_interval(ux, uy, r, d)
    in_plane = (uz == 0) & (lat_lo <= lat_hi) & (lat_hi >= 0)
    return upward | in_plane


def ray_hits_solid_cylinder(direction: Direction, geom: CylinderGeometry) -> bool:
    ux, uy, uz = direction.vector
    return bool(hits_solid_cylinder(ux, uy, uz, geom.r, geom.d, geom.l1, geom.l2))


def ray_hits_disc(direction: Direction, geom: DiscGeometry) -> bool:
    ux, uy, uz = direction.vector
    return bool(hits_disc(ux, uy, uz, geom.r, geom.d, geom.l))
