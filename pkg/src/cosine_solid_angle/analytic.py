"""Closed-form solid angles for a point cosine source with axis along +z.

All values are normalised so that the full emission hemisphere equals 1;
multiply by 2*pi for steradians.

Cancellation-prone quantities are assembled from exact factorisations::

    (r^2 + d^2 + l^2)^2 - 4 r^2 d^2 = (l^2 + (d - r)^2) (l^2 + (d + r)^2)
    1 - m = (l^2 + (d - r)^2) / S,   1 + m = (l^2 + (d + r)^2) / S
    1 - n = (d - r)^2 / (d^2 + r^2), 1 + n = (d + r)^2 / (d^2 + r^2)

with S = l^2 + d^2 + r^2, so the formulas stay accurate near d = r and l = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import DomainError
from .geom import CylinderGeometry, DiscGeometry, SpreadGeometry, validate

__all__ = [
    "AuxParams",
    "SolidAngleResult",
    "aux_params",
    "circ_values",
    "omega_circ",
    "omega_circ_mn",
    "omega_circ_beta_gamma",
    "delta_aperture",
    "omega_cyl0",
    "omega_cyl0_beta_gamma",
    "omega_cyl0_asymptotic",
    "classify",
    "omega_total",
    "omega_spread",
    "omega_spread_ms",
    "REGIMES",
]

Method = Literal["analytic", "mc", "quadrature", "direct2d"]

REGIMES = ("below-plane", "enclosing", "skew-half", "disc-only", "full-three-term")


@dataclass(frozen=True)
class SolidAngleResult:
    """A solid angle value tagged with the method that produced it."""

    value: float
    method: Method = "analytic"
    stderr: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"solid angle {self.value!r} outside [0, 1]")
        if (self.stderr is not None) != (self.method == "mc"):
            raise ValueError("stderr is reported for Monte Carlo results only")
        if self.stderr is not None and self.stderr < 0:
            raise ValueError("stderr must be non-negative")

    @property
    def steradians(self) -> float:
        return 2 * math.pi * self.value


@dataclass(frozen=True)
class AuxParams:
    """Dimensionless parameters of one (l, r, d) triple.

    ``one_minus_m`` and ``one_minus_n`` are the exact complements; the closed
    forms use them instead of ``1 - m`` to avoid cancellation.
    """

    m: float
    n: float
    phi_o: Optional[float]
    beta: float
    gamma: float
    one_minus_m: float
    one_minus_n: float

    @property
    def sqrt_1mm2(self) -> float:
        return math.sqrt(self.one_minus_m * (1 + self.m))

    @property
    def sqrt_1mn2(self) -> float:
        return math.sqrt(self.one_minus_n * (1 + self.n))


def _clip01(x):
    return min(1.0, max(0.0, x))


def aux_params(l: float, r: float, d: float) -> AuxParams:
    if not (r > 0 and d >= 0 and l >= 0):
        raise DomainError(f"aux_params needs r > 0, d >= 0, l >= 0 (got l={l}, r={r}, d={d})")
    l2, q = l * l, d * d + r * r
    s = l2 + q
    near = l2 + (d - r) ** 2
    far = l2 + (d + r) ** 2
    m = 2 * r * d / s
    n = 2 * r * d / q
    one_minus_m = near / s
    one_minus_n = (d - r) ** 2 / q
    if d == r:
        beta = math.pi
    else:
        beta = 2 * math.atan(math.sqrt((d + r) / abs(d - r)))
    gamma = math.atan2(math.sqrt(near * far) / s, m)
    phi_o = math.asin(r / d) if d >= r else None
    return AuxParams(m, n, phi_o, beta, gamma, one_minus_m, one_minus_n)


def circ_values(l, r, d):
    """Disc solid angle, vectorised over numpy arrays.

    Uses the single-expression form; l = 0 resolves to 0 (d > r), 1/2 (d = r)
    or 1 (d < r).
    """
    l, r, d = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (l, r, d)))
    l2 = l * l
    num = l2 + (d - r) * (d + r)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt((l2 + (d - r) ** 2) * (l2 + (d + r) ** 2))
        # for num > 0 the subtraction in 1 - num/root is rewritten without cancellation
        pos = 2 * l2 * r * r / (root * (root + num))
        neg = 0.5 * (1 - num / root)
        val = np.where(num > 0, pos, neg)
        flat = np.where(d > r, 0.0, np.where(d < r, 1.0, 0.5))
    val = np.where(l == 0, flat, val)
    return np.clip(val, 0.0, 1.0)


def omega_circ(geom: DiscGeometry) -> SolidAngleResult:
    """Solid angle of a disc parallel to the source plane."""
    validate(geom)
    return SolidAngleResult(float(circ_values(geom.l, geom.r, geom.d)))


def _require_off_rim(geom: DiscGeometry):
    validate(geom)
    if geom.d == geom.r:
        raise DomainError("this parameterisation is singular at d = r")
    if geom.d <= 0 or geom.l <= 0:
        raise DomainError("this parameterisation needs d > 0 and l > 0")


def omega_circ_mn(geom: DiscGeometry) -> SolidAngleResult:
    """Disc solid angle written in the (m, n) parameters, separately for d > r and d < r."""
    _require_off_rim(geom)
    p = aux_params(geom.l, geom.r, geom.d)
    sign = -1.0 if geom.d > geom.r else 1.0
    coeff = 1 - p.m / p.n * (1 + sign * p.sqrt_1mn2)
    return SolidAngleResult(_clip01(0.5 * (1 - coeff / p.sqrt_1mm2)))


def omega_circ_beta_gamma(geom: DiscGeometry) -> SolidAngleResult:
    _require_off_rim(geom)
    p = aux_params(geom.l, geom.r, geom.d)
    cb, cg, sg = math.cos(p.beta), math.cos(p.gamma), math.sin(p.gamma)
    if geom.d > geom.r:
        value = 0.5 * (1 - (1 + cb * cg) / sg)
    else:
        value = 0.5 * (1 - (cb + cg) / (sg * cb))
    return SolidAngleResult(_clip01(value))


def delta_aperture(geom: DiscGeometry) -> float:
    """Plane angle the disc subtends in the plane through the source axis and disc centre.

    The disc solid angle equals (1 - cos(delta)) / 2.
    """
    validate(geom)
    if geom.l <= 0:
        raise DomainError("delta aperture needs l > 0")
    return math.atan((geom.d + geom.r) / geom.l) - math.atan((geom.d - geom.r) / geom.l)


_LD = np.longdouble
_PI_LD = 4 * np.arctan(_LD(1))


def _cyl0_ext(l, r, d):
    # omega_cyl0 in long double; inputs already validated
    l, r, d = _LD(l), _LD(r), _LD(d)
    l2, q = l * l, d * d + r * r
    s = l2 + q
    m, n = 2 * r * d / s, 2 * r * d / q
    omm, omn = (l2 + (d - r) ** 2) / s, (d - r) ** 2 / q
    tan_half_beta = np.sqrt(np.sqrt((1 + n) / omn))
    ratio_m = np.sqrt((1 + m) / omm)
    coeff = (1 - m / n * (1 - np.sqrt(omn * (1 + n)))) / np.sqrt(omm * (1 + m))
    return (np.arctan(tan_half_beta) - coeff * np.arctan(ratio_m / tan_half_beta)) / _PI_LD


def _require_skew(l, r, d):
    if not (r > 0 and l >= 0 and math.isfinite(l) and math.isfinite(d)):
        raise DomainError(f"need r > 0 and finite l >= 0 (got l={l}, r={r})")
    if not d > r:
        raise DomainError(f"lateral solid angle is defined for d > r only (got d={d}, r={r})")


def omega_cyl0(l: float, r: float, d: float) -> SolidAngleResult:
    """Lateral-surface solid angle of a cylinder spanning z in [0, l], source outside (d > r).

    Grows monotonically from 0 at l = 0 towards arcsin(r/d)/pi as l -> inf.
    """
    _require_skew(l, r, d)
    if l == 0:
        return SolidAngleResult(0.0)
    # the two arctan terms nearly cancel for short cylinders, so work in extended precision
    return SolidAngleResult(_clip01(float(_cyl0_ext(l, r, d))))


def omega_cyl0_beta_gamma(l: float, r: float, d: float) -> SolidAngleResult:
    _require_skew(l, r, d)
    if l <= 0:
        raise DomainError("the (beta, gamma) form needs l > 0")
    p = aux_params(l, r, d)
    cb, cg, sg = math.cos(p.beta), math.cos(p.gamma), math.sin(p.gamma)
    cot_half_gamma = 1 / math.tan(p.gamma / 2)
    cot_half_beta = 1 / math.tan(p.beta / 2)
    value = (p.beta / 2 - (1 + cb * cg) / sg * math.atan(cot_half_gamma * cot_half_beta)) / math.pi
    return SolidAngleResult(_clip01(value))


def omega_cyl0_asymptotic(r: float, d: float, form: Literal["phi", "n"] = "phi") -> SolidAngleResult:
    """Limit of :func:`omega_cyl0` as l -> inf.

    ``form="phi"`` returns arcsin(r/d)/pi; ``form="n"`` evaluates the
    equivalent 1/2 - (2/pi) arctan(((1-n)/(1+n))^(1/4)).
    """
    _require_skew(0.0, r, d)
    if form == "phi":
        return SolidAngleResult(math.asin(r / d) / math.pi)
    if form != "n":
        raise ValueError(f"unknown form {form!r}")
    p = aux_params(0.0, r, d)
    root4 = math.sqrt(math.sqrt(p.one_minus_n / (1 + p.n)))
    return SolidAngleResult(_clip01(0.5 - 2 / math.pi * math.atan(root4)))


def classify(geom: CylinderGeometry) -> str:
    """Which branch of the whole-detector dispatch applies to ``geom``.

    Boundary cases take the tag of the region whose formula they use:
    l1 = 0 is below-plane, l2 = 0 belongs with l2 < 0.
    """
    validate(geom)
    if geom.l1 <= 0:
        return "below-plane"
    if geom.l2 <= 0:
        if geom.d == geom.r:
            raise DomainError("source on the lateral surface of a detector that straddles z = 0")
        return "enclosing" if geom.d < geom.r else "skew-half"
    return "full-three-term" if geom.d > geom.r else "disc-only"


def omega_total(geom: CylinderGeometry) -> SolidAngleResult:
    """Solid angle of the whole detector (lateral wall plus end discs)."""
    regime = classify(geom)
    r, d, l1, l2 = geom.r, geom.d, geom.l1, geom.l2
    if regime == "below-plane":
        value = 0.0
    elif regime == "enclosing":
        value = 1.0
    elif regime == "skew-half":
        value = omega_cyl0(l1, r, d).value
    elif regime == "disc-only":
        # d == r lands here: the wall is seen edge-on and both one-sided limits agree
        value = float(circ_values(l2, r, d))
    else:
        _require_skew(l1, r, d)
        lateral = _cyl0_ext(l1, r, d) - _cyl0_ext(l2, r, d)
        value = float(lateral + _LD(float(circ_values(l2, r, d))))
    return SolidAngleResult(_clip01(value))


def omega_spread(geom: SpreadGeometry) -> SolidAngleResult:
    """Hit probability for a cosine source spread uniformly over a coaxial disc.

    Evaluates (S - sqrt(S^2 - 4 r_s^2 r_d^2)) / (2 r_s^2), S = l^2 + r_s^2 + r_d^2,
    in the rationalised form 2 r_d^2 / (S + sqrt(...)) so the point-source limit
    r_s -> 0 carries no cancellation.
    """
    validate(geom)
    rs, rd, l = geom.r_s, geom.r_d, geom.l
    s = l * l + rs * rs + rd * rd
    root = math.hypot(l * l + (rs - rd) * (rs + rd), 2 * l * rd)
    return SolidAngleResult(_clip01(2 * rd * rd / (s + root)))


def omega_spread_ms(geom: SpreadGeometry) -> SolidAngleResult:
    """Same quantity as :func:`omega_spread`, via m_s = 2 r_d r_s / (l^2 + r_d^2 + r_s^2).

    Equals (r_d / r_s) * (1 - sqrt(1 - m_s^2)) / m_s = (r_d / r_s) * tan(gamma_s / 2)
    with sin(gamma_s) = m_s.
    """
    validate(geom)
    rs, rd, l = geom.r_s, geom.r_d, geom.l
    s = l * l + rs * rs + rd * rd
    ms = 2 * rd * rs / s
    one_minus_ms2 = (l * l + (rs - rd) ** 2) * (l * l + (rs + rd) ** 2) / (s * s)
    # 1 - sqrt(1 - m^2) = m^2 / (1 + sqrt(1 - m^2))
    return SolidAngleResult(_clip01(rd / rs * ms / (1 + math.sqrt(one_minus_ms2))))
