"""Closed-form solid angles for a point cosine source and a parallel-axis cylinder.

Values are normalised so the emission hemisphere equals 1.
"""
from .analytic import (
    AuxParams,
    SolidAngleResult,
    aux_params,
    classify,
    delta_aperture,
    omega_circ,
    omega_circ_beta_gamma,
    omega_circ_mn,
    omega_cyl0,
    omega_cyl0_asymptotic,
    omega_cyl0_beta_gamma,
    omega_spread,
    omega_spread_ms,
    omega_total,
)
from .errors import ConvergenceError, DomainError, InvalidGeometry, InvalidSweep
from .geom import (
    CylinderGeometry,
    DiscGeometry,
    Direction,
    SpreadGeometry,
    ray_hits_disc,
    ray_hits_solid_cylinder,
    validate,
)

__version__ = "0.1.0"
