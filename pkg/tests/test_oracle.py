import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosine_solid_angle import analytic as A
from cosine_solid_angle import oracle as O
from cosine_solid_angle.errors import ConvergenceError, DomainError, InvalidGeometry
from cosine_solid_angle.geom import CylinderGeometry, DiscGeometry, SpreadGeometry

# -- sampler ----------------------------------------------------------------


def test_sampler_endpoints():
    up = O.sample_cosine_direction(0.0, 0.0)
    assert up.theta == 0.0 and up.phi == 0.0
    edge = O.sample_cosine_direction(math.nextafter(1.0, 0.0), 0.5)
    assert edge.theta == pytest.approx(math.pi / 2, abs=1e-7)
    assert edge.phi == pytest.approx(math.pi, abs=1e-15)


@pytest.mark.parametrize("u1, u2", [(1.0, 0.2), (0.2, 1.0), (-0.1, 0.2)])
def test_sampler_rejects_out_of_range(u1, u2):
    with pytest.raises(ValueError):
        O.sample_cosine_direction(u1, u2)


@settings(max_examples=100)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_sampler_matches_vectorised(u1, u2):
    d = O.sample_cosine_direction(u1, u2)
    ux, uy, uz = O.cosine_directions(np.array([u1]), np.array([u2]))
    # asin(sqrt(u1)) is ill-conditioned as u1 -> 1, so z agrees only to ~sqrt(eps)
    assert np.allclose(d.vector, (ux[0], uy[0], uz[0]), atol=1e-7)
    assert math.sin(d.theta) ** 2 == pytest.approx(u1, abs=1e-12)


def _sin2_samples(n, seed=0):
    u = O.chunk_rng(seed, 0).random((n, 2))
    ux, uy, _ = O.cosine_directions(u[:, 0], u[:, 1])
    return ux * ux + uy * uy


def test_sampler_fraction_below_0_3():
    n = 10**6
    frac = np.count_nonzero(_sin2_samples(n) <= 0.3) / n
    assert abs(frac - 0.3) <= 4 * math.sqrt(0.3 * 0.7 / n)


def test_sampler_ks_uniform():
    n = 10**6
    x = np.sort(_sin2_samples(n, seed=1))
    i = np.arange(1, n + 1)
    stat = max(np.max(i / n - x), np.max(x - (i - 1) / n))
    assert stat < 1.628 / math.sqrt(n)


def test_sampler_density_is_cosine():
    # mean of cos(theta) under density cos/pi is 2/3
    n = 10**6
    u = O.chunk_rng(3, 0).random((n, 2))
    _, _, uz = O.cosine_directions(u[:, 0], u[:, 1])
    sigma = math.sqrt(1 / 2 - 4 / 9) / math.sqrt(n)
    assert abs(uz.mean() - 2 / 3) <= 4 * sigma


# -- Monte Carlo ------------------------------------------------------------


def test_mc_config_validation():
    with pytest.raises(ValueError):
        O.McConfig(samples=999)
    with pytest.raises(ValueError):
        O.McConfig(seed=2**64)
    with pytest.raises(ValueError):
        O.McConfig(chunks=0)
    assert sum(O.McConfig(10_001, 0, 16).chunk_sizes()) == 10_001


def test_mc_on_axis_disc():
    res = O.mc_omega(DiscGeometry(1, 0, 1), O.McConfig(10**6, 5))
    assert res.method == "mc"
    assert abs(res.value - 0.5) <= 4 * res.stderr
    assert res.stderr == pytest.approx(math.sqrt(res.value * (1 - res.value) / 10**6))


@pytest.mark.parametrize("samples", [1000, 12_345, 10**5])
def test_mc_enclosing_is_exactly_one(samples):
    res = O.mc_omega(CylinderGeometry(1, 0.5, 3, -2), O.McConfig(samples, 9))
    assert res.value == 1.0 and res.stderr == 0.0


def test_mc_below_plane_is_exactly_zero():
    assert O.mc_omega(CylinderGeometry(1, 5, -1, -6), O.McConfig(10_000)).value == 0.0


def test_mc_full_cylinder():
    g = CylinderGeometry(1, 2, 6, 1)
    res = O.mc_omega(g, O.McConfig(10**7, 42))
    assert abs(res.value - A.omega_total(g).value) <= 4 * res.stderr


def test_mc_deterministic_across_workers():
    g = CylinderGeometry(1, 1.5, 4, -1)
    cfg = O.McConfig(200_000, 77, 7)
    a = O.mc_omega(g, cfg, workers=1)
    b = O.mc_omega(g, cfg, workers=4)
    c = O.mc_omega(g, cfg, workers=7)
    assert a == b == c


def test_mc_seed_changes_result():
    g = DiscGeometry(1, 0.5, 1)
    assert O.mc_omega(g, O.McConfig(10_000, 1)).value != O.mc_omega(g, O.McConfig(10_000, 2)).value


def test_mc_rejects_bad_geometry():
    with pytest.raises(InvalidGeometry):
        O.mc_omega(DiscGeometry(-1, 0, 1), O.McConfig(1000))
    with pytest.raises(TypeError):
        O.mc_omega(SpreadGeometry(1, 1, 1), O.McConfig(1000))


@pytest.mark.parametrize(
    "geom, expected",
    [(SpreadGeometry(1, 1, 1e-4), 1.0), (SpreadGeometry(1e-3, 1, 1), 0.5)],
)
def test_mc_spread_limits(geom, expected):
    res = O.mc_omega_spread(geom, O.McConfig(10**6, 4))
    sigma = max(res.stderr, math.sqrt(expected * (1 - expected) / 10**6))
    # the limits are approached, not reached: allow the closed-form offset too
    offset = abs(A.omega_spread(geom).value - expected)
    assert abs(res.value - expected) <= 4 * sigma + offset


def test_mc_spread_against_closed_form():
    g = SpreadGeometry(1, 2, 2)
    res = O.mc_omega_spread(g, O.McConfig(10**7, 42))
    assert abs(res.value - A.omega_spread(g).value) <= 4 * res.stderr


def test_mc_spread_deterministic_across_workers():
    cfg = O.McConfig(100_000, 3, 5)
    g = SpreadGeometry(1, 2, 2)
    assert O.mc_omega_spread(g, cfg) == O.mc_omega_spread(g, cfg, workers=3)


# -- chord lengths ----------------------------------------------------------


def test_rho_examples():
    assert O.rho_pm(0, 1, 2, "+") == 3
    assert O.rho_pm(0, 1, 2, "-") == 1
    assert O.rho_pm(math.pi, 2, 1, "+") == 1


def test_rho_at_tangency():
    phi_o = math.asin(0.5)
    plus, minus = O.rho_pm(phi_o, 1, 2, "+"), O.rho_pm(phi_o, 1, 2, "-")
    assert plus == pytest.approx(math.sqrt(3), abs=1e-7)
    assert minus == pytest.approx(math.sqrt(3), abs=1e-7)


def test_rho_errors():
    with pytest.raises(DomainError):
        O.rho_pm(1.0, 1, 2, "+")
    with pytest.raises(DomainError):
        O.rho_pm(0.3, 2, 1, "-")
    with pytest.raises(ValueError):
        O.rho_pm(0.0, 1, 2, "*")


@settings(max_examples=200)
@given(st.floats(0.1, 10), st.floats(1.01, 10), st.floats(0, 1))
def test_rho_ordering(r, ratio, frac):
    d = r * ratio
    phi = frac * math.asin(r / d)
    plus, minus = O.rho_pm(phi, r, d, "+"), O.rho_pm(phi, r, d, "-")
    assert plus >= minus >= 0
    # both crossings lie on the circle of radius r about (d, 0)
    for rho in (plus, minus):
        assert math.hypot(rho * math.cos(phi) - d, rho * math.sin(phi)) == pytest.approx(r, rel=1e-9)


# -- azimuthal quadrature ---------------------------------------------------


@pytest.mark.parametrize(
    "target, l, r, d, exact",
    [
        ("cyl0", 1, 1, 2, lambda: A.omega_cyl0(1, 1, 2).value),
        ("circ_dgr", 1, 1, 2, lambda: A.omega_circ(DiscGeometry(1, 2, 1)).value),
        ("circ_rgd", 1, 2, 1, lambda: A.omega_circ(DiscGeometry(2, 1, 1)).value),
    ],
)
def test_quad_azimuthal_examples(target, l, r, d, exact):
    res = O.quad_azimuthal(target, l, r, d)
    assert res.method == "quadrature"
    assert abs(res.value - exact()) <= 1e-9


@pytest.mark.parametrize("target, d", [("cyl0", 1.0), ("circ_dgr", 0.5), ("circ_rgd", 2.0)])
def test_quad_azimuthal_domain(target, d):
    with pytest.raises(DomainError):
        O.quad_azimuthal(target, 1, 1, d)


def test_quad_azimuthal_unknown_target():
    with pytest.raises(ValueError):
        O.quad_azimuthal("lid", 1, 1, 2)


def test_quad_azimuthal_convergence_error():
    with pytest.raises(ConvergenceError):
        O.quad_azimuthal("cyl0", 1, 1, 2, O.QuadConfig(abs_tol=1e-30, max_depth=10))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 10).filter(lambda x: abs(x - 1) > 1e-3), st.floats(0.01, 100))
def test_azimuthal_bookkeeping(r, ratio, lr):
    d, l = r * ratio, r * lr
    cfg = O.QuadConfig(1e-11)
    raw = O.azimuthal_integrals(l, r, d, cfg)
    if d > r:
        assert set(raw) == {"A_minus_phi_o", "A_plus_phi_o"}
        # the near crossing is closer, so it is weighted more
        assert raw["A_minus_phi_o"] >= raw["A_plus_phi_o"] >= 0
        assert abs(raw["A_minus_phi_o"] / math.pi - A.omega_cyl0(l, r, d).value) <= 1e-9
        disc = (raw["A_minus_phi_o"] - raw["A_plus_phi_o"]) / math.pi
    else:
        assert set(raw) == {"A_plus_pi"}
        assert 0 <= raw["A_plus_pi"] <= math.pi
        disc = 1 - raw["A_plus_pi"] / math.pi
    assert abs(disc - A.omega_circ(DiscGeometry(r, d, l)).value) <= 1e-9


def test_azimuthal_integrals_domain():
    with pytest.raises(DomainError):
        O.azimuthal_integrals(1, 1, 1)
    with pytest.raises(DomainError):
        O.azimuthal_integrals(0, 1, 2)


@pytest.mark.parametrize(
    "geom",
    [
        CylinderGeometry(1, 2, 6, 1),
        CylinderGeometry(1, 0.5, 3, 0.5),
        CylinderGeometry(1, 1.5, 4, -1),
        CylinderGeometry(1, 0.5, 3, -2),
        CylinderGeometry(1, 5, -1, -6),
    ],
)
def test_quad_total_matches_closed_form(geom):
    res = O.quad_total(geom)
    assert res.method == "quadrature"
    assert abs(res.value - A.omega_total(geom).value) <= 1e-9


# -- direct 2-D ---------------------------------------------------------------


def test_direct_on_axis_disc():
    res = O.direct_2d_omega(DiscGeometry(1, 0, 1))
    assert res.method == "direct2d"
    assert abs(res.value - 0.5) <= 1e-9


def test_direct_off_axis_disc():
    res = O.direct_2d_omega(DiscGeometry(1, 2, 1))
    assert res.value == pytest.approx(0.0528, abs=5e-5)
    assert abs(res.value - A.omega_circ(DiscGeometry(1, 2, 1)).value) <= 1e-9


@pytest.mark.parametrize(
    "geom",
    [
        CylinderGeometry(1, 2, 6, 1),
        CylinderGeometry(1, 1.5, 4, -1),
        CylinderGeometry(1, 0.5, 3, 0.5),
        CylinderGeometry(1, 0.5, 3, -2),
        CylinderGeometry(1, 5, -1, -6),
        CylinderGeometry(0.3, 2.9, 0.05, 0.01),
    ],
)
def test_direct_cylinder(geom):
    assert abs(O.direct_2d_omega(geom).value - A.omega_total(geom).value) <= 1e-8


def test_direct_rejects():
    with pytest.raises(DomainError):
        O.direct_2d_omega(DiscGeometry(1, 0.5, 0))
    with pytest.raises(TypeError):
        O.direct_2d_omega(SpreadGeometry(1, 1, 1))


# -- spread source ------------------------------------------------------------


@pytest.mark.parametrize("rs, rd, l", [(1, 2, 2), (1, 1, 1), (0.01, 1, 1), (3, 0.5, 0.2), (1, 1, 1e-3)])
def test_quad_spread_matches_closed_form(rs, rd, l):
    g = SpreadGeometry(rs, rd, l)
    assert abs(O.quad_spread(g).value - A.omega_spread(g).value) <= 1e-9
