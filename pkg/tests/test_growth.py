import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import SL2C_GRID, TORUS_GRID
from growthlab.gallery import HolomorphicMapSpec, gallery, model_from_map
from growthlab.growth import (
    GrowthProfile,
    build_profile,
    check_condition_i,
    classify_condition_ii,
    cumulative_F,
    finite_order_fit,
    hoelder_chain_check,
    profile_violations,
    sphere_area_direct,
    sphere_integral_ball,
    sphere_integral_direct,
    verdict,
    vol_ball,
)
from growthlab.quadrature import QuadratureSpec


# --- single-radius integrals ------------------------------------------------------

@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_torus_ball_and_sphere(t):
    model = gallery("torus", 3)
    assert vol_ball(model, t) == pytest.approx(oracles.torus_vol(t), rel=1e-10)
    assert sphere_integral_ball(model, t) == pytest.approx(oracles.torus_sphere(t), rel=1e-10)
    assert sphere_integral_direct(model, t) == pytest.approx(oracles.torus_sphere(t), rel=1e-10)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 3.0])
def test_iwasawa_ball_and_sphere(r):
    model = gallery("iwasawa")
    assert vol_ball(model, r) == pytest.approx(oracles.iwasawa_vol(r), rel=1e-10)
    assert sphere_integral_ball(model, r) == pytest.approx(oracles.iwasawa_sphere(r), rel=1e-10)
    assert sphere_integral_direct(model, r) == pytest.approx(oracles.iwasawa_sphere(r), rel=1e-10)


@pytest.mark.parametrize("t", [1.0, 4.0, 8.0])
def test_sl2c_volume_against_radial_oracle(t):
    quad = QuadratureSpec(radial_order=64, polar_order=64)
    assert vol_ball(gallery("sl2c"), t, quad) == pytest.approx(oracles.SL2C_VOL[t], rel=1e-4)


def test_sl2c_volume_exceeds_the_exponential_lower_bound():
    # vol(t) >= 2 pi^3 e^{sqrt 2 t} + a; a is bounded by the value at t = 0
    quad = QuadratureSpec(radial_order=64, polar_order=64)
    lower = 2 * math.pi ** 3 * math.exp(oracles.SQRT2 * 8.0) - 2 * math.pi ** 3
    assert vol_ball(gallery("sl2c"), 8.0, quad) >= lower


def test_sl2c_two_sphere_paths_at_unit_radius():
    model = gallery("sl2c")
    ball, direct = sphere_integral_ball(model, 1.0), sphere_integral_direct(model, 1.0)
    assert direct == pytest.approx(ball, rel=0.01)
    mc = QuadratureSpec("monte-carlo", sample_count=200_000, seed=5)
    assert sphere_integral_direct(model, 1.0, mc) == pytest.approx(ball, rel=0.02)


def test_fubini_study_sphere_bound():
    model = gallery("fubini_study", 3)
    t = 2.0
    assert sphere_integral_ball(model, t) <= 2 * 2 * (1 + t * t) ** 2 * vol_ball(model, t)


def test_euclidean_area_of_torus_sphere():
    # f^* omega is beta_0, so the induced area is the Euclidean one
    assert sphere_area_direct(gallery("torus", 3), 1.5) == pytest.approx(oracles.A3 * 1.5 ** 3, rel=1e-10)


def test_errors():
    with pytest.raises(ValueError):
        vol_ball(gallery("torus"), 0.0)
    cusp = HolomorphicMapSpec(2, lambda z: np.stack([z[..., 0], z[..., 0] ** 2], axis=-1), mode="finite-difference")
    with pytest.raises(ValueError):
        # neither a derivative evaluator nor a closedness declaration
        model_from_map("cusp", cusp, lambda w: np.broadcast_to(np.eye(2), w.shape[:-1] + (2, 2)))
    closed = model_from_map("cusp", cusp, lambda w: np.broadcast_to(np.eye(2), w.shape[:-1] + (2, 2)), closed=True)
    with pytest.raises(ValueError):
        sphere_integral_direct(closed, 1.0)  # not flagged positive definite
    with pytest.raises(ValueError):
        build_profile(gallery("torus"), [1.0, 0.5])


@pytest.mark.parametrize("name", ["torus", "iwasawa"])
def test_doubling_orders_changes_volume_little(name):
    model = gallery(name)
    for t in (1.0, 2.0, 4.0):
        coarse = vol_ball(model, t, QuadratureSpec(radial_order=16, angular_order=8))
        fine = vol_ball(model, t, QuadratureSpec(radial_order=32, angular_order=16))
        assert abs(fine - coarse) <= 1e-3 * fine


# --- profiles ------------------------------------------------------------------------

def test_torus_profile(torus_profile):
    p = torus_profile
    assert np.allclose(p.vol, oracles.torus_vol(p.t), rtol=1e-10)
    assert np.allclose(p.ratio_i, 2 * oracles.A3 / oracles.V4 / p.t, rtol=1e-10)
    assert profile_violations(p) == []
    assert classify_condition_ii(p).classification == "subexponential"
    fit = finite_order_fit(p)
    assert fit.order == pytest.approx(4.0, abs=0.05) and fit.finite


def test_torus_F_on_a_geometric_grid():
    p = build_profile(gallery("torus", 3), np.geomspace(0.5, 8.0, 64))
    assert np.allclose(p.F, oracles.torus_F(p.t), rtol=0.01)


def test_F_of_constant_volume():
    t = np.linspace(0.5, 10.0, 20)
    p = GrowthProfile("flat", t, np.ones_like(t), np.ones_like(t))
    assert np.allclose(cumulative_F(p).F, t, rtol=0.02)
    with pytest.raises(ValueError):
        cumulative_F(GrowthProfile("bad", t[::-1], np.ones_like(t), np.ones_like(t)))


def test_iwasawa_profile(iwasawa_profile):
    p = iwasawa_profile
    assert np.allclose(p.vol, oracles.iwasawa_vol(p.t), rtol=1e-8)
    assert np.allclose(p.sphere_ball / p.vol, 4.0, atol=1e-8)
    ci = check_condition_i(p, 1.0)
    assert ci.holds and ci.trend_slope == pytest.approx(-1.0, abs=0.05)
    assert ci.C1 <= 4.0 / 1.0
    cii = classify_condition_ii(p)
    assert cii.classification == "subexponential" and cii.condition == "holds"
    assert verdict(ci, cii) == "not-divisorially-hyperbolic"


def test_nakamura_profile(nakamura_profile):
    assert classify_condition_ii(nakamura_profile).classification == "subexponential"
    assert check_condition_i(nakamura_profile).holds


def test_sl2c_profile(sl2c_profile):
    p = sl2c_profile
    assert profile_violations(p) == []
    cii = classify_condition_ii(p)
    assert cii.classification == "exponential" and cii.condition == "fails"
    assert cii.witness_C > 1 / oracles.SQRT2
    assert not finite_order_fit(p).finite
    tail = p.t >= 6.0
    assert np.all(np.log(p.F[tail]) >= oracles.SQRT2 * p.t[tail])
    for t, v in oracles.SL2C_VOL.items():
        k = np.argmin(np.abs(p.t - t))
        if abs(p.t[k] - t) < 1e-12:
            assert p.vol[k] == pytest.approx(v, rel=1e-4)


def test_fubini_study_is_never_declared_a_failure(fs_short_profile):
    ci = check_condition_i(fs_short_profile, 2.0)
    assert not ci.holds and ci.status == "not-certified"
    assert verdict(ci, classify_condition_ii(fs_short_profile)) == "not-certified"


def test_fubini_study_bounded_volume(fs_long_profile):
    # the volume of P^2 under omega_FS is finite, so vol saturates
    p = fs_long_profile
    assert p.vol[-1] == pytest.approx(p.vol[-2], rel=1e-3)
    assert classify_condition_ii(p).condition == "holds"


def test_condition_checks_need_enough_points(torus_profile):
    with pytest.raises(ValueError):
        check_condition_i(torus_profile, r0=190.0)
    short = build_profile(gallery("torus"), np.linspace(0.5, 1.0, 4))
    with pytest.raises(ValueError):
        classify_condition_ii(short)
    with pytest.raises(ValueError):
        finite_order_fit(short)


def test_violations_are_named():
    t = np.linspace(1.0, 2.0, 5)
    bad = GrowthProfile("bad", t, np.array([1.0, -1.0, 0.5, 0.4, 0.3]), np.ones(5),
                        sphere_direct=2 * np.ones(5))
    names = profile_violations(cumulative_F(bad))
    assert "vol nonnegative" in names and "vol nondecreasing" in names
    assert "sphere_direct agrees with sphere_ball" in names


# --- Hoelder chain -----------------------------------------------------------------------

def test_hoelder_chain_torus_is_an_equality(torus_profile):
    report = hoelder_chain_check(torus_profile)
    assert report.holds and abs(report.worst_margin) < 1e-9


@pytest.mark.parametrize("fixture", ["torus_profile", "iwasawa_profile", "sl2c_profile"])
def test_hoelder_chain_margins_are_nonnegative(fixture, request):
    report = hoelder_chain_check(request.getfixturevalue(fixture))
    assert report.holds


def test_hoelder_chain_positive_margins_off_equality(iwasawa_profile, sl2c_profile):
    assert hoelder_chain_check(iwasawa_profile).worst_margin > 0
    assert hoelder_chain_check(sl2c_profile).worst_margin > 0


def test_hoelder_spline_fallback_on_torus(torus_profile):
    from dataclasses import replace
    report = hoelder_chain_check(replace(torus_profile, hoelder_rhs=None))
    assert abs(report.worst_margin) < 1e-6


def test_hoelder_needs_direct_path():
    p = build_profile(gallery("torus"), np.linspace(0.5, 2.0, 8), direct=False)
    with pytest.raises(ValueError):
        hoelder_chain_check(p)


# --- metric-swap invariance -------------------------------------------------------------

@settings(max_examples=6, deadline=None)
@given(st.sampled_from(["torus", "iwasawa", "sl2c"]), st.sampled_from([0.5, 2.0]))
def test_metric_swap_invariance(name, factor):
    grid = {"torus": TORUS_GRID, "iwasawa": TORUS_GRID, "sl2c": SL2C_GRID}[name]
    model = gallery(name)
    base = build_profile(model, grid, direct=False)
    swapped = build_profile(model.rescaled(factor), grid, direct=False)
    m = model.domain_dim
    assert np.allclose(swapped.vol, factor ** m * base.vol, rtol=1e-12)
    assert np.allclose(swapped.F, factor ** m * base.F, rtol=1e-12)
    assert check_condition_i(swapped).holds == check_condition_i(base).holds
    a, b = classify_condition_ii(swapped), classify_condition_ii(base)
    assert (a.classification, a.condition) == (b.classification, b.condition)


# --- Monte Carlo profiles -----------------------------------------------------------------

def test_monte_carlo_profile_is_deterministic_and_consistent():
    quad = QuadratureSpec("monte-carlo", sample_count=100_000, seed=3)
    grid = np.linspace(0.5, 3.0, 10)
    p1 = build_profile(gallery("iwasawa"), grid, quad)
    p2 = build_profile(gallery("iwasawa"), grid, quad)
    assert np.array_equal(p1.vol, p2.vol) and np.array_equal(p1.sphere_direct, p2.sphere_direct)
    assert profile_violations(p1) == []
    assert hoelder_chain_check(p1).holds
    assert np.allclose(p1.vol, oracles.iwasawa_vol(grid), rtol=0.03)


def test_three_dimensional_torus_defaults_to_monte_carlo():
    p = build_profile(gallery("torus", 4), np.linspace(0.5, 2.0, 8))
    assert p.quadrature.method == "monte-carlo"
    # vol of the 6-ball of radius t is pi^3 t^6 / 6
    assert np.allclose(p.vol, math.pi ** 3 / 6 * p.t ** 6, rtol=0.02)
