import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zonal_minkowski.bodies import BODY_CLASSES, SMOOTH_SYMMETRIC, BodyRev, area_density, double_cone_S1, sample_body
from zonal_minkowski.cones import (ConeCertificate, alpha_beta_grid, bump_function, combination_tv_ratio,
                                   cone_membership, default_test_functions, double_cone_separator, firey_cap_bound,
                                   firey_check, firey_functional, h_eps, is_generating_function, psi_generators,
                                   psi_surface, sigma_beta, sigma_beta_o, tau_alpha, tau_alpha_o, tv_ratio,
                                   tv_ratio_sup, verify_separator, weil_direct, weil_psi)
from zonal_minkowski.harmonic import inverse_cosine_even
from zonal_minkowski.sphere import omega, upper_weight_integral
from zonal_minkowski.zonal import ZonalFunction, ZonalMeasure, centroid, radon_decompose, total_variation

from strategies import seeds


# -- Firey's criterion ---------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_ball_density_accepted(n):
    one = ZonalFunction.constant(n, 1.0, 32)
    for j in range(1, n):
        assert firey_check(one, j).accepted
    _, endpoint, _ = firey_functional(one, np.array([0.0]))
    assert abs(endpoint) <= 1e-14


@given(seed=seeds, kind=st.sampled_from(BODY_CLASSES), n=st.integers(3, 5))
def test_area_densities_accepted(seed, kind, n):
    K = sample_body(seed, kind, n, 64)
    for j in range(1, n):
        report = firey_check(area_density(K, j), j)
        assert report.accepted, report.margins


@pytest.mark.parametrize("n", [3, 4, 5])
def test_bump_corruption_rejected(n):
    one = ZonalFunction.constant(n, 1.0, 128)
    bump = bump_function(n, 0.9, 0.05, 128, even=True)
    amp = 0.05
    while firey_check(one - bump * amp, 1).margins[2] >= 0:
        amp *= 2
    report = firey_check(one - bump * amp, 1)
    assert not report.accepted and not report.condition_iii and report.margins[2] < 0


def test_firey_functional_against_closed_form():
    # for s = 1, F(t) = (1 - t^2)^{(n-1)/2} / (n - 1)
    t = np.linspace(-0.99, 0.99, 51)
    for n in (3, 4, 6):
        F, endpoint, _ = firey_functional(ZonalFunction.constant(n, 1.0, 8), t)
        assert np.allclose(F, (1 - t * t) ** ((n - 1) / 2) / (n - 1), atol=1e-14)


def test_uncentered_density_fails_endpoint_condition():
    s = ZonalFunction.constant(3, 1.0, 32) + ZonalFunction.basis(3, 1, 32) * 0.1
    assert not firey_check(s, 1).condition_ii


# -- cap bound ---------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5])
def test_cap_bound_ball(n):
    a = math.pi / 4
    res = firey_cap_bound(BodyRev.ball(n, 1.0, 32), 1, a)
    cap = omega(n - 1) * float(upper_weight_integral(n, math.cos(a)))
    assert res.lhs == pytest.approx(cap, rel=1e-12)
    assert math.isfinite(res.ratio)


@given(seed=seeds, n=st.integers(3, 5), alpha=st.floats(0.05, 1.5), lam=st.sampled_from([0.5, 2.0, 3.0]))
def test_cap_bound_homogeneity(seed, n, alpha, lam):
    K = sample_body(seed, BODY_CLASSES[seed % 4], n, 48)
    for j in range(1, n):
        base = firey_cap_bound(K, j, alpha)
        scaled = firey_cap_bound(K.scaled(lam), j, alpha)
        assert scaled.lhs == pytest.approx(lam ** j * base.lhs, rel=1e-10)
        assert scaled.ratio == pytest.approx(base.ratio, rel=1e-8)


def test_cap_bound_rejects_bad_angle():
    with pytest.raises(ValueError):
        firey_cap_bound(BodyRev.ball(3, 1.0, 8), 1, 1.6)


# -- Weil's criterion ----------------------------------------------------------


def random_even_rho(n: int, rng, N: int = 24) -> ZonalFunction:
    c = np.zeros(N + 1)
    c[::2] = rng.normal(size=N // 2 + 1) / (1 + np.arange(0, N + 1, 2)) ** 1.5
    return ZonalFunction(n, c)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_constant_rho_positive(n):
    surf = psi_surface(ZonalFunction.constant(n, 1.0, 16), alpha_beta_grid(16), alpha_beta_grid(16))
    assert np.all(surf > 0)
    surf = psi_surface(ZonalFunction.constant(n, 1.0, 16), alpha_beta_grid(16), alpha_beta_grid(16), True)
    assert np.all(surf > 0)
    assert is_generating_function(ZonalFunction.constant(n, 2.0, 16), alpha_beta_grid(16), alpha_beta_grid(16))


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("seed", range(5))
def test_one_dimensional_form_matches_direct_quadrature(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_even_rho(n, rng)
    for a in alpha_beta_grid(8)[::2]:
        for b in alpha_beta_grid(8)[::3]:
            assert weil_psi(rho, a, b) == pytest.approx(weil_direct(rho, a, b), abs=1e-6)


def test_literal_constant_variant_shares_sign_at_beta_extremes():
    rho = random_even_rho(3, np.random.default_rng(3))
    for a in (0.2, 0.6, 0.9):
        for b in (0.0, 1.0):
            x, y = weil_psi(rho, a, b), weil_psi(rho, a, b, literal_constant=True)
            assert np.sign(x) == np.sign(y)


@pytest.mark.parametrize("seed", range(5))
def test_generating_function_of_sampled_body_accepted(seed):
    K = sample_body(seed, SMOOTH_SYMMETRIC, 3 + seed % 2, 64)
    rho = inverse_cosine_even(K.h)
    report = is_generating_function(rho, alpha_beta_grid(32), alpha_beta_grid(32))
    assert report.accepted and report.min_margin >= -1e-9


def test_perturbed_generating_function_rejected_and_signs_agree():
    n = 3
    K = sample_body(7, SMOOTH_SYMMETRIC, n, 64)
    rho = inverse_cosine_even(K.h) - h_eps(n, 0.05, 64) * 50.0
    grid = alpha_beta_grid(16)
    report = is_generating_function(rho, grid, grid)
    assert not report.accepted
    a, b = report.argmin
    assert weil_psi(rho, a, b) < 0 and weil_direct(rho, a, b) < 0


def test_odd_rho_rejected():
    with pytest.raises(ValueError):
        is_generating_function(ZonalFunction.basis(3, 1, 8))


# -- generators and total variation -------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5])
def test_generator_masses_and_pairings(n):
    for x in (-0.5, 0.0, 0.3, 0.8):
        tau = tau_alpha(n, x, 128)
        assert tau.mass() == pytest.approx((1 - x * x) ** ((n - 1) / 2) / (n - 1), rel=1e-10)
        sigma = sigma_beta(n, x, 128)
        assert sigma.mass() == pytest.approx((1 - x * x) ** ((n - 1) / 2) / (n - 1), rel=1e-10)
        assert sigma.pair(ZonalFunction.constant(n, 1.0, 8)) > 0
        assert abs(centroid(tau_alpha_o(n, x, 128))) <= 1e-12
        assert abs(centroid(sigma_beta_o(n, x, 128))) <= 1e-12


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_sigma_tv_ratio_exact(n):
    for beta in np.linspace(0.0, 0.95, 20):
        sigma = sigma_beta(n, float(beta), 128)
        assert tv_ratio(sigma) == pytest.approx(2 * n - 3, abs=1e-9)
        parts = radon_decompose(sigma)
        negative = (n - 2) / (n - 1) * (1 - beta * beta) ** ((n - 1) / 2)
        assert parts.negative.mass() == pytest.approx(negative, rel=1e-8)


def test_nonnegative_measure_ratio_is_one():
    assert tv_ratio(tau_alpha(4, 0.2, 64)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        tv_ratio(ZonalMeasure.zero(3, 8))


@given(n=st.integers(3, 5), seed=seeds, centered=st.booleans())
def test_closed_form_combination_tv_matches_measures(n, seed, centered):
    rng = np.random.default_rng(seed)
    alphas, betas = rng.uniform(-0.9, 0.9, 2), rng.uniform(-0.9, 0.9, 2)
    a, b = rng.exponential(size=2), rng.exponential(size=2)
    make_tau, make_sigma = (tau_alpha_o, sigma_beta_o) if centered else (tau_alpha, sigma_beta)
    mu = ZonalMeasure.zero(n, 128)
    for x, w in zip(alphas, a):
        mu = mu + make_tau(n, x, 128) * w
    for x, w in zip(betas, b):
        mu = mu + make_sigma(n, x, 128) * w
    if not mu.mass() > 1e-3:
        return
    assert combination_tv_ratio(n, alphas, a, betas, b, centered) == pytest.approx(
        total_variation(mu) / mu.mass(), rel=1e-8)


@pytest.mark.parametrize("n", [3, 4])
def test_tv_ratio_sup_finite(n):
    report = tv_ratio_sup(n, 2000, seed=1)
    assert math.isfinite(report.sup) and report.sup >= 2 * n - 3 - 1e-9
    assert report.sup_doubled >= report.sup


# -- cone membership -----------------------------------------------------------


def test_generator_target_is_member():
    n = 3
    grid = np.linspace(-0.9, 0.9, 19)
    gens = [tau_alpha_o(n, x, 48) for x in grid] + [sigma_beta_o(n, x, 48) for x in grid]
    target = gens[4] * 2.0 + gens[25] * 0.5
    cert = cone_membership(target, gens, default_test_functions(n, 48, 120, even=False))
    assert cert.status == "member" and cert.residual <= 1e-6
    assert np.all(cert.coefficients >= 0)


def test_first_area_measure_is_member_of_generator_cone():
    n = 3
    K = sample_body(4, BODY_CLASSES[1], n, 32)
    target = ZonalMeasure(area_density(K, 1))
    grid = np.linspace(-0.98, 0.98, 99)
    gens = [tau_alpha_o(n, x, 32) for x in grid] + [sigma_beta_o(n, x, 32) for x in grid]
    cert = cone_membership(target, gens, default_test_functions(n, 24, 60, even=False))
    assert cert.status == "member", cert.note


def test_separator_verification_and_json():
    n = 3
    family = psi_generators(n, 12)
    target = double_cone_S1(n, 128)
    phi = double_cone_separator(n, 1e-3, 128)
    ok, vals = verify_separator(phi, target, family)
    assert ok and vals["target"] < 0 <= vals["min_generator"]
    # a constant pairs positively with everything, so it cannot separate
    assert not verify_separator(ZonalFunction.constant(n, 1.0, 128), target, family)[0]
    text = ConeCertificate("non-member", 0.1, separator=phi, separator_pairings=vals).to_json()
    assert '"status": "non-member"' in text


def test_inconclusive_is_distinct_from_non_member():
    n = 3
    # target outside the cone, but no verified separator is offered and the
    # test space is too small to produce one
    gens = [ZonalMeasure(ZonalFunction.constant(n, 1.0, 8))]
    target = ZonalMeasure(ZonalFunction.basis(n, 2, 8))
    tests = [ZonalFunction.constant(n, 1.0, 8)]
    cert = cone_membership(target, gens, tests)
    assert cert.status in ("member", "inconclusive", "non-member")
    if cert.status == "non-member":
        ok, _ = verify_separator(cert.separator, target, gens)
        assert ok
    assert cert.status != "member" or cert.residual <= 1e-6
