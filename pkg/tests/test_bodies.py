import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zonal_minkowski.bodies import (BODY_CLASSES, DOUBLE_CONE_LATITUDE, area_density_values, NEAR_CAP, NEAR_SEGMENT, SMOOTH_GENERAL,
                                    SMOOTH_SYMMETRIC, BodyRev, area_density, curvature, double_cone_S1,
                                    double_cone_S1_pair, double_cone_support, heat_smoothed, is_support_function,
                                    mean_width, profile_csv, sample_body, steiner_point)
from zonal_minkowski.harmonic import box_n
from zonal_minkowski.sphere import kappa, omega, piecewise_rule
from zonal_minkowski.zonal import ZonalFunction, ZonalMeasure, centroid, weighted_integral

from oracles import principal_radii_fd
from strategies import seeds

kinds = st.sampled_from(BODY_CLASSES)


def test_ball_curvature_and_densities():
    for n in (3, 4, 6):
        K = BodyRev.ball(n, 1.7, 32)
        prof = curvature(K)
        t = np.linspace(-1, 1, 11)
        assert np.allclose(prof.r_meridian(t), 1.7) and np.allclose(prof.r_parallel(t), 1.7)
        for j in range(1, n):
            assert np.allclose(area_density(K, j)(t), 1.7 ** j)


def test_point_body_has_zero_radii():
    h = ZonalFunction.basis(4, 1, 16)
    prof = curvature(BodyRev(h))
    t = np.linspace(-1, 1, 11)
    assert np.allclose(prof.r_meridian(t), 0.0, atol=1e-13)
    assert np.allclose(prof.r_parallel(t), 0.0, atol=1e-13)


@pytest.mark.parametrize("eps", [0.2, 0.5, 2.0])
def test_ellipsoid_radii_match_finite_differences(eps):
    n = 4
    h = ZonalFunction.from_callable(n, lambda t: np.sqrt(1 - t * t + eps * t * t), 128)
    prof = curvature(BodyRev(h))
    for t in np.linspace(-0.9, 0.9, 7):
        rm, rp = principal_radii_fd(h, n, t)
        assert prof.r_meridian(np.array([t]))[0] == pytest.approx(rm, abs=1e-6)
        assert prof.r_parallel(np.array([t]))[0] == pytest.approx(rp, abs=1e-6)


@pytest.mark.parametrize("seed", range(50))
def test_sampled_radii_match_finite_differences(seed):
    n = 3 + seed % 3
    K = sample_body(seed, BODY_CLASSES[seed % 4], n, 64)
    prof = curvature(K)
    for t in np.random.default_rng(seed).uniform(-0.9, 0.9, 4):
        rm, rp = principal_radii_fd(K.h, n, t)
        assert prof.r_meridian(np.array([t]))[0] == pytest.approx(rm, abs=1e-6)
        assert prof.r_parallel(np.array([t]))[0] == pytest.approx(rp, abs=1e-6)


def test_box_equals_radii_average(rng):
    for n in (3, 5):
        K = sample_body(int(rng.integers(1000)), SMOOTH_GENERAL, n, 64)
        prof = curvature(K)
        t = np.linspace(-1, 1, 41)
        avg = (prof.r_meridian(t) + (n - 2) * prof.r_parallel(t)) / (n - 1)
        assert np.max(np.abs(box_n(K.h)(t) - avg)) <= 1e-8


def test_support_function_examples():
    check = is_support_function(ZonalFunction.constant(3, 1.0, 16))
    assert check.ok and check.margin == pytest.approx(1.0)
    for n in (3, 4):
        square = ZonalFunction.from_callable(n, lambda t: t * t, 16)
        assert not is_support_function(square)
    # 1 + a P_2 is convex exactly when a stays inside a computable window
    P2 = ZonalFunction.basis(3, 2, 16)
    margins = [is_support_function(ZonalFunction.constant(3, 1.0, 16) + P2 * a).margin for a in (0.1, 0.9)]
    assert margins[0] > 0 and margins[1] < 0


@given(seed=seeds, kind=kinds, n=st.integers(3, 5))
def test_sampled_bodies_are_valid(seed, kind, n):
    K = sample_body(seed, kind, n, 64)
    assert is_support_function(K.h, strict=True)
    if kind == SMOOTH_SYMMETRIC:
        assert np.max(np.abs(K.h.odd().coefficients)) <= 1e-12
    # area measures have their centroid at the origin
    for j in (1, n - 1):
        assert abs(centroid(ZonalMeasure(area_density(K, j)))) <= 1e-8


@given(seed=seeds, kind=kinds, n=st.integers(3, 5))
def test_first_area_density_is_box(seed, kind, n):
    K = sample_body(seed, kind, n, 64)
    t = np.linspace(-1, 1, 101)
    assert np.max(np.abs(area_density(K, 1)(t) - area_density_values(K.h, 1, t))) <= 1e-8


@pytest.mark.parametrize("n", [3, 4, 5])
def test_steiner_type_formula(n, rng):
    K = sample_body(int(rng.integers(10_000)), SMOOTH_GENERAL, n, 48)
    radii = np.array([0.0, 0.25, 0.5, 1.0, 2.0])
    t = np.linspace(-1, 1, 31)
    values = np.array([area_density(K.dilated(r), n - 1, check=False)(t) for r in radii])
    fit = np.polynomial.polynomial.polyfit(radii, values, n - 1)  # rows: powers of r
    for j in range(n):
        s_j = np.ones_like(t) if j == 0 else area_density(K, j)(t)
        expected = math.comb(n - 1, j) * s_j
        assert np.max(np.abs(fit[n - 1 - j] - expected)) <= 1e-7 * max(1.0, np.max(np.abs(expected)))


def test_steiner_point_examples():
    assert steiner_point(BodyRev.ball(3, 1.0, 16)) == pytest.approx(0.0, abs=1e-15)
    for n in (3, 5):
        K = sample_body(3, SMOOTH_GENERAL, n, 32)
        shifted = BodyRev(K.h + ZonalFunction.basis(n, 1, 32) * 0.37)
        assert steiner_point(shifted) - steiner_point(K) == pytest.approx(0.37, abs=1e-13)
    n = 3
    raw = ZonalFunction.from_callable(n, lambda t: np.maximum(t, 0.0), 128, (0.0,))
    h = heat_smoothed(raw, 1e-3)
    x, w = piecewise_rule(n, (), 200)
    direct = omega(n - 1) * np.dot(w, x * h(x)) / kappa(n)
    value = steiner_point(BodyRev(h, check=False))
    assert value > 0 and value == pytest.approx(direct, rel=1e-12)


def test_mean_width_examples(rng):
    for n in (2, 3, 6):
        assert mean_width(BodyRev.ball(n, 1.3, 16)) == pytest.approx(2.6)
        seg = BodyRev(ZonalFunction.from_callable(n, np.abs, 256, (0.0,)), check=False)
        assert mean_width(seg) == pytest.approx(2 / omega(n) * 2 * omega(n - 1) / (n - 1), abs=1e-10)
    K, L = sample_body(1, SMOOTH_GENERAL, 4, 32), sample_body(2, NEAR_CAP, 4, 32)
    assert mean_width(K + L) == pytest.approx(mean_width(K) + mean_width(L))
    assert mean_width(K, normalized=False) == pytest.approx(mean_width(K) * omega(4) / 2)


@pytest.mark.parametrize("seed", range(20))
def test_symmetric_l1_sup_inequality(seed):
    n = 3 + seed % 3
    K = sample_body(seed, SMOOTH_SYMMETRIC, n, 64)
    l1 = K.h.integrate()
    assert l1 >= 2 * omega(n - 1) / (n - 1) * K.h.sup_norm() * (1 - 1e-12)


def test_double_cone_literal_closed_form():
    c = DOUBLE_CONE_LATITUDE
    for n in (3, 4, 5):
        zero = ZonalFunction.constant(n, 0.0, 8)
        assert double_cone_S1_pair(zero, n, "literal") == 0.0
        one = ZonalFunction.constant(n, 1.0, 8)
        integral = weighted_integral(3, lambda t: (1 - t * t) ** ((n - 2) / 2), (), 200, 0.0, c)
        expected = 2.0 ** (-(n - 5) / 2) * kappa(n - 1) + (n - 2) * integral
        assert double_cone_S1_pair(one, n, "literal") == pytest.approx(expected, rel=1e-13)
        assert double_cone_S1(n, 128, "literal").pair(one) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_double_cone_derived_matches_mollification(n):
    f = ZonalFunction.from_callable(n, lambda t: 1 + t * t + 0.3 * t ** 5, 512)
    D = double_cone_support(n, 512)
    smooth = BodyRev(heat_smoothed(D, 1e-5), check=False)
    mollified = ZonalMeasure(area_density(smooth, 1, check=False)).pair(f)
    assert mollified == pytest.approx(double_cone_S1_pair(f, n, "derived"), rel=1e-3)
    assert double_cone_S1(n, 256).pair(f) == pytest.approx(double_cone_S1_pair(f, n, "derived"), rel=1e-10)


def test_double_cone_measure_mass_matches_surface_area():
    # the mass of S_1 of the double cone is its normalized surface area
    for n in (3, 4, 5):
        D = double_cone_support(n, 512)
        smooth = BodyRev(heat_smoothed(D, 1e-6), check=False)
        assert double_cone_S1(n, 256).mass() == pytest.approx(area_density(smooth, 1, check=False).integrate(),
                                                            rel=1e-5)


def test_profile_csv_columns():
    K = sample_body(0, NEAR_SEGMENT, 4, 32)
    text = profile_csv(K, np.linspace(-1, 1, 5))
    lines = text.strip().splitlines()
    assert lines[0] == "t,r_m,r_p,s_1,s_2,s_3"
    assert len(lines) == 6


def test_invalid_inputs():
    with pytest.raises(ValueError):
        BodyRev(ZonalFunction.from_callable(3, lambda t: t * t, 16))
    with pytest.raises(ValueError):
        area_density(BodyRev.ball(3, 1.0, 8), 3)
    with pytest.raises(ValueError):
        sample_body(0, "cube")
    with pytest.raises(ValueError):
        double_cone_S1(2)
