import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import beta as beta_fn

from zonal_minkowski.sphere import (GegenbauerBasis, basis_norms, from_coefficients, gauss_rule, jacobi_segment,
                                    kappa, legendre_values, omega, piecewise_rule, to_coefficients,
                                    upper_weight_integral, weight_exponent)


def moment(n: int, k: int) -> float:
    """int_{-1}^1 t^k (1-t^2)^{(n-3)/2} dt from the Beta function."""
    if k % 2:
        return 0.0
    return beta_fn((k + 1) / 2, weight_exponent(n) + 1)


@pytest.mark.parametrize("n, expected", [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi ** 2)])
def test_omega_values(n, expected):
    assert omega(n) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n, expected", [(2, math.pi), (3, 4 * math.pi / 3), (5, omega(5) / 5)])
def test_kappa_values(n, expected):
    assert kappa(n) == pytest.approx(expected, rel=1e-14)


def test_gamma_against_integer_and_half_integer_values():
    for j in range(1, 12):
        exact = 2 * math.pi ** (j / 2) / math.gamma(j / 2)
        assert omega(j) == pytest.approx(exact, rel=1e-13)
    assert omega(1) == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("n, N, fn, expected", [
    (3, 16, lambda t: np.ones_like(t), 2.0),
    (4, 32, lambda t: np.ones_like(t), math.pi / 2),
    (3, 64, lambda t: t * t, 2 / 3),
])
def test_rule_examples(n, N, fn, expected):
    rule = gauss_rule(n, N)
    assert rule.integrate(fn(rule.nodes)) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", range(2, 9))
def test_rule_positive_and_increasing(n):
    rule = gauss_rule(n, 40)
    assert np.all(rule.weights > 0)
    assert np.all(np.diff(rule.nodes) > 0)


@given(n=st.integers(2, 8), N=st.integers(1, 30), seed=st.integers(0, 2 ** 32 - 1))
def test_rule_polynomial_exactness(n, N, seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=2 * N)
    rule = gauss_rule(n, N)
    got = rule.integrate(np.polynomial.polynomial.polyval(rule.nodes, coeffs))
    exact = sum(c * moment(n, k) for k, c in enumerate(coeffs))
    # |t^k| <= t^{2 floor(k/2)} on [-1, 1] bounds the size of each term
    scale = sum(abs(c) * moment(n, k - k % 2) for k, c in enumerate(coeffs))
    assert abs(got - exact) <= 1e-12 * max(1.0, scale)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_segment_rules_match_incomplete_beta(n):
    for lo, hi in [(-1.0, 0.3), (0.3, 1.0), (-0.4, 0.6), (-1.0, 1.0)]:
        x, w = jacobi_segment(weight_exponent(n), lo, hi, 40)
        exact = upper_weight_integral(n, lo) - upper_weight_integral(n, hi)
        assert w.sum() == pytest.approx(float(exact), rel=1e-12)
    x, w = piecewise_rule(n, breaks=(-0.5, 0.0, 0.5), m=32)
    assert w.sum() == pytest.approx(moment(n, 0), rel=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_basis_orthogonality(n):
    N = 40
    basis = GegenbauerBasis(n, N)
    P = basis.values(basis.rule.nodes)
    gram = (P * basis.rule.weights) @ P.T
    norms = basis_norms(n, N)
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) <= 1e-12 * np.max(norms)
    assert np.allclose(np.diag(gram), norms, rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_low_degree_basis_shapes(n):
    t = np.linspace(-1, 1, 11)
    P = legendre_values(n, 3, t)
    assert np.allclose(P[0], 1.0)
    assert np.allclose(P[1], t)
    assert np.allclose(P[:, -1], 1.0)


def test_basis_matches_scipy_gegenbauer():
    from scipy.special import eval_gegenbauer
    t = np.linspace(-0.99, 0.99, 31)
    for n in (4, 5, 8):
        lam = (n - 2) / 2
        P = legendre_values(n, 12, t)
        for k in range(13):
            ref = eval_gegenbauer(k, lam, t) / eval_gegenbauer(k, lam, 1.0)
            assert np.allclose(P[k], ref, atol=1e-12)


def test_derivatives_match_finite_differences():
    t = np.linspace(-0.9, 0.9, 17)
    h = 1e-5
    vals, d1, d2 = legendre_values(4, 10, t, derivatives=2)
    plus, minus = legendre_values(4, 10, t + h), legendre_values(4, 10, t - h)
    assert np.allclose(d1, (plus - minus) / (2 * h), atol=1e-6)
    assert np.allclose(d2, (plus - 2 * vals + minus) / h ** 2, atol=1e-3)


@pytest.mark.parametrize("n", [3, 6])
def test_transform_examples(n):
    N = 12
    rule = gauss_rule(n, N + 1)
    c = to_coefficients(np.full(N + 1, 2.5), n)
    assert c[0] == pytest.approx(2.5) and np.max(np.abs(c[1:])) < 1e-13
    c = to_coefficients(rule.nodes, n)
    assert c[1] == pytest.approx(1.0) and np.max(np.abs(np.delete(c, 1))) < 1e-13
    c = to_coefficients(legendre_values(n, N, rule.nodes)[N], n)
    assert np.allclose(c, np.eye(N + 1)[N], atol=1e-12)


@given(n=st.integers(2, 8), N=st.integers(0, 60), seed=st.integers(0, 2 ** 32 - 1))
def test_transform_round_trip(n, N, seed):
    c = np.random.default_rng(seed).normal(size=N + 1)
    samples = from_coefficients(c, n)
    assert np.max(np.abs(from_coefficients(to_coefficients(samples, n), n) - samples)) <= 1e-12 * max(
        1.0, np.max(np.abs(samples)))


def test_transform_rejects_too_few_samples():
    with pytest.raises(ValueError):
        to_coefficients(np.ones(4), 3, N=8)
