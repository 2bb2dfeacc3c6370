"""Dimension constants, Gauss-Jacobi rules and the zonal Legendre basis.

Zonal functions on S^{n-1} are expanded in the normalized Gegenbauer
polynomials ``P_k(t) = C_k^lam(t) / C_k^lam(1)`` with ``lam = (n-2)/2``
(the Legendre polynomials of dimension n).  With this normalization
``P_k(1) = 1`` for every k, which is what makes the point mass at the
pole the identity for convolution.  For n = 2 the family degenerates to
the Chebyshev polynomials T_k, which the recurrence below handles directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, betaln, gammaln, roots_jacobi

DEFAULT_BAND = 256


def check_dim(n: int, minimum: int = 2) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"dimension n={n!r} must be an integer >= {minimum}")
    return int(n)


def omega(n: int) -> float:
    """Surface area of S^{n-1}, i.e. 2 pi^{n/2} / Gamma(n/2)."""
    if n < 1:
        raise ValueError(f"omega undefined for n={n}")
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def kappa(n: int) -> float:
    """Volume of the unit n-ball."""
    return omega(n) / n


def weight_exponent(n: int) -> float:
    return (n - 3) / 2


def weight(n: int, t):
    return (1.0 - np.asarray(t, dtype=float) ** 2) ** weight_exponent(n)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights integrating ``g(t) (1-t^2)^a`` over an interval."""

    nodes: np.ndarray
    weights: np.ndarray
    exponent: float

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _jacobi_roots(m: int, a: float, b: float):
    x, w = roots_jacobi(m, a, b)
    return _frozen(x), _frozen(w)


@lru_cache(maxsize=None)
def gauss_rule(n: int, N: int) -> QuadratureRule:
    """N-point Gauss-Jacobi rule for the weight (1-t^2)^{(n-3)/2} on [-1, 1]."""
    check_dim(n)
    if N < 1:
        raise ValueError("a rule needs at least one node")
    a = weight_exponent(n)
    x, _ = _jacobi_roots(N, a, a)
    # polish scipy's nodes against our own recurrence, then take Christoffel
    # weights; this keeps orthogonality near 1e-13 up to high degree
    x = np.array(x)
    for _ in range(2):
        v, d = legendre_values(n, N, x, derivatives=1)
        x = x - v[N] / d[N]
    P = legendre_values(n, N - 1, x)
    w = 1.0 / np.sum(P * P / basis_norms(n, N - 1)[:, None], axis=0)
    return QuadratureRule(_frozen(x), _frozen(w), a)


def jacobi_segment(a: float, lo: float, hi: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_lo^hi g(t) (1-t^2)^a dt``.

    The weight factor is absorbed into the returned weights.  Endpoints at
    +-1 are treated with a one-sided Jacobi rule so the algebraic endpoint
    behaviour of the weight is integrated exactly.
    """
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError(f"bad segment [{lo}, {hi}]")
    if lo == -1.0 and hi == 1.0:
        x, w = _jacobi_roots(m, a, a)
        return np.array(x), np.array(w)
    if hi == 1.0:
        # (1-t)^a singular factor, (1+t)^a smooth on [lo, 1]
        y, wy = _jacobi_roots(m, a, 0.0)
        half = (hi - lo) / 2
        t = lo + half * (1 + y)
        return t, wy * half ** (a + 1) * (1 + t) ** a
    if lo == -1.0:
        y, wy = _jacobi_roots(m, 0.0, a)
        half = (hi - lo) / 2
        t = lo + half * (1 + y)
        return t, wy * half ** (a + 1) * (1 - t) ** a
    y, wy = _jacobi_roots(m, 0.0, 0.0)
    half = (hi - lo) / 2
    t = lo + half * (1 + y)
    return t, wy * half * (1 - t * t) ** a


def segment_rule(n: int, lo: float, hi: float, m: int):
    return jacobi_segment(weight_exponent(n), lo, hi, m)


def piecewise_rule(n: int, breaks=(), m: int = 64, lo: float = -1.0, hi: float = 1.0):
    """Concatenated segment rules over [lo, hi] split at ``breaks``."""
    pts = sorted({float(b) for b in breaks if lo < b < hi})
    edges = [lo, *pts, hi]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        x, w = segment_rule(n, a, b, m)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def upper_weight_integral(n: int, t) -> np.ndarray:
    """``int_t^1 (1-s^2)^{(n-3)/2} ds`` via the regularized incomplete beta."""
    a = weight_exponent(n)
    u = (1.0 - np.asarray(t, dtype=float)) / 2
    return 2.0 ** (2 * a + 1) * np.exp(betaln(a + 1, a + 1)) * betainc(a + 1, a + 1, u)


# ---------------------------------------------------------------------------
# Basis


def legendre_values(n: int, N: int, t, derivatives: int = 0):
    """Table of P_0..P_N (and optionally derivatives) at the points ``t``.

    Returns an array of shape (N+1, len(t)), or a tuple of such arrays when
    ``derivatives`` > 0.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    P = np.empty((N + 1, t.size))
    D1 = np.zeros_like(P) if derivatives >= 1 else None
    D2 = np.zeros_like(P) if derivatives >= 2 else None
    P[0] = 1.0
    if N >= 1:
        P[1] = t
        if D1 is not None:
            D1[1] = 1.0
    for k in range(1, N):
        a, b, c = 2 * k + n - 2, k, k + n - 2
        P[k + 1] = (a * t * P[k] - b * P[k - 1]) / c
        if D1 is not None:
            D1[k + 1] = (a * (P[k] + t * D1[k]) - b * D1[k - 1]) / c
        if D2 is not None:
            D2[k + 1] = (a * (2 * D1[k] + t * D2[k]) - b * D2[k - 1]) / c
    if derivatives == 0:
        return P
    if derivatives == 1:
        return P, D1
    return P, D1, D2


def harmonic_dimension(n: int, k: int) -> float:
    """Dimension of the space of degree-k spherical harmonics on S^{n-1}."""
    if n == 2:
        return 1.0 if k == 0 else 2.0
    return (2 * k + n - 2) * math.exp(gammaln(k + n - 2) - gammaln(k + 1) - gammaln(n - 1))


@lru_cache(maxsize=None)
def basis_norms(n: int, N: int) -> np.ndarray:
    """``int_{-1}^1 P_k(t)^2 (1-t^2)^{(n-3)/2} dt`` for k = 0..N."""
    ratio = omega(n) / omega(n - 1)
    return _frozen([ratio / harmonic_dimension(n, k) for k in range(N + 1)])


@dataclass(frozen=True)
class GegenbauerBasis:
    """Normalized zonal basis of band limit N together with its transform."""

    n: int
    N: int

    @property
    def lam(self) -> float:
        return (self.n - 2) / 2

    @property
    def norms(self) -> np.ndarray:
        return basis_norms(self.n, self.N)

    @property
    def rule(self) -> QuadratureRule:
        return gauss_rule(self.n, self.N + 1)

    def values(self, t, derivatives: int = 0):
        return legendre_values(self.n, self.N, t, derivatives)


@lru_cache(maxsize=None)
def _transform(n: int, N: int, M: int):
    rule = gauss_rule(n, M)
    P = legendre_values(n, N, rule.nodes)
    analysis = P * rule.weights / basis_norms(n, N)[:, None]
    return _frozen(P.T), _frozen(analysis)


@lru_cache(maxsize=None)
def node_table(n: int, N: int, M: int, derivatives: int = 0):
    """Cached basis values (and derivatives) at the nodes of ``gauss_rule(n, M)``."""
    out = legendre_values(n, N, gauss_rule(n, M).nodes, derivatives)
    if derivatives == 0:
        return _frozen(out)
    return tuple(_frozen(o) for o in out)


def to_coefficients(samples, n: int, N: int | None = None) -> np.ndarray:
    """Coefficients of the degree-<=N expansion from samples at Gauss nodes.

    ``samples`` are values at the nodes of ``gauss_rule(n, len(samples))``.
    """
    samples = np.asarray(samples, dtype=float)
    M = samples.shape[-1]
    if N is None:
        N = M - 1
    if M < N + 1:
        raise ValueError(f"{M} samples cannot determine {N + 1} coefficients")
    _, analysis = _transform(n, N, M)
    return analysis @ samples


def from_coefficients(coefficients, n: int, M: int | None = None) -> np.ndarray:
    """Samples at the nodes of ``gauss_rule(n, M)`` (default M = N+1)."""
    c = np.asarray(coefficients, dtype=float)
    N = c.shape[-1] - 1
    if M is None:
        M = N + 1
    synthesis, _ = _transform(n, N, M)
    return synthesis @ c
