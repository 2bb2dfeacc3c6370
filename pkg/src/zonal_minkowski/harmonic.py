"""Zonal convolution, cosine transform, the box operator and Berg's inverse.

All four operators are diagonal in the Legendre basis (Funk-Hecke).  The
convolution of a zonal measure mu with a zonal function g is

    (mu * g)(v) = int g~(u . v) dmu(u),

so the point mass at the pole is the identity and the degree-k coefficient
of mu * g is ``m_k(mu) * g_k`` with ``m_k(mu) = int P_k(e.u) dmu(u)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sphere import DEFAULT_BAND, _frozen, basis_norms, jacobi_segment, legendre_values, omega, weight_exponent
from .zonal import ZonalFunction, ZonalMeasure


class IllPosedError(ValueError):
    """Raised when an inversion would amplify data beyond a safe level."""


@dataclass(frozen=True)
class MultiplierSequence:
    n: int
    values: np.ndarray

    def __mul__(self, other: "MultiplierSequence") -> "MultiplierSequence":
        k = min(len(self.values), len(other.values))
        return MultiplierSequence(self.n, self.values[:k] * other.values[:k])


def as_measure(mu) -> ZonalMeasure:
    if isinstance(mu, ZonalMeasure):
        return mu
    if isinstance(mu, ZonalFunction):
        return ZonalMeasure(mu)
    raise TypeError(f"cannot interpret {type(mu).__name__} as a zonal measure")


def multipliers(mu, N: int | None = None) -> np.ndarray:
    mu = as_measure(mu)
    n = mu.n
    N = mu.N if N is None else N
    vals = np.zeros(N + 1)
    k = min(N, mu.N)
    vals[: k + 1] = omega(n - 1) * mu.density.coefficients[: k + 1] * basis_norms(n, k)
    if mu.atoms:
        ts = np.array([t for t, _ in mu.atoms])
        ms = np.array([m for _, m in mu.atoms])
        vals += legendre_values(n, N, ts) @ ms
    return vals


def multiplier_of(mu, N: int | None = None) -> MultiplierSequence:
    mu = as_measure(mu)
    return MultiplierSequence(mu.n, multipliers(mu, N))


def density_from_multipliers(n: int, values) -> ZonalFunction:
    values = np.asarray(values, dtype=float)
    N = values.size - 1
    return ZonalFunction(n, values / (omega(n - 1) * basis_norms(n, N)))


def _check_dims(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def convolve(mu, g: ZonalFunction) -> ZonalFunction:
    """mu * g at the band limit of g."""
    mu = as_measure(mu)
    _check_dims(mu, g)
    return ZonalFunction(g.n, multipliers(mu, g.N) * g.coefficients)


def convolve_measures(mu, nu) -> ZonalMeasure:
    """mu * nu as a band-limited density."""
    mu, nu = as_measure(mu), as_measure(nu)
    _check_dims(mu, nu)
    N = min(mu.N, nu.N)
    return ZonalMeasure(density_from_multipliers(mu.n, multipliers(mu, N) * multipliers(nu, N)))


# ---------------------------------------------------------------------------
# Cosine transform


@lru_cache(maxsize=None)
def cosine_multipliers(n: int, N: int) -> np.ndarray:
    """``lam_k = omega_{n-1} int |t| P_k(t) (1-t^2)^{(n-3)/2} dt``.

    Integrated on [0, 1] with a one-sided Jacobi rule, exact for odd n.
    """
    x, w = jacobi_segment(weight_exponent(n), 0.0, 1.0, N // 2 + 64)
    P = legendre_values(n, N, x)
    lam = 2.0 * omega(n - 1) * (P @ (w * x))
    lam[1::2] = 0.0
    return _frozen(lam)


def abs_kernel(n: int, N: int = DEFAULT_BAND) -> ZonalFunction:
    """The zonal function |e . u| with its exact profile."""
    c = cosine_multipliers(n, N) / (omega(n - 1) * basis_norms(n, N))
    return ZonalFunction(n, c, np.abs, (0.0,))


def cosine_transform(mu) -> ZonalFunction:
    mu = as_measure(mu)
    return convolve(mu, abs_kernel(mu.n, mu.N))


def inverse_cosine_even(f: ZonalFunction, tail_tol: float = 1e-6, odd_tol: float = 1e-10) -> ZonalFunction:
    """Even density g with C g = f.

    Refuses odd input and inputs whose top quarter of the band carries more
    than ``tail_tol`` of the energy, since the inverse multipliers grow
    polynomially in the degree.
    """
    n, N = f.n, f.N
    c = f.coefficients
    w = basis_norms(n, N)
    energy = c * c * w
    total = float(energy.sum())
    if total == 0.0:
        return ZonalFunction(n, np.zeros(N + 1))
    if float(energy[1::2].sum()) > odd_tol ** 2 * total:
        raise ValueError("inverse cosine transform requires an even function")
    if float(energy[3 * N // 4 + 1:].sum()) > tail_tol * total:
        raise IllPosedError("high-degree energy too large for a stable inverse cosine transform")
    lam = cosine_multipliers(n, N)
    even = np.arange(0, N + 1, 2)
    if np.any(np.abs(lam[even]) < 1e-14 * np.abs(lam[0])):
        raise IllPosedError("vanishing cosine multiplier in the truncation range")
    out = np.zeros(N + 1)
    out[even] = c[even] / lam[even]
    return ZonalFunction(n, out)


# ---------------------------------------------------------------------------
# Box operator and Berg's function


def box_multipliers(n: int, N: int) -> np.ndarray:
    k = np.arange(N + 1, dtype=float)
    m = 1.0 - k * (k + n - 2) / (n - 1)
    if N >= 1:
        m[1] = 0.0
    return m


def box_n(f: ZonalFunction) -> ZonalFunction:
    """(1/(n-1)) trace of the Hessian of the 1-homogeneous extension."""
    return ZonalFunction(f.n, box_multipliers(f.n, f.N) * f.coefficients)


def box_n_pointwise(f: ZonalFunction, t) -> np.ndarray:
    """The zonal closed form ((1-t^2) f'' - (n-1) t f' + (n-1) f) / (n-1)."""
    n = f.n
    t = np.asarray(t, dtype=float)
    v, d1, d2 = f.derivatives(t)
    return ((1 - t * t) * d2 - (n - 1) * t * d1 + (n - 1) * v) / (n - 1)


def berg_multipliers(n: int, N: int) -> np.ndarray:
    b = box_multipliers(n, N)
    out = np.zeros_like(b)
    nz = np.arange(N + 1) != 1
    out[nz] = 1.0 / b[nz]
    return out


def berg_function(n: int, N: int = DEFAULT_BAND) -> ZonalMeasure:
    """Truncated spectral inverse of box_n (degree 1 set to zero)."""
    return ZonalMeasure(density_from_multipliers(n, berg_multipliers(n, N)))


def berg_apply(f: ZonalFunction, tol: float = 1e-10) -> ZonalFunction:
    if f.N >= 1 and abs(f.coefficients[1]) > tol * max(1.0, float(np.max(np.abs(f.coefficients)))):
        raise ValueError("berg_apply expects input without a degree-1 component")
    return ZonalFunction(f.n, berg_multipliers(f.n, f.N) * f.coefficients)
