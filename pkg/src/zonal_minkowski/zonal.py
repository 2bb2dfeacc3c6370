"""Zonal functions and zonal signed measures on S^{n-1}.

A zonal function f is stored through its associated function on [-1, 1]
(``f(u) = f~(e.u)``).  Every ``ZonalFunction`` carries its Legendre
coefficients up to the band limit N.  It may additionally carry an exact
``profile`` callable, for piecewise data such as indicator pieces or
compactly supported bumps, together with the points where that profile is
not smooth.  Pointwise evaluation and integration use the profile when
present; spectral operations always use the coefficients, which are the
exact L^2 projections of the profile.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq

from .sphere import (
    DEFAULT_BAND,
    basis_norms,
    check_dim,
    from_coefficients,
    gauss_rule,
    legendre_values,
    omega,
    piecewise_rule,
    to_coefficients,
)

Profile = Callable[[np.ndarray], np.ndarray]

# nodes per smooth piece when projecting or integrating an exact profile
_EXTRA_NODES = 48


def _merge_breaks(*groups: Iterable[float]) -> tuple[float, ...]:
    pts = sorted({float(b) for g in groups for b in g if -1.0 < b < 1.0})
    return tuple(pts)


def project(n: int, fn: Profile, N: int, breaks=(), m: int | None = None) -> np.ndarray:
    """Legendre coefficients of ``fn`` (L^2 projection onto degree <= N)."""
    if m is None:
        m = N + _EXTRA_NODES
    if breaks:
        x, w = piecewise_rule(n, breaks, m)
    else:
        rule = gauss_rule(n, max(m, N + 1))
        x, w = rule.nodes, rule.weights
    vals = np.asarray(fn(x), dtype=float)
    P = legendre_values(n, N, x)
    return (P @ (w * vals)) / basis_norms(n, N)


class ZonalFunction:
    """Zonal function on S^{n-1} given by its associated function."""

    def __init__(self, n: int, coefficients, profile: Profile | None = None, breaks=()):
        self.n = check_dim(n)
        c = np.array(coefficients, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a non-empty vector")
        c.setflags(write=False)
        self.coefficients = c
        self.profile = profile
        self.breaks = _merge_breaks(breaks) if profile is not None else ()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coefficients(cls, n: int, coefficients):
        return cls(n, coefficients)

    @classmethod
    def from_samples(cls, n: int, samples, N: int | None = None):
        return cls(n, to_coefficients(samples, n, N))

    @classmethod
    def from_callable(cls, n: int, fn: Profile, N: int = DEFAULT_BAND, breaks=(),
                      exact: bool = True, m: int | None = None):
        """Project ``fn``; keep it as the exact profile unless ``exact`` is False."""
        breaks = _merge_breaks(breaks)
        c = project(n, fn, N, breaks, m)
        return cls(n, c, fn if exact else None, breaks)

    @classmethod
    def constant(cls, n: int, value: float = 1.0, N: int = DEFAULT_BAND):
        c = np.zeros(N + 1)
        c[0] = value
        return cls(n, c)

    @classmethod
    def basis(cls, n: int, k: int, N: int = DEFAULT_BAND):
        c = np.zeros(N + 1)
        c[k] = 1.0
        return cls(n, c)

    # -- basic properties -------------------------------------------------

    @property
    def N(self) -> int:
        return self.coefficients.size - 1

    @property
    def band_limited(self) -> bool:
        return self.profile is None

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coefficients)
        return int(nz[-1]) if nz.size else 0

    @cached_property
    def samples(self) -> np.ndarray:
        """Spectral values at the nodes of ``gauss_rule(n, N+1)``."""
        return from_coefficients(self.coefficients, self.n)

    @property
    def nodes(self) -> np.ndarray:
        return gauss_rule(self.n, self.N + 1).nodes

    def __repr__(self):
        kind = "band-limited" if self.band_limited else "profile"
        return f"ZonalFunction(n={self.n}, N={self.N}, {kind})"

    # -- evaluation -------------------------------------------------------

    def spectral(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        d = self.degree
        P = legendre_values(self.n, d, t.ravel())
        return (self.coefficients[: d + 1] @ P).reshape(t.shape)

    def __call__(self, t) -> np.ndarray:
        if self.profile is not None:
            t = np.asarray(t, dtype=float)
            return np.asarray(self.profile(t), dtype=float) * np.ones_like(t)
        return self.spectral(t)

    def derivatives(self, t):
        """Spectral values, first and second derivatives at ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        P, D1, D2 = legendre_values(self.n, self.N, t, derivatives=2)
        c = self.coefficients
        return c @ P, c @ D1, c @ D2

    def integrate(self, m: int | None = None) -> float:
        """Integral over S^{n-1} (Hausdorff measure)."""
        if self.profile is None:
            return omega(self.n) * float(self.coefficients[0])
        return omega(self.n - 1) * weighted_integral(self.n, self, self.breaks, m or self.N + _EXTRA_NODES)

    def sup_norm(self, grid: int = 4001) -> float:
        t = np.concatenate([np.linspace(-1, 1, grid), self.nodes])
        return float(np.max(np.abs(self(t))))

    # -- algebra ----------------------------------------------------------

    def _coerce(self, other) -> "ZonalFunction":
        if isinstance(other, ZonalFunction):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
            return other
        return ZonalFunction.constant(self.n, float(other), self.N)

    def _combine(self, other, sign: float) -> "ZonalFunction":
        other = self._coerce(other)
        N = max(self.N, other.N)
        c = np.zeros(N + 1)
        c[: self.N + 1] += self.coefficients
        c[: other.N + 1] += sign * other.coefficients
        if self.profile is None and other.profile is None:
            return ZonalFunction(self.n, c)
        a, b = self, other
        return ZonalFunction(self.n, c, lambda t: a(t) + sign * b(t), _merge_breaks(a.breaks, b.breaks))

    def __add__(self, other):
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __rsub__(self, other):
        return (-self)._combine(other, 1.0)

    def __mul__(self, s):
        s = float(s)
        p = self.profile
        prof = None if p is None else (lambda t: s * p(t))
        return ZonalFunction(self.n, s * self.coefficients, prof, self.breaks)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / float(s))

    def __neg__(self):
        return self * -1.0

    def reflect(self) -> "ZonalFunction":
        """The function u -> f(-u)."""
        signs = (-1.0) ** np.arange(self.N + 1)
        p = self.profile
        prof = None if p is None else (lambda t: p(-np.asarray(t)))
        return ZonalFunction(self.n, signs * self.coefficients, prof, [-b for b in self.breaks])

    def even(self) -> "ZonalFunction":
        return (self + self.reflect()) * 0.5

    def odd(self) -> "ZonalFunction":
        return (self - self.reflect()) * 0.5

    def with_band(self, N: int) -> "ZonalFunction":
        """Same function at band limit N (re-projecting an exact profile)."""
        if self.profile is not None:
            return ZonalFunction.from_callable(self.n, self.profile, N, self.breaks)
        c = np.zeros(N + 1)
        k = min(N, self.N)
        c[: k + 1] = self.coefficients[: k + 1]
        return ZonalFunction(self.n, c)

    def spectral_part(self) -> "ZonalFunction":
        return ZonalFunction(self.n, self.coefficients)


def weighted_integral(n: int, fn: Profile, breaks=(), m: int = 96, lo: float = -1.0, hi: float = 1.0) -> float:
    """``int_lo^hi fn(t) (1-t^2)^{(n-3)/2} dt`` split at ``breaks``."""
    x, w = piecewise_rule(n, breaks, m, lo, hi)
    return float(np.dot(w, fn(x)))


def sphere_integral(f: ZonalFunction, m: int | None = None) -> float:
    """int_{S^{n-1}} f du = omega_{n-1} int f~(t) (1-t^2)^{(n-3)/2} dt."""
    return f.integrate(m)


def sign_changes(fn: Profile, breaks=(), grid: int = 4097, tol: float = 1e-10) -> list[float]:
    """Zeros of ``fn`` on (-1, 1) located by bisection between sample points."""
    t = np.unique(np.concatenate([-np.cos(np.linspace(0, np.pi, grid)), np.asarray(breaks, float)]))
    v = fn(t)
    roots = []
    for i in np.flatnonzero(v[:-1] * v[1:] < 0):
        roots.append(brentq(fn, t[i], t[i + 1], xtol=tol))
    # exact zeros count only where the sign flips across them
    flips = (v[1:-1] == 0) & (v[:-2] * v[2:] < 0)
    roots.extend(float(x) for x in t[1:-1][flips])
    return sorted(roots)


# ---------------------------------------------------------------------------
# Measures


def _merge_atoms(atoms) -> tuple[tuple[float, float], ...]:
    acc: dict[float, float] = {}
    for t, m in atoms:
        t = float(t)
        if not -1.0 <= t <= 1.0:
            raise ValueError(f"atom latitude {t} outside [-1, 1]")
        key = next((k for k in acc if abs(k - t) <= 1e-15), t)
        acc[key] = acc.get(key, 0.0) + float(m)
    return tuple(sorted((t, m) for t, m in acc.items() if m != 0.0))


@dataclass(frozen=True)
class ZonalMeasure:
    """Zonal signed measure: density w.r.t. spherical Lebesgue measure plus atom rings.

    An atom (t, m) is the uniform measure of total mass m on the latitude
    ring {u : e.u = t} (a point mass when t = +-1).
    """

    density: ZonalFunction
    atoms: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))

    @property
    def n(self) -> int:
        return self.density.n

    @property
    def N(self) -> int:
        return self.density.N

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int, N: int = DEFAULT_BAND):
        return cls(ZonalFunction.constant(n, 0.0, N))

    @classmethod
    def point_mass(cls, n: int, N: int = DEFAULT_BAND, t: float = 1.0, mass: float = 1.0):
        return cls(ZonalFunction.constant(n, 0.0, N), ((t, mass),))

    @classmethod
    def uniform(cls, n: int, N: int = DEFAULT_BAND, total: float = 1.0):
        return cls(ZonalFunction.constant(n, total / omega(n), N))

    @classmethod
    def from_density(cls, f: ZonalFunction):
        return cls(f)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "ZonalMeasure") -> "ZonalMeasure":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return ZonalMeasure(self.density + other.density, self.atoms + other.atoms)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, s):
        s = float(s)
        return ZonalMeasure(self.density * s, tuple((t, s * m) for t, m in self.atoms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def reflect(self) -> "ZonalMeasure":
        return ZonalMeasure(self.density.reflect(), tuple((-t, m) for t, m in self.atoms))

    def with_band(self, N: int) -> "ZonalMeasure":
        return ZonalMeasure(self.density.with_band(N), self.atoms)

    # -- integrals ---------------------------------------------------------

    def pair(self, g, breaks=()) -> float:
        """``int g dmu`` for a zonal function (or callable on [-1, 1]) g."""
        n = self.n
        f = self.density
        if isinstance(g, ZonalFunction):
            if g.n != n:
                raise ValueError("dimension mismatch")
            breaks = _merge_breaks(breaks, g.breaks)
        smooth_f = f.profile is None
        if isinstance(g, ZonalFunction) and g.profile is None and smooth_f:
            k = min(f.N, g.N)
            ac = omega(n - 1) * float(np.sum(f.coefficients[: k + 1] * g.coefficients[: k + 1]
                                             * basis_norms(n, k)))
        else:
            m = max(f.N, getattr(g, "N", 0)) + _EXTRA_NODES
            ac = omega(n - 1) * weighted_integral(n, lambda t: f(t) * g(t), _merge_breaks(breaks, f.breaks), m)
        if self.atoms:
            ts = np.array([t for t, _ in self.atoms])
            ms = np.array([m for _, m in self.atoms])
            ac += float(np.dot(ms, g(ts)))
        return ac

    def mass(self) -> float:
        return self.density.integrate() + sum(m for _, m in self.atoms)

    def density_moment(self, k: int) -> float:
        """``int P_k(e.u) dmu(u)`` using the stored coefficients."""
        n = self.n
        c = self.density.coefficients
        val = omega(n - 1) * c[k] * basis_norms(n, k)[k] if k <= self.N else 0.0
        for t, m in self.atoms:
            val += m * float(legendre_values(n, k, [t])[k, 0])
        return float(val)


def even_part(mu: ZonalMeasure) -> ZonalMeasure:
    r = mu.reflect()
    return (mu + r) * 0.5


def odd_part(mu: ZonalMeasure) -> ZonalMeasure:
    r = mu.reflect()
    return (mu - r) * 0.5


def total_variation(mu: ZonalMeasure) -> float:
    """Mass of |mu|; density zeros are resolved by bisection before integrating."""
    f = mu.density
    zeros = sign_changes(f, f.breaks)
    m = f.N + _EXTRA_NODES
    ac = omega(mu.n - 1) * weighted_integral(mu.n, lambda t: np.abs(f(t)), _merge_breaks(zeros, f.breaks), m)
    return ac + sum(abs(m) for _, m in mu.atoms)


def centroid(mu: ZonalMeasure) -> float:
    """The e-component of ``int u dmu(u)``; the other components vanish by zonality."""
    f = mu.density
    if f.profile is None:
        ac = omega(mu.n - 1) * f.coefficients[1] * basis_norms(mu.n, 1)[1] if f.N >= 1 else 0.0
    else:
        ac = omega(mu.n - 1) * weighted_integral(mu.n, lambda t: t * f(t), f.breaks, f.N + _EXTRA_NODES)
    return float(ac + sum(t * m for t, m in mu.atoms))


def linear_density(n: int, N: int = DEFAULT_BAND, scale: float = 1.0) -> ZonalFunction:
    return ZonalFunction.basis(n, 1, N) * scale


def project_o(mu: ZonalMeasure) -> ZonalMeasure:
    """Remove the degree-1 component so that the centroid vanishes."""
    c = centroid(mu)
    if c == 0.0:
        return mu
    n = mu.n
    return ZonalMeasure(mu.density - linear_density(n, mu.N, n / omega(n) * c), mu.atoms)


@dataclass(frozen=True)
class RadonParts:
    positive: ZonalMeasure
    negative: ZonalMeasure


def radon_decompose(mu: ZonalMeasure) -> RadonParts:
    f = mu.density
    n, N = mu.n, mu.N
    zeros = sign_changes(f, f.breaks)
    br = _merge_breaks(zeros, f.breaks)
    pos = ZonalFunction.from_callable(n, lambda t: np.maximum(f(t), 0.0), N, br)
    neg = ZonalFunction.from_callable(n, lambda t: np.maximum(-f(t), 0.0), N, br)
    return RadonParts(
        ZonalMeasure(pos, tuple((t, m) for t, m in mu.atoms if m > 0)),
        ZonalMeasure(neg, tuple((t, -m) for t, m in mu.atoms if m < 0)),
    )


# ---------------------------------------------------------------------------
# Text records


def dumps(mu: ZonalMeasure) -> str:
    """Serialize the band-limited part of ``mu`` (exact profiles are not stored)."""
    lines = [f"dim {mu.n} {mu.N}", " ".join(f"{c:.17g}" for c in mu.density.coefficients)]
    lines += [f"atom {t:.17g} {m:.17g}" for t, m in mu.atoms]
    return "\n".join(lines) + "\n"


def loads(text: str) -> ZonalMeasure:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dim":
        raise ValueError("record must start with 'dim n N'")
    n, N = int(head[1]), int(head[2])
    coeffs = [float(x) for x in lines[1].split()]
    if len(coeffs) != N + 1:
        raise ValueError(f"expected {N + 1} coefficients, got {len(coeffs)}")
    atoms = []
    for ln in lines[2:]:
        tag, t, m = ln.split()
        if tag != "atom":
            raise ValueError(f"unexpected line {ln!r}")
        atoms.append((float(t), float(m)))
    return ZonalMeasure(ZonalFunction(n, coeffs), tuple(atoms))


def dumps_function(f: ZonalFunction) -> str:
    return dumps(ZonalMeasure(f))


def loads_function(text: str) -> ZonalFunction:
    mu = loads(text)
    if mu.atoms:
        raise ValueError("function record must not contain atoms")
    return mu.density
