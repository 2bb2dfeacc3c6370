"""Convex bodies of revolution described by their zonal support functions."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .harmonic import box_multipliers
from .sphere import DEFAULT_BAND, gauss_rule, kappa, legendre_values, node_table, omega
from .zonal import ZonalFunction, ZonalMeasure, centroid, weighted_integral

SMOOTH_SYMMETRIC = "smooth-symmetric"
SMOOTH_GENERAL = "smooth-general"
NEAR_SEGMENT = "near-segment"
NEAR_CAP = "near-cap"
BODY_CLASSES = (SMOOTH_SYMMETRIC, SMOOTH_GENERAL, NEAR_SEGMENT, NEAR_CAP)


def _grid(h: ZonalFunction):
    """Evaluation points: Gauss nodes of the band plus both poles."""
    P, D1, D2 = node_table(h.n, h.N, h.N + 1, 2)
    ends = legendre_values(h.n, h.N, [-1.0, 1.0], 2)
    t = np.concatenate([[-1.0], gauss_rule(h.n, h.N + 1).nodes, [1.0]])
    Ps = [np.hstack([e[:, :1], m, e[:, 1:]]) for e, m in zip(ends, (P, D1, D2))]
    return t, Ps


def radii_on_grid(h: ZonalFunction):
    """(t, r_meridian, r_parallel) on the standard evaluation grid."""
    t, (P, D1, D2) = _grid(h)
    c = h.coefficients
    v, d1, d2 = c @ P, c @ D1, c @ D2
    r_m = (1 - t * t) * d2 - t * d1 + v
    r_p = v - t * d1
    return t, r_m, r_p


@dataclass(frozen=True)
class CurvatureProfile:
    r_meridian: ZonalFunction
    r_parallel: ZonalFunction


@dataclass(frozen=True)
class SupportCheck:
    ok: bool
    margin: float

    def __bool__(self):
        return self.ok


def is_support_function(h: ZonalFunction, strict: bool = False, tol: float = 1e-9) -> SupportCheck:
    """Curvature test: both principal radii nonnegative (positive if strict)."""
    _, r_m, r_p = radii_on_grid(h)
    margin = float(min(r_m.min(), r_p.min()))
    return SupportCheck(margin > 0 if strict else margin >= -tol, margin)


class BodyRev:
    """A convex body of revolution about the pole axis."""

    def __init__(self, h: ZonalFunction, check: bool = True):
        self.h = h
        if check:
            res = is_support_function(h)
            if not res:
                raise ValueError(f"not a support function (curvature margin {res.margin:.3g})")

    @property
    def n(self):
        return self.h.n

    @property
    def N(self):
        return self.h.N

    @cached_property
    def margin(self) -> float:
        return is_support_function(self.h).margin

    @property
    def smooth(self) -> bool:
        """Whether the body passed the strict curvature test (class K^2_+)."""
        return self.margin > 0

    def __add__(self, other: "BodyRev") -> "BodyRev":
        return BodyRev(self.h + other.h, check=False)

    def scaled(self, s: float) -> "BodyRev":
        return BodyRev(self.h * s, check=False)

    def dilated(self, r: float) -> "BodyRev":
        """K + r B^n (r may be negative for finite differences)."""
        return BodyRev(self.h + r, check=False)

    def with_band(self, N: int) -> "BodyRev":
        return BodyRev(self.h.with_band(N), check=False)

    @classmethod
    def ball(cls, n: int, radius: float = 1.0, N: int = DEFAULT_BAND):
        return cls(ZonalFunction.constant(n, radius, N), check=False)


def curvature(K: BodyRev) -> CurvatureProfile:
    h = K.h
    t = gauss_rule(h.n, h.N + 1).nodes
    v, d1, d2 = h.derivatives(t)
    r_m = (1 - t * t) * d2 - t * d1 + v
    r_p = v - t * d1
    return CurvatureProfile(ZonalFunction.from_samples(h.n, r_m), ZonalFunction.from_samples(h.n, r_p))


def area_density_values(h: ZonalFunction, j: int, t) -> np.ndarray:
    """s_j at the points t from the zonal principal radii."""
    n = h.n
    t = np.asarray(t, dtype=float)
    v, d1, d2 = h.derivatives(t)
    r_m = (1 - t * t) * d2 - t * d1 + v
    r_p = v - t * d1
    return _sym(n, j, r_m, r_p)


def _sym(n, j, r_m, r_p):
    # normalized elementary symmetric function of (r_m, r_p, ..., r_p)
    return (math.comb(n - 2, j) * r_p ** j + math.comb(n - 2, j - 1) * r_m * r_p ** (j - 1)) / math.comb(n - 1, j)


def area_density(K: BodyRev, j: int, check: bool = True) -> ZonalFunction:
    """Density s_j of the area measure S_j(K, .) for K in K^2_+."""
    n = K.n
    if not 1 <= j <= n - 1:
        raise ValueError(f"order j={j} outside 1..{n - 1}")
    if check and not K.smooth:
        raise ValueError("area densities require a body in K^2_+")
    h = K.h
    if j == 1:
        return ZonalFunction(n, box_multipliers(n, h.N) * h.coefficients)
    # s_j is a polynomial of degree <= j*deg(h); choose an exact projection rule
    D = h.degree
    m = max(h.N + 1, (j * D + h.N) // 2 + 2)
    return ZonalFunction.from_callable(n, lambda t: area_density_values(h, j, t), h.N, exact=True, m=m)


def area_measure(K: BodyRev, j: int, check: bool = True) -> ZonalMeasure:
    return ZonalMeasure(area_density(K, j, check))


def steiner_point(K: BodyRev) -> float:
    """e-component of (1/kappa_n) int h(u) u du."""
    return centroid(ZonalMeasure(K.h)) / kappa(K.n)


def mean_width(K: BodyRev, normalized: bool = True) -> float:
    """(2/omega_n) int h by default; the raw integral int h when not normalized."""
    total = K.h.integrate()
    return 2.0 * total / omega(K.n) if normalized else total


# ---------------------------------------------------------------------------
# Double cone


DOUBLE_CONE_LATITUDE = 1.0 / math.sqrt(2.0)


def double_cone_support(n: int, N: int = DEFAULT_BAND) -> ZonalFunction:
    """Support function max(|t|, sqrt(1-t^2)) of conv(+-e, equatorial unit ball)."""
    c = DOUBLE_CONE_LATITUDE
    return ZonalFunction.from_callable(
        n, lambda t: np.maximum(np.abs(t), np.sqrt(np.clip(1 - t * t, 0, None))), N, (-c, c))


def double_cone_ring_mass(n: int) -> float:
    """Mass of S_1(D) on each of the two rings t = +-1/sqrt(2)."""
    return 2.0 ** (-(n - 3) / 2) * kappa(n - 1)


def double_cone_S1(n: int, N: int = DEFAULT_BAND, variant: str = "derived") -> ZonalMeasure:
    """First area measure of the double cone as a zonal measure.

    ``variant="derived"`` is the measure obtained from the radii of the
    equatorial rim and the two conical sheets: rings of mass
    2^{-(n-3)/2} kappa_{n-1} at t = +-1/sqrt(2) and density
    ((n-2)/(n-1)) (1-t^2)^{-1/2} on |t| < 1/sqrt(2).
    ``variant="literal"`` is the one-sided closed form
    2^{-(n-5)/2} kappa_{n-1} f(1/sqrt 2) + (n-2) int_0^{1/sqrt 2} f (1-t^2)^{(n-2)/2} dt
    written as a measure; both agree on the ring term for even f.
    """
    if n < 3:
        raise ValueError("the double cone construction needs n >= 3")
    c = DOUBLE_CONE_LATITUDE
    if variant == "derived":
        dens = ZonalFunction.from_callable(
            n, lambda t: np.where(np.abs(t) < c, (n - 2) / (n - 1) / np.sqrt(np.clip(1 - t * t, 1e-300, None)), 0.0),
            N, (-c, c))
        R = double_cone_ring_mass(n)
        return ZonalMeasure(dens, ((c, R), (-c, R)))
    if variant == "literal":
        w1 = omega(n - 1)
        dens = ZonalFunction.from_callable(
            n, lambda t: np.where((t > 0) & (t < c), (n - 2) * np.sqrt(np.clip(1 - t * t, 0, None)) / w1, 0.0),
            N, (0.0, c))
        return ZonalMeasure(dens, ((c, 2.0 ** (-(n - 5) / 2) * kappa(n - 1)),))
    raise ValueError(f"unknown variant {variant!r}")


def double_cone_S1_pair(f, n: int, variant: str = "literal", m: int = 200) -> float:
    """Evaluate int f dS_1(D) directly from the closed form."""
    c = DOUBLE_CONE_LATITUDE
    if variant == "literal":
        integral = weighted_integral(3, lambda t: f(t) * (1 - t * t) ** ((n - 2) / 2), (), m, 0.0, c)
        return 2.0 ** (-(n - 5) / 2) * kappa(n - 1) * float(f(np.array([c]))[0]) + (n - 2) * integral
    R = double_cone_ring_mass(n)
    # (1-t^2)^{(n-4)/2} on (-c, c); n=3 weight -1/2 is smooth away from +-1
    integral = weighted_integral(3, lambda t: f(t) * (1 - t * t) ** ((n - 4) / 2), (0.0,), m, -c, c)
    return R * float(f(np.array([c]))[0] + f(np.array([-c]))[0]) + (n - 2) * kappa(n - 1) * integral


# ---------------------------------------------------------------------------
# Sampling


def heat_smoothed(f: ZonalFunction, tau: float, eps: float = 1e-15) -> ZonalFunction:
    """Convolution with the heat kernel, truncated where its multiplier drops below eps."""
    n, N = f.n, f.N
    k = np.arange(N + 1, dtype=float)
    mult = np.exp(-tau * k * (k + n - 2))
    mult[mult < eps] = 0.0
    return ZonalFunction(n, f.spectral_part().coefficients * mult)


def _perturbation(rng, n, N, degree, parity):
    c = np.zeros(N + 1)
    ks = np.arange(2, degree + 1)
    if parity == "even":
        ks = ks[ks % 2 == 0]
    c[ks] = rng.normal(size=ks.size) / ks ** 1.5
    if parity == "any":
        c[1] = rng.normal()
    return ZonalFunction(n, c)


def _max_step(base: ZonalFunction, pert: ZonalFunction) -> float:
    """Largest s with base + s*pert keeping nonnegative radii (radii are linear in s)."""
    _, bm, bp = radii_on_grid(base)
    _, pm, pp = radii_on_grid(pert)
    r0 = np.concatenate([bm, bp])
    r1 = np.concatenate([pm, pp])
    neg = r1 < 0
    if not neg.any():
        return np.inf
    return float(np.min(r0[neg] / -r1[neg]))


def sample_body(seed: int, kind: str = SMOOTH_SYMMETRIC, n: int = 3, N: int = DEFAULT_BAND,
                degree: int = 12, retries: int = 20) -> BodyRev:
    """Random band-limited body in K^2_+ of the requested class."""
    if kind not in BODY_CLASSES:
        raise ValueError(f"unknown body class {kind!r}")
    rng = np.random.default_rng(seed)
    degree = min(degree, N)
    scale = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
    for _ in range(retries):
        if kind in (SMOOTH_SYMMETRIC, SMOOTH_GENERAL):
            base = ZonalFunction.constant(n, 1.0, N)
            pert = _perturbation(rng, n, N, degree, "even" if kind == SMOOTH_SYMMETRIC else "any")
            smax = _max_step(base, pert)
            s = rng.uniform(0.2, 0.95) * min(smax, 50.0)
            h = base + pert * s
        else:
            if kind == NEAR_SEGMENT:
                profile, breaks = np.abs, (0.0,)
            else:
                profile, breaks = (lambda t: np.sqrt(np.clip(1 - t * t, 0, None))), ()
            raw = ZonalFunction.from_callable(n, profile, N, breaks, exact=False)
            tau = float(np.exp(rng.uniform(np.log(0.004), np.log(0.05))))
            eps = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.1))))
            h = heat_smoothed(raw, tau) + eps
        check = is_support_function(h, strict=True)
        if check.ok:
            return BodyRev(h * scale, check=False)
    raise RuntimeError(f"sampling a {kind} body failed after {retries} tries")


def profile_table(K: BodyRev, t=None) -> list[dict]:
    """Rows (t, r_m, r_p, s_1..s_{n-1}) for CSV export."""
    n = K.n
    if t is None:
        t = np.linspace(-1, 1, 201)
    t = np.asarray(t, dtype=float)
    v, d1, d2 = K.h.derivatives(t)
    r_m = (1 - t * t) * d2 - t * d1 + v
    r_p = v - t * d1
    rows = []
    for i, ti in enumerate(t):
        row = {"t": ti, "r_m": r_m[i], "r_p": r_p[i]}
        for j in range(1, n):
            row[f"s_{j}"] = float(_sym(n, j, r_m[i], r_p[i]))
        rows.append(row)
    return rows


def profile_csv(K: BodyRev, t=None) -> str:
    rows = profile_table(K, t)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for r in rows:
        writer.writerow([f"{v:.17g}" for v in r.values()])
    return buf.getvalue()
