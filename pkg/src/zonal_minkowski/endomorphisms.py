"""Minkowski endomorphisms of bodies of revolution, given by zonal generating measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bodies import NEAR_CAP, NEAR_SEGMENT, SMOOTH_GENERAL, SMOOTH_SYMMETRIC, BodyRev, area_density, \
    radii_on_grid, sample_body, steiner_point
from .cones import SMOOTHNESS_ORDER, bump_function
from .harmonic import convolve
from .sphere import DEFAULT_BAND, omega
from .zonal import ZonalFunction, ZonalMeasure, _merge_breaks, project_o, total_variation


class NotAnEndomorphismError(ValueError):
    """The candidate generating measure maps a body outside the convex bodies."""


@dataclass(frozen=True)
class Endomorphism:
    """Endomorphism h_{Phi K} = h_K * mu, with mu normalized to have no degree-1 part."""

    mu: ZonalMeasure

    @classmethod
    def from_measure(cls, mu: ZonalMeasure) -> "Endomorphism":
        return cls(project_o(mu))

    @classmethod
    def from_function(cls, g: ZonalFunction) -> "Endomorphism":
        return cls.from_measure(ZonalMeasure(g))

    @property
    def n(self) -> int:
        return self.mu.n

    @property
    def N(self) -> int:
        return self.mu.N

    def with_band(self, N: int) -> "Endomorphism":
        return Endomorphism(project_o(self.mu.with_band(N)))

    def generating_min(self, grid: int = 4001) -> float:
        f = self.mu.density
        t = np.unique(np.concatenate([np.linspace(-1, 1, grid), f.nodes, f.breaks]))
        return float(np.min(f(t)))


def apply(phi: Endomorphism, K: BodyRev, strict: bool = False, tol: float = 1e-6) -> BodyRev:
    """Phi(K); with ``strict`` a curvature margin below -tol raises NotAnEndomorphismError."""
    if phi.n != K.n:
        raise ValueError("dimension mismatch")
    out = BodyRev(convolve(phi.mu, K.h), check=False)
    if strict and out.margin < -tol:
        raise NotAnEndomorphismError(f"image has curvature margin {out.margin:.3g}")
    return out


# ---------------------------------------------------------------------------
# Weak monotonicity


@dataclass(frozen=True)
class MonotonicityDecision:
    weakly_monotone: bool
    shift: float | None  # admissible coefficient a of the linear density
    witness: tuple[float, float] | None  # latitudes with contradictory requirements on a
    bounds: tuple[float, float]

    def __bool__(self):
        return self.weakly_monotone

    def to_dict(self) -> dict:
        return {"weakly_monotone": self.weakly_monotone, "shift": self.shift,
                "witness": None if self.witness is None else list(self.witness),
                "bounds": list(self.bounds)}


def is_weakly_monotone(phi: Endomorphism | ZonalMeasure, tol: float = 1e-10, grid: int = 8193) -> MonotonicityDecision:
    """Is mu + a t >= 0 (as a measure) for some real a?

    A density point t > 0 forces a >= -f(t)/t and t < 0 forces a <= f(t)/|t|;
    atoms are unaffected by the linear term and must be nonnegative.  The
    witness is the pair of latitudes realizing the crossed bounds.
    """
    mu = phi.mu if isinstance(phi, Endomorphism) else phi
    f = mu.density
    t = np.unique(np.concatenate([-np.cos(np.linspace(0, np.pi, grid)), f.nodes,
                                  [b for b in f.breaks], [x for x, _ in mu.atoms if -1 < x < 1]]))
    v = f(t)
    scale = max(1.0, float(np.max(np.abs(v))))
    pos, neg = t > 0, t < 0
    lo_vals = -v[pos] / t[pos]
    hi_vals = v[neg] / -t[neg]
    i, k = int(np.argmax(lo_vals)), int(np.argmin(hi_vals))
    lower, upper = float(lo_vals[i]), float(hi_vals[k])
    zero_ok = bool(np.all(v[t == 0] >= -tol * scale))
    atoms_ok = all(m >= -tol * scale for _, m in mu.atoms)
    if lower <= upper + tol * scale and zero_ok and atoms_ok:
        return MonotonicityDecision(True, 0.5 * (lower + upper) if lower <= upper else lower, None, (lower, upper))
    if not atoms_ok:
        bad = min(mu.atoms, key=lambda a: a[1])
        return MonotonicityDecision(False, None, (bad[0], bad[0]), (lower, upper))
    return MonotonicityDecision(False, None, (float(t[pos][i]), float(t[neg][k])), (lower, upper))


# ---------------------------------------------------------------------------
# Validation suites


@lru_cache(maxsize=None)
def validation_suite(n: int, N: int = 128, count: int = 500, symmetric: bool = True, seed: int = 0) -> tuple:
    """Deterministic suite of K^2_+ bodies of revolution.

    Symmetric suites mix smooth even bodies with nearly degenerate
    segments and caps, which are the extreme cases for curvature bounds.
    """
    kinds = (SMOOTH_SYMMETRIC, NEAR_SEGMENT, NEAR_CAP) if symmetric else \
        (SMOOTH_SYMMETRIC, SMOOTH_GENERAL, NEAR_SEGMENT, NEAR_CAP)
    return tuple(sample_body(seed + i, kinds[i % len(kinds)], n, N) for i in range(count))


def suite_margins(phi: Endomorphism, suite) -> np.ndarray:
    """Curvature margins of Phi(K), scaled by ||h_K||, over the suite."""
    return np.array([apply(phi, K).margin / K.h.sup_norm() for K in suite])


def first_area_positivity(mu: ZonalMeasure, suite) -> float:
    """min over the suite of int s_1(K) dmu."""
    return min(mu.pair(area_density(K, 1)) for K in suite)


# ---------------------------------------------------------------------------
# Constructions


def rounding_bump(n: int, C: float, alpha: float, N: int = DEFAULT_BAND) -> ZonalFunction:
    """Even bump C (1-s^2)^4, s = (1-|t|)/(1-cos alpha), supported in the caps around +-e."""
    width = 1.0 - math.cos(alpha)

    def fn(t):
        s = (1.0 - np.abs(np.asarray(t, dtype=float))) / width
        return C * np.where(s < 1, np.clip(1 - s * s, 0, None) ** SMOOTHNESS_ORDER, 0.0)

    return ZonalFunction.from_callable(n, fn, N, _merge_breaks((-1 + width, 1 - width)))


def _resolution_error(g: ZonalFunction, C: float) -> float:
    t = np.linspace(-1, 1, 4001)
    return float(np.max(np.abs(g.spectral(t) - g(t)))) / C


def minimal_resolvable_alpha(n: int, N: int, tol: float = 1e-3) -> float:
    """Smallest alpha on a geometric scan whose bump is represented to ``tol`` at band limit N."""
    alpha = 1.5
    last_ok = None
    while alpha > 1e-3:
        if _resolution_error(rounding_bump(n, 1.0, alpha, N), 1.0) <= tol:
            last_ok = alpha
        elif last_ok is not None:
            break
        alpha *= 0.9
    return last_ok if last_ok is not None else float("inf")


@dataclass(frozen=True)
class RoundingEndomorphism:
    phi: Endomorphism
    bump: ZonalFunction
    C: float
    alpha: float
    curvature_constant: float  # sup over the suite of max radius of Phi K / ||h_K||


def curvature_constant(phi: Endomorphism, suite) -> float:
    best = 0.0
    for K in suite:
        _, r_m, r_p = radii_on_grid(apply(phi, K).h)
        best = max(best, float(max(r_m.max(), r_p.max())) / K.h.sup_norm())
    return best


def rounding_construct(n: int, C: float, alpha: float, N: int = DEFAULT_BAND, suite=None,
                       tol: float = 1e-3) -> RoundingEndomorphism:
    """Endomorphism generated by a nonnegative even bump with g(e) = C in the caps of radius alpha."""
    if C <= 0 or not 0 < alpha < math.pi / 2:
        raise ValueError("need C > 0 and 0 < alpha < pi/2")
    g = rounding_bump(n, C, alpha, N)
    if _resolution_error(g, C) > tol:
        amin = minimal_resolvable_alpha(n, N, tol)
        raise ValueError(f"bump with alpha={alpha:.4g} is not resolved at N={N}; minimal resolvable alpha ~ {amin:.4g}")
    # the exact profile keeps the generating function visibly nonnegative
    phi = Endomorphism.from_function(g)
    if suite is None:
        suite = validation_suite(n, N, 60)
    return RoundingEndomorphism(phi, g, C, alpha, curvature_constant(phi, suite))


def ball_radius_lower_bound(n: int) -> float:
    """2 omega_{n-1}/(n-1): the ratio int h / ||h||_inf for a symmetric segment."""
    return 2 * omega(n - 1) / (n - 1)


@dataclass
class NonmonotoneReport:
    n: int
    N: int
    C: float
    alpha: float
    curvature_constant: float
    threshold: float
    min_generating: float
    decision: MonotonicityDecision
    worst_margin: float
    worst_margin_refined: float
    min_first_area: float
    phi: Endomorphism = field(repr=False)
    witness: "MonotonicityWitness | None" = None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "N": self.N, "C": self.C, "alpha": self.alpha,
            "curvature_constant": self.curvature_constant, "threshold": self.threshold,
            "min_generating": self.min_generating,
            "weakly_monotone": self.decision.weakly_monotone,
            "monotonicity_witness_latitudes": None if self.decision.witness is None else list(self.decision.witness),
            "worst_margin": self.worst_margin, "worst_margin_refined": self.worst_margin_refined,
            "min_first_area": self.min_first_area,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def nonmonotone_construct(n: int = 3, N: int = 128, C: float = 2.0, suite_size: int = 500,
                          scan_suite: int = 60, safety: float = 0.9, seed: int = 0,
                          find_witness: bool = True) -> NonmonotoneReport:
    """Endomorphism with generating function 1 - g that is not weakly monotone.

    alpha is decreased geometrically until the rounding constant of g is
    below ``safety`` times the radius bound of the mean-width map; then the
    image margins are validated on a symmetric suite at N and 2N.
    """
    if n < 3:
        raise ValueError("the construction needs n >= 3")
    threshold = ball_radius_lower_bound(n)
    scan = validation_suite(n, N, scan_suite, True, seed)
    alpha = 1.2
    amin = minimal_resolvable_alpha(n, N)
    rounding = None
    while alpha >= amin:
        rounding = rounding_construct(n, C, alpha, N, scan)
        if rounding.curvature_constant < safety * threshold:
            break
        alpha *= 0.85
        rounding = None
    if rounding is None:
        raise ValueError(f"no admissible alpha at band limit N={N}")
    g = rounding.bump.spectral_part()
    gen = ZonalFunction.constant(n, 1.0, N) - g
    phi = Endomorphism.from_function(gen)
    suite = validation_suite(n, N, suite_size, True, seed)
    worst = float(suite_margins(phi, suite).min())
    g2 = rounding_bump(n, C, rounding.alpha, 2 * N).spectral_part()
    phi2 = Endomorphism.from_function(ZonalFunction.constant(n, 1.0, 2 * N) - g2)
    worst2 = float(suite_margins(phi2, [K.with_band(2 * N) for K in suite]).min())
    report = NonmonotoneReport(
        n, N, C, rounding.alpha, rounding.curvature_constant, threshold,
        Endomorphism.from_function(ZonalFunction.constant(n, 1.0, N) - rounding.bump).generating_min(),
        is_weakly_monotone(phi), worst, worst2, first_area_positivity(phi.mu, suite[:100]), phi)
    if find_witness:
        report.witness = monotonicity_witness(phi, seed=seed,
                                              refine=lambda M: Endomorphism.from_function(
                                                  ZonalFunction.constant(n, 1.0, M)
                                                  - rounding_bump(n, C, rounding.alpha, M).spectral_part()))
    return report


# ---------------------------------------------------------------------------
# Monotonicity witnesses


@dataclass(frozen=True)
class MonotonicityWitness:
    K: BodyRev
    L: BodyRev
    latitude: float  # u = latitude * e + ...; the violation h_{Phi K}(u) > h_{Phi L}(u)
    gap: float
    gap_refined: float | None

    def to_dict(self) -> dict:
        return {"latitude": self.latitude, "gap": self.gap, "gap_refined": self.gap_refined,
                "K_coefficients": [float(c) for c in self.K.h.coefficients],
                "L_coefficients": [float(c) for c in self.L.h.coefficients]}


def _power_support(n: int, p: int, N: int) -> ZonalFunction:
    return ZonalFunction.from_callable(n, lambda t: t ** (2 * p), N, exact=False)


def _inclusion_gap(phi: Endomorphism, K: BodyRev, L: BodyRev, grid: int = 2001):
    t = np.unique(np.concatenate([np.linspace(-1, 1, grid), K.h.nodes]))
    d = apply(phi, K).h(t) - apply(phi, L).h(t)
    i = int(np.argmax(d))
    return float(t[i]), float(d[i])


def _is_witness_pair(K: BodyRev, L: BodyRev, tol: float = 1e-12) -> bool:
    t = np.unique(np.concatenate([np.linspace(-1, 1, 2001), K.h.nodes]))
    contained = bool(np.all(K.h(t) <= L.h(t) + tol))
    centered = abs(steiner_point(K)) < 1e-12 and abs(steiner_point(L)) < 1e-12
    return contained and centered and L.margin > 0


def monotonicity_witness(phi: Endomorphism, trials: int = 200, seed: int = 0, threshold: float = 1e-8,
                         refine=None, factor: int = 4) -> MonotonicityWitness | None:
    """Search K in L, both origin symmetric, with h_{Phi K}(u) > h_{Phi L}(u) + threshold.

    Candidates are L = K + delta t^{2p}: the added term is even and
    nonnegative, so L contains K and both have Steiner point 0.  The
    violation is -delta (mu * t^{2p}), which is positive wherever that
    convolution is negative; large p concentrates t^{2p} at the poles,
    where a non-monotone generating function is negative.  ``refine``
    rebuilds Phi at a higher band limit for the persistence check.
    """
    n, N = phi.n, phi.N
    rng = np.random.default_rng(seed)
    bases = [BodyRev.ball(n, 1.0, N)] + [sample_body(seed + 7919 * i, SMOOTH_SYMMETRIC, n, N)
                                         for i in range(4)]
    for trial in range(trials):
        K = bases[trial % len(bases)]
        p = int(rng.integers(1, max(2, N // 4)))
        bump = _power_support(n, p, N)
        _, bm, bp = radii_on_grid(K.h)
        _, pm, pp = radii_on_grid(bump)
        r0, r1 = np.concatenate([bm, bp]), np.concatenate([pm, pp])
        neg = r1 < 0
        dmax = float(np.min(r0[neg] / -r1[neg])) if neg.any() else 1.0
        delta = float(rng.uniform(0.2, 0.8)) * min(dmax, 1.0)
        L = BodyRev(K.h + bump * delta, check=False)
        if not _is_witness_pair(K, L):
            continue
        lat, gap = _inclusion_gap(phi, K, L)
        if gap <= threshold:
            continue
        gap_ref = None
        if refine is not None:
            M = factor * N
            phi_r = refine(M)
            K_r, L_r = K.with_band(M), BodyRev(K.h.with_band(M) + _power_support(n, p, M) * delta, check=False)
            _, gap_ref = _inclusion_gap(phi_r, K_r, L_r)
            if gap_ref <= threshold:
                continue
        return MonotonicityWitness(K, L, lat, gap, gap_ref)
    return None


# ---------------------------------------------------------------------------
# Lipschitz estimates


@dataclass(frozen=True)
class LipschitzReport:
    estimate: float
    tv_bound: float
    mean_width_image: float
    mean_width_image_raw: float

    @property
    def constant_lower_bound(self) -> float:
        """estimate / w(Phi B^n): an empirical lower bound for the dimensional constant."""
        return self.estimate / self.mean_width_image

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "tv_bound": self.tv_bound,
                "mean_width_image": self.mean_width_image,
                "mean_width_image_raw": self.mean_width_image_raw,
                "constant_lower_bound": self.constant_lower_bound}


def lipschitz_estimate(phi: Endomorphism, trials: int = 100, seed: int = 0, N: int | None = None) -> LipschitzReport:
    """sup ||h_{Phi K} - h_{Phi L}|| / ||h_K - h_L|| over sampled pairs, with the TV bound."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = phi.n
    N = N or min(phi.N, 64)
    kinds = (SMOOTH_SYMMETRIC, SMOOTH_GENERAL, NEAR_SEGMENT, NEAR_CAP)
    best = 0.0
    t = np.linspace(-1, 1, 1001)
    for i in range(trials):
        K = sample_body(seed + 2 * i, kinds[i % 4], n, N)
        L = sample_body(seed + 2 * i + 1, kinds[(i + 1) % 4], n, N)
        diff = K.h - L.h
        den = float(np.max(np.abs(diff(t))))
        if den == 0:
            continue
        num = float(np.max(np.abs(convolve(phi.mu, diff)(t))))
        best = max(best, num / den)
    ball = BodyRev.ball(n, 1.0, phi.N)
    image = apply(phi, ball).h.integrate()
    return LipschitzReport(best, total_variation(phi.mu), 2 * image / omega(n), image)


def random_endomorphism(n: int, seed: int, N: int = 64, weakly_monotone: bool = True) -> Endomorphism:
    """Random generating measure: a positive constant plus nonnegative bumps and rings, projected.

    With ``weakly_monotone=False`` a small random multiple of the degree-2
    basis function is added.  That map need not be weakly monotone, and it
    is not checked to send every body to a convex body.
    """
    rng = np.random.default_rng(seed)
    dens = ZonalFunction.constant(n, float(rng.uniform(0.1, 1.0)), N)
    for _ in range(int(rng.integers(1, 4))):
        c, w = float(rng.uniform(-0.9, 0.9)), float(rng.uniform(0.1, 0.5))
        dens = dens + bump_function(n, c, w, N).spectral_part() * float(rng.uniform(0.1, 2.0))
    atoms = tuple((float(rng.uniform(-1, 1)), float(rng.uniform(0, 1))) for _ in range(int(rng.integers(0, 3))))
    mu = ZonalMeasure(dens, atoms)
    if not weakly_monotone:
        mu = mu + ZonalMeasure(ZonalFunction.basis(n, 2, N) * float(rng.normal(0, 0.05)))
    return Endomorphism.from_measure(mu)
