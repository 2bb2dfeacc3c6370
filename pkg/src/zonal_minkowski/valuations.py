"""Homogeneous Minkowski valuations S_j(K, .) * f, the derivation operator,
and the triple-convolution experiment on non-decomposability."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import BodyRev, area_density, double_cone_support, heat_smoothed, is_support_function
from .cones import bump_function, max_psi_ratio
from .endomorphisms import Endomorphism, rounding_bump
from .harmonic import IllPosedError, berg_multipliers, box_n, convolve, cosine_transform, \
    density_from_multipliers, inverse_cosine_even, multipliers
from .sphere import DEFAULT_BAND
from .zonal import ZonalFunction, ZonalMeasure

RICHARDSON_STEPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class HomValuation:
    """j-homogeneous valuation K -> S_j(K, .) * f."""

    j: int
    f: ZonalMeasure

    def __post_init__(self):
        if not 1 <= self.j <= self.f.n - 1:
            raise ValueError(f"degree j={self.j} outside 1..{self.f.n - 1}")

    @property
    def n(self) -> int:
        return self.f.n

    @classmethod
    def from_endomorphism(cls, phi: Endomorphism) -> "HomValuation":
        """The j = 1 representation of phi: f = mu * g_n, so S_1(K) * f = h_K * mu."""
        mu = phi.mu
        m = multipliers(mu, mu.N) * berg_multipliers(mu.n, mu.N)
        return cls(1, ZonalMeasure(density_from_multipliers(mu.n, m)))

    def __add__(self, other: "HomValuation") -> "HomValuation":
        if other.j != self.j:
            raise ValueError("can only add valuations of equal degree")
        return HomValuation(self.j, self.f + other.f)

    def scaled(self, s: float) -> "HomValuation":
        return HomValuation(self.j, self.f * s)


@dataclass(frozen=True)
class ValuationImage:
    h: ZonalFunction
    margin: float

    @property
    def is_support_function(self) -> bool:
        return self.margin >= -1e-9


def _image(h: ZonalFunction) -> ValuationImage:
    return ValuationImage(h, is_support_function(h).margin)


def apply_valuation(V: HomValuation, K: BodyRev, check: bool = True) -> ValuationImage:
    """S_j(K, .) * f with the curvature margin of the result (which may be negative)."""
    if V.n != K.n:
        raise ValueError("dimension mismatch")
    s = area_density(K, V.j, check)
    return _image(convolve(V.f, s.spectral_part()))


def _central_difference(F, order: int, step: float) -> ZonalFunction:
    """order-th central difference of t -> F(t) at 0, divided by step^order."""
    total = None
    for i in range(order + 1):
        w = (-1) ** i * math.comb(order, i)
        val = F((order / 2 - i) * step) * w
        total = val if total is None else total + val
    return total / step ** order


def derivation_lambda(V: HomValuation, K: BodyRev, steps=RICHARDSON_STEPS, order: int = 1) -> ZonalFunction:
    """d^order/dt^order of h_{V(K + tB)} at t = 0.

    Central differences at each step, followed by Richardson extrapolation
    in step^2 over successive halvings.
    """
    steps = tuple(float(s) for s in steps)
    if any(s <= 1e-8 for s in steps):
        raise ValueError("finite-difference step underflow")

    def F(t):
        return apply_valuation(V, K.dilated(t) if t else K, check=False).h

    table = [_central_difference(F, order, s) for s in steps]
    for level in range(1, len(table)):
        nxt = []
        for a, b, ha, hb in zip(table[:-1], table[1:], steps[:-level], steps[level:]):
            r = (ha / hb) ** 2
            nxt.append((b * r - a) / (r - 1))
        table = nxt
    return table[0]


def lambda_power_spectral(V: HomValuation, K: BodyRev) -> ZonalFunction:
    """j! h_K * box_n f: the closed form of the (j-1)-th derivation at t = 0.

    S_j(K + tB) = sum_i C(j, i) t^{j-i} S_i(K), so the (j-1)-th derivative
    keeps j! S_1(K) = j! box_n h_K.
    """
    return convolve(V.f, box_n(K.h)) * math.factorial(V.j)


# ---------------------------------------------------------------------------
# Triple convolution


@dataclass(frozen=True)
class PsiZonal:
    h: ZonalFunction | None
    margin: float
    inconclusive: bool = False

    @property
    def is_support_function(self) -> bool:
        return not self.inconclusive and self.margin >= -1e-9


def psi_zonal(K: BodyRev, L: BodyRev, klain: ZonalFunction, tail_tol: float = 1e-6) -> PsiZonal:
    """C^{-1}(h_K * h_L * klain), the 1-homogeneous part of the rotation-averaged valuation."""
    N = min(K.N, L.N, klain.N)
    triple = convolve(ZonalMeasure(K.h.with_band(N)), convolve(ZonalMeasure(L.h.with_band(N)),
                                                               klain.spectral_part().with_band(N)))
    try:
        h = inverse_cosine_even(triple.even(), tail_tol=tail_tol)
    except IllPosedError:
        return PsiZonal(None, float("nan"), True)
    return PsiZonal(h, is_support_function(h).margin)


def klain_bump(n: int, eps: float, N: int = DEFAULT_BAND) -> ZonalFunction:
    """Even nonnegative bump pair at |t| >= 1 - eps with total mass 1."""
    alpha = math.acos(1.0 - eps)
    g = rounding_bump(n, 1.0, alpha, N)
    return g / g.integrate()


def smoothed_double_cone(n: int, N: int = DEFAULT_BAND, tau: float | None = None, ball: float = 0.02) -> BodyRev:
    """Heat-smoothed double cone plus a small ball (origin symmetric, in K^2_+).

    The default heat time damps degree N by about e^{-20}, so truncating the
    expansion at N does not spoil convexity.
    """
    tau = 20.0 / (N * N) if tau is None else tau
    h = heat_smoothed(double_cone_support(n, N), tau) + ball
    return BodyRev(h)


def weil_violating_body(n: int, N: int = DEFAULT_BAND, eps: float = 0.08, safety: float = 1.02,
                        scan: int = 2000):
    """A generalized zonoid L whose generating function fails to generate an endomorphism.

    rho_L = lam - h_eps (band-limited bump pair at +-1/sqrt 2).  Weil's
    functionals are linear, so rho_L passes them exactly when lam exceeds
    sup Psi(h_eps)/Psi(1); lam is set just above that sup over a fine alpha
    scan.  The double cone pairs h_eps with a large ring mass, so rho_L
    still pairs negatively with S_1 of the double cone.  The heat-smoothed
    cone of ``smoothed_double_cone`` keeps that sign from N = 256 on; at
    lower band limits the smoothing is wider than the bump.
    Returns (L, rho_L).
    """
    bump = bump_function(n, 1 / math.sqrt(2), eps, N, even=True).spectral_part()
    lam = safety * max_psi_ratio(bump, np.linspace(0.5 / scan, 1 - 0.5 / scan, scan))
    rho = ZonalFunction.constant(n, lam, N) - bump
    h = cosine_transform(ZonalMeasure(rho))
    check = is_support_function(h, strict=True)
    if not check.ok:
        raise RuntimeError(f"C rho_L is not strictly convex (margin {check.margin:.3g})")
    return BodyRev(h, check=False), rho


@dataclass
class DecompositionReport:
    n: int
    N: int
    rows: list = field(default_factory=list)
    ball_rows: list = field(default_factory=list)

    @property
    def witnesses(self) -> list:
        return [r for r in self.rows if r["witness"]]

    @property
    def threshold(self) -> float | None:
        """Largest eps in the grid that produced a witness."""
        w = [r["eps"] for r in self.witnesses]
        return max(w) if w else None

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "rows": self.rows, "ball_rows": self.ball_rows,
                "threshold": self.threshold}


def decomposition_experiment(n: int = 3, N: int = DEFAULT_BAND, eps_grid=(0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005),
                             witness_tol: float = 1e-6, K: BodyRev | None = None,
                             L: BodyRev | None = None) -> DecompositionReport:
    """Search for a negative margin of C^{-1}(h_K * h_L * g_eps) as g_eps concentrates at +-e.

    A witness needs margin < -witness_tol at band limit N and at 2N.  The
    same sweep is repeated with L replaced by the unit ball as a control.
    """
    if n < 3:
        raise ValueError("the experiment needs n >= 3")
    K = K or smoothed_double_cone(n, N)
    if L is None:
        L, _ = weil_violating_body(n, N)
    report = DecompositionReport(n, N)
    ball = BodyRev.ball(n, 1.0, N)
    for eps in eps_grid:
        g = klain_bump(n, eps, N).spectral_part()
        res = psi_zonal(K, L, g)
        row = {"eps": eps, "margin": res.margin, "inconclusive": res.inconclusive,
               "margin_refined": None, "witness": False}
        if not res.inconclusive and res.margin < -witness_tol:
            K2, L2 = K.with_band(2 * N), L.with_band(2 * N)
            g2 = klain_bump(n, eps, 2 * N).spectral_part()
            ref = psi_zonal(K2, L2, g2)
            row["margin_refined"] = ref.margin
            row["witness"] = bool(not ref.inconclusive and ref.margin < -witness_tol)
        report.rows.append(row)
        ctrl = psi_zonal(K, ball, g)
        report.ball_rows.append({"eps": eps, "margin": ctrl.margin, "inconclusive": ctrl.inconclusive,
                                 "witness": bool(not ctrl.inconclusive and ctrl.margin < -witness_tol)})
    return report
