"""Cone characterizations: Firey's area-density criterion, the cap bound,
Weil's generating-function criterion, the tau/sigma generators and
discretized cone membership with verified certificates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .bodies import DOUBLE_CONE_LATITUDE, BodyRev, area_density, double_cone_S1
from .sphere import DEFAULT_BAND, jacobi_segment, omega, upper_weight_integral, weight_exponent
from .zonal import ZonalFunction, ZonalMeasure, _merge_breaks, project_o, total_variation, weighted_integral

FIREY_GRID = 512
SMOOTHNESS_ORDER = 4


# ---------------------------------------------------------------------------
# Bumps


def bump_profile(center: float, width: float, order: int = SMOOTHNESS_ORDER):
    """(1 - ((t-center)/width)^2)^order on |t-center| < width, zero elsewhere."""
    def fn(t):
        t = np.asarray(t, dtype=float)
        s = (t - center) / width
        return np.where(np.abs(s) < 1, np.clip(1 - s * s, 0, None) ** order, 0.0)
    return fn


def bump_function(n: int, center: float, width: float, N: int = DEFAULT_BAND,
                  even: bool = False, order: int = SMOOTHNESS_ORDER) -> ZonalFunction:
    """Polynomial bump of height 1 at ``center``; mirrored to -center when ``even``."""
    one = bump_profile(center, width, order)
    if even:
        two = bump_profile(-center, width, order)
        fn = (lambda t: one(t) + two(t)) if center != 0 else one
        breaks = (center - width, center, center + width, -center - width, -center, -center + width)
    else:
        fn = one
        breaks = (center - width, center, center + width)
    return ZonalFunction.from_callable(n, fn, N, _merge_breaks(breaks))


# ---------------------------------------------------------------------------
# Firey's criterion


@dataclass(frozen=True)
class FireyReport:
    condition_i: bool
    condition_ii: bool
    condition_iii: bool
    margins: tuple[float, float, float]

    @property
    def accepted(self) -> bool:
        return self.condition_i and self.condition_ii and self.condition_iii

    def __bool__(self):
        return self.accepted


def chebyshev_grid(size: int = FIREY_GRID) -> np.ndarray:
    return np.sort(np.cos(np.pi * (np.arange(size) + 0.5) / size))


def _interval_integrals(n: int, fn, edges: np.ndarray, m: int = 16) -> np.ndarray:
    """``int fn(t) (1-t^2)^a dt`` over consecutive edges; one-sided rules at +-1."""
    a = weight_exponent(n)
    lo, hi = edges[:-1], edges[1:]
    y, wy = np.polynomial.legendre.leggauss(m)
    half = (hi - lo) / 2
    t = lo[:, None] + half[:, None] * (1 + y[None, :])
    w = half[:, None] * wy[None, :] * (1 - t * t) ** a
    out = np.sum(w * fn(t.ravel()).reshape(t.shape), axis=1)
    for i in (0, len(lo) - 1):
        if lo[i] == -1.0 or hi[i] == 1.0:
            x, wx = jacobi_segment(a, lo[i], hi[i], m)
            out[i] = float(np.dot(wx, fn(x)))
    return out


def firey_functional(s: ZonalFunction, t: np.ndarray, m: int = 16) -> tuple[np.ndarray, float, float]:
    """F(t) = int_t^1 x s(x) (1-x^2)^{(n-3)/2} dx at sorted interior points t.

    Returns (F, F(-1), int |x s(x)| w).  F is accumulated from +1 for
    t >= 0 and from -1 for t < 0 so neither end suffers cancellation; the
    latter uses F(-1) = 0, which is checked separately.
    """
    n = s.n
    edges = np.unique(np.concatenate([[-1.0], t, [b for b in s.breaks if -1 < b < 1], [1.0]]))
    parts = _interval_integrals(n, lambda x: x * s(x), edges, m)
    absparts = _interval_integrals(n, lambda x: np.abs(x * s(x)), edges, m)
    upper = np.concatenate([np.cumsum(parts[::-1])[::-1], [0.0]])
    lower = np.concatenate([[0.0], np.cumsum(parts)])
    total = float(upper[0])
    idx = np.searchsorted(edges, t)
    F = np.where(t >= 0, upper[idx], -lower[idx])
    return F, total, float(absparts.sum())


def firey_check(s: ZonalFunction, j: int, grid: int = FIREY_GRID, tail_tol: float = 1e-6,
                endpoint_tol: float = 1e-9) -> FireyReport:
    """Test Firey's three conditions for s to be the density of S_j of a body of revolution.

    Margins are normalized by (1-t^2)^{(n-1)/2} so they stay O(1) at the
    poles: margin_ii = min F(t)/(1-t^2)^{(n-1)/2} and margin_iii =
    min s(t) - (n-1-j) F(t)/(1-t^2)^{(n-1)/2}.
    """
    n = s.n
    if not 1 <= j <= n - 1:
        raise ValueError(f"order j={j} outside 1..{n - 1}")
    # (i) finite limits at the poles, certified by decay of the expansion
    # (profiles are evaluated directly; pure expansions must show decay)
    ends = s(np.array([-1.0, 1.0]))
    tail = 0.0
    if s.band_limited:
        energy = s.coefficients ** 2
        if energy.sum() > 0:
            tail = float(energy[3 * s.N // 4 + 1:].sum() / energy.sum())
    margin_i = tail_tol - tail if np.all(np.isfinite(ends)) else -np.inf
    t = chebyshev_grid(grid)
    F, total, scale = firey_functional(s, t)
    rad = (1 - t * t) ** ((n - 1) / 2)
    Fn = F / rad
    margin_ii = float(np.min(Fn))
    endpoint_ok = abs(total) <= endpoint_tol * max(1.0, scale)
    margin_iii = float(np.min(s(t) - (n - 1 - j) * Fn))
    return FireyReport(margin_i >= 0, margin_ii > 0 and endpoint_ok, margin_iii > 0,
                       (float(margin_i), margin_ii, margin_iii))


@dataclass(frozen=True)
class CapBound:
    lhs: float
    rhs_shape: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_shape


def firey_cap_bound(K: BodyRev, j: int, alpha: float, m: int | None = None) -> CapBound:
    """S_j(K, C_alpha) against sin^{n-1-j}(alpha)/cos(alpha) ||h_K||^j."""
    if not 0 < alpha < math.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2)")
    n = K.n
    s = area_density(K, j)
    m = m or s.N + 48
    lhs = omega(n - 1) * weighted_integral(n, s, (), m, math.cos(alpha), 1.0)
    rhs = math.sin(alpha) ** (n - 1 - j) / math.cos(alpha) * K.h.sup_norm() ** j
    return CapBound(lhs, rhs)


# ---------------------------------------------------------------------------
# Weil's criterion for generating functions


def _weil_rule(n: int, rho: ZonalFunction, alpha: float, m: int):
    """Nodes s in (-1, 1) and weights for ``int g(s) (1-s^2)^{(n-4)/2} ds``,
    split where rho(alpha s) has a kink."""
    a = (n - 4) / 2
    cuts = sorted({b / alpha for b in rho.breaks if -alpha < b < alpha})
    edges = [-1.0, *cuts, 1.0]
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        x, w = jacobi_segment(a, lo, hi, m)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def weil_components(rho: ZonalFunction, alpha: float, m: int | None = None) -> tuple[float, float]:
    """A = int rho(a s) s^2 (1-s^2)^{(n-4)/2} ds and B = int rho(a s) (1-s^2)^{(n-2)/2} ds."""
    n = rho.n
    if n < 3:
        raise ValueError("Weil's criterion needs n >= 3")
    m = m or rho.N // 2 + 24
    s, w = _weil_rule(n, rho, alpha, m)
    r = rho(alpha * s) * w
    return float(np.dot(r, s * s)), float(np.dot(r, 1 - s * s))


def psi_from_components(n: int, A: float, B: float, alpha: float, beta, literal_constant: bool = False):
    beta2 = np.asarray(beta, dtype=float) ** 2
    if literal_constant:
        return alpha * (beta2 * A + omega(n - 1) / (n - 1) * (1 - beta2) * B)
    return omega(n - 2) * (beta2 * A + (1 - beta2) * B / (n - 2))


def weil_psi(rho: ZonalFunction, alpha: float, beta: float, literal_constant: bool = False,
             m: int | None = None) -> float:
    """The axial form of Weil's functional at (alpha, beta).

    By default this is the value of int (u.w')^2 rho(u) du over the great
    subsphere orthogonal to w, reduced to one variable:
    omega_{n-2} int rho(alpha s) (1-s^2)^{(n-4)/2} (s^2 beta^2 + (1-s^2)(1-beta^2)/(n-2)) ds.
    ``literal_constant=True`` uses the kernel with the constant omega_{n-1}/(n-1)
    on the second term, integrated in t = alpha s; it differs by a positive
    factor on each of the two terms, so both forms have the same sign pattern
    at beta in {0, 1}.
    """
    if not (0 < alpha < 1 and 0 <= beta <= 1):
        raise ValueError("need 0 < alpha < 1 and 0 <= beta <= 1")
    A, B = weil_components(rho, alpha, m)
    return float(psi_from_components(rho.n, A, B, alpha, beta, literal_constant))


def _orthonormal_complement(vectors: np.ndarray, dim: int) -> np.ndarray:
    q, _ = np.linalg.qr(np.concatenate([vectors.T, np.eye(dim)], axis=1))
    return q[:, vectors.shape[0]:dim].T


def weil_direct(rho: ZonalFunction, alpha: float, beta: float, m: int | None = None) -> float:
    """Direct quadrature of int_{S(w^perp)} (u.w')^2 rho(e.u) du for n in {3, 4}.

    w is the unit vector with e-component sqrt(1-alpha^2) and w' the unit
    vector in w^perp making angle arccos(beta) with the projection of e.
    """
    n = rho.n
    if n not in (3, 4):
        raise ValueError("direct oracle implemented for n = 3, 4")
    e = np.eye(n)
    w = math.sqrt(1 - alpha * alpha) * e[0] + alpha * e[1]
    pe = e[0] - np.dot(e[0], w) * w
    pe /= np.linalg.norm(pe)
    rest = _orthonormal_complement(np.stack([w, pe]), n)
    w2 = beta * pe + math.sqrt(1 - beta * beta) * rest[0]
    m = m or 2 * rho.N + 64
    theta = 2 * np.pi * np.arange(m) / m
    if n == 3:
        u = np.cos(theta)[:, None] * pe + np.sin(theta)[:, None] * rest[0]
        vals = (u @ w2) ** 2 * rho(u @ e[0])
        return float(vals.sum() * 2 * np.pi / m)
    x, wx = np.polynomial.legendre.leggauss(rho.N // 2 + 32)
    r = np.sqrt(1 - x * x)
    circ = np.cos(theta)[:, None] * rest[0] + np.sin(theta)[:, None] * rest[1]
    u = x[:, None, None] * pe + r[:, None, None] * circ[None, :, :]
    vals = (u @ w2) ** 2 * rho(u @ e[0])
    return float(np.sum(wx[:, None] * vals) * 2 * np.pi / m)


def alpha_beta_grid(size: int = 64) -> np.ndarray:
    """Points in (0, 1) clustered toward both endpoints (Chebyshev spacing)."""
    k = np.arange(size)
    return 0.5 * (1 - np.cos(np.pi * (k + 0.5) / size))


def psi_surface(rho: ZonalFunction, alphas=None, betas=None, literal_constant: bool = False) -> np.ndarray:
    """Psi_{alpha, beta}(rho) as an array indexed by (alpha, beta)."""
    alphas = alpha_beta_grid() if alphas is None else np.asarray(alphas, float)
    betas = alpha_beta_grid() if betas is None else np.asarray(betas, float)
    out = np.empty((alphas.size, betas.size))
    for i, a in enumerate(alphas):
        A, B = weil_components(rho, a)
        out[i] = psi_from_components(rho.n, A, B, a, betas, literal_constant)
    return out


@dataclass(frozen=True)
class WeilReport:
    accepted: bool
    min_margin: float
    argmin: tuple[float, float]

    def __bool__(self):
        return self.accepted


def is_generating_function(rho: ZonalFunction, alphas=None, betas=None, tol: float = 1e-9) -> WeilReport:
    if np.max(np.abs(rho.odd().coefficients)) > 1e-10 * max(1.0, float(np.max(np.abs(rho.coefficients)))):
        raise ValueError("Weil's criterion applies to even functions")
    alphas = alpha_beta_grid() if alphas is None else np.asarray(alphas, float)
    betas = alpha_beta_grid() if betas is None else np.asarray(betas, float)
    surf = psi_surface(rho, alphas, betas)
    i, k = np.unravel_index(int(np.argmin(surf)), surf.shape)
    low = float(surf[i, k])
    return WeilReport(low >= -tol, low, (float(alphas[i]), float(betas[k])))


# ---------------------------------------------------------------------------
# tau / sigma generators


def tau_alpha(n: int, alpha: float, N: int = DEFAULT_BAND) -> ZonalMeasure:
    """Zonal measure whose associated 1-D measure is t (1-t^2)^{(n-3)/2} dt on (alpha, 1)."""
    if not -1 < alpha < 1:
        raise ValueError("alpha must lie in (-1, 1)")
    w1 = omega(n - 1)
    dens = ZonalFunction.from_callable(n, lambda t: np.where(t > alpha, t, 0.0) / w1, N, (alpha,))
    return ZonalMeasure(dens)


def sigma_beta(n: int, beta: float, N: int = DEFAULT_BAND) -> ZonalMeasure:
    """Ring of mass (1-beta^2)^{(n-1)/2} at t = beta minus (n-2) tau_beta."""
    if not -1 < beta < 1:
        raise ValueError("beta must lie in (-1, 1)")
    ring = ZonalMeasure.point_mass(n, N, beta, (1 - beta * beta) ** ((n - 1) / 2))
    return ring - tau_alpha(n, beta, N) * (n - 2)


def tau_alpha_o(n: int, alpha: float, N: int = DEFAULT_BAND) -> ZonalMeasure:
    return project_o(tau_alpha(n, alpha, N))


def sigma_beta_o(n: int, beta: float, N: int = DEFAULT_BAND) -> ZonalMeasure:
    return project_o(sigma_beta(n, beta, N))


def tv_ratio(mu: ZonalMeasure) -> float:
    mass = mu.mass()
    if not mass > 0:
        raise ValueError(f"tv_ratio needs positive total mass, got {mass}")
    return total_variation(mu) / mass


def _upper_linear(n: int, x):
    """int_x^1 t (1-t^2)^{(n-3)/2} dt."""
    return (1 - np.asarray(x, float) ** 2) ** ((n - 1) / 2) / (n - 1)


def _upper_quadratic(n: int, x):
    """int_x^1 t^2 (1-t^2)^{(n-3)/2} dt."""
    x = np.asarray(x, float)
    return (x * (1 - x * x) ** ((n - 1) / 2) + upper_weight_integral(n, x)) / n


def _abs_linear(n: int, lo, hi):
    """int_lo^hi |t| (1-t^2)^{(n-3)/2} dt for lo <= hi."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    J = lambda x: _upper_linear(n, x)
    pos = J(np.maximum(lo, 0)) - J(np.maximum(hi, 0))
    neg = J(np.abs(np.minimum(hi, 0))) - J(np.abs(np.minimum(lo, 0)))
    return pos + neg


def combination_tv_ratio(n: int, alphas, a, betas, b, centered: bool = True) -> float:
    """Exact TV/mass of sum a_i tau_{alpha_i} + sum b_k sigma_{beta_k} (optionally centered).

    The absolutely continuous part has associated 1-D density
    (S(t) - c) t (1-t^2)^{(n-3)/2} with S a step function, so every
    integral reduces to the closed-form antiderivatives above.
    """
    alphas, a = np.atleast_1d(np.asarray(alphas, float)), np.atleast_1d(np.asarray(a, float))
    betas, b = np.atleast_1d(np.asarray(betas, float)), np.atleast_1d(np.asarray(b, float))
    ring = b * (1 - betas ** 2) ** ((n - 1) / 2)
    locs = np.concatenate([alphas, betas])
    jumps = np.concatenate([a, -(n - 2) * b])
    mass = float(np.sum(ring) + np.sum(jumps * _upper_linear(n, locs)))
    if centered:
        first = float(np.sum(ring * betas) + np.sum(jumps * _upper_quadratic(n, locs)))
        # degree-1 density (n/omega_n) first * t, written as a constant shift of S
        shift = omega(n - 1) * n / omega(n) * first
    else:
        shift = 0.0
    order = np.argsort(locs)
    edges = np.concatenate([[-1.0], locs[order], [1.0]])
    S = np.concatenate([[0.0], np.cumsum(jumps[order])]) - shift
    tv = float(np.sum(np.abs(ring)) + np.sum(np.abs(S) * _abs_linear(n, edges[:-1], edges[1:])))
    if not mass > 0:
        raise ValueError("combination has nonpositive mass")
    return tv / mass


@dataclass(frozen=True)
class TVSupReport:
    sup: float
    sup_doubled: float
    samples: int

    @property
    def relative_change(self) -> float:
        return abs(self.sup_doubled - self.sup) / self.sup


def _random_combination(rng, max_terms: int):
    k_a = int(rng.integers(0, max_terms + 1))
    k_b = int(rng.integers(1 if k_a == 0 else 0, max_terms + 1))
    alphas = rng.uniform(-1, 1, k_a)
    betas = rng.uniform(-1, 1, k_b)
    return alphas, rng.exponential(size=k_a), betas, rng.exponential(size=k_b)


def tv_ratio_sup(n: int, samples: int = 10_000, seed: int = 0, max_terms: int = 3,
                 centered: bool = True) -> TVSupReport:
    """Monte Carlo sup of TV/mass over random conic combinations of the generators,
    at ``samples`` and at twice as many draws (the first half is shared)."""
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(2 * samples):
        al, a, be, b = _random_combination(rng, max_terms)
        try:
            vals.append(combination_tv_ratio(n, al, a, be, b, centered))
        except ValueError:
            continue
    vals = np.array(vals)
    half = vals[: len(vals) // 2]
    return TVSupReport(float(half.max()), float(vals.max()), samples)


# ---------------------------------------------------------------------------
# Double cone separator family


def h_eps(n: int, eps: float, N: int = DEFAULT_BAND) -> ZonalFunction:
    """Even bump pair of height 1 at t = +-1/sqrt 2 with support width 2 eps."""
    return bump_function(n, DOUBLE_CONE_LATITUDE, eps, N, even=True)


@dataclass(frozen=True)
class PsiFunctional:
    """The linear functional rho -> Psi_{alpha, beta}(rho) as a cone generator."""

    n: int
    alpha: float
    beta: float
    literal_constant: bool = False

    def pair(self, g: ZonalFunction) -> float:
        return weil_psi(g, self.alpha, self.beta, self.literal_constant)


class PsiFamily:
    """All Psi_{alpha, beta} on a product grid, paired in bulk.

    Pairing one test function costs one (A, B) quadrature per alpha; the
    beta dependence is then explicit.
    """

    def __init__(self, n: int, alphas, betas, literal_constant: bool = False):
        self.n = n
        self.alphas = np.asarray(alphas, float)
        self.betas = np.asarray(betas, float)
        self.literal_constant = literal_constant

    def __len__(self):
        return self.alphas.size * self.betas.size

    def members(self) -> list[PsiFunctional]:
        return [PsiFunctional(self.n, float(a), float(b), self.literal_constant)
                for a in self.alphas for b in self.betas]

    def pair_all(self, g: ZonalFunction) -> np.ndarray:
        return psi_surface(g, self.alphas, self.betas, self.literal_constant).ravel()


def psi_generators(n: int, size: int = 64, literal_constant: bool = False) -> PsiFamily:
    grid = alpha_beta_grid(size)
    return PsiFamily(n, grid, grid, literal_constant)


def max_psi_ratio(g: ZonalFunction, alphas) -> float:
    """max over alpha of max(A_g/A_1, B_g/B_1).

    Psi is a positive combination of A and B for every beta, so this bounds
    Psi(g)/Psi(1) uniformly in beta."""
    one = ZonalFunction.constant(g.n, 1.0, g.N)
    best = 0.0
    for a in alphas:
        Ag, Bg = weil_components(g, a)
        A1, B1 = weil_components(one, a)
        best = max(best, Ag / A1, Bg / B1)
    return best


# ---------------------------------------------------------------------------
# Cone membership


@dataclass
class ConeCertificate:
    status: str  # "member", "non-member" or "inconclusive"
    residual: float
    coefficients: np.ndarray | None = None
    separator: ZonalFunction | None = None
    separator_pairings: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> str:
        rec = {"status": self.status, "residual": float(self.residual), "note": self.note}
        if self.coefficients is not None:
            rec["coefficients"] = [float(c) for c in self.coefficients]
        if self.separator is not None:
            rec["separator_coefficients"] = [float(c) for c in self.separator.coefficients]
            rec["separator_pairings"] = {k: float(v) for k, v in self.separator_pairings.items()}
        return json.dumps(rec, sort_keys=True, indent=1)


def _pair(obj, g: ZonalFunction) -> float:
    return float(obj.pair(g))


def _pair_all(generators, g: ZonalFunction) -> np.ndarray:
    if hasattr(generators, "pair_all"):
        return generators.pair_all(g)
    return np.array([_pair(gen, g) for gen in generators])


def default_test_functions(n: int, N: int = 64, count: int = 200, even: bool = True,
                           seed: int = 0) -> list[ZonalFunction]:
    """Band-limited test functions: low-degree basis elements and random smooth mixes."""
    rng = np.random.default_rng(seed)
    degrees = np.arange(0, N + 1, 2 if even else 1)
    tests = [ZonalFunction.basis(n, int(k), N) for k in degrees[: count // 2]]
    while len(tests) < count:
        c = np.zeros(N + 1)
        c[degrees] = rng.normal(size=degrees.size) / (1 + degrees) ** 2
        tests.append(ZonalFunction(n, c))
    return tests[:count]


def verify_separator(phi: ZonalFunction, target, generators, tol: float = 1e-12) -> tuple[bool, dict]:
    """Direct check: phi pairs nonnegatively with every generator and negatively with target."""
    gen_vals = _pair_all(generators, phi)
    tgt = _pair(target, phi)
    scale = max(1.0, float(np.max(np.abs(gen_vals))), abs(tgt))
    ok = bool(np.all(gen_vals >= -tol * scale) and tgt < -tol * scale)
    return ok, {"target": tgt, "min_generator": float(gen_vals.min())}


def cone_membership(target, generators, tests=None, tol: float = 1e-6, separators=(),
                    fresh_tests=None) -> ConeCertificate:
    """Decide target in cone(generators) on a discretized pairing matrix.

    ``target`` and the generators are anything with a ``pair`` method (zonal
    measures or functionals); ``generators`` may also be a family exposing
    ``pair_all``.  A member certificate must re-pair within tolerance on
    fresh test functions.  A non-member certificate needs a test function
    verified nonnegative on every generator and negative on the target;
    the NNLS dual direction is always tried after the given ``separators``.
    Anything else is reported as inconclusive.
    """
    n = target.n
    if tests is None:
        tests = default_test_functions(n)
    G = np.array([_pair_all(generators, phi) for phi in tests])
    T = np.array([_pair(target, phi) for phi in tests])
    norms = np.linalg.norm(G, axis=0)
    norms[norms == 0] = 1.0
    try:
        coef_scaled, res = nnls(G / norms, T, maxiter=50 * G.shape[1])
    except RuntimeError as exc:
        return ConeCertificate("inconclusive", float("nan"), note=f"NNLS failed: {exc}")
    coef = coef_scaled / norms
    rel = float(res / max(np.linalg.norm(T), 1e-300))
    if rel <= tol:
        if fresh_tests is None:
            N = max(phi.N for phi in tests)
            even = all(np.all(phi.coefficients[1::2] == 0) for phi in tests)
            fresh_tests = default_test_functions(n, N, 20, even, seed=12345)
        fresh = fresh_tests
        err = 0.0
        for phi in fresh:
            got = float(np.dot(coef, _pair_all(generators, phi)))
            want = _pair(target, phi)
            err = max(err, abs(got - want) / max(1.0, abs(want)))
        if err <= max(tol, 1e-6):
            return ConeCertificate("member", rel, coefficients=coef, note=f"fresh re-pairing error {err:.3g}")
        return ConeCertificate("inconclusive", rel, coefficients=coef,
                               note=f"reconstruction failed on fresh tests ({err:.3g})")
    r = T - G @ coef
    dual = ZonalFunction(n, np.zeros(1))
    for ri, phi in zip(r, tests):
        dual = dual - phi * ri
    for phi in [*separators, dual]:
        ok, vals = verify_separator(phi, target, generators)
        if ok:
            return ConeCertificate("non-member", rel, separator=phi, separator_pairings=vals)
    return ConeCertificate("inconclusive", rel, note="no separator verified")


def double_cone_separator(n: int, eps: float, N: int = DEFAULT_BAND, scan: int = 4001,
                          safety: float = 1.1) -> ZonalFunction:
    """lam - h_eps with lam just above sup_alpha Psi(h_eps)/Psi(1).

    The sup is taken over a fine alpha scan and bounds the ratio for every
    beta, so the result pairs nonnegatively with every Psi functional.
    """
    h = h_eps(n, eps, N)
    lam = safety * max_psi_ratio(h, np.linspace(1e-3, 1 - 1e-3, scan))
    return ZonalFunction.constant(n, lam, N) - h


def double_cone_certificate(n: int = 3, eps: float = 1e-3, N: int = DEFAULT_BAND, grid: int = 64,
                            eps_family=(0.1, 0.03, 0.01, 0.003, 0.001)) -> ConeCertificate:
    """Non-membership of S_1(D) in the cone of Weil functionals."""
    target = double_cone_S1(n, N)
    tests = default_test_functions(n) + [h_eps(n, e, N) for e in eps_family]
    return cone_membership(target, psi_generators(n, grid), tests,
                           separators=[double_cone_separator(n, eps, N)])
