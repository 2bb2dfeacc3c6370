"""Command-line experiment runner.

Each subcommand writes a CSV table and a JSON summary (plus SVG plots with
--svg) into the output directory.  Exit codes: 0 success, 1 a checked
invariant failed, 2 usage or configuration error, 3 inconclusive numerics.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bodies import BODY_CLASSES, SMOOTH_SYMMETRIC, BodyRev, area_density, double_cone_S1, sample_body
from .cones import alpha_beta_grid, bump_function, double_cone_certificate, firey_cap_bound, firey_check, \
    h_eps, is_generating_function, psi_surface, tv_ratio_sup
from .endomorphisms import lipschitz_estimate, nonmonotone_construct, random_endomorphism
from .harmonic import berg_function, box_n_pointwise, convolve, inverse_cosine_even
from .sphere import kappa, omega
from .svg import heatmap_svg, line_svg
from .valuations import decomposition_experiment
from .zonal import ZonalFunction, sphere_integral

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

COMMANDS = ("integrals", "berg", "firey", "weil", "capbound", "nonmonotone", "lipschitz", "doublecone", "decompose")
DEFAULT_BAND_LIMITS = {"integrals": 256, "berg": 256, "firey": 128, "weil": 128, "capbound": 128,
                       "nonmonotone": 128, "lipschitz": 64, "doublecone": 256, "decompose": 256}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 3
    band_limit: int = 0  # 0 selects the per-command default
    seed: int = 0
    bodies: int = 50
    trials: int = 100
    grid_size: int = 64
    alpha_grid: tuple[float, ...] = tuple(float(a) for a in np.round(np.linspace(0.05, 1.5, 30), 12))
    eps_grid: tuple[float, ...] = (0.1, 0.03, 0.01, 0.003, 0.001)
    decompose_eps_grid: tuple[float, ...] = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005)
    tolerance: float = 1e-9
    witness_tolerance: float = 1e-6
    out: str = "results"

    def validate(self) -> "ExperimentConfig":
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.band_limit < 0 or self.bodies < 1 or self.trials < 1 or self.grid_size < 2:
            raise ConfigError("band_limit, bodies, trials and grid_size must be positive")
        if not (self.alpha_grid and self.eps_grid and self.decompose_eps_grid):
            raise ConfigError("grids must be nonempty")
        if self.tolerance <= 0 or self.witness_tolerance <= 0:
            raise ConfigError("tolerances must be positive")
        return self

    def band(self, command: str) -> int:
        return self.band_limit or DEFAULT_BAND_LIMITS[command]

    # text form: [experiment], [grids] and [tolerances] sections of key = value lines
    _SECTIONS = {"experiment": ("n", "band_limit", "seed", "bodies", "trials", "grid_size", "out"),
                 "grids": ("alpha_grid", "eps_grid", "decompose_eps_grid"),
                 "tolerances": ("tolerance", "witness_tolerance")}

    def to_text(self) -> str:
        lines = []
        for section, keys in self._SECTIONS.items():
            lines.append(f"[{section}]")
            for k in keys:
                v = getattr(self, k)
                if isinstance(v, tuple):
                    v = ", ".join(repr(float(x)) for x in v)
                elif isinstance(v, float):
                    v = repr(v)
                lines.append(f"{k} = {v}")
            lines.append("")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        known = {f.name: f for f in fields(cls)}
        values = {}
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in known:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                default = getattr(cls(), key)
                try:
                    if isinstance(default, tuple):
                        values[key] = tuple(float(x) for x in raw.split(",") if x.strip())
                    elif isinstance(default, bool):
                        values[key] = parser.getboolean(section, key)
                    else:
                        values[key] = type(default)(raw)
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**values).validate()

    def digest(self) -> str:
        """sha256 of the text form; the output directory does not enter the hash."""
        return hashlib.sha256(replace(self, out="").to_text().encode()).hexdigest()


# ---------------------------------------------------------------------------
# Deterministic writers


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return f"{x:.17g}" if math.isfinite(x) else "null"
    if x is None:
        return "null"
    return str(x)


def to_json(obj, indent: int = 0) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    pad, inner = " " * indent, " " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {to_json(v, indent + 1)}' for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return _fmt(obj)


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_summary(path: Path, cfg: ExperimentConfig, command: str, summary: dict) -> None:
    rec = {"command": command, "config_hash": cfg.digest(), "version": __version__, **summary}
    path.write_text(to_json(rec) + "\n")


# ---------------------------------------------------------------------------
# Subcommands; each returns (exit code, summary dict)


def cmd_integrals(cfg, out: Path, svg: bool):
    N = cfg.band("integrals")
    rows, worst = [], 0.0
    for n in range(2, 9):
        a = sphere_integral(ZonalFunction.from_callable(n, np.abs, N, (0.0,)))
        b = sphere_integral(ZonalFunction.from_callable(n, lambda t: t * t, N))
        ea, eb = 2 * omega(n - 1) / (n - 1), omega(n) / n
        err = max(abs(a - ea), abs(b - eb))
        worst = max(worst, err)
        rows.append((n, a, ea, b, eb, err))
    write_csv(out / "integrals.csv", ("n", "abs_integral", "abs_expected", "square_integral",
                                      "square_expected", "error"), rows)
    if svg:
        (out / "integrals.svg").write_text(line_svg({"abs": ([r[0] for r in rows], [r[1] for r in rows]),
                                                     "square": ([r[0] for r in rows], [r[3] for r in rows])},
                                                    "sphere integrals", "n", "value"))
    return (EXIT_OK if worst <= 1e-10 else EXIT_VIOLATION), {"max_error": worst}


def _random_band_limited(n: int, N: int, rng) -> ZonalFunction:
    c = np.zeros(N + 1)
    deg = min(N, 48)
    c[: deg + 1] = rng.normal(size=deg + 1) / (1 + np.arange(deg + 1)) ** 2
    c[1] = 0.0
    return ZonalFunction(n, c)


def cmd_berg(cfg, out: Path, svg: bool):
    rng = np.random.default_rng(cfg.seed)
    rows, worst = [], 0.0
    bands = [b for b in (32, 64, 128, 256, 512) if b <= max(cfg.band("berg"), 32)]
    for n in sorted({cfg.n, 3, 4, 5}):
        for N in bands:
            f = _random_band_limited(n, N, rng)
            t = np.linspace(-1, 1, 2001)
            boxed = ZonalFunction.from_callable(n, lambda x, f=f: box_n_pointwise(f, x), N)
            err = float(np.max(np.abs(convolve(berg_function(n, N), boxed)(t) - f(t))))
            worst = max(worst, err)
            rows.append((n, N, err))
    write_csv(out / "berg.csv", ("n", "N", "sup_error"), rows)
    if svg:
        series = {f"n={n}": ([r[1] for r in rows if r[0] == n], [max(r[2], 1e-17) for r in rows if r[0] == n])
                  for n in sorted({r[0] for r in rows})}
        (out / "berg.svg").write_text(line_svg(series, "Berg round trip", "N", "sup error", logy=True))
    return (EXIT_OK if worst <= 1e-6 else EXIT_VIOLATION), {"max_error": worst}


def corrupted_density(s: ZonalFunction, start: float = 0.1, center: float = 0.9, width: float = 0.05):
    """s minus a growing even bump pair until condition (iii) fails at j = 1.

    The pair is even, so the centering condition F(-1) = 0 is untouched and
    the rejection is due to (iii) alone.  Returns (density, amplitude).
    """
    bump = bump_function(s.n, center, width, s.N, even=True)
    amp = start
    while amp < 1e6:
        c = s - bump * amp
        if firey_check(c, 1).margins[2] < 0:
            return c, amp
        amp *= 2
    raise RuntimeError("could not corrupt density")


def cmd_firey(cfg, out: Path, svg: bool):
    n, N = cfg.n, cfg.band("firey")
    rows, ok = [], True
    for i in range(cfg.bodies):
        kind = BODY_CLASSES[i % len(BODY_CLASSES)]
        K = sample_body(cfg.seed + i, kind, n, N)
        for j in range(1, n):
            r = firey_check(area_density(K, j), j)
            ok &= r.accepted
            rows.append(("body", kind, cfg.seed + i, j, r.accepted, *r.margins))
        bad, _ = corrupted_density(area_density(K, 1))
        r = firey_check(bad, 1)
        ok &= (not r.accepted) and r.margins[2] < 0
        rows.append(("corrupted", kind, cfg.seed + i, 1, r.accepted, *r.margins))
    write_csv(out / "firey.csv", ("source", "class", "seed", "j", "accepted", "margin_i", "margin_ii",
                                  "margin_iii"), rows)
    acc = sum(1 for r in rows if r[0] == "body" and r[4])
    rej = sum(1 for r in rows if r[0] == "corrupted" and not r[4])
    return (EXIT_OK if ok else EXIT_VIOLATION), {"bodies_accepted": acc, "corrupted_rejected": rej,
                                                 "rows": len(rows)}


def cmd_weil(cfg, out: Path, svg: bool):
    n, N = cfg.n, cfg.band("weil")
    if n < 3:
        raise ConfigError("weil needs n >= 3")
    grid = alpha_beta_grid(cfg.grid_size)
    K = sample_body(cfg.seed, SMOOTH_SYMMETRIC, n, N)
    rho = inverse_cosine_even(K.h.even())
    surf = psi_surface(rho, grid, grid)
    rows = [(a, b, surf[i, k]) for i, a in enumerate(grid) for k, b in enumerate(grid)]
    write_csv(out / "weil_surface.csv", ("alpha", "beta", "psi"), rows)
    report = is_generating_function(rho, grid, grid, cfg.tolerance)
    if svg:
        (out / "weil_surface.svg").write_text(heatmap_svg(surf, grid, grid, "Psi surface", "beta", "alpha"))
    return (EXIT_OK if report.accepted else EXIT_VIOLATION), {
        "min_psi": report.min_margin, "argmin": list(report.argmin), "accepted": report.accepted}


def cmd_capbound(cfg, out: Path, svg: bool):
    n, N = cfg.n, cfg.band("capbound")
    rows, sup, scale_err = [], {}, 0.0
    for i in range(cfg.bodies):
        K = sample_body(cfg.seed + i, BODY_CLASSES[i % len(BODY_CLASSES)], n, N)
        K2 = BodyRev(K.h * 2.0, check=False)
        for j in range(1, n):
            for a in cfg.alpha_grid:
                r = firey_cap_bound(K, j, a)
                r2 = firey_cap_bound(K2, j, a)
                scale_err = max(scale_err, abs(r2.ratio - r.ratio) / max(r.ratio, 1e-300))
                sup[j] = max(sup.get(j, 0.0), r.ratio)
                rows.append((cfg.seed + i, j, a, r.lhs, r.rhs_shape, r.ratio))
    write_csv(out / "capbound.csv", ("seed", "j", "alpha", "lhs", "rhs_shape", "ratio"), rows)
    finite = all(math.isfinite(v) for v in sup.values())
    return (EXIT_OK if finite and scale_err <= 1e-8 else EXIT_VIOLATION), {
        "sup_ratio": {str(j): v for j, v in sup.items()}, "scale_error": scale_err}


def cmd_nonmonotone(cfg, out: Path, svg: bool):
    if cfg.n < 3:
        raise ConfigError("nonmonotone needs n >= 3")
    rep = nonmonotone_construct(cfg.n, cfg.band("nonmonotone"), seed=cfg.seed)
    summary = rep.to_dict()
    g = rep.phi.mu.density
    t = np.linspace(-1, 1, 401)
    write_csv(out / "nonmonotone.csv", ("t", "generating_function"), zip(t, g(t)))
    if svg:
        (out / "nonmonotone.svg").write_text(line_svg({"1 - g": (t, g(t))}, "generating function", "t", "value"))
    if rep.worst_margin < -cfg.tolerance or rep.decision.weakly_monotone or rep.min_generating >= 0:
        return EXIT_VIOLATION, summary
    if rep.witness is None:
        return EXIT_INCONCLUSIVE, summary
    return EXIT_OK, summary


def cmd_lipschitz(cfg, out: Path, svg: bool):
    n, N = cfg.n, cfg.band("lipschitz")
    rows, ok = [], True
    for i in range(min(cfg.trials, 20)):
        phi = random_endomorphism(n, cfg.seed + i, N)
        rep = lipschitz_estimate(phi, trials=20, seed=cfg.seed + 1000 * i, N=N)
        ok &= rep.estimate <= rep.tv_bound * (1 + 1e-9)
        rows.append((i, rep.estimate, rep.tv_bound, rep.mean_width_image, rep.constant_lower_bound))
    tv = tv_ratio_sup(n, 10_000, cfg.seed)
    write_csv(out / "lipschitz.csv", ("index", "estimate", "tv_bound", "mean_width_image", "ratio"), rows)
    return (EXIT_OK if ok else EXIT_VIOLATION), {
        "empirical_constant_from_maps": max(r[4] for r in rows),
        "generator_tv_sup": tv.sup, "generator_tv_sup_doubled": tv.sup_doubled,
        "mean_width_normalization": "2/omega_n times the integral of h"}


def cmd_doublecone(cfg, out: Path, svg: bool):
    n, N = cfg.n, cfg.band("doublecone")
    if n < 3:
        raise ConfigError("doublecone needs n >= 3")
    S = double_cone_S1(n, N)
    bound = 2.0 ** (-(n - 5) / 2) * kappa(n - 1)
    grid = alpha_beta_grid(cfg.grid_size)
    rows, bound_ok = [], True
    for eps in cfg.eps_grid:
        h = h_eps(n, eps, N)
        pairing = S.pair(h)
        psi_max = float(psi_surface(h, grid, grid).max())
        bound_ok &= pairing >= bound
        rows.append((eps, pairing, bound, psi_max))
    write_csv(out / "doublecone.csv", ("eps", "pairing", "lower_bound", "max_psi"), rows)
    cert = double_cone_certificate(n, min(cfg.eps_grid), N, cfg.grid_size)
    (out / "doublecone_certificate.json").write_text(cert.to_json() + "\n")
    if svg:
        (out / "doublecone.svg").write_text(line_svg({"max psi": ([r[0] for r in rows], [r[3] for r in rows])},
                                                     "max Psi(h_eps)", "eps", "value", logy=True))
    summary = {"status": cert.status, "residual": cert.residual, "bound_holds": bound_ok,
               "max_psi_smallest_eps": rows[-1][3], "psi_target": 1e-3, "psi_target_met": rows[-1][3] < 1e-3}
    if not bound_ok or cert.status == "member":
        return EXIT_VIOLATION, summary
    return (EXIT_OK if cert.status == "non-member" else EXIT_INCONCLUSIVE), summary


def cmd_decompose(cfg, out: Path, svg: bool):
    if cfg.n < 3:
        raise ConfigError("decompose needs n >= 3")
    rep = decomposition_experiment(cfg.n, cfg.band("decompose"), cfg.decompose_eps_grid, cfg.witness_tolerance)
    rows = [(r["eps"], r["margin"], r["margin_refined"], r["witness"], b["margin"])
            for r, b in zip(rep.rows, rep.ball_rows)]
    write_csv(out / "decompose.csv", ("eps", "margin", "margin_refined", "witness", "ball_margin"), rows)
    if svg:
        (out / "decompose.svg").write_text(line_svg({"margin": ([r[0] for r in rows], [r[1] for r in rows])},
                                                    "psi margin", "eps", "margin"))
    summary = rep.to_dict()
    if any(b["witness"] for b in rep.ball_rows):
        return EXIT_VIOLATION, summary
    return (EXIT_OK if rep.witnesses else EXIT_INCONCLUSIVE), summary


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zonal-minkowski", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value config file with sections")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--n", type=int, help="ambient dimension")
        p.add_argument("--band-limit", type=int, help="band limit N")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--svg", action="store_true", help="also write SVG plots")
    return parser


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        try:
            cfg = ExperimentConfig.from_text(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    overrides = {"n": args.n, "band_limit": args.band_limit, "seed": args.seed,
                 "out": None if args.out is None else str(args.out)}
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        code, summary = HANDLERS[args.command](cfg, out, args.svg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_summary(out / f"{args.command}.json", cfg, args.command, {"exit_code": code, **summary})
    print(f"{args.command}: exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
