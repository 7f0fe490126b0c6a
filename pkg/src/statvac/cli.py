"""Command-line entry point and experiment orchestration.

Subcommands::

    residual        reduced-system residuals of a stationary metric file
    gauss           radial-system residuals of a foliation file
    kid check       KID-equation residuals of a boundary data file
    kid extend      radial extension + deformation report
    fg expand       boundary expansion coefficients from (G0, Gn)
    fg compare      per-order comparison of two expansion files
    carleman        weighted inequality sweep on a foliation pair
    estia           aggregate-norm bound on random conforming samples
    continuation    symmetry-reduced separation trace from a profile file
    weyl gen        build + certify a static axisymmetric vacuum metric
    weyl classify   coefficient-decay verdict for a potential

Every subcommand supports ``--dry-run`` (validate inputs, compute nothing),
``--outdir`` (default from ``STATVAC_OUTDIR``), ``--plot`` (emit an SVG
line chart next to the CSV) and ``--config FILE`` (sectioned key=value
defaults; command-line flags win).  CSV output is deterministic for fixed
inputs and seed; ``--hex-floats`` switches the numeric columns to IEEE-754
hexadecimal literals for bit-exact round-trips.

Exit codes: 0 all gates passed, 1 input/usage error, 2 tolerance or
validation failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TOLERANCE = 2


class ConfigError(ValueError):
    pass


def parse_config(path) -> dict[str, dict[str, str]]:
    """Flat sectioned key=value format with line-precise diagnostics."""
    sections: dict[str, dict[str, str]] = {}
    current = None
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    for lineno, line in enumerate(raw, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if not current:
                raise ConfigError(f"{path}:{lineno}: empty section name")
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        if current is None:
            raise ConfigError(f"{path}:{lineno}: key outside any [section]")
        key, val = (t.strip() for t in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in sections[current]:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        sections[current][key] = val
    return sections


def validate_section(path, sections, name, known_keys):
    sec = sections.get(name, {})
    for key in sec:
        if key not in known_keys:
            lineno = _find_key_line(path, name, key)
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} in section [{name}] "
                f"(known: {', '.join(sorted(known_keys))})"
            )
    return sec


def _find_key_line(path, section, key) -> int:
    current = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                current = stripped[1:-1].strip()
            elif "=" in stripped and current == section:
                if stripped.split("=", 1)[0].strip() == key:
                    return lineno
    return 0


@dataclass
class ExperimentConfig:
    """Parsed invocation of one subcommand."""

    command: str
    args: argparse.Namespace
    outdir: Path
    plot: bool
    dry_run: bool
    hex_floats: bool

    def outpath(self, name: str) -> Path:
        self.outdir.mkdir(parents=True, exist_ok=True)
        return self.outdir / name


def _fmt_float(cfg: ExperimentConfig, v) -> str:
    x = float(v)
    return x.hex() if cfg.hex_floats else repr(x)


def write_csv(cfg: ExperimentConfig, name: str, header: list[str], rows) -> Path:
    path = cfg.outpath(name)
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                _fmt_float(cfg, v) if isinstance(v, (float, np.floating)) else v
                for v in row
            ])
    return path


def _require_files(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).exists():
            raise FileNotFoundError(f"input file not found: {p}")


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def cmd_residual(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .stationary import reduced_residuals

    _require_files(cfg.args.input)
    if cfg.dry_run:
        ser.load_stationary(cfg.args.input)
        return EXIT_OK
    sm = ser.load_stationary(cfg.args.input)
    res = reduced_residuals(sm)
    norms = res.sup_norms()
    write_csv(cfg, "residual.csv", ["equation", "sup_norm"],
              [(k, v) for k, v in norms.items()])
    return EXIT_OK if max(norms.values()) <= cfg.args.tolerance else EXIT_TOLERANCE


def cmd_gauss(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .foliation import gauss_residuals

    _require_files(cfg.args.input)
    if cfg.dry_run:
        ser.load_foliation(cfg.args.input)
        return EXIT_OK
    f = ser.load_foliation(cfg.args.input)
    res = gauss_residuals(f)
    norms = res.sup_norms()
    write_csv(cfg, "gauss.csv", ["equation", "sup_norm"],
              [(k, v) for k, v in norms.items()])
    return (EXIT_OK if res.max_equation_norm() <= cfg.args.tolerance
            else EXIT_TOLERANCE)


def cmd_kid_check(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .kid import kid_residual

    _require_files(cfg.args.input)
    if cfg.dry_run:
        ser.load_kid(cfg.args.input)
        return EXIT_OK
    k = ser.load_kid(cfg.args.input)
    r0, r1 = kid_residual(k)
    rows = [("kids0", r0.sup_norm()), ("kids1", r1.sup_norm())]
    write_csv(cfg, "kid_check.csv", ["equation", "sup_norm"], rows)
    worst = max(r0.sup_norm(), r1.sup_norm())
    return EXIT_OK if worst <= cfg.args.tolerance else EXIT_TOLERANCE


def cmd_kid_extend(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .kid import deformation, extend_kid, killing_verify

    _require_files(cfg.args.input, cfg.args.foliation)
    if cfg.dry_run:
        ser.load_kid(cfg.args.input)
        ser.load_foliation(cfg.args.foliation)
        return EXIT_OK
    k = ser.load_kid(cfg.args.input)
    f = ser.load_foliation(cfg.args.foliation)
    omega = extend_kid(f, k)
    rep = killing_verify(f, omega, k.einstein_constant)
    rows = [(float(f.radial.coords[i]), float(rep.slice_sup[i]))
            for i in range(f.nr)]
    write_csv(cfg, "kid_extend.csv", ["radial_coord", "deformation_sup"], rows)
    write_csv(cfg, "kid_extend_summary.csv", ["quantity", "value"], [
        ("h_boundary", rep.h0_norm),
        ("h_prime_boundary", rep.h0_prime_norm),
        ("linearized_einstein", rep.linearized_norm),
    ])
    if cfg.plot:
        from .svgplot import write_line_chart
        write_line_chart(cfg.outpath("kid_extend.svg"),
                         [(f.radial.coords, rep.slice_sup, "sup|h|")],
                         title="deformation tensor per slice",
                         xlabel="radial coordinate", ylabel="sup|h|", logy=True)
    worst = float(np.max(rep.slice_sup))
    return EXIT_OK if worst <= cfg.args.tolerance else EXIT_TOLERANCE


def cmd_fg_expand(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .fields import LORENTZIAN, MetricField
    from .fg import fg_expand

    _require_files(cfg.args.g0, cfg.args.gn)
    if cfg.dry_run:
        ser.load_tensor(cfg.args.g0)
        if cfg.args.gn:
            ser.load_tensor(cfg.args.gn)
        return EXIT_OK
    t0 = ser.load_tensor(cfg.args.g0)
    g0 = MetricField(t0.grid, t0.comps, signature=LORENTZIAN,
                     validate_signature=False)
    gn = ser.load_tensor(cfg.args.gn) if cfg.args.gn else None
    data = fg_expand(g0, gn, order=cfg.args.order)
    out = cfg.outpath(cfg.args.output)
    ser.save_fg(out, data)
    write_csv(cfg, "fg_expand.csv", ["order", "coefficient_sup"],
              [(k, float(np.max(np.abs(c)))) for k, c in enumerate(data.coefficients)])
    return EXIT_OK


def cmd_fg_compare(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .fg import fg_compare

    _require_files(cfg.args.a, cfg.args.b)
    if cfg.dry_run:
        ser.load_fg(cfg.args.a)
        ser.load_fg(cfg.args.b)
        return EXIT_OK
    rep = fg_compare(ser.load_fg(cfg.args.a), ser.load_fg(cfg.args.b),
                     tol=cfg.args.tolerance)
    rows = [(k, d) for k, d in enumerate(rep.per_order)]
    rows.append(("first_differing_order",
                 -1 if rep.first_differing_order is None else rep.first_differing_order))
    write_csv(cfg, "fg_compare.csv", ["order", "difference_sup"], rows)
    return EXIT_OK


def cmd_carleman(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .continuation import (CarlemanConfig, QuadratureDivergenceError,
                               SolutionPair, carleman_check)

    _require_files(cfg.args.base, cfg.args.other)
    if cfg.dry_run:
        ser.load_foliation(cfg.args.base)
        ser.load_foliation(cfg.args.other)
        return EXIT_OK
    base = ser.load_foliation(cfg.args.base)
    other = ser.load_foliation(cfg.args.other)
    pair = SolutionPair(other, base)
    svals = np.linspace(cfg.args.s_min, cfg.args.s_max, cfg.args.s_count)
    ccfg = CarlemanConfig(svals, cfg.args.r0, derivative_order=cfg.args.order)
    try:
        rep = carleman_check(pair, ccfg)
    except QuadratureDivergenceError as exc:
        print(f"carleman: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    rows = []
    for name, tr in rep.traces.items():
        for j, s in enumerate(tr.s):
            rows.append((name, float(s), float(tr.lhs[j]), float(tr.rhs[j]),
                         float(tr.fitted_c)))
    write_csv(cfg, "carleman.csv",
              ["inequality", "s", "lhs", "rhs", "fitted_c"], rows)
    if cfg.plot:
        from .svgplot import write_line_chart
        series = [(tr.s, tr.rhs / tr.lhs, name) for name, tr in rep.traces.items()]
        write_line_chart(cfg.outpath("carleman.svg"), series,
                         title="inequality ratio against weight exponent",
                         xlabel="s", ylabel="rhs/lhs", logx=True, logy=True)
    print("fitted constants:", {k: f"{v:.6g}" for k, v in
                                rep.fitted_constants().items()})
    return EXIT_OK


def cmd_estia(cfg: ExperimentConfig) -> int:
    from .continuation import estia_check, random_ah_pair
    from .grid import ChartGrid, interval_axis, periodic_axis

    if cfg.dry_run:
        return EXIT_OK
    rng = np.random.default_rng(cfg.args.seed)
    boundary = ChartGrid((periodic_axis("y", cfg.args.boundary_nodes),))
    radial = interval_axis("r", 0.0, cfg.args.r_max, cfg.args.radial_nodes,
                           radial=True)
    pairs = [random_ah_pair(radial, boundary, rng, amplitude=cfg.args.amplitude)
             for _ in range(cfg.args.samples)]
    rep = estia_check(pairs)
    rows = []
    for i, s in enumerate(rep.samples):
        rows.append((i, int(s.accepted), s.overall, s.pi_group, s.v_group,
                     s.xi_a, s.xi_b, s.xi_c, s.reject_reason))
    write_csv(cfg, "estia.csv",
              ["sample", "accepted", "overall", "pi_group", "v_group",
               "xi_a", "xi_b", "xi_c", "reject_reason"], rows)
    print(f"fitted C = {rep.fitted_c:.6g} over "
          f"{len(rep.samples) - rep.n_rejected} samples "
          f"({rep.n_rejected} rejected)")
    if not np.isfinite(rep.fitted_c) or rep.fitted_c > cfg.args.c_max:
        return EXIT_TOLERANCE
    return EXIT_OK


_PROFILE_KEYS = {"v", "v_prime", "scales", "scale_primes", "kappa", "slice",
                 "twist"}
_RUN_KEYS = {"x_max", "n_eval", "rtol", "atol", "ndim", "max_separation",
             "min_separation"}


def _profile_from_section(sec: dict[str, str]):
    from .continuation import RadialProfile

    scales = [float(t) for t in sec.get("scales", "1").split(",")]
    primes = [float(t) for t in sec.get("scale_primes", "0").split(",")]
    return RadialProfile(
        V=float(sec.get("v", "1")),
        V_prime=float(sec.get("v_prime", "0")),
        scales=scales, scale_primes=primes,
        kappa=float(sec.get("kappa", "0")),
        slice_curvature=1 if sec.get("slice", "torus") == "sphere" else 0,
        twist=float(sec.get("twist", "0")),
    )


def cmd_continuation(cfg: ExperimentConfig) -> int:
    from .continuation import continuation_ode

    _require_files(cfg.args.profile)
    sections = parse_config(cfg.args.profile)
    for name in ("base", "other"):
        if name not in sections:
            raise ConfigError(f"{cfg.args.profile}: missing [{name}] section")
        validate_section(cfg.args.profile, sections, name, _PROFILE_KEYS)
    run = validate_section(cfg.args.profile, sections, "run", _RUN_KEYS)
    if cfg.dry_run:
        _profile_from_section(sections["base"])
        _profile_from_section(sections["other"])
        return EXIT_OK
    p0 = _profile_from_section(sections["base"])
    p1 = _profile_from_section(sections["other"])
    ndim = int(run["ndim"]) if "ndim" in run else None
    trace = continuation_ode(
        p0, p1, float(run.get("x_max", "1.0")),
        n_eval=int(run.get("n_eval", "201")), ndim=ndim,
        rtol=float(run.get("rtol", "1e-12")), atol=float(run.get("atol", "1e-12")),
    )
    rows = [(float(x), float(s)) for x, s in zip(trace.x, trace.separation)]
    write_csv(cfg, "continuation.csv", ["x", "separation"], rows)
    if trace.diagnostic:
        print(f"continuation: {trace.diagnostic}", file=sys.stderr)
    if cfg.plot:
        from .svgplot import write_line_chart
        write_line_chart(cfg.outpath("continuation.svg"),
                         [(trace.x, np.maximum(trace.separation, 1e-300), "separation")],
                         title="separation trace", xlabel="x",
                         ylabel="sup separation", logy=True)
    sep = trace.max_separation()
    if "max_separation" in run and sep > float(run["max_separation"]):
        return EXIT_TOLERANCE
    if "min_separation" in run and sep < float(run["min_separation"]):
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_weyl_gen(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .stationary import reduced_residuals
    from .weyl import AxisymmetricHarmonic, weyl_metric

    _require_files(cfg.args.coeffs)
    coeffs = ser.load_weyl_coefficients(cfg.args.coeffs)
    h = AxisymmetricHarmonic(coeffs, radius=cfg.args.radius,
                             exterior=cfg.args.exterior)
    if cfg.dry_run:
        return EXIT_OK
    w = weyl_metric(h, (cfg.args.rc_min, cfg.args.rc_max),
                    (cfg.args.z_min, cfg.args.z_max),
                    n_rc=cfg.args.nodes, n_z=cfg.args.nodes)
    res = reduced_residuals(w.metric)
    norms = res.sup_norms()
    rows = [(k, v) for k, v in norms.items()]
    rows.append(("lapse_infimum", w.lapse_infimum))
    write_csv(cfg, "weyl_gen.csv", ["quantity", "value"], rows)
    return EXIT_OK if max(norms.values()) <= cfg.args.tolerance else EXIT_TOLERANCE


def cmd_weyl_classify(cfg: ExperimentConfig) -> int:
    from . import serialization as ser
    from .weyl import analyticity_classify

    _require_files(cfg.args.coeffs)
    coeffs = ser.load_weyl_coefficients(cfg.args.coeffs)
    if cfg.dry_run:
        return EXIT_OK
    verdict = analyticity_classify(coeffs)
    rows = [("verdict", verdict.label)]
    for name, rss in sorted(verdict.rss.items()):
        rows.append((f"rss_{name}", rss))
    write_csv(cfg, "weyl_classify.csv", ["quantity", "value"], rows)
    if cfg.plot:
        from .svgplot import write_line_chart
        ells = np.arange(len(coeffs))
        good = np.abs(coeffs) > 0
        write_line_chart(cfg.outpath("weyl_classify.svg"),
                         [(ells[good], np.abs(coeffs[good]), "|a_l|")],
                         title=f"coefficient decay: {verdict.label}",
                         xlabel="l", ylabel="|a_l|", logy=True)
    print(f"verdict: {verdict.label}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--outdir", default=None,
                   help="output directory (default: $STATVAC_OUTDIR or .)")
    p.add_argument("--plot", action="store_true", help="emit SVG charts")
    p.add_argument("--dry-run", action="store_true",
                   help="validate inputs without computing")
    p.add_argument("--hex-floats", action="store_true",
                   help="CSV numeric columns as hexadecimal float literals")
    p.add_argument("--config", default=None,
                   help="sectioned key=value file with option defaults")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="statvac",
        description="stationary vacuum space-time verification experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("residual", help="reduced-system residuals")
    p.add_argument("--input", required=True)
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(func=cmd_residual, config_section="residual")

    p = sub.add_parser("gauss", help="radial-system residuals")
    p.add_argument("--input", required=True)
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(func=cmd_gauss, config_section="gauss")

    kid = sub.add_parser("kid", help="Killing initial data")
    kid_sub = kid.add_subparsers(dest="kid_command", required=True)
    p = kid_sub.add_parser("check", help="KID-equation residuals")
    p.add_argument("--input", required=True)
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(func=cmd_kid_check, config_section="kid-check")
    p = kid_sub.add_parser("extend", help="radial extension report")
    p.add_argument("--input", required=True)
    p.add_argument("--foliation", required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=cmd_kid_extend, config_section="kid-extend")

    fgp = sub.add_parser("fg", help="boundary expansions")
    fg_sub = fgp.add_subparsers(dest="fg_command", required=True)
    p = fg_sub.add_parser("expand", help="expansion coefficients")
    p.add_argument("--g0", required=True)
    p.add_argument("--gn", default=None)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--output", default="expansion.fg")
    _add_common(p)
    p.set_defaults(func=cmd_fg_expand, config_section="fg-expand")
    p = fg_sub.add_parser("compare", help="per-order comparison")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tolerance", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(func=cmd_fg_compare, config_section="fg-compare")

    p = sub.add_parser("carleman", help="weighted inequality sweep")
    p.add_argument("--base", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--s-min", dest="s_min", type=float, default=3.0)
    p.add_argument("--s-max", dest="s_max", type=float, default=10.0)
    p.add_argument("--s-count", dest="s_count", type=int, default=8)
    p.add_argument("--r0", type=float, default=0.0)
    p.add_argument("--order", type=int, default=2,
                   help="derivative order k of the summed inequality")
    _add_common(p)
    p.set_defaults(func=cmd_carleman, config_section="carleman")

    p = sub.add_parser("estia", help="aggregate-norm bound sweep")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boundary-nodes", dest="boundary_nodes", type=int, default=16)
    p.add_argument("--radial-nodes", dest="radial_nodes", type=int, default=33)
    p.add_argument("--r-max", dest="r_max", type=float, default=3.0)
    p.add_argument("--amplitude", type=float, default=0.2)
    p.add_argument("--c-max", dest="c_max", type=float, default=float("inf"))
    _add_common(p)
    p.set_defaults(func=cmd_estia, config_section="estia")

    p = sub.add_parser("continuation", help="symmetry-reduced separation trace")
    p.add_argument("--profile", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_continuation, config_section="continuation")

    weylp = sub.add_parser("weyl", help="static axisymmetric solutions")
    weyl_sub = weylp.add_subparsers(dest="weyl_command", required=True)
    p = weyl_sub.add_parser("gen", help="build and certify a metric")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--exterior", action="store_true")
    p.add_argument("--rc-min", dest="rc_min", type=float, default=0.3)
    p.add_argument("--rc-max", dest="rc_max", type=float, default=0.8)
    p.add_argument("--z-min", dest="z_min", type=float, default=-0.3)
    p.add_argument("--z-max", dest="z_max", type=float, default=0.3)
    p.add_argument("--nodes", type=int, default=33)
    p.add_argument("--tolerance", type=float, default=1e-3)
    _add_common(p)
    p.set_defaults(func=cmd_weyl_gen, config_section="weyl-gen")
    p = weyl_sub.add_parser("classify", help="coefficient-decay verdict")
    p.add_argument("--coeffs", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_weyl_classify, config_section="weyl-classify")

    return ap


def _apply_config_defaults(args: argparse.Namespace) -> None:
    if not args.config:
        return
    sections = parse_config(args.config)
    section = getattr(args, "config_section", None)
    if section is None or section not in sections:
        return
    known = {k.replace("-", "_") for k in vars(args)
             if k not in ("func", "config_section", "command")}
    sec = validate_section(args.config, sections,
                           section, {k.replace("_", "-") for k in known} | known)
    for key, raw in sec.items():
        attr = key.replace("-", "_")
        current = getattr(args, attr, None)
        if isinstance(current, bool):
            setattr(args, attr, raw.lower() in ("1", "true", "yes", "on"))
        elif isinstance(current, int):
            setattr(args, attr, int(raw))
        elif isinstance(current, float):
            setattr(args, attr, float(raw))
        else:
            setattr(args, attr, raw)


def dispatch(cfg: ExperimentConfig) -> int:
    """Run the configured experiment; distinct exit codes per failure kind."""
    from .fields import FieldError
    from .grid import GridError
    from .serialization import FormatError

    try:
        return cfg.args.func(cfg)
    except (FileNotFoundError, FormatError, ConfigError, GridError,
            FieldError) as exc:
        print(f"statvac {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"statvac {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _apply_config_defaults(args)
    except ConfigError as exc:
        print(f"statvac: {exc}", file=sys.stderr)
        return EXIT_INPUT
    outdir = args.outdir or os.environ.get("STATVAC_OUTDIR", ".")
    cfg = ExperimentConfig(
        command=args.command,
        args=args,
        outdir=Path(outdir),
        plot=args.plot,
        dry_run=args.dry_run,
        hex_floats=args.hex_floats,
    )
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
