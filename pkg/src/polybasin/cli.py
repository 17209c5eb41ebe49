"""Command-line front end.

Commands:
  invariant  compute a certificate for a polynomial (or echo one)
  equiv      decide topological equivalence of two inputs
  check      escape/genericity diagnostics for a polynomial
  oracle     flood-fill validation of the computed certificate
  render     SVG/CSV views: equipotentials, rays, regions

Exit codes: 0 success / equivalent / consistent, 1 negative verdict,
2 computation or input error (machine-readable JSON on stderr).
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import dynamics, oracle, render
from .errors import BasinError, GenericityViolation, NonEscaping, ParseError
from .invariant import (
    canonical_sequence,
    certificate_from_json,
    certificate_to_json,
    label_eq,
)
from .poly import polynomial_from_json
from .portrait import portrait_validate


@dataclass
class RunConfig:
    tol_green: float = 1e-12
    tol_angle: float = 1e-9
    max_iter: int = 10000
    esc_radius_factor: float = 1.0
    resolution: int = 1024
    depth: int = 2
    orientation: str = "both"
    output: str = None

    def validate(self):
        if self.tol_green <= 0 or self.tol_angle <= 0:
            raise ParseError("tolerances must be positive")
        if self.resolution < 64:
            raise ParseError("resolution must be at least 64")
        if self.orientation not in ("ccw", "cw", "both"):
            raise ParseError("orientation must be ccw, cw or both")


def _fail(code, message):
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return 2


def _load_input(path):
    """Polynomial or certificate JSON, sniffed by its top-level keys."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(obj, dict) and "coefficients" in obj:
        return "poly", polynomial_from_json(text)
    if isinstance(obj, dict) and "graph" in obj:
        return "cert", certificate_from_json(text)
    raise ParseError(f"{path}: neither a polynomial nor a certificate document")


def _certificate_for(kind, value, cfg):
    if kind == "cert":
        return value
    orientation = "cw" if cfg.orientation == "cw" else "ccw"
    return dynamics.invariant_of(
        value, orientation=orientation, tol_green=cfg.tol_green,
        tol_angle=cfg.tol_angle, max_iter=cfg.max_iter,
        esc_radius_factor=cfg.esc_radius_factor)


def _emit(text, cfg):
    if cfg.output:
        # newline='' keeps RFC-4180 CRLF rows intact on every platform
        Path(cfg.output).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def cmd_invariant(args, cfg):
    kind, value = _load_input(args.input)
    cert = _certificate_for(kind, value, cfg)
    _emit(certificate_to_json(cert), cfg)
    return 0


def _equiv_reason(c1, c2):
    if c1.degree != c2.degree:
        return False, f"degree mismatch ({c1.degree} vs {c2.degree})"
    s1 = canonical_sequence(c1.graph)
    s2 = canonical_sequence(c2.graph)
    if len(s1) != len(s2):
        return False, f"label sequence length {len(s1)} vs {len(s2)}"
    for i, (a, b) in enumerate(zip(s1, s2)):
        if not label_eq(a, b):
            return False, f"label sequence differs at index {i}"
    if not s1:
        return True, "both empty"
    return True, f"label sequences equal ({len(s1)} labels)"


def cmd_equiv(args, cfg):
    kind_a, val_a = _load_input(args.first)
    kind_b, val_b = _load_input(args.second)
    cert_a = _certificate_for(kind_a, val_a, cfg)
    cert_b = _certificate_for(kind_b, val_b, cfg)
    equivalent, reason = _equiv_reason(cert_a, cert_b)
    verdict = "EQUIVALENT" if equivalent else "NOT_EQUIVALENT"
    sys.stdout.write(f"{verdict}: {reason}\n")
    return 0 if equivalent else 1


def cmd_check(args, cfg):
    kind, value = _load_input(args.input)
    if kind != "poly":
        raise ParseError("check needs a polynomial input")
    p = value
    lines = [f"degree: {p.degree}"]
    criticals = dynamics.critical_points(p)
    usable = True
    for point, d in criticals:
        try:
            est = dynamics.green(p, point, min(cfg.tol_green, 1e-13),
                                 cfg.max_iter, cfg.esc_radius_factor)
            lines.append(
                f"critical {point:.12g}: local degree {d}, escaping, "
                f"potential {est.value:.12g}")
        except NonEscaping:
            lines.append(
                f"critical {point:.12g}: local degree {d}, non-escaping")
    try:
        ext = dynamics.extract_portrait(
            p, tol_green=cfg.tol_green, tol_angle=cfg.tol_angle,
            max_iter=cfg.max_iter, esc_radius_factor=cfg.esc_radius_factor)
        report = portrait_validate(ext.portrait)
        lines.append("genericity: ok")
        if not ext.records:
            lines.append("portrait: empty (no escaping critical point)")
        else:
            lines.append(f"portrait: {len(ext.records)} escaping criticals, "
                         f"validation {'ok' if report.ok else 'FAILED'}")
            for v in report.violations:
                lines.append(f"  violation: {v}")
        usable = report.ok
    except GenericityViolation as exc:
        lines.append(f"genericity: VIOLATED ({exc})")
        usable = False
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if usable else 1


def cmd_oracle(args, cfg):
    kind, value = _load_input(args.input)
    if kind != "poly":
        raise ParseError("oracle needs a polynomial input")
    p = value
    if args.cert:
        cert = certificate_from_json(Path(args.cert).read_text())
    else:
        cert = _certificate_for("poly", p, cfg)
    report = oracle.consistency_report(
        p, cert, depth=cfg.depth, resolution=cfg.resolution, strict=False)
    sys.stdout.write(str(report) + "\n")
    return 0 if report.ok else 1


def cmd_render(args, cfg):
    kind, value = _load_input(args.input)
    if kind != "poly":
        raise ParseError("render needs a polynomial input")
    p = value
    ext = dynamics.extract_portrait(
        p, tol_green=cfg.tol_green, tol_angle=cfg.tol_angle,
        max_iter=cfg.max_iter, esc_radius_factor=cfg.esc_radius_factor)
    if not ext.records:
        raise ParseError("no escaping critical point: nothing to render")
    g_star = ext.green_star
    crit_pts = [r.point for r in ext.records]
    m = p.degree

    if args.what == "equipotentials":
        field = oracle.field_for_level(
            p, g_star, crit_pts, m * m * g_star, g_star * 0.4, cfg.resolution)
        levels = [g_star, m * g_star, m * m * g_star]
        _emit(render.svg_equipotentials(field, levels), cfg)
    elif args.what == "rays":
        field = oracle.field_for_level(
            p, g_star, crit_pts, m * m * g_star, g_star * 0.4, cfg.resolution)
        _emit(render.svg_rays(p, ext, field), cfg)
    elif args.what == "regions":
        field = oracle.field_for_depth(
            p, g_star, crit_pts, cfg.depth, cfg.resolution)
        cmap, _ = oracle.band_components_autoscale(
            p, cfg.depth, field, g_star, crit_pts)
        if args.format == "csv":
            _emit(oracle.export_labels_csv(cmap), cfg)
        else:
            _emit(render.svg_regions(cmap), cfg)
    else:
        raise ParseError(f"unknown render target {args.what!r}")
    return 0


def _common_flags():
    """Shared flags, accepted before or after the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--tol-green", type=float, default=sup)
    common.add_argument("--tol-angle", type=float, default=sup)
    common.add_argument("--max-iter", type=int, default=sup)
    common.add_argument("--esc-radius-factor", type=float, default=sup)
    common.add_argument("--res", type=int, default=sup)
    common.add_argument("--depth", type=int, default=sup)
    common.add_argument("--orientation", choices=("ccw", "cw", "both"),
                        default=sup)
    common.add_argument("-o", "--output", default=sup)
    return common


def _build_parser():
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="polybasin",
        description="Topological conjugacy certificates for polynomial "
                    "basins of infinity",
        parents=[common])
    parser.set_defaults(
        tol_green=1e-12, tol_angle=1e-9, max_iter=10000,
        esc_radius_factor=1.0, res=1024, depth=2, orientation="both",
        output=None)

    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariant", parents=[common],
                       help="write the certificate of a polynomial")
    s.add_argument("input")
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("equiv", parents=[common],
                       help="decide equivalence of two inputs")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("check", parents=[common],
                       help="escape and genericity diagnostics")
    s.add_argument("input")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("oracle", parents=[common],
                       help="flood-fill consistency validation")
    s.add_argument("input")
    s.add_argument("--cert", default=None,
                   help="validate this certificate file instead of recomputing")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("render", parents=[common],
                       help="SVG/CSV visualization")
    s.add_argument("input")
    s.add_argument("what", choices=("equipotentials", "rays", "regions"))
    s.add_argument("--format", choices=("svg", "csv"), default="svg")
    s.set_defaults(func=cmd_render)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = RunConfig(
        tol_green=args.tol_green, tol_angle=args.tol_angle,
        max_iter=args.max_iter, esc_radius_factor=args.esc_radius_factor,
        resolution=args.res, depth=args.depth, orientation=args.orientation,
        output=args.output)
    try:
        cfg.validate()
        return args.func(args, cfg)
    except ParseError as exc:
        return _fail("PARSE", str(exc))
    except GenericityViolation as exc:
        return _fail("GENERICITY", str(exc))
    except BasinError as exc:
        return _fail("COMPUTE", f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail("IO", str(exc))


if __name__ == "__main__":
    sys.exit(main())
