"""Command-line front end.

Exit codes: 0 on success or a passing check, 1 when a check fails, 2 on
usage errors. Identical command line and seed produce byte-identical CSV.
Flags override values from --config; unknown config keys are rejected.
"""
import argparse
import json
import sys

import numpy as np

from . import backend, circle, domains, moduli, pshlab, spaces, verify
from .errors import ContractViolation, CvxlabError, SchemaError
from .reports import encode_value

MODULUS_KINDS = {"delta": "delta_X", "delta_q": "delta_q",
                 "Delta_q": "Delta_q", "H": "H_p"}


# --- small parsers ------------------------------------------------------------


def parse_point(text: str) -> np.ndarray:
    """Comma-separated interleaved re,im floats: 1,0,0,0 -> (1+0j, 0+0j)."""
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError as e:
        raise SchemaError(f"bad point {text!r}: {e}") from None
    if len(vals) == 0 or len(vals) % 2:
        raise SchemaError(f"point {text!r} needs an even count of re,im floats")
    v = np.asarray(vals, dtype=np.float64)
    return v[0::2] + 1j * v[1::2]


def parse_range(text: str) -> np.ndarray:
    """a:b:n -> n evenly spaced values; a bare float -> one value."""
    s = str(text)
    if ":" not in s:
        try:
            return np.array([float(s)])
        except ValueError as e:
            raise SchemaError(f"bad eps value {text!r}: {e}") from None
    parts = s.split(":")
    if len(parts) != 3:
        raise SchemaError(f"range {text!r} must be start:stop:count")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise SchemaError(f"bad range {text!r}: {e}") from None
    if n < 1:
        raise SchemaError(f"range {text!r} needs count >= 1")
    return np.linspace(a, b, n)


def parse_interval(text: str) -> tuple:
    parts = str(text).split(":")
    if len(parts) != 2:
        raise SchemaError(f"interval {text!r} must be lo:hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as e:
        raise SchemaError(f"bad interval {text!r}: {e}") from None
    if not lo < hi:
        raise SchemaError(f"interval {text!r} needs lo < hi")
    return lo, hi


def parse_shape(text: str, axes: int) -> tuple:
    parts = str(text).split(",")
    try:
        dims = [int(v) for v in parts]
    except ValueError as e:
        raise SchemaError(f"bad shape {text!r}: {e}") from None
    if len(dims) == 1:
        dims = dims * axes
    if len(dims) != axes:
        raise SchemaError(f"shape {text!r} needs 1 or {axes} entries")
    return tuple(dims)


# --- config / dispatch plumbing -----------------------------------------------


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise SchemaError("config must be a JSON object")
    return cfg


def _resolve(args, defaults):
    """Merge flag values over config-file values over defaults."""
    cfg = _load_config(getattr(args, "config", None))
    unknown = sorted(set(cfg) - set(defaults))
    if unknown:
        raise SchemaError(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for key, dflt in defaults.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else cfg.get(key, dflt)
    return out


def _require(params, *keys):
    for k in keys:
        if params[k] is None:
            raise SchemaError(f"missing required --{k.replace('_', '-')}")


def _ctrl(params):
    tol = params.get("tol")
    max_nodes = params.get("max_nodes")
    if tol is None and max_nodes is None:
        return None
    base = circle.QuadratureControls()
    return circle.QuadratureControls(
        tol=float(tol) if tol is not None else base.tol,
        max_nodes=int(max_nodes) if max_nodes is not None else base.max_nodes)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(payload, out):
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _domain_of(params):
    if params.get("domain"):
        return domains.parse_domain(params["domain"])
    if params.get("space"):
        return domains.ball_of(spaces.parse_space(params["space"]))
    raise SchemaError("need --space or --domain")


def _field_of(params):
    if params.get("grid"):
        return pshlab.load_grid(params["grid"]).as_field_oracle()
    if params.get("field"):
        dim = int(params.get("dim") or 1)
        return pshlab.field_by_name(params["field"], dim)
    raise SchemaError("need --field or --grid")


# --- commands -----------------------------------------------------------------


def cmd_moduli(args):
    p = _resolve(args, {
        "space": None, "modulus": None, "exp": None, "eps": None,
        "budget": 4096, "seed": 0, "out": None, "format": "csv",
    })
    _require(p, "space", "modulus", "eps")
    space = spaces.parse_space(p["space"])
    kind = MODULUS_KINDS[p["modulus"]]
    exponent = float(p["exp"]) if p["exp"] is not None else None
    curve = moduli.modulus_curve(space, kind, parse_range(p["eps"]),
                                 int(p["budget"]), int(p["seed"]),
                                 exponent=exponent)
    if p["format"] == "csv":
        _emit(curve.to_csv(), p["out"])
    else:
        payload = curve.to_json_dict()
        payload["space"] = space.to_json_dict()
        _emit_json(payload, p["out"])
    return 0


def cmd_verify(args):
    p = _resolve(args, {
        "suite": None, "space": None, "p": None, "q": None, "r": None,
        "pairs": None, "budget": None, "slack": None, "safety": None,
        "seed": 0, "threads": None, "tol": None, "max_nodes": None,
        "out": None,
    })
    _require(p, "suite")
    params = {k: p[k] for k in ("space", "p", "q", "r", "pairs", "budget",
                                "slack", "safety", "tol", "max_nodes")
              if p[k] is not None}
    params["threads"] = backend.thread_count(p["threads"])
    report = verify.run_suite(p["suite"], params, int(p["seed"]))
    _emit_json(report.to_json_dict(), p["out"])
    return 0 if report.passed else 1


def cmd_domain_levi(args):
    p = _resolve(args, {
        "space": None, "domain": None, "point": None, "r0": None,
        "tol": None, "max_nodes": None, "out": None,
    })
    _require(p, "point")
    dom = _domain_of(p)
    a = parse_point(p["point"])
    rep = domains.levi_report(dom, a, r0=p["r0"], ctrl=_ctrl(p))
    _emit_json({
        "point": encode_value(rep.point),
        "rho": float(dom.rho(a)),
        "min_eigenvalue": encode_value(rep.min_eigenvalue),
        "grad_norm": rep.grad_norm,
        "tangent_dim": int(rep.tangent_basis.shape[0]),
        "smooth_ok": rep.smooth_ok,
    }, p["out"])
    return 0


def cmd_domain_scan(args):
    p = _resolve(args, {
        "space": None, "domain": None, "count": 50, "seed": 0, "scan_tol": 1e-8,
        "tol": None, "max_nodes": None, "out": None,
    })
    dom = _domain_of(p)
    rep = domains.strict_levi_scan(dom, count=int(p["count"]),
                                   seed=int(p["seed"]),
                                   tol=float(p["scan_tol"]), ctrl=_ctrl(p))
    _emit_json({
        "n_points": rep.n_points,
        "n_skipped": rep.n_skipped,
        "worst_min_eig": rep.worst_min_eig,
        "witness": encode_value(rep.witness) if rep.witness is not None else None,
        "tolerance": rep.tol,
        "seed": int(p["seed"]),
        "pass": rep.passed,
    }, p["out"])
    return 0 if rep.passed else 1


def cmd_domain_exhaustion(args):
    p = _resolve(args, {
        "space": None, "domain": None, "phi": 1.0, "samples": 100, "seed": 0,
        "depth": 0.02, "check_tol": 1e-6, "threshold": 1e-6,
        "tol": None, "max_nodes": None, "out": None,
    })
    dom = _domain_of(p)
    rep = domains.exhaustion_check(dom, float(p["phi"]),
                                   samples=int(p["samples"]),
                                   seed=int(p["seed"]), depth=float(p["depth"]),
                                   tol=float(p["check_tol"]),
                                   threshold=float(p["threshold"]),
                                   ctrl=_ctrl(p))
    _emit_json({
        "n_samples": rep.n_samples,
        "n_skipped": rep.n_skipped,
        "worst_margin": rep.worst_margin,
        "witness": encode_value(rep.witness[0]) if rep.witness else None,
        "inf_phi_rho": rep.inf_phi_rho,
        "threshold": rep.threshold,
        "tolerance": rep.tol,
        "seed": int(p["seed"]),
        "pass": rep.passed,
    }, p["out"])
    return 0 if rep.passed else 1


def cmd_domain_uniform(args):
    p = _resolve(args, {
        "space": None, "pairs": 2000, "budget": 4096, "seed": 0,
        "slack": 1e-8, "safety": 0.9, "tol": None, "max_nodes": None,
        "out": None,
    })
    _require(p, "space")
    space = spaces.parse_space(p["space"])
    rep = domains.unit_ball_uniform_check(
        space, pairs=int(p["pairs"]), seed=int(p["seed"]),
        budget=int(p["budget"]), slack=float(p["slack"]),
        safety=float(p["safety"]), ctrl=_ctrl(p))
    payload = {
        "skipped": rep.skipped,
        "reason": rep.reason,
        "lam_hat": rep.lam_hat,
        "lam0": rep.lam0,
        "worst_margin": None if rep.skipped else rep.worst_margin,
        "n_pairs": rep.n_pairs,
        "slack": rep.slack,
        "safety": rep.safety,
        "seed": int(p["seed"]),
        "pass": rep.passed,
    }
    if rep.witness is not None:
        payload["witness"] = {"a": encode_value(rep.witness[0]),
                              "b": encode_value(rep.witness[1])}
    _emit_json(payload, p["out"])
    return 0 if rep.passed else 1


def cmd_domain_radius(args):
    p = _resolve(args, {
        "space": None, "domain": None, "point": None, "direction": None,
        "nodes": 64, "out": None,
    })
    _require(p, "point", "direction")
    dom = _domain_of(p)
    a = parse_point(p["point"])
    v = parse_point(p["direction"])
    r = domains.disc_radius(dom, a, v, nodes=int(p["nodes"]))
    _emit_json({
        "point": encode_value(np.asarray(a, dtype=np.complex128)),
        "direction": encode_value(np.asarray(v, dtype=np.complex128)),
        "radius": r,
    }, p["out"])
    return 0


def cmd_psh_check(args):
    p = _resolve(args, {
        "field": None, "grid": None, "dim": None, "box": None,
        "samples": 200, "seed": 0, "r_max": 0.1, "check_tol": 1e-8,
        "tol": None, "max_nodes": None, "out": None,
    })
    f = _field_of(p)
    if p["grid"]:
        region = pshlab.box_region(pshlab.load_grid(p["grid"]).box)
    else:
        lo, hi = parse_interval(p["box"]) if p["box"] else (-1.0, 1.0)
        region = pshlab.box_region(np.array([[lo, hi]] * (2 * f.dim)))
    rep = pshlab.psh_scan(f, region, samples=int(p["samples"]),
                          seed=int(p["seed"]), r_max=float(p["r_max"]),
                          tol=float(p["check_tol"]), ctrl=_ctrl(p))
    _emit_json({
        "field": p["field"] or p["grid"],
        "n_samples": rep.n_samples,
        "n_skipped": rep.n_skipped,
        "worst_margin": rep.worst_margin,
        "witness": encode_value(rep.witness) if rep.witness is not None else None,
        "tolerance": rep.tol,
        "seed": int(p["seed"]),
        "pass": rep.passed,
    }, p["out"])
    return 0 if rep.passed else 1


def cmd_psh_phi(args):
    p = _resolve(args, {
        "field": None, "grid": None, "dim": None, "point": None,
        "r_max": 0.05, "dirs": 64, "seed": 0,
        "tol": None, "max_nodes": None, "out": None,
    })
    _require(p, "point")
    f = _field_of(p)
    a = parse_point(p["point"])
    phi = pshlab.strict_avg_phi(f, a, float(p["r_max"]), n_dirs=int(p["dirs"]),
                                seed=int(p["seed"]), ctrl=_ctrl(p))
    _emit_json({
        "point": encode_value(a),
        "r_max": float(p["r_max"]),
        "n_dirs": int(p["dirs"]),
        "seed": int(p["seed"]),
        "phi": phi,
    }, p["out"])
    return 0


def cmd_psh_mollify(args):
    p = _resolve(args, {
        "field": None, "grid": None, "dim": None, "box": None, "shape": None,
        "delta": None, "out": None,
    })
    _require(p, "delta", "out")
    if p["grid"]:
        grid = pshlab.load_grid(p["grid"])
    else:
        _require(p, "field", "shape")
        f = _field_of(p)
        lo, hi = parse_interval(p["box"]) if p["box"] else (-1.0, 1.0)
        axes = 2 * f.dim
        box = np.array([[lo, hi]] * axes)
        grid = pshlab.sample_grid(f, box, parse_shape(p["shape"], axes))
    smoothed = pshlab.mollify(grid, float(p["delta"]))
    smoothed.save(p["out"])
    _emit_json({
        "delta": float(p["delta"]),
        "in_box": [[float(a), float(b)] for a, b in grid.box],
        "out_box": [[float(a), float(b)] for a, b in smoothed.box],
        "shape": list(smoothed.values.shape),
        "saved": p["out"],
    }, None)
    return 0


# --- parser -------------------------------------------------------------------


def _add_common(sub, seeded=True, quad=True):
    sub.add_argument("--config", help="JSON file of defaults; flags override")
    sub.add_argument("--out", help="output path (default: stdout)")
    if seeded:
        sub.add_argument("--seed", type=int)
    if quad:
        sub.add_argument("--tol", type=float, help="quadrature tolerance")
        sub.add_argument("--max-nodes", dest="max_nodes", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cvxlab",
        description="Quantitative convexity and plurisubharmonicity checks.")
    top = ap.add_subparsers(dest="command")

    m = top.add_parser("moduli", help="estimate a convexity modulus on a grid")
    m.add_argument("--space", help="space spec, family:param:dim or JSON")
    m.add_argument("--modulus", choices=sorted(MODULUS_KINDS))
    m.add_argument("--exp", type=float, help="modulus exponent (q or p)")
    m.add_argument("--eps", help="grid start:stop:count, or one value")
    m.add_argument("--budget", type=int)
    m.add_argument("--format", choices=("csv", "json"))
    _add_common(m)
    m.set_defaults(func=cmd_moduli)

    v = top.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=verify.SUITE_NAMES)
    v.add_argument("--space")
    v.add_argument("--p", type=float)
    v.add_argument("--q", type=float)
    v.add_argument("--r", type=float)
    v.add_argument("--pairs", "--samples", dest="pairs", type=int)
    v.add_argument("--budget", type=int)
    v.add_argument("--slack", type=float)
    v.add_argument("--safety", type=float)
    v.add_argument("--threads", type=int)
    _add_common(v)
    v.set_defaults(func=cmd_verify)

    d = top.add_parser("domain", help="pseudoconvexity analysis of ball domains")
    dsub = d.add_subparsers(dest="subcommand")

    dl = dsub.add_parser("levi", help="tangential Levi form at a point")
    dl.add_argument("--space")
    dl.add_argument("--domain")
    dl.add_argument("--point", help="interleaved re,im floats")
    dl.add_argument("--r0", type=float, help="base probing radius")
    _add_common(dl, seeded=False)
    dl.set_defaults(func=cmd_domain_levi)

    dc = dsub.add_parser("scan", help="minimum Levi eigenvalue over the boundary")
    dc.add_argument("--space")
    dc.add_argument("--domain")
    dc.add_argument("--count", type=int)
    dc.add_argument("--scan-tol", dest="scan_tol", type=float)
    _add_common(dc)
    dc.set_defaults(func=cmd_domain_scan)

    de = dsub.add_parser("exhaustion",
                         help="strictness identity for -log|rho| on samples")
    de.add_argument("--space")
    de.add_argument("--domain")
    de.add_argument("--phi", type=float, help="claimed uniform gap constant")
    de.add_argument("--samples", type=int)
    de.add_argument("--depth", type=float)
    de.add_argument("--check-tol", dest="check_tol", type=float)
    de.add_argument("--threshold", type=float)
    _add_common(de)
    de.set_defaults(func=cmd_domain_exhaustion)

    du = dsub.add_parser("uniform",
                         help="quadratic circle-mean growth on the doubled ball")
    du.add_argument("--space")
    du.add_argument("--pairs", type=int)
    du.add_argument("--budget", type=int)
    du.add_argument("--slack", type=float)
    du.add_argument("--safety", type=float)
    _add_common(du)
    du.set_defaults(func=cmd_domain_uniform)

    dr = dsub.add_parser("radius", help="largest disc radius inside the domain")
    dr.add_argument("--space")
    dr.add_argument("--domain")
    dr.add_argument("--point")
    dr.add_argument("--direction")
    dr.add_argument("--nodes", type=int)
    _add_common(dr, seeded=False, quad=False)
    dr.set_defaults(func=cmd_domain_radius)

    ps = top.add_parser("psh", help="plurisubharmonicity checks on fields")
    psub = ps.add_subparsers(dest="subcommand")

    pc = psub.add_parser("check", help="sub-mean property on sampled circles")
    pc.add_argument("--field", help="named test field")
    pc.add_argument("--grid", help="stem of a saved grid function")
    pc.add_argument("--dim", type=int, help="complex dimension for --field")
    pc.add_argument("--box", help="sampling box lo:hi, all real axes")
    pc.add_argument("--samples", type=int)
    pc.add_argument("--r-max", dest="r_max", type=float)
    pc.add_argument("--check-tol", dest="check_tol", type=float)
    _add_common(pc)
    pc.set_defaults(func=cmd_psh_check)

    pp = psub.add_parser("phi", help="strictness gap at a point")
    pp.add_argument("--field")
    pp.add_argument("--grid")
    pp.add_argument("--dim", type=int)
    pp.add_argument("--point")
    pp.add_argument("--r-max", dest="r_max", type=float)
    pp.add_argument("--dirs", type=int)
    _add_common(pp)
    pp.set_defaults(func=cmd_psh_phi)

    pm = psub.add_parser("mollify", help="smooth a grid by a unit-mass bump")
    pm.add_argument("--field")
    pm.add_argument("--grid")
    pm.add_argument("--dim", type=int)
    pm.add_argument("--box")
    pm.add_argument("--shape", help="grid points per axis, one int or a list")
    pm.add_argument("--delta", type=float)
    pm.add_argument("--out", help="stem for the smoothed grid (required)")
    pm.add_argument("--config")
    pm.set_defaults(func=cmd_psh_mollify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if not hasattr(args, "func"):
        ap.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SchemaError, ContractViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return 2
    except CvxlabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
