"""Command-line front end.

Usage::

    sfk validate SPEC
    sfk build SPEC [--grid N_H N_R] [--H-range LO HI] [--r-range LO HI] [--out DIR]
    sfk verify SPEC [--grid N N] [--out FILE]
    sfk oracle-compare SPEC [--grid N N] [--out FILE]
    sfk plotdata SPEC --what {boundary-map,V-decay,killing-norm,curvature-heat} [--out FILE]

A spec file is a JSON document::

    {"name": "O(-2)", "normals": [[0, 1], [1, 0], [2, -1]], "offsets": [0, 0, 1],
     "nut": [1, -1]}

``nut`` is optional (default ``[0, 0]``).  Exit codes: 0 success, 1 a numeric
check failed, 2 inadmissible input, 3 unreadable or malformed spec / IO error.
"""

import argparse
import csv
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, oracles
from .chart import action_coords, edge_interval, invert_many, make_chart
from .errors import NoOracleForPolygon, NotStrictlyUnbounded, SFKError
from .harmonic import NutParameter
from .polygon import classify, edge_values, validate
from .potential import (boundary_regularity, hessian, metric_grid, vertex_regularity,
                        write_grid_csv)

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3
PLOT_KINDS = ("boundary-map", "V-decay", "killing-norm", "curvature-heat")


class SpecError(Exception):
    """Malformed or unreadable spec file."""


@dataclass(frozen=True)
class RunConfig:
    spec: Path
    command: str
    grid: tuple
    H_range: tuple = None
    r_range: tuple = None
    tol_curvature: float = analysis.CURVATURE_TOL
    tol_oracle: float = 1e-7
    fd_step: float = analysis.FD_STEP
    out: Path = None
    what: str = None

    def __post_init__(self):
        if any(n < 2 for n in self.grid):
            raise SpecError("grid counts must be at least 2")
        if self.H_range is not None and not self.H_range[0] < self.H_range[1]:
            raise SpecError("H range must have positive length")
        if self.r_range is not None and not 0 < self.r_range[0] < self.r_range[1]:
            raise SpecError("r range must satisfy 0 < lo < hi")


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def load_spec(path):
    """Read and schema-check a spec; returns ``(name, normals, offsets, nut)``."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecError("spec must be a JSON object")
    unknown = set(doc) - {"name", "normals", "offsets", "nut"}
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    name = doc.get("name", "")
    normals, offsets, nut = doc.get("normals"), doc.get("offsets"), doc.get("nut")
    if not isinstance(name, str):
        raise SpecError("'name' must be a string")
    if not (isinstance(normals, list) and normals
            and all(isinstance(n, list) and len(n) == 2 and all(map(_is_int, n)) for n in normals)):
        raise SpecError("'normals' must be a nonempty list of [int, int] pairs")
    if not (isinstance(offsets, list) and all(map(_is_num, offsets))):
        raise SpecError("'offsets' must be a list of numbers")
    if len(offsets) != len(normals):
        raise SpecError("'normals' and 'offsets' must have the same length")
    if nut is not None and not (isinstance(nut, list) and len(nut) == 2 and all(map(_is_num, nut))):
        raise SpecError("'nut' must be a pair of numbers")
    return name, [tuple(n) for n in normals], offsets, tuple(nut) if nut else None


def _setup(cfg):
    name, normals, offsets, nut = load_spec(cfg.spec)
    P = validate(normals, offsets, name=name)
    nu = NutParameter.of(nut)
    nu.check(P)
    return P, nu


def _dump(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _default_ranges(c, cfg):
    H = cfg.H_range or (c.center - 2 * c.scale, c.center + 2 * c.scale)
    r = cfg.r_range or (0.1 * c.scale, 4 * c.scale)
    return H, r


def _grid_points(c, cfg):
    (h0, h1), (r0, r1) = _default_ranges(c, cfg)
    HH, RR = np.meshgrid(np.linspace(h0, h1, cfg.grid[0]), np.linspace(r0, r1, cfg.grid[1]),
                         indexing="ij")
    return HH.ravel(), RR.ravel()


# ---------------------------------------------------------------- commands

def cmd_validate(cfg):
    P, nu = _setup(cfg)
    print(f"{P.name or 'polygon'}: d={P.d} {classify(P).describe()}")
    print(f"nut={nu.as_list()} admissible")
    return EXIT_OK


def cmd_build(cfg):
    P, nu = _setup(cfg)
    c = make_chart(P, nu)
    H, r = _grid_points(c, cfg)
    grid = metric_grid(c, H, r)
    det_ok = bool(np.all(np.abs(grid.det_hess * grid.r ** 2 - 1) <= 1e-10))
    pd = grid.positive_definite()
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    stem = _slug(P.name)
    (h0, h1), (r0, r1) = _default_ranges(c, cfg)
    meta = {
        "name": P.name, "normals": [list(n) for n in P.normals], "offsets": list(P.offsets),
        "nut": nu.as_list(), "class": classify(P).describe(), "a": list(c.a),
        "anchor": [c.anchor.H, c.anchor.r],
        "grid": {"n_H": cfg.grid[0], "n_r": cfg.grid[1], "H_range": [h0, h1],
                 "r_range": [r0, r1]},
        "rows": len(grid), "det_identity_ok": det_ok,
        "hessian_positive_definite": bool(np.all(pd)),
    }
    _dump(meta, out / f"{stem}.chart.json")
    write_grid_csv(grid, out / f"{stem}.grid.csv")
    print(f"wrote {out / (stem + '.chart.json')} and {out / (stem + '.grid.csv')} "
          f"({len(grid)} rows)")
    return EXIT_OK if det_ok and np.all(pd) else EXIT_NUMERIC


def _slug(name):
    keep = re.sub(r"[^A-Za-z0-9-]+", "_", name or "polygon")
    return keep.strip("_-") or "polygon"


def run_checks(P, nu, cfg):
    """All verification checks for one chart; returns the ordered report dict."""
    c = make_chart(P, nu)
    checks = {}

    x = action_coords(c, *analysis.interior_grid(c, *cfg.grid))
    curv = analysis.curvature_report(c, x, fd_step=cfg.fd_step, tol=cfg.tol_curvature)
    checks["scalar_curvature"] = {"max_abs_s": curv.max_abs_s,
                                  "max_richardson_gap": curv.max_richardson_gap,
                                  "fd_step": cfg.fd_step, "passed": curv.passed}

    H, r = analysis.interior_grid(c, 7, 7)
    min_det = float(c.xi(H, r).det.min())
    det_err = float(np.max(np.abs(hessian(c, H, r)[2] * r * r - 1)))
    checks["determinant_identity"] = {"max_rel_error": det_err, "min_det_dxi": min_det,
                                      "passed": det_err <= 1e-10 and min_det > 0}

    rc = analysis.ricci_classify(P, nu)
    dev = analysis.ricci_numeric_check(c, rc.eta)
    agree = dev < 1e-9 if rc.ricci_flat else dev > 1e-6
    checks["ricci"] = {"ricci_flat": rc.ricci_flat, "eta": [float(t) for t in rc.eta],
                       "reason": rc.reason, "numeric_deviation": dev, "passed": bool(agree)}

    if classify(P).strictly_unbounded:
        av = analysis.asymptotic_V(c)
        checks["asymptotic_V"] = {"model": av.model,
                                  "max_scaled_residual": float(max(av.scaled_residuals)),
                                  "growth": [float(g) for g in av.growth],
                                  "bounded": av.bounded, "lower_bound_ok": av.lower_bound_ok,
                                  "passed": av.passed}
    else:
        checks["asymptotic_V"] = {"skipped": "not strictly unbounded", "passed": True}

    if nu.is_zero:
        checks["killing_norm"] = {"skipped": "nu = 0 has no bounded Killing field",
                                  "passed": True}
    else:
        para = analysis.killing_report(c, nu.vector)
        w = (1.0, 0.0) if abs(nu.beta) > 1e-12 else (0.0, 1.0)
        indep = analysis.killing_report(c, w)
        checks["killing_norm"] = {"parallel": para.as_dict(), "independent": indep.as_dict(),
                                  "passed": para.passed and indep.passed}

    probe = analysis.xi_range_probe(c)
    checks["xi_range"] = {**probe.as_dict(), "passed": probe.consistent}

    edge_reports = [boundary_regularity(c, j) for j in range(1, P.d + 1)]
    vertex_reports = [vertex_regularity(c, j) for j in range(1, P.d)]
    checks["boundary_regularity"] = {
        "edges": [rep.as_dict() for rep in edge_reports],
        "vertices": [rep.as_dict() for rep in vertex_reports],
        "passed": all(rep.passed for rep in edge_reports + vertex_reports)}

    return {"name": P.name, "nut": nu.as_list(), "a": list(c.a),
            "class": classify(P).describe(), "ricci_flat": rc.ricci_flat,
            "eta": [float(t) for t in rc.eta], "checks": checks,
            "failed": [k for k, v in checks.items() if not v["passed"]],
            "passed": all(v["passed"] for v in checks.values())}


def cmd_verify(cfg):
    P, nu = _setup(cfg)
    report = run_checks(P, nu, cfg)
    _dump(report, cfg.out)
    for name in report["failed"]:
        print(f"check failed: {name}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def oracle_grid(c, n_H=15, n_r=15):
    H = c.center + c.scale * np.linspace(-2, 2, n_H)
    r = c.scale * np.geomspace(0.05, 4, n_r)
    HH, RR = np.meshgrid(H, r, indexing="ij")
    return action_coords(c, HH.ravel(), RR.ravel())


def compare_with_oracle(P, nu, grid=(15, 15)):
    """Sup-norm gaps between the pipeline's ``xi`` and an oracle's gradients.

    Returns a dict with the closed-form gradient gap and the gap to a
    finite-difference gradient of the closed-form potential.
    """
    match, Pn, _ = oracles.detect_oracle_any(P, None if nu.is_zero else nu.as_list())
    nun = NutParameter.of(_oracle_nut(match))
    c = make_chart(Pn, nun)
    X = oracle_grid(c, *grid)
    H, r = invert_many(c, X)
    xi = c.xi(H, r).xi
    g_closed = np.array([match.gradient(x) for x in X])
    N = Pn.normal_array
    reach = np.linalg.norm(N, axis=1).max()
    g_fd = np.array([oracles.fd_gradient(match.potential, x,
                                         min(1e-4 * max(1.0, np.abs(x).max()),
                                             1e-2 * edge_values(Pn, x).min() / reach))
                     for x in X])
    return {"family": match.family, "params": match.params, "points": int(len(X)),
            "max_gradient_gap": float(np.abs(g_closed - xi).max()),
            "max_potential_fd_gap": float(np.abs(g_fd - xi).max())}


def _oracle_nut(match):
    # the Taub-NUT family's (alpha, beta) is twice the chart's nut vector
    if match.family != "taubnut":
        return None
    return (match.params["alpha"] / 2, match.params["beta"] / 2)


def cmd_oracle_compare(cfg):
    P, nu = _setup(cfg)
    res = compare_with_oracle(P, nu, cfg.grid)
    res["tol"] = cfg.tol_oracle
    res["passed"] = max(res["max_gradient_gap"], res["max_potential_fd_gap"]) < cfg.tol_oracle
    _dump(res, cfg.out)
    return EXIT_OK if res["passed"] else EXIT_NUMERIC


def cmd_plotdata(cfg):
    P, nu = _setup(cfg)
    c = make_chart(P, nu)
    if cfg.what == "boundary-map":
        lo = -c.a[-1] - c.scale - 1
        hi = c.scale + 1
        Hs = np.linspace(lo, hi, 201)
        X = action_coords(c, Hs, np.zeros_like(Hs))
        edges = [next(j for j in range(1, c.d + 1)
                      if edge_interval(c, j)[0] <= h <= edge_interval(c, j)[1]) for h in Hs]
        header, rows = ("H", "x1", "x2", "edge"), zip(Hs, X[:, 0], X[:, 1], edges)
    elif cfg.what == "V-decay":
        if not classify(P).strictly_unbounded:
            raise NotStrictlyUnbounded(f"{P.name or 'polygon'} has parallel unbounded edges")
        rho = np.geomspace(1e1, 1e4, 13)
        H, r = rho * np.cos(np.pi / 4), rho * np.sin(np.pi / 4)
        V = c.xi(H, r).V
        _, Vm = analysis.v_model(c, H, r)
        header, rows = ("rho", "V", "V_model"), zip(rho, V, Vm)
    elif cfg.what == "killing-norm":
        rs = np.geomspace(1e0, 1e4, 13)
        v = nu.vector if not nu.is_zero else np.array([1.0, 0.0])
        norms = analysis.killing_norm(c, v, 1.0, rs)
        header, rows = ("r", "v1", "v2", "norm"), ((t, v[0], v[1], n) for t, n in zip(rs, norms))
    else:
        x = action_coords(c, *analysis.interior_grid(c, *cfg.grid))
        s = analysis.scalar_curvature(c, x, fd_step=cfg.fd_step)
        header, rows = ("x1", "x2", "s"), zip(x[:, 0], x[:, 1], s)
    fh = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])
    finally:
        if cfg.out:
            fh.close()
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "build": cmd_build, "verify": cmd_verify,
            "oracle-compare": cmd_oracle_compare, "plotdata": cmd_plotdata}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", type=Path, help="polygon spec (JSON)")
    common.add_argument("--tol-curvature", type=float, default=analysis.CURVATURE_TOL)
    common.add_argument("--tol-oracle", type=float, default=1e-7)
    common.add_argument("--fd-step", type=float, default=analysis.FD_STEP,
                        help="relative finite-difference step for curvature")
    common.add_argument("--out", type=Path, default=None)

    parser = argparse.ArgumentParser(prog="sfk", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a polygon spec")
    for name, n, helptext in (("build", 20, "write chart metadata and a metric grid"),
                              ("verify", 5, "run every numerical check"),
                              ("oracle-compare", 15, "compare with closed-form potentials")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--grid", type=int, nargs=2, default=(n, n), metavar=("N_H", "N_R"))
        if name == "build":
            p.add_argument("--H-range", type=float, nargs=2, default=None, dest="H_range")
            p.add_argument("--r-range", type=float, nargs=2, default=None, dest="r_range")
    p = sub.add_parser("plotdata", parents=[common], help="write columnar plot data")
    p.add_argument("--what", choices=PLOT_KINDS, required=True)
    p.add_argument("--grid", type=int, nargs=2, default=(5, 5), metavar=("N_H", "N_R"))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(spec=args.spec, command=args.command,
                        grid=tuple(getattr(args, "grid", (2, 2))),
                        H_range=tuple(args.H_range) if getattr(args, "H_range", None) else None,
                        r_range=tuple(args.r_range) if getattr(args, "r_range", None) else None,
                        tol_curvature=args.tol_curvature, tol_oracle=args.tol_oracle,
                        fd_step=args.fd_step, out=args.out, what=getattr(args, "what", None))
        return COMMANDS[args.command](cfg)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NoOracleForPolygon, NotStrictlyUnbounded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SFKError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
