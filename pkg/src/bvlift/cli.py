"""Command-line front end: field generation, lifting, energies, constants, checks.

Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 boundary data that is not a lifting of the field, 4 under-resolved
mollifier.  Outputs are written atomically (temp file + rename) and are byte
identical for identical (command, config, seed).
"""

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import constants as consts
from . import verify
from .fields import (GridField, Mollifier, avg_directional_energy,
                     embedded_tv, mollified_energy,
                     mollified_energy_extrapolated, read_field, write_field)
from .lifting import lift_1d, lift_rotation_search, lift_with_boundary

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BAD_BOUNDARY = 3
EXIT_UNDER_RESOLVED = 4

DEFAULT_CONFIG = {
    "seed": 0,
    "trials": 64,
    "directions": 64,
    "mollifier_eps_over_h": [8, 16, 32],
    "jump_threshold": None,
    "metric": "geodesic",
    "output_dir": ".",
    "threads": None,
}


def _load_config(path, args):
    cfg = dict(DEFAULT_CONFIG)
    if path:
        with open(path) as fh:
            user = json.load(fh)
        unknown = set(user) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    # explicit flags win over the config file
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["threads"] is None:
        cfg["threads"] = int(os.environ.get("BVLIFT_THREADS",
                                            os.cpu_count() or 1))
    return cfg


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".bvlift-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_field_atomic(field, path):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".bvlift-")
    os.close(fd)
    try:
        write_field(field, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_make_field(args):
    kind = args.kind
    if kind == "halfvortex":
        f = verify.make_half_vortex(args.grid, d=args.d, N=args.N)
    elif kind == "halfvortex-lift":
        f = verify.make_half_vortex_lifting(args.grid, d=args.d, N=args.N)
    elif kind == "constant":
        vals = np.zeros((args.grid, args.grid, args.d))
        vals[..., 0] = 1.0
        f = GridField((args.grid, args.grid), 1.0 / args.grid, (0.0, 0.0),
                      "proj", vals)
    elif kind == "jump":
        h = 1.0 / args.grid
        c = (np.arange(args.grid) + 0.5) * h - 0.5
        X, _ = np.meshgrid(c, c, indexing="ij")
        g = np.where(X < 0, 0.0, np.pi / 2)
        vals = np.zeros((args.grid, args.grid, args.d))
        vals[..., 0] = np.cos(g)
        vals[..., 1] = np.sin(g)
        f = GridField((args.grid, args.grid), h, (-0.5, -0.5), "proj", vals)
    elif kind == "smooth":
        h = 1.0 / args.grid
        c = (np.arange(args.grid) + 0.5) * h
        X, _ = np.meshgrid(c, c, indexing="ij")
        g = args.slope * X
        vals = np.zeros((args.grid, args.grid, args.d))
        vals[..., 0] = np.cos(g)
        vals[..., 1] = np.sin(g)
        f = GridField((args.grid, args.grid), h, (0.0, 0.0), "proj", vals)
    else:
        raise ValueError(f"unknown field kind {kind!r}")
    _write_field_atomic(f, args.output)
    print(f"wrote {args.output}: dims={f.dims} d={f.d} kind={f.kind}")
    return EXIT_OK


def cmd_energy(args):
    cfg = _load_config(args.config, args)
    try:
        f = read_field(args.input)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    metric = cfg["metric"]
    try:
        if args.estimator == "mollified":
            mults = cfg["mollifier_eps_over_h"]
            if args.no_extrapolation:
                rep = mollified_energy(f, Mollifier(mults[0] * f.spacing),
                                       metric)
            else:
                rep = mollified_energy_extrapolated(f, metric, mults)
        elif args.estimator == "directional":
            rep = avg_directional_energy(f, directions=cfg["directions"],
                                         seed=cfg["seed"], metric=metric)
        elif args.estimator == "embedded":
            rep = embedded_tv(f, metric, cfg["jump_threshold"])
        else:
            raise ValueError(f"unknown estimator {args.estimator!r}")
    except ValueError as e:
        msg = str(e)
        print(f"error: {msg}", file=sys.stderr)
        if "under-resolved" in msg:
            return EXIT_UNDER_RESOLVED
        return EXIT_BAD_INPUT
    sys.stdout.write(_json_dumps(rep.to_dict()))
    return EXIT_OK


def cmd_lift(args):
    cfg = _load_config(args.config, args)
    try:
        u = read_field(args.input)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    out = args.output or (os.path.splitext(args.input)[0] + ".lifted.fld")
    sidecar = os.path.splitext(out)[0] + ".json"

    if args.mode == "greedy1d":
        if u.N != 1:
            print("error: greedy1d requires a one-dimensional field",
                  file=sys.stderr)
            return EXIT_BAD_INPUT
        lifted = lift_1d(u.values)
        n = u.with_values(lifted, kind="unit")
        from .fields import metric_distance
        dist_s = metric_distance("geodesic", "unit")(lifted[:-1], lifted[1:])
        dist_p = metric_distance("geodesic", "proj")(u.values[:-1], u.values[1:])
        energy = {"total": float(dist_s.sum()), "metric": "geodesic",
                  "estimator": "embedded_tv", "ac_part": None,
                  "jump_part": None,
                  "params": {"projective_tv": float(dist_p.sum())}}
        side = {"mode": "greedy1d", "energy": energy, "rotation": None,
                "projection_check": 0.0}
    elif args.mode == "rotation":
        res = lift_rotation_search(u, trials=cfg["trials"], seed=cfg["seed"],
                                   metric=cfg["metric"])
        n = res.field
        side = {"mode": "rotation", "energy": res.energy.to_dict(),
                "rotation": [[float(x) for x in row] for row in res.rotation],
                "projection_check": res.projection_check}
    elif args.mode == "boundary":
        if not args.boundary:
            print("error: --boundary FILE is required for boundary mode",
                  file=sys.stderr)
            return EXIT_BAD_INPUT
        try:
            n0 = read_field(args.boundary)
        except (ValueError, OSError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_BAD_INPUT
        try:
            res = lift_with_boundary(u, n0, trials=cfg["trials"],
                                     seed=cfg["seed"])
        except ValueError as e:
            msg = str(e)
            print(f"error: {msg}", file=sys.stderr)
            if "not a lifting" in msg:
                return EXIT_BAD_BOUNDARY
            return EXIT_BAD_INPUT
        n = res.field
        side = {"mode": "boundary", "energy": res.energy.to_dict(),
                "rotation": None,
                "projection_check": res.projection_check}
    else:
        print(f"error: unknown mode {args.mode!r}", file=sys.stderr)
        return EXIT_BAD_INPUT

    _write_field_atomic(n, out)
    _atomic_write(sidecar, _json_dumps(side))
    print(f"wrote {out} and {sidecar}")
    return EXIT_OK


def cmd_constants(args):
    cfg = _load_config(args.config, args)
    table = {}

    def put(name, res):
        table[name] = {"value": res.value, "method": res.method,
                       "error_estimate": res.error_estimate,
                       "samples_or_nodes": res.samples_or_nodes}

    if args.k is not None:
        put(f"K_{args.k}", consts.k_const(args.k))
    if args.m is not None:
        put(f"M_{args.m}", consts.m_const(args.m))
    if args.ca is not None:
        Nv, dv = args.ca
        put(f"C_a_{Nv}_{dv}", consts.ca_const(Nv, dv, seed=cfg["seed"]))
    if args.cj is not None:
        emb = "tensor" if args.cj == "tensor" else args.cj
        put(f"C_j_{args.cj}", consts.cj_estimate(emb))
    if args.c1d:
        put("C_1d_tensor", consts.c1d_const())
    if args.psi is not None:
        put(f"psi_{args.psi:.6f}",
            consts.psi_estimate(args.psi, args.d, args.samples, cfg["seed"]))
    if args.avg_dist is not None:
        n = np.zeros(args.d)
        n[-1] = 1.0
        m = np.zeros(args.d)
        m[-1] = np.cos(args.avg_dist)
        m[-2] = np.sin(args.avg_dist)
        put(f"avg_lifted_dist_{args.avg_dist:.6f}",
            consts.avg_lifted_dist(n, m, args.samples, cfg["seed"]))
    if args.avg_jump is not None:
        put(f"avg_eucl_jump_{args.avg_jump:.6f}",
            consts.avg_eucl_jump(args.avg_jump, args.samples, cfg["seed"],
                                 args.d))
    if not table:
        print("error: no constants requested", file=sys.stderr)
        return EXIT_BAD_INPUT
    sys.stdout.write(_json_dumps(table))
    return EXIT_OK


def cmd_verify(args):
    cfg = _load_config(args.config, args)
    suites = {
        "halfvortex": lambda: verify.run_half_vortex_suite(
            grid=args.grid, trials=cfg["trials"], seed=cfg["seed"],
            csv_dir=args.csv_dir),
        "identities": lambda: verify.run_identity_suite(
            samples=args.samples, seed=cfg["seed"], csv_dir=args.csv_dir,
            threads=cfg["threads"]),
        "repr": lambda: verify.run_repr_formula_suite(
            seed=cfg["seed"], csv_dir=args.csv_dir),
        "diffuse": lambda: verify.run_diffuse_invariance_suite(
            seed=cfg["seed"], csv_dir=args.csv_dir),
    }
    if args.suite == "all":
        selected = list(suites)
    elif args.suite in suites:
        selected = [args.suite]
    else:
        print(f"error: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_BAD_INPUT
    reports = []
    for name in selected:
        reports += suites[name]()
    out = args.report or os.path.join(cfg["output_dir"], "report.json")
    payload = [r.to_dict() for r in reports]
    _atomic_write(out, _json_dumps(payload))
    n_fail = sum(1 for r in reports if not r.passed)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: measured={r.measured:.6g} "
              f"claimed={r.claimed:.6g} tol={r.tolerance:.3g} ({r.kind}) "
              f"[{r.runtime_ms} ms]", file=sys.stderr)
    print(f"report written to {out}: {len(reports) - n_fail}/{len(reports)} "
          f"checks passed", file=sys.stderr)
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILED


def build_parser():
    p = argparse.ArgumentParser(
        prog="bvlift",
        description="Total-variation energies and sphere-valued liftings of "
                    "line fields on grids")
    p.add_argument("--config", help="JSON config file; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    mk = sub.add_parser("make-field", help="generate test fields")
    mk.add_argument("--kind", required=True,
                    choices=["halfvortex", "halfvortex-lift", "constant",
                             "jump", "smooth"])
    mk.add_argument("--grid", type=int, default=256)
    mk.add_argument("--d", type=int, default=2)
    mk.add_argument("--N", type=int, default=2)
    mk.add_argument("--slope", type=float, default=1.2)
    mk.add_argument("-o", "--output", required=True)
    mk.set_defaults(fn=cmd_make_field)

    en = sub.add_parser("energy", help="energy of a field file")
    en.add_argument("input")
    en.add_argument("--estimator", default="embedded",
                    choices=["mollified", "directional", "embedded"])
    en.add_argument("--metric", choices=["geodesic", "euclidean_sphere",
                                         "euclidean_tensor"])
    en.add_argument("--directions", type=int)
    en.add_argument("--seed", type=int)
    en.add_argument("--jump-threshold", dest="jump_threshold", type=float)
    en.add_argument("--eps-over-h", dest="mollifier_eps_over_h",
                    type=lambda s: [float(x) for x in s.split(",")])
    en.add_argument("--no-extrapolation", action="store_true")
    en.set_defaults(fn=cmd_energy)

    lf = sub.add_parser("lift", help="compute a lifting of a line field")
    lf.add_argument("input")
    lf.add_argument("--mode", default="rotation",
                    choices=["rotation", "greedy1d", "boundary"])
    lf.add_argument("--trials", type=int)
    lf.add_argument("--seed", type=int)
    lf.add_argument("--metric", choices=["geodesic", "euclidean_sphere",
                                         "euclidean_tensor"])
    lf.add_argument("--boundary", help="unit field file with boundary data")
    lf.add_argument("-o", "--output")
    lf.set_defaults(fn=cmd_lift)

    co = sub.add_parser("constants", help="evaluate the optimality constants")
    co.add_argument("--k", type=int, help="spherical average of |omega.e|")
    co.add_argument("--m", type=int, help="averaged-distance constant M(d)")
    co.add_argument("--ca", type=int, nargs=2, metavar=("N", "D"))
    co.add_argument("--cj", help="'tensor' for the tensor embedding")
    co.add_argument("--c1d", action="store_true")
    co.add_argument("--psi", type=float, metavar="THETA")
    co.add_argument("--avg-dist", dest="avg_dist", type=float, metavar="THETA")
    co.add_argument("--avg-jump", dest="avg_jump", type=float, metavar="THETA")
    co.add_argument("--d", type=int, default=3)
    co.add_argument("--samples", type=int, default=1_000_000)
    co.add_argument("--seed", type=int)
    co.set_defaults(fn=cmd_constants)

    ve = sub.add_parser("verify", help="run the verification suites")
    ve.add_argument("--suite", default="all",
                    choices=["halfvortex", "identities", "repr", "diffuse",
                             "all"])
    ve.add_argument("--grid", type=int, default=256)
    ve.add_argument("--trials", type=int)
    ve.add_argument("--samples", type=int, default=1_000_000)
    ve.add_argument("--seed", type=int)
    ve.add_argument("--threads", type=int)
    ve.add_argument("--report", help="report path (default report.json)")
    ve.add_argument("--csv-dir", dest="csv_dir", help="directory for CSV traces")
    ve.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.fn(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_BAD_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
