"""Command line front end: ``kairon {verify,propagate,inner-product,transform}``.

Exit codes: 0 success (all checks pass), 1 at least one check failed,
2 configuration or usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import numpy as np

from . import __version__
from . import geometry as geo
from . import poincare
from .config import ConfigError, RunConfig, default_config, load, validate
from .current import NonCompactDataError, inner_product
from .expr import ExpressionError
from .field import InitialData, KaironField, TimeAxis
from .sphere import build_quadrature, integrate_values, node_blocks
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_config(args) -> RunConfig:
    if args.config:
        cfg = load(args.config)
    else:
        cfg = default_config(args.m)
    if args.seed is not None:
        raw = dict(cfg.raw, seed=args.seed)
        cfg = validate(raw, cfg.source)
    return cfg


def _write(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: np.ndarray, comment: str) -> str:
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt="%.17g", delimiter=",", header=comment + "\n" + ",".join(header), comments="")
    return buf.getvalue()


def _chunks(n: int, size: int):
    return [slice(k, min(k + size, n)) for k in range(0, n, size)]


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    report = run_suite(cfg, args.tolerance_scale, args.threads)
    _write(_json(report), args.out)
    for r in report["records"]:
        if not r["pass"]:
            print(f"FAIL {r['name']}: residual {r['residual']:.3e} > tolerance {r['tolerance']:.3e}", file=sys.stderr)
    s = report["summary"]
    print(f"{s['passed']}/{s['total']} checks passed (m={cfg.m})", file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def snapshot_table(fld: KaironField, cfg: RunConfig, threads: int = 1):
    """Header and rows for a field snapshot on the configured grid."""
    snap = cfg.snapshot()
    pts = snap.points()
    coords = ["x0"] + [f"x{k + 1}" for k in range(cfg.m)]
    blocks = _chunks(pts.shape[0], 4096)
    if snap.mode == "fixed":
        W = snap.directions

        def fixed(blk):
            return np.stack([fld(pts[blk], np.broadcast_to(w, (pts[blk].shape[0], cfg.m))) for w in W], axis=-1)

        vals = np.concatenate(_map(fixed, blocks, threads))
        names = [f"psi_w{k}" for k in range(W.shape[0])]
    else:
        quad = build_quadrature(cfg.m, cfg.quad_resolution("sphere"))

        def intensity(blk):
            P = pts[blk]
            per = np.empty((P.shape[0], quad.size))
            for nb in node_blocks(quad, P.shape[0]):
                per[:, nb] = fld(P[:, None, :], quad.nodes[None, nb, :]) ** 2
            return np.array([integrate_values(quad, row) for row in per])[:, None]

        vals = np.concatenate(_map(intensity, blocks, threads))
        names = ["intensity"]
    comment = f"# kairon {__version__} m={cfg.m} mode={snap.mode} config_sha256={cfg.sha256}"
    if snap.mode == "fixed":
        comment += " directions=" + ";".join(" ".join(f"{c:.17g}" for c in w) for w in snap.directions)
    return coords + names, np.concatenate([pts, vals], axis=1), comment


def cmd_propagate(args) -> int:
    cfg = _load_config(args)
    data = InitialData.from_expression(cfg.expression("expression"), cfg.support("support"))
    fld = KaironField(cfg.worldline(), data)
    header, rows, comment = snapshot_table(fld, cfg, args.threads)
    _write(_csv(header, rows, comment), args.out)
    return EXIT_OK


def cmd_inner_product(args) -> int:
    cfg = _load_config(args)
    wls = cfg.worldlines()
    if not wls:
        raise UsageError("worldlines: need at least one integration path")
    data = InitialData.from_expression(cfg.expression("expression"), cfg.support("support"))
    window = cfg.s_window()
    if len(wls) > 1 and not data.compact:
        raise UsageError("multi-path mode needs compactly supported initial data (set initial_data.support)")
    if not data.compact and window is None:
        raise UsageError("non-compact initial data need inner_product.s_window")
    fld = KaironField(TimeAxis(cfg.m), data)
    quad = build_quadrature(cfg.m, cfg.quad_resolution("sphere"))
    steps = cfg.quad_resolution("s_steps")
    # with compact data the window is derived from the support on each path
    win = window if not data.compact else None
    values = _map(lambda wl: inner_product(fld, fld, wl, quad, win, steps), wls, args.threads)
    defects = [
        {"a": i, "b": j, "relative_defect": abs(values[i] - values[j]) / abs(values[i])}
        for i, j in combinations(range(len(wls)), 2)
    ]
    out = {
        "version": __version__,
        "config_sha256": cfg.sha256,
        "m": cfg.m,
        "worldlines": [{"index": k, "name": getattr(wl, "name", type(wl).__name__), "value": v} for k, (wl, v) in enumerate(zip(wls, values))],
        "pairwise": defects,
        "max_relative_defect": max((d["relative_defect"] for d in defects), default=0.0),
    }
    _write(_json(out), args.out)
    return EXIT_OK


def _inverse_transform(t):
    t = np.asarray(t)
    return geo.inverse(t) if t.ndim == 2 else -t


def cmd_transform(args) -> int:
    cfg = _load_config(args)
    chain = cfg.transforms()
    state = poincare.AxisState.from_expression(cfg.expression("expression"), cfg.support("support"))
    quad = build_quadrature(cfg.m, cfg.quad_resolution("sphere"))
    rule = poincare.TimeRule(cfg.quad_resolution("t_steps"))
    moved = state
    for t in chain:
        moved = poincare.apply(moved, t)
    back = moved
    for t in reversed(chain):
        back = poincare.apply(back, _inverse_transform(t))
    before = poincare.norm_squared(state, quad, rule)
    after = poincare.norm_squared(moved, quad, rule)
    rng = np.random.default_rng(cfg.seed)
    x0 = rng.uniform(-3.0, 3.0, 1000)
    w = geo.random_direction(rng, cfg.m, 1000)
    out = {
        "version": __version__,
        "config_sha256": cfg.sha256,
        "m": cfg.m,
        "chain_length": len(chain),
        "norm_before": before,
        "norm_after": after,
        "defect": abs(after - before) / before,
        "inverse_roundtrip_max_diff": float(np.max(np.abs(back(x0, w) - state(x0, w)))),
    }
    if args.snapshot:
        header, rows, comment = snapshot_table(moved.as_field(), cfg, args.threads)
        _write(_csv(header, rows, comment + " transformed_state=1"), args.snapshot)
        out["snapshot"] = args.snapshot
    _write(_json(out), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration (default: packaged config for --m)")
    common.add_argument("--m", type=int, choices=(1, 2, 3), default=2, help="spatial dimension of the packaged default config")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads (results are identical to sequential)")
    common.add_argument("--tolerance-scale", type=_positive_float, default=1.0, metavar="X", help="multiply every tolerance by X")

    p = argparse.ArgumentParser(prog="kairon", description="Kairon fields on flat Minkowski space.")
    p.add_argument("--version", action="version", version=f"kairon {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the invariant suite and write a JSON report").set_defaults(func=cmd_verify)
    sub.add_parser("propagate", parents=[common], help="write a CSV field snapshot").set_defaults(func=cmd_propagate)
    sub.add_parser("inner-product", parents=[common], help="inner product along one or more worldlines").set_defaults(func=cmd_inner_product)
    t = sub.add_parser("transform", parents=[common], help="apply a Poincare chain and report the unitarity defect")
    t.add_argument("--snapshot", metavar="PATH", help="also write a CSV snapshot of the transformed field")
    t.set_defaults(func=cmd_transform)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, UsageError, ExpressionError, NonCompactDataError, geo.DomainError, geo.DimensionError) as exc:
        print(f"kairon {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kairon {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
