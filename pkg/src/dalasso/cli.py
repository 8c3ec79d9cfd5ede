"""Command-line entry point: ``dalasso {generate,sample,bounds,diagnose,oracle}``.

Exit status is 0 on success, 1 on a parameter error and 2 on a numeric
failure (including any aborted chain).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bounds import full_report
from .diagnostics import diagnose
from .errors import NumericError, ParameterError
from .models import KINDS
from .oracle import MAX_N, quadrature_oracle
from .sampler import PointMass, run
from .synthetic import generate_synthetic

log = logging.getLogger("dalasso")


def _cmd_generate(args) -> int:
    data = generate_synthetic(args.kind, args.n, args.p, args.lambda_true, args.sparsity,
                              args.seed, theta=args.theta, gamma=args.gamma)
    io.write_dataset(data, args.out)
    log.info("wrote %s and %s", args.out, io.sidecar_path(args.out))
    return 0


def _cmd_sample(args) -> int:
    data = io.read_dataset(args.data)
    config = io.read_config(args.config)
    init = PointMass(p=data.p) if args.init == "zero" else None
    store = run(data, config, init)
    io.write_samples(store, args.out)
    io.write_json(store.summary(), Path(args.out).with_suffix(".json"))
    for rec in store.chains:
        log.info("chain %d: %d draws, %.3fs wall clock", rec.chain, rec.draw_count,
                 rec.wall_seconds)
    if store.failures:
        log.error("%d chain(s) aborted on numeric failure", len(store.failures))
        return 2
    return 0


def _cmd_bounds(args) -> int:
    data = io.read_dataset(args.data)
    report = full_report(data, c1=args.c1, eps_bar=args.eps_bar)
    io.write_json(report.to_dict(), args.out)
    return 0


def _cmd_diagnose(args) -> int:
    store = io.read_samples(args.samples)
    oracle = None
    if args.data is not None:
        data = io.read_dataset(args.data)
        if data.p == 1 and data.n <= MAX_N:
            oracle = quadrature_oracle(data, resolution=args.resolution)
        else:
            log.warning("oracle comparison skipped (needs p = 1 and n <= %d)", MAX_N)
    report = diagnose(store, oracle, bins=args.bins)
    io.write_json(report.to_dict(), args.out)
    return 0


def _cmd_oracle(args) -> int:
    data = io.read_dataset(args.data)
    grid = quadrature_oracle(data, resolution=args.resolution)
    (alo, ahi), (blo, bhi) = grid.bounds
    out = {
        "resolution": grid.resolution,
        "bounds": {"alpha": [alo, ahi], "b1": [blo, bhi]},
        "mode": grid.mode.tolist(),
        "mean": grid.mean().tolist(),
        "total_mass": float(grid.cell_mass.sum()),
        "alpha_nodes": grid.alpha_nodes.tolist(),
        "alpha_marginal_density": grid.marginal_density(0).tolist(),
        "b1_nodes": grid.beta_nodes.tolist(),
        "b1_marginal_density": grid.marginal_density(1).tolist(),
    }
    if args.full_grid:
        out["log_density"] = np.asarray(grid.log_density).tolist()
    io.write_json(out, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dalasso", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a dataset")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--lambda-true", type=float, default=1.0)
    g.add_argument("--sparsity", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--theta", type=float, default=1.0)
    g.add_argument("--gamma", type=float, default=1.0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("sample", help="run the DA sampler")
    s.add_argument("--data", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--init", choices=("warm", "zero"), default="warm")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sample)

    b = sub.add_parser("bounds", help="compute convergence certificates")
    b.add_argument("--data", required=True)
    b.add_argument("--c1", type=float, default=1.0)
    b.add_argument("--eps-bar", type=float, default=0.01)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_bounds)

    d = sub.add_parser("diagnose", help="ESS, ACF and TV to the quadrature oracle")
    d.add_argument("--samples", required=True)
    d.add_argument("--data")
    d.add_argument("--bins", type=int, default=20)
    d.add_argument("--resolution", type=int, default=400)
    d.add_argument("--out", required=True)
    d.set_defaults(func=_cmd_diagnose)

    o = sub.add_parser("oracle", help="quadrature posterior for p = 1 data")
    o.add_argument("--data", required=True)
    o.add_argument("--resolution", type=int, default=400)
    o.add_argument("--full-grid", action="store_true")
    o.add_argument("--out", required=True)
    o.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
