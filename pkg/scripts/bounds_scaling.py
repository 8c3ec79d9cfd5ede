"""How the certified quantities move with n and p.

Prints one row per (kind, n, p): sigma_max(X_lam^T X_lam), delta, D, rho,
log-warmness and the mixing-time budget, all at c1 = 1.

Usage: python scripts/bounds_scaling.py [--lam-rule sqrt] [--out results/scaling.json]
"""

import argparse
import math
from pathlib import Path

from dalasso import io
from dalasso.bounds import full_report
from dalasso.models import KINDS
from dalasso.synthetic import generate_synthetic

GRID = [(n, p) for n in (10, 50, 200, 1000) for p in (1, 5, 20)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lam-rule", choices=("one", "sqrt"), default="sqrt",
                    help="lambda = 1 or lambda = sqrt(n)")
    ap.add_argument("--c1", type=float, default=1.0)
    ap.add_argument("--eps-bar", type=float, default=0.01)
    ap.add_argument("--out", default="results/scaling.json")
    args = ap.parse_args()

    rows = []
    print(f"{'kind':16s} {'n':>5s} {'p':>3s} {'sigma':>10s} {'delta':>9s} {'D':>10s} "
          f"{'1-rho':>10s} {'logC~':>10s} {'t_mix':>12s}")
    for kind in KINDS:
        for n, p in GRID:
            lam = math.sqrt(n) if args.lam_rule == "sqrt" else 1.0
            data = generate_synthetic(kind, n, p, lam, 0.5, seed=n * 100 + p)
            r = full_report(data, c1=args.c1, eps_bar=args.eps_bar)
            rows.append({"kind": kind, "n": n, "p": p, "lambda": lam, **r.to_dict()})
            print(f"{kind:16s} {n:5d} {p:3d} {r.sigma_max_scaled:10.3f} {r.delta:9.2e} "
                  f"{r.D:10.2f} {r.gap_lower:10.3e} {r.log_warmness:10.2f} {r.t_mix:12.3e}")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    io.write_json(rows, args.out)


if __name__ == "__main__":
    main()
