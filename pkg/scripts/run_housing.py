#!/usr/bin/env python3
"""Denoise price-per-square-foot labels from a housing CSV.

Expects columns long, lat, price, sqft_living.  Records east of the longitude
cutoff or missing square footage are dropped; labels are price per square
foot normalized by the dataset maximum.
"""

import argparse
import sys
import time

from gms.core import SolverConfig, ZetaSpec
from gms.datasets import DEFAULT_MAX_LONGITUDE, IngestError, ingest_housing
from gms.graph import build_geometric_graph
from gms.solver import irls_minimize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("--out", default="housing_u.csv")
    ap.add_argument("--eps", type=float, default=0.04)
    ap.add_argument("--lambda", dest="lam", type=float, default=14.0)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--k", type=int, default=15)
    ap.add_argument("--max-longitude", type=float, default=DEFAULT_MAX_LONGITUDE)
    args = ap.parse_args()

    try:
        cloud = ingest_housing(args.csv_path, max_longitude=args.max_longitude)
    except (IngestError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{cloud.n} usable records")
    config = SolverConfig(lam=args.lam, eps=args.eps, sigma=args.sigma, k_max=args.k)
    t0 = time.time()
    graph = build_geometric_graph(cloud, config)
    sol = irls_minimize(graph, cloud.labels, ZetaSpec("ms_arctan"), config)
    print(
        f"edges={graph.n_edges} iterations={sol.iterations} "
        f"converged={sol.converged} ({time.time() - t0:.1f}s)"
    )
    with open(args.out, "w") as fh:
        fh.write("u\n")
        for v in sol.u:
            fh.write(f"{v:.17g}\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
