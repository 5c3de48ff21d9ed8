"""Command-line entry point.

Subcommands: denoise, edges, synth, gamma, consistency, housing, plot.
Every run writes a JSON manifest next to its outputs; all RNG use is seeded
and reductions are ordered, so re-running a manifest reproduces outputs
bit-exactly.  Exit codes: 0 success, 2 validation failure, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .consistency import density_deviation_curve, dyadic_counterexample
from .continuum import SmoothCase, StepCase, gamma_experiment
from .core import PointCloud, SolverConfig, ValidationError, ZetaSpec
from .datasets import (
    DEFAULT_MAX_LONGITUDE,
    IngestError,
    generate_synthetic,
    ingest_housing,
    l1_error,
)
from .energy import SingularityError, objective_sec1, objective_sec6
from .graph import build_geometric_graph, load_graph, save_graph
from .solver import SolverError, detect_edges, irls_minimize

EXIT_VALIDATION = 2
EXIT_SOLVER = 3

ZETA_FLAGS = {"ms": "ms_arctan", "tv": "tv_smoothed", "lap": "quadratic"}


def _zeta_from_flags(args) -> ZetaSpec:
    kind = ZETA_FLAGS[args.zeta]
    if kind == "tv_smoothed":
        return ZetaSpec(kind, delta=args.delta)
    return ZetaSpec(kind)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return int(os.environ.get("GMS_THREADS", "1"))


def _write_manifest(path, command, args, inputs, outputs, seed, duration):
    manifest = {
        "command": command,
        "config": {k: v for k, v in vars(args).items() if k != "func"},
        "inputs": inputs,
        "outputs": outputs,
        "seed": seed,
        "duration_s": duration,
        "version": __version__,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def read_cloud_csv(path) -> PointCloud:
    """Read a point/label CSV with header x0,...,x{d-1}[,f]."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or not header[0].startswith("x0"):
            raise ValidationError(f"{path}: expected header x0,...,f")
        has_labels = header[-1] == "f"
        d = len(header) - (1 if has_labels else 0)
        rows = [list(map(float, row)) for row in reader if row]
    data = np.array(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValidationError(f"{path}: ragged rows")
    return PointCloud(points=data[:, :d], labels=data[:, d] if has_labels else None)


def write_cloud_csv(path, cloud: PointCloud) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        cols = [f"x{i}" for i in range(cloud.dim)]
        if cloud.labels is not None:
            cols.append("f")
        writer.writerow(cols)
        for i in range(cloud.n):
            row = [f"{v:.17g}" for v in cloud.points[i]]
            if cloud.labels is not None:
                row.append(f"{cloud.labels[i]:.17g}")
            writer.writerow(row)


def _write_values_csv(path, name, values) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(name + "\n")
        for v in values:
            fh.write(f"{v:.17g}\n")


def _read_values_csv(path) -> np.ndarray:
    with open(path) as fh:
        next(fh)  # header
        return np.array([float(line) for line in fh if line.strip()])


def _solver_config(args, seed=None) -> SolverConfig:
    return SolverConfig(
        lam=args.lam,
        eps=args.eps,
        sigma=args.sigma,
        k_max=args.k,
        cg_tol=args.cg_tol,
        irls_tol=args.irls_tol,
        irls_max_iter=args.irls_max_iter,
        seed=seed if seed is not None else getattr(args, "seed", 0),
        cutoff_multiplier=args.cutoff,
    )


def cmd_denoise(args) -> int:
    t0 = time.time()
    cloud = read_cloud_csv(args.input)
    if cloud.labels is None:
        raise ValidationError("--input must carry labels (an 'f' column)")
    spec = _zeta_from_flags(args)
    config = _solver_config(args)
    graph = build_geometric_graph(cloud, config, workers=_threads(args))
    solution = irls_minimize(graph, cloud.labels, spec, config)
    _write_values_csv(args.out, "u", solution.u)
    outputs = [args.out]
    if args.trace:
        with open(args.trace, "w") as fh:
            for entry in solution.energy_trace:
                fh.write(json.dumps(entry) + "\n")
        outputs.append(args.trace)
    if args.graph_out:
        save_graph(graph, args.graph_out)
        outputs.append(args.graph_out)
    if args.truth:
        truth = _read_values_csv(args.truth)
        print(f"l1_error {l1_error(solution.u, truth):.6f}")
    if args.sec1:
        e = objective_sec1(graph, solution.u, cloud.labels, spec, args.lam, args.eps)
    else:
        e = objective_sec6(graph, solution.u, cloud.labels, spec, args.lam, args.eps)
    print(
        f"energy[{e.parameterization}] fidelity={e.fidelity:.9g} "
        f"regularizer={e.regularizer:.9g} total={e.total:.9g}"
    )
    _write_manifest(
        args.out + ".manifest.json", "denoise", args, [args.input], outputs,
        args.seed, time.time() - t0,
    )
    print(
        f"denoise: n={cloud.n} edges={graph.n_edges} iterations={solution.iterations} "
        f"converged={solution.converged}"
    )
    return 0


def cmd_edges(args) -> int:
    t0 = time.time()
    graph = load_graph(args.graph)
    u = _read_values_csv(args.solution)
    if len(u) != graph.n:
        raise ValidationError(
            f"solution length {len(u)} does not match graph vertex count {graph.n}"
        )
    flagged = detect_edges(graph, u, args.jump)
    with open(args.out, "w", newline="") as fh:
        fh.write("i,j,jump\n")
        for i, j in flagged:
            fh.write(f"{i},{j},{abs(u[i] - u[j]):.17g}\n")
    _write_manifest(
        args.out + ".manifest.json", "edges", args, [args.graph, args.solution],
        [args.out], 0, time.time() - t0,
    )
    print(f"edges: {len(flagged)} flagged")
    return 0


def cmd_synth(args) -> int:
    t0 = time.time()
    case = generate_synthetic(args.n, args.noise, args.seed)
    write_cloud_csv(args.out, case.cloud)
    truth_path = args.truth_out or (args.out + ".truth.csv")
    _write_values_csv(truth_path, "truth", case.truth)
    _write_manifest(
        args.out + ".manifest.json", "synth", args, [], [args.out, truth_path],
        args.seed, time.time() - t0,
    )
    print(f"synth: wrote {case.cloud.n} samples")
    return 0


def cmd_gamma(args) -> int:
    t0 = time.time()
    if args.case == "smooth":
        case = SmoothCase()
    else:
        case = StepCase()
    n_list = [int(s) for s in args.n.split(",")]
    spec = _zeta_from_flags(args)
    rows = gamma_experiment(
        case, n_list, spec, p=args.p, q=args.q, seed=args.seed,
        sigma=args.sigma, cutoff_multiplier=args.cutoff,
    )
    with open(args.out, "w", newline="") as fh:
        fh.write("n,eps,discrete,continuum,ratio,seed\n")
        for r in rows:
            fh.write(
                f"{r['n']},{r['eps']:.17g},{r['discrete']:.17g},"
                f"{r['continuum']:.17g},{r['ratio']:.17g},{r['seed']}\n"
            )
    _write_manifest(
        args.out + ".manifest.json", "gamma", args, [], [args.out],
        args.seed, time.time() - t0,
    )
    for r in rows:
        print(f"n={r['n']} eps={r['eps']:.4f} ratio={r['ratio']:.4f}")
    return 0


def cmd_consistency(args) -> int:
    t0 = time.time()
    outputs = []
    if args.mode in ("binning", "both"):
        n_list = [int(s) for s in args.n.split(",")]
        rows = density_deviation_curve(n_list, d=args.d, seed=args.seed)
        path = args.out + ".binning.csv"
        with open(path, "w", newline="") as fh:
            fh.write("n,delta,sup_deviation,ell,eps,ell_over_eps,seed\n")
            for r in rows:
                fh.write(
                    f"{r['n']},{r['delta']:.17g},{r['sup_deviation']:.17g},"
                    f"{r['ell']:.17g},{r['eps']:.17g},{r['ell_over_eps']:.17g},{r['seed']}\n"
                )
        outputs.append(path)
        for r in rows:
            print(f"n={r['n']} sup|density-1|={r['sup_deviation']:.4f}")
    if args.mode in ("counterexample", "both"):
        path = args.out + ".counterexample.jsonl"
        with open(path, "w") as fh:
            for k in [int(s) for s in args.k.split(",")]:
                res = dyadic_counterexample(k, alpha=args.alpha, d=args.counter_d)
                fh.write(
                    json.dumps({"k": res["k"], "d": res["d"], "l1": res["l1"],
                                "energy": res["energy"], "max_u": res["max_u"]})
                    + "\n"
                )
                print(f"k={k} l1={res['l1']:.4f} energy={res['energy']:.4f}")
        outputs.append(path)
    _write_manifest(
        args.out + ".manifest.json", "consistency", args, [], outputs,
        args.seed, time.time() - t0,
    )
    return 0


def cmd_housing(args) -> int:
    t0 = time.time()
    cloud = ingest_housing(args.input, args.max_longitude, normalize=not args.raw_labels)
    print(f"housing: {cloud.n} records ingested")
    spec = _zeta_from_flags(args)
    config = _solver_config(args)
    graph = build_geometric_graph(cloud, config, workers=_threads(args))
    solution = irls_minimize(graph, cloud.labels, spec, config)
    _write_values_csv(args.out, "u", solution.u)
    points_path = args.out + ".points.csv"
    write_cloud_csv(points_path, cloud)
    _write_manifest(
        args.out + ".manifest.json", "housing", args, [args.input],
        [args.out, points_path], args.seed, time.time() - t0,
    )
    print(
        f"housing: edges={graph.n_edges} iterations={solution.iterations} "
        f"converged={solution.converged} ({time.time() - t0:.1f}s)"
    )
    return 0


# Fixed color ramp for the SVG scatter: linear blue (low) to red (high).
def _ramp(v: float) -> str:
    v = min(max(v, 0.0), 1.0)
    r = int(round(255 * v))
    b = int(round(255 * (1.0 - v)))
    return f"#{r:02x}40{b:02x}"


def render_svg(points, values, edge_list, out_path, size: int = 800, margin: int = 20):
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(points) != len(values):
        raise ValidationError("points and values must have equal length")
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    span[span == 0] = 1.0
    scale = (size - 2 * margin) / span.max()

    def to_px(pt):
        x = margin + (pt[0] - lo[0]) * scale
        y = size - margin - (pt[1] - lo[1]) * scale
        return x, y

    vmin, vmax = float(values.min()), float(values.max())
    vspan = vmax - vmin if vmax > vmin else 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for i, j in edge_list:
        if not (0 <= i < len(points) and 0 <= j < len(points)):
            raise ValidationError(f"edge ({i}, {j}) out of range")
        x1, y1 = to_px(points[i])
        x2, y2 = to_px(points[j])
        parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            'stroke="red" stroke-width="1.5"/>'
        )
    for pt, v in zip(points, values):
        x, y = to_px(pt)
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="{_ramp((v - vmin) / vspan)}"/>'
        )
    parts.append("</svg>")
    with open(out_path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_plot(args) -> int:
    t0 = time.time()
    cloud = read_cloud_csv(args.points)
    values = _read_values_csv(args.values) if args.values else cloud.labels
    if values is None:
        raise ValidationError("--values required when the points file has no labels")
    if len(values) != cloud.n:
        raise ValidationError("values length does not match point count")
    edge_list = []
    if args.edges:
        with open(args.edges) as fh:
            next(fh)
            for line in fh:
                if line.strip():
                    i, j = line.split(",")[:2]
                    edge_list.append((int(i), int(j)))
    render_svg(cloud.points, values, edge_list, args.out)
    _write_manifest(
        args.out + ".manifest.json", "plot", args,
        [p for p in (args.points, args.values, args.edges) if p], [args.out],
        0, time.time() - t0,
    )
    print(f"plot: wrote {args.out}")
    return 0


def _add_solver_flags(p):
    p.add_argument("--zeta", choices=sorted(ZETA_FLAGS), default="ms")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--delta", type=float, default=0.001, help="tv smoothing offset")
    p.add_argument("--cutoff", type=float, default=3.0, help="truncation radius / (sigma eps)")
    p.add_argument("--cg-tol", type=float, default=1e-8)
    p.add_argument("--irls-tol", type=float, default=1e-6)
    p.add_argument("--irls-max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0)
    p.add_argument(
        "--sec1", action="store_true",
        help="report the final energy in the published-form scaling instead of the solver's",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gms", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("denoise", help="minimize the graph Mumford-Shah objective on labeled points")
    p.add_argument("--input", required=True, help="points CSV with labels")
    p.add_argument("--out", required=True, help="output u CSV")
    p.add_argument("--trace", help="energy trace JSONL")
    p.add_argument("--graph-out", help="save the constructed graph edge list")
    p.add_argument("--truth", help="truth sidecar CSV; prints the L1 error")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("edges", help="flag edges with large jumps in a solution")
    p.add_argument("--solution", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--jump", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("synth", help="generate the synthetic piecewise-planar benchmark")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gamma", help="discrete-vs-continuum energy ratio experiment")
    p.add_argument("--case", choices=["smooth", "step"], required=True)
    p.add_argument("--n", default="1000,4000,16000", help="comma-separated sample sizes")
    p.add_argument("--zeta", choices=sorted(ZETA_FLAGS), default="ms")
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=None, help="kernel width (case default if omitted)")
    p.add_argument("--cutoff", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("consistency", help="binned-measure convergence and the spike counterexample")
    p.add_argument("--mode", choices=["binning", "counterexample", "both"], default="both")
    p.add_argument("--n", default="1000,10000,100000")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", default="3,4,5")
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--counter-d", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path stem")
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("housing", help="denoise price-per-square-foot records")
    p.add_argument("--input", required=True, help="housing CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--max-longitude", type=float, default=DEFAULT_MAX_LONGITUDE)
    p.add_argument("--raw-labels", action="store_true", help="skip max-normalization")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_housing)
    # paper-matched defaults for the housing run
    p.set_defaults(eps=0.04, lam=14.0, sigma=1.0, k=15)

    p = sub.add_parser("plot", help="SVG scatter of values with flagged edges")
    p.add_argument("--points", required=True)
    p.add_argument("--values")
    p.add_argument("--edges")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, IngestError, SingularityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
