"""Command-line entry point.

Every subcommand prints flat ``key=value`` lines (or one JSON object
with ``--json``) and optionally writes CSV files.  Exit codes: 0 on
success, 1 on usage errors, 2 on data errors, with the offending file
named in the message.  All floats print as %.17g so reruns with equal
flags are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .barycenter import frechet_mean, wasserstein2
from .bottleneck import bottleneck_distance
from .diagram import (
    PersistenceDiagram,
    cap_essential,
    drop_essential,
    read_diagram,
    write_diagram,
)
from .dilation import di_dissimilarity, fine_grid_bruteforce, tightened_interval
from .errors import EmptyInput
from .logshift import di_distance
from .metric_spaces import (
    cdf_euclidean,
    cdf_poincare,
    edge_cdf,
    ks_deviation,
    sample_circle,
)
from .retrieval import classify as _classify
from .retrieval import build_templates, evaluate as _evaluate
from .vr_persistence import (
    DEFAULT_MAX_SIMPLICES,
    distance_matrix,
    persistence,
    read_distance_matrix,
    read_point_cloud,
    vr_filtration,
)

_DATA_ERRORS = (ValueError, RuntimeError, OSError)


@dataclass(frozen=True)
class BenchmarkRecord:
    """One timed dissimilarity evaluation.

    method is direct-search (grid of exact bottleneck evaluations) or
    brute-fine-grid (matching enumeration on a dense grid, tiny inputs
    only); values of the two methods agree within the direct-search
    error bound.
    """

    n_points: int
    wall_seconds: float
    method: str
    value: float


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _emit(result: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(result))
    else:
        for k, v in result.items():
            print(f"{k}={_fmt(v)}")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, int(args.threads))
    env = os.environ.get("TDIR_THREADS", "")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _load_diagram(path, args) -> PersistenceDiagram:
    dgm = read_diagram(path)
    if getattr(args, "drop_essential", False):
        return drop_essential(dgm)
    cap = getattr(args, "cap_essential", None)
    if cap is not None and dgm.has_unbounded:
        value = "max" if cap == "max" else float(cap)
        return cap_essential(dgm, value)
    return dgm


def _load_dataset(dirpath) -> dict:
    """Dataset directory: one subdirectory per class of point-cloud CSVs."""
    if not os.path.isdir(dirpath):
        raise EmptyInput(f"dataset directory not found: {dirpath}")
    dataset = {}
    for entry in sorted(os.listdir(dirpath)):
        sub = os.path.join(dirpath, entry)
        if not os.path.isdir(sub):
            continue
        clouds = [
            read_point_cloud(os.path.join(sub, f))
            for f in sorted(os.listdir(sub))
            if f.endswith(".csv")
        ]
        if not clouds:
            raise EmptyInput(f"class directory {sub} has no point-cloud CSVs")
        dataset[entry] = np.vstack(clouds)
    if not dataset:
        raise EmptyInput(f"no class subdirectories in {dirpath}")
    return dataset


def _cmd_ph(args) -> dict:
    if args.input_type == "matrix":
        space = read_distance_matrix(args.input)
    else:
        space = distance_matrix(read_point_cloud(args.input), args.metric)
    filt = vr_filtration(space, max_dim=args.max_dim, max_radius=args.max_radius,
                         max_simplices=args.max_simplices)
    dgm = persistence(filt)
    if args.out:
        write_diagram(dgm, args.out)
    result = {
        "n_points": space.n,
        "n_simplices": sum(filt.counts()),
        "n_diagram_points": len(dgm),
        "n_essential": sum(1 for p in dgm if math.isinf(p.death)),
    }
    for d in sorted(dgm.dims):
        result[f"n_dim{d}"] = sum(1 for p in dgm if p.dim == d)
    return result


def _cmd_bottleneck(args) -> dict:
    A = _load_diagram(args.a, args)
    B = _load_diagram(args.b, args)
    return {"distance": bottleneck_distance(A, B, mix_dims=args.mix_dims)}


def _cmd_di_dissim(args) -> dict:
    A = _load_diagram(args.a, args)
    B = _load_diagram(args.b, args)
    res = di_dissimilarity(A, B, partitions=args.partitions,
                           mix_dims=args.mix_dims, threads=_threads(args),
                           refine=args.refine)
    if args.report_curve:
        _write_csv(args.report_curve, ["t", "theta"], res.curve)
    return {
        "value": res.value,
        "c_star": res.c_star,
        "c_min": res.interval.c_min,
        "c_max": res.interval.c_max,
        "d0": res.interval.d0,
        "partitions": res.partitions,
        "error_bound": res.error_bound,
    }


def _cmd_di_dist(args) -> dict:
    A = _load_diagram(args.a, args)
    B = _load_diagram(args.b, args)
    res = di_distance(A, B, partitions=args.partitions, epsilon=args.epsilon,
                      crop_below=args.crop_below, mix_dims=args.mix_dims)
    return {
        "value": res.value,
        "s_star": res.s_star,
        "s_min": res.interval.s_min,
        "s_max": res.interval.s_max,
        "partitions": res.partitions,
        "error_bound": res.error_bound,
    }


def _cmd_wasserstein(args) -> dict:
    A = _load_diagram(args.a, args)
    B = _load_diagram(args.b, args)
    return {"distance": wasserstein2(A, B)}


def _cmd_frechet_mean(args) -> dict:
    diagrams = [_load_diagram(p, args) for p in args.diagrams]
    mean, history = frechet_mean(diagrams, max_iter=args.max_iter, tol=args.tol,
                                 return_history=True)
    if args.out:
        write_diagram(mean, args.out)
    return {
        "n_points": len(mean),
        "f_value": history[-1],
        "iterations": len(history) - 1,
    }


def _cmd_cdf(args) -> dict:
    pts = sample_circle(args.radius, args.samples, args.seed)
    space = distance_matrix(pts, args.metric)
    if args.metric == "euclidean":
        model = cdf_euclidean
    else:
        model = lambda t: cdf_poincare(t, args.radius)  # noqa: E731
    ecdf = edge_cdf(space)
    if args.out:
        rows = [(t, f, model(t)) for t, f in ecdf]
        _write_csv(args.out, ["threshold", "empirical", "theoretical"], rows)
    return {
        "metric": args.metric,
        "radius": args.radius,
        "samples": args.samples,
        "pairs": ecdf.shape[0],
        "sup_deviation": ks_deviation(space, model),
    }


def _load_templates(args):
    path = args.templates
    if not os.path.isdir(path):
        raise EmptyInput(f"template directory not found: {path}")
    subdirs = [e for e in sorted(os.listdir(path))
               if os.path.isdir(os.path.join(path, e))]
    if subdirs:
        dataset = _load_dataset(path)
        return build_templates(dataset, m=args.m, B=args.B, seed=args.seed,
                               metric=args.metric, max_dim=args.max_dim,
                               max_simplices=args.max_simplices)
    from .retrieval import ClassTemplate

    templates = []
    for f in sorted(os.listdir(path)):
        if f.endswith(".csv"):
            dgm = drop_essential(read_diagram(os.path.join(path, f)))
            templates.append(ClassTemplate(label=f[:-4], diagram=dgm,
                                           provenance=(0, 0, None)))
    if not templates:
        raise EmptyInput(f"no templates in {path}")
    return templates


def _cmd_classify(args) -> dict:
    templates = _load_templates(args)
    pts = read_point_cloud(args.query)
    space = distance_matrix(pts, args.metric)
    if args.query_scale != 1.0:
        space = space.scale(args.query_scale)
    res = _classify(space, templates, direction=args.direction,
                    partitions=args.partitions, distance=args.distance,
                    max_dim=args.max_dim, max_simplices=args.max_simplices)
    result = {"prediction": res.top_label}
    for i, (label, value) in enumerate(res.ranking, start=1):
        result[f"rank{i}_label"] = label
        result[f"rank{i}_value"] = value
    return result


def _cmd_evaluate(args) -> dict:
    dataset = _load_dataset(args.dataset)
    proportions = tuple(float(p) for p in args.proportions.split(","))
    rows = _evaluate(dataset, proportions=proportions, trials=args.trials,
                     seed=args.seed, m=args.m, B=args.B,
                     partitions=args.partitions, metric=args.metric,
                     max_dim=args.max_dim, max_simplices=args.max_simplices,
                     query_scale=args.query_scale, direction=args.direction)
    if args.out:
        _write_csv(args.out, ["proportion", "distance", "top1", "top2", "trials"],
                   [(r["proportion"], r["distance"], r["top1"], r["top2"],
                     r["trials"]) for r in rows])
    result = {}
    for r in rows:
        tag = f"p{int(round(100 * r['proportion']))}_{r['distance']}"
        result[f"{tag}_top1"] = r["top1"]
        result[f"{tag}_top2"] = r["top2"]
    result["trials"] = rows[0]["trials"] if rows else 0
    return result


def random_diagram(n: int, rng) -> PersistenceDiagram:
    """Benchmark generator: births Unif[0,10], lifetimes Exp(1), dims 1."""
    births = 10.0 * rng.random(n)
    lifetimes = rng.exponential(1.0, n)
    return PersistenceDiagram.from_arrays(
        np.ones(n, dtype=np.int64), births, births + lifetimes
    )


def bench(sizes, seed=0, partitions=100, fine_partitions=100_000, threads=1):
    """Time the direct search on random diagram pairs of growing size.

    Returns (records, slope, r_squared): one direct-search record per
    size, plus a brute-fine-grid record for sizes small enough to
    enumerate (n <= 4), and the least-squares slope of ln(seconds)
    against ln(n) with its R^2.
    """
    sizes = sorted(int(n) for n in sizes)
    if len(sizes) < 2:
        raise ValueError("bench needs at least two sizes")
    rng = np.random.default_rng(seed)
    records = []
    for n in sizes:
        A = random_diagram(n, rng)
        B = random_diagram(n, rng)
        t0 = time.perf_counter()
        res = di_dissimilarity(A, B, partitions=partitions, threads=threads)
        wall = max(time.perf_counter() - t0, 1e-9)
        records.append(BenchmarkRecord(n, wall, "direct-search", res.value))
        if n <= 4:
            interval = tightened_interval(A, B)
            t0 = time.perf_counter()
            val, _ = fine_grid_bruteforce(A, B, fine_partitions, interval)
            wall = max(time.perf_counter() - t0, 1e-9)
            records.append(BenchmarkRecord(n, wall, "brute-fine-grid", val))
    direct = [r for r in records if r.method == "direct-search"]
    x = np.log([r.n_points for r in direct])
    y = np.log([r.wall_seconds for r in direct])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return records, float(slope), r2


def _cmd_bench(args) -> dict:
    sizes = [int(s) for s in args.sizes.split(",")]
    records, slope, r2 = bench(sizes, seed=args.seed, partitions=args.partitions,
                               threads=_threads(args))
    if args.out:
        _write_csv(args.out, ["n_points", "wall_seconds", "method", "value"],
                   [(r.n_points, r.wall_seconds, r.method, r.value)
                    for r in records])
    result = {}
    for r in records:
        key = f"n{r.n_points}_{r.method.replace('-', '_')}"
        result[f"{key}_seconds"] = r.wall_seconds
        result[f"{key}_value"] = r.value
    result["slope"] = slope
    result["r_squared"] = r2
    return result


def _add_common(sp):
    sp.add_argument("--json", action="store_true", help="emit one JSON object")


def _add_essential_flags(sp):
    sp.add_argument("--cap-essential", metavar="VALUE",
                    help="replace infinite deaths by VALUE or the max finite death ('max')")
    sp.add_argument("--drop-essential", action="store_true",
                    help="remove points with infinite death")


def build_parser() -> _Parser:
    parser = _Parser(prog="tdir", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                            parser_class=_Parser)

    p = sub.add_parser("ph",
                       help="Vietoris-Rips persistence diagram of a point cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--input-type", choices=["points", "matrix"], default="points")
    p.add_argument("--metric", default="euclidean",
                   choices=["euclidean", "cosine-dissimilarity", "poincare"])
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--max-radius", type=float, default=math.inf)
    p.add_argument("--max-simplices", type=int, default=DEFAULT_MAX_SIMPLICES)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=_cmd_ph)

    p = sub.add_parser("bottleneck",
                       help="exact bottleneck distance between two diagrams")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mix-dims", action="store_true")
    _add_essential_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_bottleneck)

    p = sub.add_parser("di-dissim",
                       help="dilation-invariant bottleneck dissimilarity")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--partitions", type=int, default=100)
    p.add_argument("--mix-dims", action="store_true")
    p.add_argument("--refine", action="store_true")
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--report-curve", metavar="FILE",
                   help="write the sampled (t, theta) curve as CSV")
    _add_essential_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_di_dissim)

    p = sub.add_parser("di-dist",
                       help="shift-invariant distance between log diagrams")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--partitions", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--crop-below", type=float, default=None)
    p.add_argument("--mix-dims", action="store_true")
    _add_essential_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_di_dist)

    p = sub.add_parser("wasserstein",
                       help="2-Wasserstein distance between two diagrams")
    p.add_argument("a")
    p.add_argument("b")
    _add_essential_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_wasserstein)

    p = sub.add_parser("frechet-mean",
                       help="Frechet mean of two or more diagrams")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--out")
    _add_essential_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_frechet_mean)

    p = sub.add_parser("cdf",
                       help="empirical vs theoretical CDF of circle-sample distances")
    p.add_argument("--metric", choices=["euclidean", "poincare"], required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=_cmd_cdf)

    p = sub.add_parser("classify",
                       help="rank class templates by dissimilarity to a query cloud")
    p.add_argument("--templates", required=True,
                   help="directory of <label>.csv diagrams, or a dataset directory")
    p.add_argument("--query", required=True)
    p.add_argument("--metric", default="euclidean",
                   choices=["euclidean", "cosine-dissimilarity", "poincare"])
    p.add_argument("--distance", choices=["di", "bottleneck"], default="di")
    p.add_argument("--direction", default="query-to-template",
                   choices=["query-to-template", "template-to-query"])
    p.add_argument("--partitions", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--max-simplices", type=int, default=DEFAULT_MAX_SIMPLICES)
    p.add_argument("--query-scale", type=float, default=1.0)
    p.add_argument("--m", type=int, default=150)
    p.add_argument("--B", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("evaluate",
                       help="top-1/top-2 retrieval accuracy table on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--proportions", default="0.2,0.4,0.6,0.8")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=150)
    p.add_argument("--B", type=int, default=5)
    p.add_argument("--partitions", type=int, default=100)
    p.add_argument("--metric", default="euclidean",
                   choices=["euclidean", "cosine-dissimilarity", "poincare"])
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--max-simplices", type=int, default=DEFAULT_MAX_SIMPLICES)
    p.add_argument("--query-scale", type=float, default=1.0)
    p.add_argument("--direction", default="query-to-template",
                   choices=["query-to-template", "template-to-query"])
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("bench",
                       help="runtime scaling of the direct search")
    p.add_argument("--sizes", default="32,64,128,256,512")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--partitions", type=int, default=100)
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except _DATA_ERRORS as exc:
        print(f"tdir {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(result, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
