"""Command-line entry point: ``skel <input> --mode skeleton|constrictions|segment|eval``."""

import argparse
import csv
import logging
import os
import sys
import time

from . import __version__
from .errors import SkelError
from .geom.io import load_domain, write_polylines
from .geom.pointcloud import DEFAULT_K
from .metrics import DEFAULT_BINS, reconstruction_error, sdf_histogram
from .pipeline import PipelineConfig, export_segmentation, run_pipeline
from .separator import constriction_loops

logger = logging.getLogger("sepskel")

MODES = ("skeleton", "constrictions", "segment", "eval")

# option name -> (type, default)
OPTIONS = {
    "mode": (str, "skeleton"),
    "representation": (str, "auto"),
    "num_separators": (int, 1024),
    "seed": (int, 0),
    "target_metric": (str, "euclidean"),
    "batch_size": (int, 16),
    "threads": (int, 1),
    "laplacian_percentile": (float, 90.0),
    "gradient_angle": (float, 60.0),
    "opposite_angle": (float, 120.0),
    "k": (int, DEFAULT_K),
    "bins": (int, DEFAULT_BINS),
    "out": (str, "."),
}

METRIC_FIELDS = ["name", "mean_error_e3", "nodes", "edges", "wall_time"]


def read_config(path):
    """Parse a ``key = value`` file; ``#`` starts a comment, dashes equal underscores."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = OPTIONS[key][0](value)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="skel", description="Curve skeletons from local separators.")
    p.add_argument("input", help="mesh (.obj, .ply) or point cloud (.xyz, .ply)")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--representation", choices=("auto", "mesh", "pointcloud"))
    p.add_argument("--num-separators", type=int, help="number of sampled sources (default 1024)")
    p.add_argument("--seed", type=int)
    p.add_argument("--target-metric", choices=("euclidean", "geodesic"))
    p.add_argument("--batch-size", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--laplacian-percentile", type=float)
    p.add_argument("--gradient-angle", type=float, help="degrees")
    p.add_argument("--opposite-angle", type=float, help="degrees")
    p.add_argument("--k", type=int, help="neighbors per point (point clouds)")
    p.add_argument("--bins", type=int, help="SDF histogram bins (eval)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="key = value file; flags take precedence")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def resolve_options(args):
    opts = {k: d for k, (_, d) in OPTIONS.items()}
    if args.config:
        opts.update(read_config(args.config))
    for k in OPTIONS:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    if opts["num_separators"] < 1:
        raise ValueError("--num-separators must be >= 1")
    if opts["batch_size"] < 1:
        raise ValueError("--batch-size must be >= 1")
    if opts["threads"] < 1:
        raise ValueError("--threads must be >= 1")
    if not opts["out"]:
        raise ValueError("--out must be a nonempty path")
    if opts["mode"] not in MODES:
        raise ValueError(f"unknown mode {opts['mode']!r}")
    return opts


def setup_logging():
    level = os.environ.get("SKEL_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def write_metrics(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def format_table(rows):
    widths = {f: max(len(f), *(len(str(r[f])) for r in rows)) for f in METRIC_FIELDS}
    line = "  ".join(f.ljust(widths[f]) for f in METRIC_FIELDS)
    body = ["  ".join(str(r[f]).ljust(widths[f]) for f in METRIC_FIELDS) for r in rows]
    return "\n".join([line, "  ".join("-" * widths[f] for f in METRIC_FIELDS)] + body)


def _pipeline_config(opts):
    return PipelineConfig(
        num_separators=opts["num_separators"],
        seed=opts["seed"],
        batch_size=opts["batch_size"],
        threads=opts["threads"],
        target_metric=opts["target_metric"],
        laplacian_percentile=opts["laplacian_percentile"],
        gradient_angle=opts["gradient_angle"],
        opposite_angle=opts["opposite_angle"],
    )


def run(opts, input_path):
    t0 = time.perf_counter()
    domain = load_domain(input_path, opts["representation"], k=opts["k"])
    out = opts["out"]
    os.makedirs(out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(input_path))[0]
    base = os.path.join(out, stem)
    written = []

    if opts["mode"] == "constrictions":
        cfg = _pipeline_config(opts).separator_config()
        loops = constriction_loops(domain, opts["num_separators"], opts["seed"], cfg)
        path = base + ".constrictions.obj"
        write_polylines(path, [s.points for s in loops])
        written.append(path)
        path = base + ".constrictions.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["loop", "source", "length", "cx", "cy", "cz"])
            for i, s in enumerate(loops):
                c = s.centroid
                w.writerow([i, s.source, repr(s.length), repr(float(c[0])), repr(float(c[1])), repr(float(c[2]))])
        written.append(path)
        print(f"{len(loops)} constriction loops")
        return written

    result = run_pipeline(domain, _pipeline_config(opts))
    skel = result.skeleton
    for suffix, writer in ((".skeleton.obj", skel.write_obj), (".regions.json", skel.write_regions)):
        writer(base + suffix)
        written.append(base + suffix)
    write_polylines(base + ".separators.obj", [s.points for s in result.selected])
    written.append(base + ".separators.obj")
    if opts["mode"] == "segment":
        written.append(export_segmentation(domain, skel, base + ".segments.ply"))

    per_vertex, mean = reconstruction_error(domain, skel)
    row = {
        "name": stem,
        "mean_error_e3": f"{1e3 * mean:.6f}",
        "nodes": skel.n_nodes,
        "edges": skel.n_edges,
        "wall_time": f"{time.perf_counter() - t0:.3f}",
    }
    write_metrics(base + ".metrics.csv", [row])
    written.append(base + ".metrics.csv")

    if opts["mode"] == "eval":
        from .plotting import plot_error_map, plot_sdf_histogram, plot_skeleton

        hist = sdf_histogram(domain, skel, opts["bins"])
        path = base + ".sdf.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_lo", "bin_hi", "mass"])
            for lo, hi, m in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
                w.writerow([repr(float(lo)), repr(float(hi)), repr(float(m))])
        written.append(path)
        written.append(plot_skeleton(domain, skel, base + ".skeleton.png", result.selected, title=stem))
        written.append(plot_sdf_histogram(hist, base + ".sdf.png"))
        written.append(plot_error_map(domain, per_vertex, base + ".error.png"))
        print(format_table([row]))
    else:
        print(f"{skel.n_nodes} nodes, {skel.n_edges} edges, cycle rank {skel.cycle_rank()}")
    return written


def main(argv=None):
    setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        written = run(opts, args.input)
    except (OSError, SkelError, ValueError) as exc:
        print(f"skel: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        logger.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
