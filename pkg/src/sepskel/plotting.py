"""Figures for the evaluation report (Agg backend, written straight to files)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "figure.figsize": (4.5, 3.2),
}

# fixed PNG metadata so repeated runs write identical files
_META = {"Software": None}


def _subsample(n, max_points, seed=0):
    if n <= max_points:
        return np.arange(n)
    return np.sort(np.random.default_rng(seed).choice(n, max_points, replace=False))


def _equal_axes(ax, pts):
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    c, r = 0.5 * (lo + hi), 0.5 * float(np.max(hi - lo))
    ax.set_xlim(c[0] - r, c[0] + r)
    ax.set_ylim(c[1] - r, c[1] + r)
    ax.set_zlim(c[2] - r, c[2] + r)


def plot_skeleton(domain, skeleton, path, separators=(), title=None, max_points=4000):
    """Surface samples, selected separators and the skeleton graph in 3D."""
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection="3d")
        pts = domain.positions
        idx = _subsample(len(pts), max_points)
        ax.scatter(*pts[idx].T, s=1, c="0.75", alpha=0.3, linewidths=0)
        for sep in separators:
            ax.plot(*sep.points.T, color="tab:orange", lw=0.8)
        for a, b in skeleton.edges:
            seg = skeleton.positions[[a, b]]
            ax.plot(*seg.T, color="tab:blue", lw=1.6)
        star = skeleton.is_star
        ax.scatter(*skeleton.positions[~star].T, s=10, c="tab:blue")
        if star.any():
            ax.scatter(*skeleton.positions[star].T, s=14, c="tab:red", marker="^")
        _equal_axes(ax, pts)
        ax.set_axis_off()
        ax.set_title(title or f"{skeleton.n_nodes} nodes, {skeleton.n_edges} edges")
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return path


def plot_sdf_histogram(hist, path, other=None, labels=("input", "reference")):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        w = np.diff(hist.edges)
        ax.bar(hist.edges[:-1], hist.counts, width=w, align="edge", color="tab:blue", alpha=0.8, label=labels[0])
        if other is not None:
            ax.step(other.edges[:-1], other.counts, where="post", color="tab:red", label=labels[1])
            ax.legend(frameon=False)
        ax.set_xlabel("SDF (model units)")
        ax.set_ylabel("mass")
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return path


def plot_error_map(domain, per_vertex, path, max_points=6000):
    """Vertices colored by their distance to the reconstructed surface."""
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(5, 4.2))
        ax = fig.add_subplot(projection="3d")
        pts = domain.positions
        idx = _subsample(len(pts), max_points)
        sc = ax.scatter(*pts[idx].T, s=2, c=np.sqrt(per_vertex[idx]), cmap="viridis", linewidths=0)
        fig.colorbar(sc, ax=ax, shrink=0.7, label="|offset|")
        _equal_axes(ax, pts)
        ax.set_axis_off()
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return path
