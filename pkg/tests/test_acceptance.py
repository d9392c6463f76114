"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``).
"""

import filecmp
import itertools
import time

import numpy as np
import pytest

from sepskel import shapes
from sepskel.cli import main
from sepskel.cutlocus import detect_cut_locus
from sepskel.errors import EmptyCutLocus
from sepskel.geodesic import heat_distance
from sepskel.geom import build_mesh, write_obj
from sepskel.metrics import Histogram, reconstruction_error, wasserstein_1d
from sepskel.pipeline import PipelineConfig, run_pipeline
from sepskel.separator import (
    bounding_radius,
    constriction_loops,
    shorten_mesh_loop,
    shorten_pc_loop,
    spring_energy,
    spring_gradient,
)
from sepskel.skeleton import (
    brute_force_pack,
    greedy_pack,
    is_maximal,
    is_packing,
    segment_intersection_in_face,
)

from conftest import axis_skeleton, nearest, ot_lp, perturbed_circle, ring_vertices, tube_winding, zigzag_loop


@pytest.fixture
def report(capsys):
    def _report(num, title, checks):
        """``checks`` maps a short description to ``(ok, measured)``."""
        ok = all(c[0] for c in checks.values())
        detail = "; ".join(f"{k}: {v[1]}" for k, v in checks.items())
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {num:>2} {title} | {detail}")
        failed = [k for k, v in checks.items() if not v[0]]
        assert ok, f"criterion {num} failed: {failed} ({detail})"

    return _report


def test_01_geodesic_accuracy(report):
    m = shapes.icosphere(4)
    t = time.perf_counter()
    f = heat_distance(m, [0])
    elapsed = time.perf_counter() - t
    anti = int(np.argmin(m.positions @ m.positions[0]))
    rel = abs(f.values[anti] - np.pi) / np.pi
    report(1, "icosphere antipode distance", {
        "relative error < 5%": (rel < 0.05, f"{100 * rel:.2f}%"),
        "runtime < 2 s": (elapsed < 2.0, f"{elapsed:.3f}s"),
    })


def test_02_cut_locus_localization(report, cylinder, disk):
    src = nearest(cylinder, [1.0, 0.0, 3.0])
    cl = detect_cut_locus(cylinder, heat_distance(cylinder, [src]))
    p = cylinder.positions
    opp = -p[src, :2] / np.linalg.norm(p[src, :2])
    frac = float(np.mean(np.linalg.norm(p[cl.marked, :2] - opp, axis=1) < 2 * cylinder.mean_spacing))
    try:
        detect_cut_locus(disk, heat_distance(disk, [int(np.argmin(np.linalg.norm(disk.positions, axis=1)))]))
        empty = False
    except EmptyCutLocus:
        empty = True
    report(2, "cut locus localization", {
        "cylinder near opposite line >= 80%": (frac >= 0.8, f"{100 * frac:.1f}%"),
        "disk cut locus empty": (empty, "EmptyCutLocus" if empty else "marked vertices"),
    })


def test_03_loop_shortening(report, cylinder, cylinder_cloud):
    loop = zigzag_loop(cylinder)
    r = bounding_radius(cylinder.positions[loop], cylinder.positions[loop[0]])
    mesh_sep = shorten_mesh_loop(cylinder, loop, loop[0], r)
    mesh_err = abs(mesh_sep.length - 2 * np.pi) / (2 * np.pi)

    c = cylinder_cloud
    pc_sep = shorten_pc_loop(c, perturbed_circle(), nearest(c, [1.0, 0.0, 3.0]), np.inf)
    pc_err = abs(pc_sep.length - 2 * np.pi) / (2 * np.pi)

    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(5):
        x = rng.normal(size=(12, 3)) * 0.3
        center, rad = rng.normal(size=3) * 0.1, 0.4
        g = spring_gradient(x, center, rad)
        fd = np.zeros_like(x)
        eps = 1e-6
        for i, k in itertools.product(range(len(x)), range(3)):
            xp, xm = x.copy(), x.copy()
            xp[i, k] += eps
            xm[i, k] -= eps
            fd[i, k] = (spring_energy(xp, center, rad) - spring_energy(xm, center, rad)) / (2 * eps)
        worst = max(worst, np.max(np.abs(fd - g)) / np.max(np.abs(g)))
    report(3, "loop shortening convergence", {
        "mesh within 2% in <= 50 it": (mesh_err < 0.02 and mesh_sep.iterations <= 50,
                                       f"{100 * mesh_err:.2f}% / {mesh_sep.iterations} it"),
        "cloud within 2% in <= 500 it": (pc_err < 0.02 and pc_sep.iterations <= 500,
                                         f"{100 * pc_err:.2f}% / {pc_sep.iterations} it"),
        "gradient vs finite differences < 1e-5": (worst < 1e-5, f"{worst:.2e}"),
    })


def test_04_constraint_efficacy(report, cone):
    ring = ring_vertices(cone, 0.4)
    loop = list(ring) + [ring[0]]
    src = int(ring[0])
    r = bounding_radius(cone.positions[ring], cone.positions[src])
    before = cone.positions[ring].mean(axis=0)
    con = shorten_mesh_loop(cone, loop, src, r)
    free = shorten_mesh_loop(cone, loop, src, np.inf)
    excess = float(np.max(np.linalg.norm(con.points - cone.positions[src], axis=1)) / r)
    rise = float(free.centroid[2] - before[2])
    height = 2.0
    report(4, "bounding-sphere constraint", {
        "constrained points within r(1+1e-4)": (excess <= 1 + 1e-4, f"max {excess:.6f} r"),
        "free centroid rise >= 0.2 height": (rise >= 0.2 * height, f"{rise:.3f}"),
    })


def _overlap_graphs(n):
    chain = np.zeros((n, n), bool)
    for i in range(n - 1):
        chain[i, i + 1] = chain[i + 1, i] = True
    clique = ~np.eye(n, dtype=bool)
    return {"chain": chain, "clique": clique}


def test_05_packing(report):
    rng = np.random.default_rng(5)
    worst, valid, runs = 1.0, True, 0
    for n in range(1, 11):
        for kind, M in _overlap_graphs(n).items():
            for _ in range(20):
                w = rng.random(n) + 1e-3
                sel = greedy_pack(w, M)
                _, best = brute_force_pack(w, M)
                worst = min(worst, float(np.sum(w[sel]) / best))
                valid &= is_packing(sel, M) and is_maximal(sel, M)
                runs += 1
    chain3 = _overlap_graphs(3)["chain"]
    ex1 = sorted(greedy_pack([1, 5, 1], chain3)) == [1]
    ex2 = sorted(greedy_pack([3, 1, 3], chain3)) == [0, 2]
    report(5, "packing correctness", {
        "greedy >= 60% of optimum": (worst >= 0.6, f"worst ratio {worst:.3f} over {runs} runs"),
        "non-overlapping and maximal": (valid, "all runs" if valid else "violation"),
        "worked examples": (ex1 and ex2, f"(1,5,1)->[1] {ex1}, (3,1,3)->[0,2] {ex2}"),
    })


def test_06_topology(report, torus, cylinder):
    t = time.perf_counter()
    sk_t = run_pipeline(torus, PipelineConfig(num_separators=256, seed=0)).skeleton
    dt_t = time.perf_counter() - t
    t = time.perf_counter()
    sk_c = run_pipeline(cylinder, PipelineConfig(num_separators=256, seed=0)).skeleton
    dt_c = time.perf_counter() - t
    report(6, "topology preservation", {
        "torus connected, cycle rank 1": (sk_t.n_components() == 1 and sk_t.cycle_rank() == 1,
                                          f"{sk_t.n_components()} comp, rank {sk_t.cycle_rank()}"),
        "cylinder cycle rank 0": (sk_c.cycle_rank() == 0 and sk_c.n_components() == 1,
                                  f"{sk_c.n_components()} comp, rank {sk_c.cycle_rank()}"),
        "runtime < 60 s each": (dt_t < 60 and dt_c < 60, f"torus {dt_t:.1f}s, cylinder {dt_c:.1f}s"),
    })


def test_07_metric_ordering(report):
    m = shapes.cylinder(height=10.0)
    errs = [reconstruction_error(m, axis_skeleton(m, (d, 0.0)))[1] for d in np.arange(6) * 0.1]
    mono = bool(np.all(np.diff(errs) > 0))
    report(7, "reconstruction error ordering", {
        "strictly increasing over 0..0.5 r": (mono, " < ".join(f"{1e3 * e:.4f}" for e in errs) + " (x1e-3)"),
    })


def _brute_segments(a, b, c, d):
    """3D segment-segment intersection by least squares on the segment parameters."""
    d1, d2 = b - a, d - c
    cross = np.linalg.norm(np.cross(d1, d2))
    if cross < 1e-12 * np.linalg.norm(d1) * np.linalg.norm(d2):
        return "parallel", None
    A = np.stack([d1, -d2], axis=1)
    (s, t), *_ = np.linalg.lstsq(A, c - a, rcond=None)
    if 0 <= s <= 1 and 0 <= t <= 1:
        return "intersection", a + s * d1
    return "none", None


def test_08_barycentric_intersection(report):
    rng = np.random.default_rng(8)
    match, worst, hits = 0, 0.0, 0
    n = 1000
    for i in range(n):
        tri = rng.normal(size=(3, 3)) * rng.uniform(0.1, 10)
        p = rng.dirichlet(np.ones(3), size=4)
        if i % 10 == 0:
            # exactly parallel pairs
            p[3] = p[2] + 0.5 * (p[1] - p[0])
        st_, _, _, bary = segment_intersection_in_face(*p)
        world = p @ tri
        bst, pt = _brute_segments(*world)
        match += st_ == bst
        if st_ == "intersection" and bst == "intersection":
            hits += 1
            worst = max(worst, float(np.linalg.norm(bary @ tri - pt)))
    report(8, "barycentric intersection oracle", {
        "classification match 100%": (match == n, f"{match}/{n} ({hits} hits)"),
        "points within 1e-9": (worst < 1e-9, f"max {worst:.1e}"),
    })


def test_09_wasserstein(report):
    rng = np.random.default_rng(9)
    edges = np.linspace(0, 4, 9)
    worst = 0.0
    for _ in range(200):
        a, b = rng.random(8), rng.random(8)
        ha, hb = Histogram(edges, a / a.sum()), Histogram(edges, b / b.sum())
        worst = max(worst, abs(wasserstein_1d(ha, hb) - ot_lp(ha, hb)))
    report(9, "Wasserstein oracle", {
        "matches LP optimal transport within 1e-9": (worst < 1e-9, f"max gap {worst:.1e}"),
    })


def test_10_constrictions(report, dumbbell, torus):
    neck = constriction_loops(dumbbell, num_samples=24, seed=0)
    dz = min((abs(s.centroid[2]) for s in neck), default=np.inf)
    loops = constriction_loops(torus, num_samples=8, seed=0)
    windings = [round(abs(tube_winding(s.points))) for s in loops]
    report(10, "constriction mode", {
        "dumbbell loop within 2h of neck": (dz < 2 * dumbbell.mean_spacing,
                                            f"{len(neck)} loops, min |z| {dz:.3f} (2h = {2 * dumbbell.mean_spacing:.3f})"),
        "torus loop winds the tube": (1 in windings, f"{len(loops)} loops, windings {windings}"),
    })


def test_11_determinism(report, cylinder, tmp_path):
    path = str(tmp_path / "tube.obj")
    write_obj(path, cylinder.positions, cylinder.faces)
    codes = [main([path, "--num-separators", "64", "--seed", "0", "--out", str(tmp_path / d)]) for d in "ab"]
    names = ["tube.skeleton.obj", "tube.regions.json", "tube.separators.obj"]
    _, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    report(11, "determinism", {
        "byte-identical skeleton files": (codes == [0, 0] and not mismatch and not errors,
                                          f"exit {codes}, differing {mismatch + errors}"),
    })


def test_12_noise_robustness(report, cylinder):
    rng = np.random.default_rng(12)
    tau = cylinder.mean_spacing
    noisy = build_mesh(cylinder.positions + rng.normal(scale=0.2 * tau, size=cylinder.positions.shape), cylinder.faces)
    sk = run_pipeline(noisy, PipelineConfig(num_separators=128, seed=0)).skeleton
    deg = np.bincount(sk.edges.ravel(), minlength=sk.n_nodes)
    path = sk.n_components() == 1 and sk.cycle_rank() == 0 and deg.max() <= 2
    report(12, "noise robustness", {
        "noisy cylinder gives a connected path": (path, f"{sk.n_nodes} nodes, {sk.n_edges} edges, max degree {deg.max()}"),
    })


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
