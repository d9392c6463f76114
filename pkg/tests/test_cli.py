import csv
import json
import os

import numpy as np
import pytest
from plyfile import PlyData

from sepskel import shapes
from sepskel.cli import main, read_config
from sepskel.geom import write_obj
from sepskel.pipeline import PipelineConfig, export_segmentation, run_pipeline
from sepskel.skeleton import build_skeleton, is_maximal, is_packing, overlap_matrix

from conftest import humanoid
from test_skeleton import ring_separator

SKELETON_FILES = (".skeleton.obj", ".regions.json", ".separators.obj")


@pytest.fixture(scope="module")
def cylinder_obj(tmp_path_factory):
    path = tmp_path_factory.mktemp("in") / "tube.obj"
    m = shapes.cylinder()
    write_obj(str(path), m.positions, m.faces)
    return str(path)


@pytest.fixture(scope="module")
def eval_runs(cylinder_obj, tmp_path_factory):
    outs = []
    for _ in range(2):
        out = str(tmp_path_factory.mktemp("out"))
        code = main([cylinder_obj, "--mode", "eval", "--num-separators", "64", "--out", out])
        outs.append((code, out))
    return outs


def read_skeleton_obj(path):
    v, e = [], []
    with open(path) as fh:
        for line in fh:
            t = line.split()
            if t[0] == "v":
                v.append([float(x) for x in t[1:]])
            elif t[0] == "l":
                e.append((int(t[1]) - 1, int(t[2]) - 1))
    return np.asarray(v), e


def test_eval_run_writes_outputs(eval_runs):
    code, out = eval_runs[0]
    assert code == 0
    for suffix in SKELETON_FILES + (".metrics.csv", ".sdf.csv", ".skeleton.png", ".sdf.png", ".error.png"):
        assert os.path.getsize(os.path.join(out, "tube" + suffix)) > 0
    with open(os.path.join(out, "tube.metrics.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1 and rows[0]["name"] == "tube"
    assert float(rows[0]["mean_error_e3"]) >= 0
    with open(os.path.join(out, "tube.sdf.csv")) as fh:
        mass = [float(r["mass"]) for r in csv.DictReader(fh)]
    assert len(mass) == 64 and sum(mass) == pytest.approx(1.0)


def test_cylinder_skeleton_is_a_path(eval_runs):
    _, out = eval_runs[0]
    pos, edges = read_skeleton_obj(os.path.join(out, "tube.skeleton.obj"))
    n = len(pos)
    assert n >= 2 and len(edges) == n - 1
    deg = np.bincount(np.ravel(edges), minlength=n)
    assert deg.max() <= 2 and np.count_nonzero(deg == 1) == 2
    with open(os.path.join(out, "tube.regions.json")) as fh:
        data = json.load(fh)
    assert len(data["nodes"]) == n


def test_outputs_byte_identical(eval_runs):
    (_, a), (_, b) = eval_runs
    for suffix in SKELETON_FILES + (".sdf.csv",):
        with open(os.path.join(a, "tube" + suffix), "rb") as fa, open(os.path.join(b, "tube" + suffix), "rb") as fb:
            assert fa.read() == fb.read(), suffix


def test_missing_input(tmp_path, capsys):
    path = str(tmp_path / "nope.obj")
    assert main([path, "--out", str(tmp_path)]) != 0
    assert path in capsys.readouterr().err


def test_bad_flags(cylinder_obj, tmp_path, capsys):
    assert main([cylinder_obj, "--num-separators", "0", "--out", str(tmp_path)]) != 0
    with pytest.raises(SystemExit):
        main([cylinder_obj, "--mode", "dance"])


def test_config_file_and_flag_precedence(cylinder_obj, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nnum-separators = 16\nseed = 3\nmode = skeleton\n")
    assert read_config(str(cfg)) == {"num_separators": 16, "seed": 3, "mode": "skeleton"}
    out = tmp_path / "o"
    assert main([cylinder_obj, "--config", str(cfg), "--seed", "5", "--out", str(out)]) == 0
    assert (out / "tube.skeleton.obj").exists()
    assert not (out / "tube.sdf.csv").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main([cylinder_obj, "--config", str(bad), "--out", str(out)]) != 0
    assert "colour" in capsys.readouterr().err


def test_segment_mode(cylinder_obj, tmp_path):
    assert main([cylinder_obj, "--mode", "segment", "--num-separators", "16", "--out", str(tmp_path)]) == 0
    ply = PlyData.read(str(tmp_path / "tube.segments.ply"))
    labels = np.asarray(ply["vertex"]["label"])
    nodes = len(json.loads((tmp_path / "tube.regions.json").read_text())["nodes"])
    assert len(labels) == shapes.cylinder().n_vertices
    assert set(labels.tolist()) <= set(range(nodes))


def test_three_region_segmentation(cylinder, tmp_path):
    sk = build_skeleton(cylinder, [ring_separator(cylinder, 2.0), ring_separator(cylinder, 4.0)])
    path = export_segmentation(cylinder, sk, str(tmp_path / "seg.ply"))
    labels = np.asarray(PlyData.read(path)["vertex"]["label"])
    assert set(labels.tolist()) == {0, 1, 2}
    # the middle band gets the middle node
    z = cylinder.positions[:, 2]
    mid = labels[np.abs(z - 3.0) < 0.5]
    assert len(set(mid.tolist())) == 1
    assert set(labels[z < 1.5].tolist()).isdisjoint(mid) and set(labels[z > 4.5].tolist()).isdisjoint(mid)


def test_constrictions_mode(tmp_path):
    m = shapes.dumbbell()
    path = str(tmp_path / "bell.obj")
    write_obj(path, m.positions, m.faces)
    assert main([path, "--mode", "constrictions", "--num-separators", "12", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "bell.constrictions.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    lengths = [float(r["length"]) for r in rows]
    assert lengths == sorted(lengths)


def test_pipeline_packing_invariants(cylinder):
    res = run_pipeline(cylinder, PipelineConfig(num_separators=32))
    # packing candidates: the selection plus everything it packed out
    cand = res.selected + [s for s in res.separators if s.status == "packedOut"]
    M = overlap_matrix(cylinder, cand)
    sel = list(range(len(res.selected)))
    assert len(sel) >= 1 and all(s.status == "live" and s.score > 0 for s in res.selected)
    assert is_packing(sel, M) and is_maximal(sel, M)
    assert res.skeleton.n_components() == 1 and res.skeleton.cycle_rank() == 0
    assert len(res.separators) + len(res.rejections) == 32


def test_pipeline_threads_match_serial(cylinder):
    a = run_pipeline(cylinder, PipelineConfig(num_separators=16, threads=1))
    b = run_pipeline(cylinder, PipelineConfig(num_separators=16, threads=2))
    assert np.array_equal(a.skeleton.positions, b.skeleton.positions)
    assert np.array_equal(a.skeleton.edges, b.skeleton.edges)


def test_humanoid_regions_contiguous():
    from scipy.sparse import csgraph

    m = humanoid()
    sk = run_pipeline(m, PipelineConfig(num_separators=64)).skeleton
    assert sk.n_components() == 1 and sk.cycle_rank() == 0
    deg = np.bincount(sk.edges.ravel(), minlength=sk.n_nodes)
    # head, two hands, two feet
    assert np.count_nonzero(deg == 1) == 5
    for k in range(sk.n_nodes):
        idx = np.flatnonzero(sk.node_of_vertex == k)
        if len(idx):
            assert csgraph.connected_components(m.graph[idx][:, idx], directed=False)[0] == 1
