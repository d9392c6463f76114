import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from sepskel import shapes
from sepskel.errors import BinMismatch
from sepskel.geom import build_mesh
from sepskel.metrics import (
    Histogram,
    classify_nn,
    node_radii,
    reconstruction_error,
    sdf_histogram,
    wasserstein_1d,
)

from conftest import axis_skeleton, make_skeleton, ot_lp

EDGES8 = np.linspace(0.0, 4.0, 9)


def hist(counts, edges=EDGES8):
    c = np.asarray(counts, dtype=float)
    return Histogram(np.asarray(edges, dtype=float), c / c.sum())


def center_skeleton(domain):
    return make_skeleton([domain.positions.mean(axis=0)], [], np.zeros(domain.n_vertices))


# -- reconstruction error ----------------------------------------------------


def test_sphere_single_node_is_exact():
    m = shapes.icosphere(3, radius=1.7)
    sk = make_skeleton([[0, 0, 0]], [], np.zeros(m.n_vertices))
    assert node_radii(m, sk)[0] == pytest.approx(1.7, rel=1e-12)
    eps, mean = reconstruction_error(m, sk)
    assert np.max(eps) < 1e-24
    assert mean < 1e-24


def test_long_cylinder_axis_skeleton():
    m = shapes.cylinder(height=10.0)
    sk = axis_skeleton(m)
    _, mean = reconstruction_error(m, sk, radii=np.ones(sk.n_nodes))
    assert mean < 1e-3
    # side vertices sit on the capsule surface
    eps, _ = reconstruction_error(m, sk, radii=np.ones(sk.n_nodes))
    side = np.abs(np.hypot(m.positions[:, 0], m.positions[:, 1]) - 1) < 1e-9
    assert np.max(eps[side]) < 1e-20


def test_error_monotone_in_displacement():
    m = shapes.cylinder(height=10.0)
    errs = [reconstruction_error(m, axis_skeleton(m, (d, 0.0)))[1] for d in np.arange(6) * 0.1]
    assert np.all(np.diff(errs) > 0)


def test_rigid_motion_invariance():
    m = shapes.cylinder()
    sk = axis_skeleton(m, (0.2, -0.1))
    eps0, mean0 = reconstruction_error(m, sk)
    rot = Rotation.random(random_state=3)
    t = np.array([4.0, -2.0, 7.5])
    m2 = build_mesh(rot.apply(m.positions) + t, m.faces)
    sk2 = make_skeleton(rot.apply(sk.positions) + t, sk.edges, sk.node_of_vertex)
    eps1, mean1 = reconstruction_error(m2, sk2)
    assert mean1 == pytest.approx(mean0, rel=1e-9)
    assert np.allclose(eps1, eps0, rtol=1e-9, atol=1e-9 * np.max(eps0))


# -- SDF histograms ----------------------------------------------------------


def test_sphere_sdf_in_one_bin():
    R = 1.3
    m = shapes.icosphere(3, radius=R)
    h = sdf_histogram(m, make_skeleton([[0, 0, 0]], [], np.zeros(m.n_vertices)), bins=32)
    b = np.searchsorted(h.edges, 2 * R, side="right") - 1
    assert h.counts[b] == pytest.approx(1.0)
    assert h.total == pytest.approx(1.0)
    assert len(h) == 32 and np.count_nonzero(h.counts) == 1


def test_cylinder_sdf_mode():
    m = shapes.cylinder(radius=0.8)
    h = sdf_histogram(m, axis_skeleton(m))
    b = int(np.argmax(h.counts))
    assert h.edges[b] <= 1.6 < h.edges[b + 1]


def test_sdf_extent_sets_bins():
    m = shapes.icosphere(2)
    h = sdf_histogram(m, center_skeleton(m), bins=10, extent=5.0)
    assert np.allclose(h.edges, np.linspace(0, 5, 11))


# -- Wasserstein -------------------------------------------------------------


def test_w1_identical():
    h = hist([1, 2, 0, 0, 3, 1, 0, 1])
    assert wasserstein_1d(h, h) == 0.0


@pytest.mark.parametrize("k", [1, 3, 7])
def test_w1_point_masses(k):
    a = np.zeros(8)
    b = np.zeros(8)
    a[0] = b[k] = 1
    assert wasserstein_1d(hist(a), hist(b)) == pytest.approx(k * 0.5, abs=1e-12)


def test_w1_bin_mismatch():
    with pytest.raises(BinMismatch):
        wasserstein_1d(hist(np.ones(8)), hist(np.ones(8), np.linspace(0, 5, 9)))
    with pytest.raises(BinMismatch):
        wasserstein_1d(hist(np.ones(8)), hist(np.ones(4), np.linspace(0, 4, 5)))


def test_w1_matches_lp():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b = hist(rng.random(8)), hist(rng.random(8))
        assert wasserstein_1d(a, b) == pytest.approx(ot_lp(a, b), abs=1e-9)


counts8 = st.lists(st.floats(0.0, 1.0), min_size=8, max_size=8).filter(lambda c: sum(c) > 1e-3)


@settings(max_examples=200, deadline=None)
@given(counts8, counts8, counts8)
def test_w1_is_a_metric(a, b, c):
    ha, hb, hc = hist(a), hist(b), hist(c)
    ab = wasserstein_1d(ha, hb)
    assert ab == wasserstein_1d(hb, ha)
    assert ab >= 0
    assert ab <= wasserstein_1d(ha, hc) + wasserstein_1d(hc, hb) + 1e-12


# -- classification ----------------------------------------------------------


def test_classify_equal_and_tie():
    a, b, c = hist([1, 0, 0, 0, 0, 0, 0, 0]), hist([0, 0, 1, 0, 0, 0, 0, 0]), hist([0, 1, 0, 0, 0, 0, 0, 0])
    assert classify_nn(b, [("a", a), ("b", b)]) == "b"
    assert classify_nn(c, [("a", a), ("b", b)]) == "a"
    assert classify_nn(c, [("b", b), ("a", a)]) == "b"
    with pytest.raises(ValueError):
        classify_nn(a, [])


EXTENT = 8.0


def _sphere_hist(rng):
    m = shapes.icosphere(int(rng.integers(2, 4)), radius=rng.uniform(0.9, 1.1))
    pos = Rotation.random(random_state=rng).apply(m.positions + 0.01 * rng.normal(size=m.positions.shape))
    m = build_mesh(pos, m.faces)
    return sdf_histogram(m, center_skeleton(m), extent=EXTENT)


def _cylinder_hist(rng):
    m = shapes.cylinder(radius=rng.uniform(0.45, 0.55), height=4.0, spacing=rng.uniform(0.08, 0.15))
    sk = axis_skeleton(m)
    rot = Rotation.random(random_state=rng)
    m = build_mesh(rot.apply(m.positions + 0.005 * rng.normal(size=m.positions.shape)), m.faces)
    sk = make_skeleton(rot.apply(sk.positions), sk.edges, sk.node_of_vertex)
    return sdf_histogram(m, sk, extent=EXTENT)


def test_classify_sphere_vs_cylinder():
    ref_s = shapes.icosphere(3)
    ref_c = shapes.cylinder(radius=0.5, height=4.0, spacing=0.1)
    train = [
        ("sphere", sdf_histogram(ref_s, center_skeleton(ref_s), extent=EXTENT)),
        ("cylinder", sdf_histogram(ref_c, axis_skeleton(ref_c), extent=EXTENT)),
    ]
    rng = np.random.default_rng(11)
    for _ in range(10):
        assert classify_nn(_sphere_hist(rng), train) == "sphere"
        assert classify_nn(_cylinder_hist(rng), train) == "cylinder"
