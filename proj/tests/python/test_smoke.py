import math

import numpy as np
import pytest

import mkf


def ramp(h=24, w=32):
    y, x = np.mgrid[0:h, 0:w]
    return (3.0 * x + 2.0 * y).astype(np.float64)


def test_bilateral_keeps_constant_image():
    img = np.full((16, 20), 85.0)
    np.testing.assert_allclose(mkf.bilateral(img), img, atol=1e-12)


def test_mkf_returns_tree_and_kernels():
    img = mkf.natural_scene(48, 40, seed=3)
    res = mkf.mkf_denoise(img, depth=2, max_cluster=20)
    assert res["output"].shape == img.shape
    assert res["delta"].shape == img.shape
    assert len(res["levels"]) == 3
    root = res["nodes"][0]
    assert root["parent"] is None and root["size"] == img.size
    assert np.all(res["psi"] > 0)


def test_cluster_tree_levels_partition_image():
    img = mkf.natural_scene(32, 32, seed=1)
    tree = mkf.cluster_tree(img, depth=3)
    sizes = {n["id"]: n["size"] for n in tree["nodes"]}
    for labels in tree["levels"]:
        ids, counts = np.unique(labels, return_counts=True)
        assert counts.sum() == img.size
        for i, c in zip(ids, counts):
            assert sizes[int(i)] == c


def test_tv_energy_trace_non_increasing():
    img = mkf.add_noise(ramp(), "integral:level=100", seed=5)
    out, energy = mkf.tv_denoise(img, iterations=20)
    assert out.shape == img.shape
    assert len(energy) == 21
    assert all(b <= a + 1e-9 for a, b in zip(energy, energy[1:]))


def test_cf_preserves_ramp():
    img = ramp()
    np.testing.assert_allclose(mkf.cf_denoise(img, iterations=3), img, atol=1e-9)


def test_noise_is_reproducible():
    img = np.zeros((20, 20))
    a = mkf.add_noise(img, "integral:level=1000", seed=9)
    b = mkf.add_noise(img, "integral:level=1000", seed=9)
    c = mkf.add_noise(img, "integral:level=1000", seed=10)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert mkf.RNG_ALGORITHM == "mt19937_64-rowstream"


def test_noise_field_peak_and_falloff():
    field = mkf.noise_field(64, 64, peak=500.0)
    assert field[32, 32] == pytest.approx(500.0)
    assert field[32, 48] == pytest.approx(500.0 * math.exp(-0.5), rel=1e-12)


def test_metrics():
    a = ramp()
    assert mkf.mae(a, a) == 0.0
    assert mkf.ssim(a, a) == pytest.approx(1.0, abs=1e-12)
    assert mkf.mae(a, a + 2.0) == pytest.approx(2.0)


def test_apply_filter_spec_and_errors():
    img = mkf.natural_scene(24, 24, seed=2)
    assert mkf.apply_filter(img, "cf:iters=2").shape == img.shape
    with pytest.raises(ValueError):
        mkf.apply_filter(img, "bf:depth=3")
    with pytest.raises(ValueError):
        mkf.mae(img, img[:10])


def test_raster_round_trip(tmp_path):
    img = mkf.phantom(40, 36)
    path = str(tmp_path / "p.mkfr")
    mkf.save_raster(img, path)
    np.testing.assert_array_equal(mkf.load_raster(path), img)
    with pytest.raises(OSError):
        mkf.load_raster(str(tmp_path / "missing.pgm"))
