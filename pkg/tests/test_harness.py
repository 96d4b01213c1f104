"""Synthetic scenes and the rate-distortion measurement loop."""

import csv
import json
import math

import numpy as np
import pytest

from hmlfc.container import EncodeParams
from hmlfc.harness import (CSV_COLUMNS, Quad, SweepSpec, SyntheticScene,
                           TuneError, compare_codecs, depth_to_disparity,
                           generate_synthetic, measure_point, run_sweep,
                           tune_tau, write_csv, write_json)
from hmlfc.lightfield import ColorConfig
from hmlfc.renderer import default_geometry


@pytest.fixture(scope="module")
def small_field():
    return generate_synthetic(SyntheticScene(grid_s=3, grid_t=3, width=32,
                                             height=32, seed=4))


def test_generation_is_deterministic():
    scene = SyntheticScene(grid_s=3, grid_t=3, width=32, height=32, seed=11)
    a = generate_synthetic(scene)
    b = generate_synthetic(scene)
    assert np.array_equal(a.planes, b.planes)
    c = generate_synthetic(SyntheticScene(grid_s=3, grid_t=3, width=32,
                                          height=32, seed=12))
    assert not np.array_equal(a.planes, c.planes)


@pytest.mark.parametrize("kind", ["quads", "checker", "noise", "flat"])
def test_scene_shapes(kind):
    lf = generate_synthetic(SyntheticScene(kind=kind, grid_s=2, grid_t=3,
                                           width=24, height=16, seed=0))
    assert lf.planes.shape == (3, 2, 16, 24, 3)
    assert lf.planes.dtype == np.uint8


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        SyntheticScene(kind="mystery")


def test_flat_views_identical():
    lf = generate_synthetic(SyntheticScene(kind="flat", grid_s=3, grid_t=2,
                                           width=32, height=32, seed=2))
    base = lf.planes[0, 0]
    assert all(np.array_equal(lf.planes[t, s], base)
               for t in range(2) for s in range(3))


def test_checker_shifts_one_pixel_per_view():
    lf = generate_synthetic(SyntheticScene(kind="checker", grid_s=3, grid_t=2,
                                           width=32, height=32, seed=0))
    assert np.array_equal(lf.planes[0, 1], lf.planes[1, 1])   # no t motion
    assert not np.array_equal(lf.planes[0, 0], lf.planes[0, 1])
    assert np.array_equal(lf.planes[0, 1][:, :31], lf.planes[0, 0][:, 1:])


def test_quad_moves_with_camera():
    """A quad with disparity (2, 0) slides 2 px left per s step."""
    quad = Quad(x=20, y=10, size=12, disparity=(2.0, 0.0), texture_seed=5)
    lf = generate_synthetic(SyntheticScene(
        grid_s=3, grid_t=3, width=48, height=48, seed=1, quads=(quad,),
        background_disparity=(0.0, 0.0), brightness_amp=0.0))
    assert np.array_equal(lf.planes[0, 0], lf.planes[2, 0])   # t has no effect
    assert np.array_equal(lf.planes[0, 1][10:22, 18:30],
                          lf.planes[0, 0][10:22, 20:32])
    assert np.array_equal(lf.planes[0, 1][:, 33:], lf.planes[0, 0][:, 33:])
    assert not np.array_equal(lf.planes[0, 0], lf.planes[0, 1])


def test_brightness_ramp_offsets_views():
    quad = Quad(x=4, y=4, size=8, disparity=(1.0, 1.0), texture_seed=9)
    kw = dict(grid_s=3, grid_t=3, width=32, height=32, seed=6, quads=(quad,),
              background_disparity=(0.0, 0.0))
    lit = generate_synthetic(SyntheticScene(brightness_amp=20.0, **kw))
    base = generate_synthetic(SyntheticScene(brightness_amp=0.0, **kw))
    dark = lit.planes[0, 0].astype(int) - base.planes[0, 0].astype(int)
    bright = lit.planes[2, 2].astype(int) - base.planes[2, 2].astype(int)
    assert np.median(dark) == -20
    assert np.median(bright) == 20
    assert np.array_equal(lit.planes[1, 1], base.planes[1, 1])  # centre: g = 0


def test_depth_to_disparity_default_geometry():
    g = default_geometry(3, 3, 64, 64)      # 1 px pitch, separation 96
    assert depth_to_disparity(g, 96.0) == pytest.approx((0.0, 0.0))
    assert depth_to_disparity(g, 48.0) == pytest.approx((-1.0, -1.0))
    assert depth_to_disparity(g, 192.0) == pytest.approx((0.5, 0.5))
    assert depth_to_disparity(g, 1e12) == pytest.approx((1.0, 1.0), abs=1e-9)


def test_measure_point_fields(small_field):
    params = EncodeParams(tree_height=1, block_size=8, window=2,
                          tau_ref=0, tau_res=0)
    pt = measure_point(small_field, params)
    assert pt.variant == "hmlfc"
    assert math.isinf(pt.psnr)
    assert pt.stream_bytes > 0 and pt.encode_seconds > 0
    assert pt.bpp == pytest.approx(8 * pt.stream_bytes / (3 * 3 * 32 * 32))
    assert pt.decode_stats["blocks_decoded"] > 0


def test_rd_row_matches_csv_columns(small_field):
    pt = measure_point(small_field, EncodeParams(tree_height=1, block_size=8,
                                                 window=0, tau_ref=0, tau_res=0))
    row = pt.to_row()
    assert list(row) == CSV_COLUMNS
    assert row["psnr"] == "inf"
    assert row["variant"] == "hmlfc" and row["block"] == 8


def test_run_sweep_covers_cartesian_product(small_field):
    spec = SweepSpec(heights=(1,), block_sizes=(4, 8), taus=(0, 100),
                     windows=(2,), variants=("hmlfc", "rlfc"))
    res = run_sweep(small_field, spec)
    assert res.errors == []
    assert [(p.variant, p.params.block_size, p.params.tau_res)
            for p in res.points] == [
        ("hmlfc", 4, 0), ("hmlfc", 4, 100), ("hmlfc", 8, 0), ("hmlfc", 8, 100),
        ("rlfc", 4, 0), ("rlfc", 4, 100), ("rlfc", 8, 0), ("rlfc", 8, 100)]


def test_run_sweep_records_failures(small_field):
    # height 5 is invalid on a 3x3 grid; the sweep keeps going
    spec = SweepSpec(heights=(1, 5), block_sizes=(8,), taus=(50,), windows=(0,))
    res = run_sweep(small_field, spec)
    assert len(res.points) == 1 and res.points[0].params.tree_height == 1
    assert len(res.errors) == 1
    params, msg = res.errors[0]
    assert params.tree_height == 5 and "outside" in msg


def test_sweep_spec_rejects_empty_axis():
    with pytest.raises(ValueError, match="taus"):
        SweepSpec(taus=())


def test_write_csv_and_json(small_field, tmp_path):
    pts = run_sweep(small_field, SweepSpec(heights=(1,), block_sizes=(8,),
                                           taus=(0, 200), windows=(0,))).points
    csv_path, json_path = tmp_path / "rd.csv", tmp_path / "rd.json"
    write_csv(pts, csv_path)
    write_json(pts, json_path)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [list(r) for r in rows] == [CSV_COLUMNS] * 2
    assert [int(r["tau_res"]) for r in rows] == [0, 200]
    assert int(rows[0]["stream_bytes"]) > int(rows[1]["stream_bytes"])
    loaded = json.loads(json_path.read_text())
    assert loaded == [p.to_row() for p in pts]


def test_tune_tau_lands_in_band(small_field):
    params = EncodeParams(tree_height=1, block_size=4, window=4)
    target = 30.0
    pt = tune_tau(small_field, params, target, tau_max=1024)
    assert pt.psnr >= target - 0.75
    assert pt.params.tau_ref == pt.params.tau_res > 0
    lossless = measure_point(small_field, params)
    assert pt.bpp < lossless.bpp


def test_tune_tau_unreachable_target(small_field):
    # half-resolution chroma is lossy even with every block kept
    params = EncodeParams(tree_height=1, block_size=4, window=2,
                          color=ColorConfig(chroma_subsample="half"))
    with pytest.raises(TuneError, match="below target"):
        tune_tau(small_field, params, 200.0, tau_max=64)


def test_matched_quality_rates_agree_without_parallax():
    """With identical views all variants store the same residual energy."""
    flat = generate_synthetic(SyntheticScene(kind="flat", grid_s=4, grid_t=4,
                                             width=32, height=32, seed=1))
    base = EncodeParams(tree_height=2, block_size=4, window=0)
    res = compare_codecs(flat, 50.0, base_params=base, tau_max=64)
    assert set(res["points"]) == {"hmlfc", "rlfc", "mc"}
    assert res["ratios"]["hmlfc"] == 1.0
    for variant, ratio in res["ratios"].items():
        assert 0.8 <= ratio <= 1.25, (variant, ratio)
    assert res["target_psnr"] == 50.0 and res["tolerance"] == 0.75


def test_wider_baseline_costs_rate():
    """Scaling scene parallax up makes the same threshold spend more bits."""
    params = EncodeParams(tree_height=2, block_size=4, window=8,
                          tau_ref=75, tau_res=75)
    pts = []
    for baseline in (0.5, 1.0, 2.0):
        scene = SyntheticScene(grid_s=4, grid_t=4, width=48, height=48, seed=5,
                               background_disparity=(1.0, 1.0),
                               baseline=baseline)
        pts.append(measure_point(generate_synthetic(scene), params))
    assert pts[0].bpp < pts[1].bpp < pts[2].bpp
    assert pts[0].psnr > pts[2].psnr
