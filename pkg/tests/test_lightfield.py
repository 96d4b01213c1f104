"""Color transform, chroma resampling, metrics, and grid-of-images IO."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmlfc.lightfield import (ColorConfig, LightField, LightFieldError, Plane,
                              load_light_field, psnr, rgb_to_ycocg,
                              round_half_away, save_light_field,
                              subsample_chroma, upsample_chroma, ycocg_to_rgb)


def _half_away(num: int, den: int) -> int:
    """Independent rounding oracle via exact rational arithmetic."""
    q = Fraction(abs(num), den) + Fraction(1, 2)
    return int(math.copysign(math.floor(q), num)) if num else math.floor(q)


def test_ycocg_roundtrip_dense_grid():
    # every (r, g, b) on a stride-5 lattice plus the cube corners
    axis = np.arange(0, 256, 5)
    r, g, b = np.meshgrid(axis, axis, axis, indexing="ij")
    y, co, cg = rgb_to_ycocg(r, g, b)
    r2, g2, b2 = ycocg_to_rgb(y, co, cg)
    assert np.array_equal(r, r2) and np.array_equal(g, g2) and np.array_equal(b, b2)
    for triple in [(0, 0, 0), (255, 255, 255), (255, 0, 255), (0, 255, 0),
                   (1, 254, 3)]:
        assert tuple(int(v) for v in ycocg_to_rgb(*rgb_to_ycocg(*triple))) == triple


def test_ycocg_roundtrip_random_million():
    rng = np.random.default_rng(0)
    rgb = rng.integers(0, 256, size=(1_000_000, 3))
    back = ycocg_to_rgb(*rgb_to_ycocg(rgb[:, 0], rgb[:, 1], rgb[:, 2]))
    assert np.array_equal(np.stack(back, axis=1), rgb)


def test_ycocg_output_ranges():
    axis = np.arange(0, 256, 3)
    r, g, b = np.meshgrid(axis, axis, axis, indexing="ij")
    y, co, cg = rgb_to_ycocg(r, g, b)
    assert y.min() >= 0 and y.max() <= 255
    assert co.min() >= -255 and co.max() <= 255
    assert cg.min() >= -255 and cg.max() <= 255
    # documented extremes are attained
    assert rgb_to_ycocg(255, 0, 0)[1] == 255
    assert rgb_to_ycocg(0, 0, 255)[1] == -255
    assert rgb_to_ycocg(0, 255, 0)[2] == 255
    assert rgb_to_ycocg(255, 0, 255)[2] == -255


@given(st.integers(-10**6, 10**6), st.integers(1, 64))
def test_round_half_away_matches_rational_oracle(num, den):
    assert int(round_half_away(num, den)) == _half_away(num, den)


def test_round_half_away_vectorized():
    nums = np.array([1, -1, 3, -3, 5, 2, 0, 7])
    assert np.array_equal(round_half_away(nums, 2),
                          [1, -1, 2, -2, 3, 1, 0, 4])


@pytest.mark.parametrize("h,w", [(8, 8), (7, 9), (1, 5), (6, 1)])
def test_subsample_box_oracle(h, w):
    rng = np.random.default_rng(h * 10 + w)
    a = rng.integers(-255, 256, size=(h, w)).astype(np.int32)
    out = subsample_chroma(a)
    assert out.shape == ((h + 1) // 2, (w + 1) // 2)
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            box = a[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            total, count = int(box.sum()), box.size
            assert out[i, j] == _half_away(total, count), (i, j)


def test_subsample_plane_keeps_range():
    p = Plane(np.full((4, 4), -7, dtype=np.int32), (-255, 255))
    out = subsample_chroma(p)
    assert isinstance(out, Plane)
    assert out.value_range == (-255, 255)
    assert np.all(out.samples == -7)


def test_upsample_replicates_and_crops():
    a = np.array([[1, 2], [3, 4]], dtype=np.int32)
    up = upsample_chroma(a, 3, 4)
    assert up.shape == (4, 3)
    assert np.array_equal(up, [[1, 1, 2], [1, 1, 2], [3, 3, 4], [3, 3, 4]])


def test_upsample_inverts_subsample_on_block_constant():
    rng = np.random.default_rng(5)
    coarse = rng.integers(-100, 100, size=(5, 7)).astype(np.int32)
    a = np.repeat(np.repeat(coarse, 2, 0), 2, 1)
    assert np.array_equal(upsample_chroma(subsample_chroma(a), 14, 10), a)


def test_plane_validate():
    Plane(np.array([[0, 255]], dtype=np.int32), (0, 255)).validate()
    with pytest.raises(ValueError, match="outside declared range"):
        Plane(np.array([[256]], dtype=np.int32), (0, 255)).validate()


def test_color_config_validation():
    ColorConfig(transform="identity", chroma_subsample="none")
    with pytest.raises(ValueError):
        ColorConfig(transform="yuv")
    with pytest.raises(ValueError):
        ColorConfig(chroma_subsample="quarter")
    with pytest.raises(ValueError, match="requires the ycocg_r transform"):
        ColorConfig(transform="identity", chroma_subsample="half")


def test_psnr_closed_form():
    a = np.zeros((16, 16), dtype=np.uint8)
    b = np.ones((16, 16), dtype=np.uint8)
    # MSE 1 at peak 255: 20 log10(255)
    assert psnr(a, b) == pytest.approx(20 * math.log10(255), abs=1e-9)
    assert psnr(a, a) == math.inf
    assert psnr(a, b, peak=1) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError, match="shape mismatch"):
        psnr(a, np.zeros((8, 8)))


def test_lightfield_shape_and_indexing():
    planes = np.zeros((2, 3, 4, 5, 3), dtype=np.uint8)
    lf = LightField(planes=planes)
    assert (lf.grid_t, lf.grid_s, lf.height, lf.width) == (2, 3, 4, 5)
    assert lf.plane(2, 1).shape == (4, 5, 3)
    with pytest.raises(IndexError, match=r"\(3, 0\)"):
        lf.plane(3, 0)
    with pytest.raises(LightFieldError, match="expected"):
        LightField(planes=np.zeros((2, 3, 4, 5)))
    with pytest.raises(LightFieldError, match="bit depth"):
        LightField(planes=planes, bit_depth=10)


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    planes = rng.integers(0, 256, size=(2, 2, 8, 9, 3), dtype=np.int64)
    field = LightField(planes=planes.astype(np.uint8))
    save_light_field(field, tmp_path / "lf")
    back = load_light_field(tmp_path / "lf")
    assert np.array_equal(back.planes, field.planes)


def test_load_missing_view(tmp_path):
    field = LightField(planes=np.zeros((2, 2, 4, 4, 3), dtype=np.uint8))
    save_light_field(field, tmp_path / "lf")
    (tmp_path / "lf" / "out_00_01.png").unlink()
    (tmp_path / "lf" / "manifest.json").unlink()
    with pytest.raises(LightFieldError, match=r"\(s=1, t=0\)"):
        load_light_field(tmp_path / "lf")


def test_load_dimension_mismatch(tmp_path):
    from PIL import Image
    d = tmp_path / "lf"
    d.mkdir()
    Image.new("RGB", (4, 4)).save(d / "out_0_0.png")
    Image.new("RGB", (5, 4)).save(d / "out_0_1.png")
    with pytest.raises(LightFieldError, match="dimension mismatch"):
        load_light_field(d)


def test_load_errors(tmp_path):
    with pytest.raises(LightFieldError, match="not a directory"):
        load_light_field(tmp_path / "nope")
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(LightFieldError, match="no light-field images"):
        load_light_field(empty)
