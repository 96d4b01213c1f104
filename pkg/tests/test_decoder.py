"""Block-granular decoding: random access equals whole-stream decoding."""

import numpy as np
import pytest

from hmlfc.container import EncodeParams, encode_light_field
from hmlfc.decoder import (DecodeError, decode_block, decode_channel_view,
                           decode_full, decode_pixel_rgb, decode_view,
                           open_stream, reset_stats, stats)
from hmlfc.harness import SyntheticScene, generate_synthetic
from hmlfc.lightfield import ColorConfig

CONFIGS = {
    "keep": EncodeParams(tree_height=2, block_size=4, window=4,
                         tau_ref=40, tau_res=60),
    "drop": EncodeParams(tree_height=2, block_size=4, window=4,
                         tau_ref=40, tau_res=60, mv_drop_insignificant=True),
    "rlfc": EncodeParams(tree_height=2, block_size=4, window=4,
                         tau_res=60, variant="rlfc"),
    "mc": EncodeParams(block_size=4, window=4, tau_res=60, variant="mc",
                       mc_ref_stride=2),
    "chroma": EncodeParams(tree_height=2, block_size=4, window=4, tau_ref=40,
                           tau_res=60,
                           color=ColorConfig(chroma_subsample="half")),
    "identity": EncodeParams(tree_height=2, block_size=4, window=4,
                             tau_ref=40, tau_res=60,
                             color=ColorConfig(transform="identity")),
}


@pytest.fixture(scope="module")
def field():
    return generate_synthetic(SyntheticScene(grid_s=4, grid_t=4, width=32,
                                             height=32, seed=13))


@pytest.fixture(scope="module")
def streams(field):
    return {name: encode_light_field(field, p) for name, p in CONFIGS.items()}


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_view_equals_full(streams, name):
    state = open_stream(streams[name])
    full = decode_full(state)
    for t in range(4):
        for s in range(4):
            assert np.array_equal(decode_view(state, s, t), full.planes[t, s]), \
                (name, s, t)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_block_equals_channel_view(streams, name):
    state = open_stream(streams[name])
    rng = np.random.default_rng(17)
    b = state.stream.block_size
    for _ in range(60):
        c = int(rng.integers(3))
        s, t = int(rng.integers(4)), int(rng.integers(4))
        plane = decode_channel_view(state, c, s, t)
        h, w = plane.shape
        bx = int(rng.integers((w + b - 1) // b))
        by = int(rng.integers((h + b - 1) // b))
        blk = decode_block(state, (s, t), (bx, by), channel=c)
        region = plane[by * b:by * b + b, bx * b:bx * b + b]
        assert np.array_equal(blk, region), (name, c, s, t, bx, by)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_pixel_rgb_equals_full(streams, name):
    state = open_stream(streams[name])
    full = decode_full(state)
    rng = np.random.default_rng(23)
    for _ in range(40):
        s, t = int(rng.integers(4)), int(rng.integers(4))
        x, y = int(rng.integers(32)), int(rng.integers(32))
        got = decode_pixel_rgb(state, s, t, x, y)
        assert np.array_equal(got, full.planes[t, s, y, x]), (name, s, t, x, y)


def test_block_reads_stay_local_as_stream_grows():
    """Per-block payload reads track block content, not total stream size."""
    reads, sizes = [], []
    for wh in (64, 128):
        scene = SyntheticScene(grid_s=4, grid_t=4, width=wh, height=wh, seed=3,
                               background_disparity=(1.0, 1.0))
        data = encode_light_field(
            generate_synthetic(scene),
            EncodeParams(tree_height=2, block_size=8, window=4, tau_ref=40,
                         tau_res=40))
        state = open_stream(data)
        reset_stats(state)
        decode_block(state, (1, 2), (wh // 16, wh // 16))
        reads.append(stats(state)["payload_bytes_read"])
        sizes.append(len(data))
    assert sizes[1] > 3 * sizes[0]
    assert reads[1] < 2 * reads[0]


def test_open_is_deterministic(streams):
    s1 = open_stream(streams["keep"])
    s2 = open_stream(streams["keep"])
    assert np.array_equal(decode_view(s1, 3, 2), decode_view(s2, 3, 2))
    assert stats(open_stream(streams["keep"])) == {
        "blocks_decoded": 0, "payload_bytes_read": 0,
        "cache_bytes": stats(s2)["cache_bytes"]}


def test_stats_counting(streams):
    state = open_stream(streams["keep"])
    reset_stats(state)
    before = stats(state)
    assert before["blocks_decoded"] == 0
    decode_block(state, (1, 1), (0, 0))
    after = stats(state)
    assert after["blocks_decoded"] == 1
    assert after["payload_bytes_read"] >= before["payload_bytes_read"]
    reset_stats(state)
    assert stats(state)["blocks_decoded"] == 0


def test_index_errors(streams):
    state = open_stream(streams["keep"])
    with pytest.raises(IndexError, match="channel"):
        decode_block(state, (0, 0), (0, 0), channel=3)
    with pytest.raises(IndexError, match="outside"):
        decode_block(state, (4, 0), (0, 0))
    with pytest.raises(IndexError, match="block"):
        decode_block(state, (0, 0), (99, 0))
    with pytest.raises(IndexError):
        decode_view(state, 0, -1)


def test_decode_error_type_exists():
    assert issubclass(DecodeError, Exception)
