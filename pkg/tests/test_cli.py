"""End-to-end runs of the command line entry point via main(argv)."""

import json

import numpy as np
import pytest
from PIL import Image

from hmlfc.cli import main
from hmlfc.container import parse_header
from hmlfc.decoder import decode_full, decode_view, open_stream
from hmlfc.harness import SyntheticScene, generate_synthetic
from hmlfc.lightfield import load_light_field, save_light_field

ENCODE_ARGS = ["--height", "1", "--block", "4", "--window", "2",
               "--tau-ref", "40", "--tau-res", "40"]


@pytest.fixture(scope="module")
def field():
    return generate_synthetic(
        SyntheticScene(grid_s=3, grid_t=3, width=32, height=32, seed=8))


@pytest.fixture(scope="module")
def views_dir(field, tmp_path_factory):
    path = tmp_path_factory.mktemp("views") / "lf"
    save_light_field(field, path)
    return path


@pytest.fixture(scope="module")
def stream_path(views_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("enc") / "lf.hmlfc"
    rc = main(["encode", str(views_dir), "-o", str(out)] + ENCODE_ARGS)
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def state(stream_path):
    return open_stream(stream_path.read_bytes())


def test_encode_writes_valid_header(stream_path):
    header = parse_header(stream_path.read_bytes())
    assert (header.grid_s, header.grid_t) == (3, 3)
    assert header.tree_height == 1
    assert header.block_size == 4
    assert header.window == 2
    assert (header.tau_ref, header.tau_res) == (40, 40)


def test_encode_accepts_npy_input(field, stream_path, tmp_path):
    npy = tmp_path / "planes.npy"
    np.save(npy, field.planes)
    out = tmp_path / "lf.hmlfc"
    rc = main(["encode", str(npy), "-o", str(out)] + ENCODE_ARGS)
    assert rc == 0
    # same pixels, same knobs: the stream must be byte-identical
    assert out.read_bytes() == stream_path.read_bytes()


def test_encode_rejects_empty_directory(tmp_path):
    with pytest.raises(SystemExit, match="no light-field images found"):
        main(["encode", str(tmp_path), "-o", str(tmp_path / "x.hmlfc")])


def test_info_summarises_stream(stream_path, capsys):
    rc = main(["info", str(stream_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "hmlfc" in out
    assert "3 x 3" in out
    assert "32 x 32" in out
    assert f"{stream_path.stat().st_size} bytes" in out


def test_decode_full_round_trips(stream_path, state, tmp_path, capsys):
    out_dir = tmp_path / "dec"
    rc = main(["decode", str(stream_path), "-o", str(out_dir)])
    assert rc == 0
    assert "9 views" in capsys.readouterr().out
    assert (out_dir / "manifest.json").is_file()
    reloaded = load_light_field(out_dir)
    assert np.array_equal(reloaded.planes, decode_full(state).planes)


def test_decode_single_view(stream_path, state, tmp_path):
    out_dir = tmp_path / "one"
    rc = main(["decode", str(stream_path), "-o", str(out_dir), "--view", "2,1"])
    assert rc == 0
    files = sorted(p.name for p in out_dir.iterdir())
    assert files == ["out_01_02.png"]
    pixels = np.asarray(Image.open(out_dir / "out_01_02.png"))
    assert np.array_equal(pixels, decode_view(state, 2, 1))


def test_stats_prints_json(stream_path, capsys):
    rc = main(["stats", str(stream_path)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["stream_bytes"] == stream_path.stat().st_size
    assert payload["bpp"] == pytest.approx(
        8.0 * payload["stream_bytes"] / (3 * 3 * 32 * 32))
    assert payload["blocks_decoded"] > 0
    assert payload["cache_bytes"] >= 0


def test_render_writes_image_at_requested_size(stream_path, tmp_path):
    out = tmp_path / "shot.png"
    rc = main(["render", str(stream_path), "--pose", "0,0,-10,1,0",
               "--res", "64x48", "-o", str(out)])
    assert rc == 0
    assert Image.open(out).size == (64, 48)


def test_bench_writes_sweep_tables(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "scene": {"grid_s": 3, "grid_t": 3, "width": 24, "height": 24, "seed": 2},
        "heights": [1], "block_sizes": [4], "taus": [0, 100],
        "windows": [0], "variants": ["hmlfc"],
    }))
    out_dir = tmp_path / "bench"
    rc = main(["bench", "--spec", str(spec), "-o", str(out_dir)])
    assert rc == 0
    rows = (out_dir / "sweep.csv").read_text().strip().splitlines()
    assert rows[0].startswith("variant,height,block,window")
    assert len(rows) == 3
    # tau 0 is lossless, the header encodes it as psnr inf
    assert ",inf," in rows[1]
    points = json.loads((out_dir / "sweep.json").read_text())
    assert len(points) == 2
