"""Command-line front end: encode, inspect, decode, render, benchmark, serve."""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np
from PIL import Image

from . import decoder as dec
from .container import EncodeParams, encode_light_field, parse
from .harness import (SweepSpec, SyntheticScene, generate_synthetic, run_sweep,
                      write_csv, write_json)
from .lightfield import (ColorConfig, LightField, LightFieldError,
                         load_light_field, save_light_field)
from .renderer import geometry_for_stream, pose_camera, render, set_render_threads


def _load_input(path) -> LightField:
    """out_<t>_<s>.png view directory, or an (T,S,H,W,3) .npy file."""
    p = Path(path)
    if p.is_file() and p.suffix == ".npy":
        return LightField(planes=np.load(p))
    try:
        return load_light_field(p)
    except LightFieldError as exc:
        raise SystemExit(str(exc)) from None


def _cmd_encode(args) -> int:
    field = _load_input(args.input)
    color = ColorConfig(chroma_subsample="half" if args.chroma_subsample else "none")
    params = EncodeParams(
        tree_height=args.height, block_size=args.block, window=args.window,
        tau_ref=args.tau_ref, tau_res=args.tau_res, color=color,
        variant=args.variant, mv_drop_insignificant=args.mv_drop)
    t0 = time.time()
    blob = encode_light_field(field, params)
    dt = time.time() - t0
    Path(args.output).write_bytes(blob)
    npx = int(np.prod(field.planes.shape[:4]))
    print(f"wrote {args.output}: {len(blob)} bytes, "
          f"{len(blob) * 8 / npx:.4f} bpp, {dt:.1f}s")
    return 0


def _cmd_info(args) -> int:
    stream = parse(Path(args.stream).read_bytes())
    p = stream.params()
    print(f"variant       {stream.variant}")
    print(f"grid          {stream.grid_s} x {stream.grid_t}")
    print(f"image         {stream.width} x {stream.height}")
    print(f"tree height   {stream.tree_height}")
    print(f"block size    {p.block_size}   window {p.window}")
    print(f"tau_ref       {p.tau_ref}   tau_res {p.tau_res}")
    print(f"color         {p.color.transform} / chroma {p.color.chroma_subsample}")
    print(f"mv records    {'significant only' if p.mv_drop_insignificant else 'all blocks'}")
    print(f"size          {stream.size_bytes} bytes   {stream.bpp:.4f} bpp")
    for ci, ch in enumerate(stream.channels):
        sig = tot = 0
        for lv in ch.levels:
            bits = np.unpackbits(np.frombuffer(lv.bitmap, dtype=np.uint8),
                                 bitorder="little")
            n = lv.nt * lv.ns * lv.blocks_per_plane
            sig += int(bits[:n].sum())
            tot += n
        print(f"channel {ci}: {len(ch.levels)} levels, "
              f"{sig}/{tot} significant blocks ({sig / max(tot, 1):.1%})")
    return 0


def _cmd_decode(args) -> int:
    state = dec.open_stream(Path(args.stream).read_bytes())
    if args.view:
        s, t = (int(v) for v in args.view.split(","))
        img = dec.decode_view(state, s, t)
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        Image.fromarray(img).save(out / f"out_{t:02d}_{s:02d}.png")
        print(f"wrote 1 view to {args.output}")
        return 0
    field = dec.decode_full(state)
    save_light_field(field, args.output)
    n = field.planes.shape[0] * field.planes.shape[1]
    print(f"wrote {n} views to {args.output}")
    return 0


def _cmd_stats(args) -> int:
    state = dec.open_stream(Path(args.stream).read_bytes())
    dec.decode_full(state)
    out = dict(state.stats.as_dict())
    out["stream_bytes"] = state.stream.size_bytes
    out["bpp"] = round(state.stream.bpp, 6)
    print(json.dumps(out, indent=2))
    return 0


def _cmd_render(args) -> int:
    state = dec.open_stream(Path(args.stream).read_bytes())
    sidecar = Path(args.stream + ".json")
    geometry = geometry_for_stream(state.stream,
                                   sidecar if sidecar.exists() else None)
    x, y, z, yaw, pitch = (float(v) for v in args.pose.split(","))
    w, h = (int(v) for v in args.res.split("x"))
    threads = set_render_threads(args.threads)
    camera = pose_camera(x, y, z, yaw=yaw, pitch=pitch, fov=args.fov,
                         resolution=(w, h))
    t0 = time.perf_counter()
    img = render(state, camera, geometry, threads=threads)
    ms = (time.perf_counter() - t0) * 1e3
    Image.fromarray(img).save(args.output)
    print(f"wrote {args.output} ({w}x{h}) in {ms:.1f} ms")
    return 0


def _cmd_bench(args) -> int:
    spec_d = json.loads(Path(args.spec).read_text())
    scene_d = spec_d.pop("scene", {})
    sweep = SweepSpec(
        heights=tuple(spec_d.get("heights", (3,))),
        block_sizes=tuple(spec_d.get("block_sizes", (4,))),
        taus=tuple(spec_d.get("taus", (75,))),
        windows=tuple(spec_d.get("windows", (16,))),
        variants=tuple(spec_d.get("variants", ("hmlfc",))),
        color=ColorConfig(**spec_d.get("color", {})),
        dataset=spec_d.get("dataset", "synthetic"))
    field = generate_synthetic(SyntheticScene(**scene_d))
    result = run_sweep(field, sweep)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(result.points, out / "sweep.csv")
    write_json(result.points, out / "sweep.json")
    for params, err in result.errors:
        print(f"FAILED {params.variant} h={params.tree_height} "
              f"b={params.block_size} W={params.window}: {err}", file=sys.stderr)
    print(f"wrote {len(result.points)} points to {out}/sweep.csv")
    return 1 if result.errors else 0


def _cmd_serve(args) -> int:
    from .service import serve
    serve(args.stream, addr=args.addr, threads=args.threads, ui_dir=args.ui_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hmlfc",
                                 description="Hierarchical light field codec")
    sub = ap.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compress a light field")
    enc.add_argument("input", help="directory of out_<t>_<s>.png views or .npy file")
    enc.add_argument("-o", "--output", required=True)
    enc.add_argument("--height", type=int, default=3)
    enc.add_argument("--block", type=int, default=4, choices=(2, 4, 8, 16))
    enc.add_argument("--window", type=int, default=16)
    enc.add_argument("--tau-ref", type=int, default=75)
    enc.add_argument("--tau-res", type=int, default=75)
    enc.add_argument("--variant", default="hmlfc", choices=("hmlfc", "rlfc", "mc"))
    enc.add_argument("--chroma-subsample", action="store_true")
    enc.add_argument("--mv-drop", action="store_true",
                     help="drop motion records for insignificant blocks")
    enc.set_defaults(func=_cmd_encode)

    inf = sub.add_parser("info", help="print stream header and layout")
    inf.add_argument("stream")
    inf.set_defaults(func=_cmd_info)

    de = sub.add_parser("decode", help="decode views to PNG files")
    de.add_argument("stream")
    de.add_argument("-o", "--output", required=True)
    de.add_argument("--view", help="decode a single view, as s,t")
    de.set_defaults(func=_cmd_decode)

    st = sub.add_parser("stats", help="decode everything and report counters")
    st.add_argument("stream")
    st.set_defaults(func=_cmd_stats)

    re = sub.add_parser("render", help="render a novel view to PNG")
    re.add_argument("stream")
    re.add_argument("--pose", default="0,0,0,0,0", help="x,y,z,yaw,pitch")
    re.add_argument("--fov", type=float, default=45.0)
    re.add_argument("--res", default="512x512")
    re.add_argument("--threads", type=int, default=1)
    re.add_argument("-o", "--output", required=True)
    re.set_defaults(func=_cmd_render)

    be = sub.add_parser("bench", help="run a rate-distortion sweep")
    be.add_argument("--spec", required=True, help="sweep spec JSON")
    be.add_argument("-o", "--output", required=True, help="results directory")
    be.set_defaults(func=_cmd_bench)

    se = sub.add_parser("serve", help="serve views over HTTP")
    se.add_argument("stream")
    se.add_argument("--addr", default="127.0.0.1:8080")
    se.add_argument("--threads", type=int, default=1)
    se.add_argument("--ui-dir", default=None)
    se.set_defaults(func=_cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
