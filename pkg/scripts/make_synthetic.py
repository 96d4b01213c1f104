#!/usr/bin/env python3
"""Generate a synthetic light field and save it as an out_<t>_<s>.png directory.

Handy for producing encoder inputs without captured data, e.g.:

    python3 scripts/make_synthetic.py /tmp/lf --kind quads --grid 8x8 --size 128x128
    hmlfc encode /tmp/lf -o /tmp/lf.hmlfc
"""

import argparse
from pathlib import Path

from hmlfc.harness import SyntheticScene, generate_synthetic
from hmlfc.lightfield import save_light_field


def parse_pair(text, sep="x"):
    a, b = text.lower().split(sep)
    return int(a), int(b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("output", type=Path, help="output view directory")
    ap.add_argument("--kind", default="quads",
                    choices=("quads", "checker", "noise", "flat"))
    ap.add_argument("--grid", default="8x8", help="camera grid SxT")
    ap.add_argument("--size", default="128x128", help="image size WxH")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--baseline", type=float, default=1.0,
                    help="camera spacing scale; larger means more parallax")
    args = ap.parse_args()

    grid_s, grid_t = parse_pair(args.grid)
    width, height = parse_pair(args.size)
    scene = SyntheticScene(kind=args.kind, grid_s=grid_s, grid_t=grid_t,
                           width=width, height=height, seed=args.seed,
                           baseline=args.baseline)
    field = generate_synthetic(scene)
    save_light_field(field, args.output)
    print(f"wrote {grid_s * grid_t} views ({width}x{height}) to {args.output}")


if __name__ == "__main__":
    main()
