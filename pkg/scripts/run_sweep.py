#!/usr/bin/env python3
"""Sweep encoder settings over a light field and tabulate rate-distortion points.

Reads views from a directory (out_<t>_<s>.png convention) and runs the
cartesian product of the requested axes, e.g.:

    python3 scripts/run_sweep.py /tmp/lf --taus 0 75 250 --windows 0 16 -o /tmp/rd
"""

import argparse
import sys
from pathlib import Path

from hmlfc.harness import SweepSpec, run_sweep, write_csv, write_json
from hmlfc.lightfield import load_light_field


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("views", type=Path, help="light-field view directory")
    ap.add_argument("-o", "--output", type=Path, default=Path("sweep_out"),
                    help="directory for sweep.csv and sweep.json")
    ap.add_argument("--heights", type=int, nargs="+", default=[3])
    ap.add_argument("--blocks", type=int, nargs="+", default=[4])
    ap.add_argument("--taus", type=int, nargs="+", default=[75])
    ap.add_argument("--windows", type=int, nargs="+", default=[16])
    ap.add_argument("--variants", nargs="+", default=["hmlfc"],
                    choices=("hmlfc", "rlfc", "mc"))
    args = ap.parse_args()

    field = load_light_field(args.views)
    spec = SweepSpec(heights=tuple(args.heights), block_sizes=tuple(args.blocks),
                     taus=tuple(args.taus), windows=tuple(args.windows),
                     variants=tuple(args.variants), dataset=args.views.name)
    result = run_sweep(field, spec)

    args.output.mkdir(parents=True, exist_ok=True)
    write_csv(result.points, args.output / "sweep.csv")
    write_json(result.points, args.output / "sweep.json")

    fmt = "{:>6} {:>3} {:>3} {:>3} {:>6} {:>9} {:>8} {:>8}"
    print(fmt.format("var", "h", "b", "W", "tau", "bpp", "psnr", "enc_s"))
    for p in result.points:
        row = p.to_row()
        print(fmt.format(row["variant"], row["height"], row["block"],
                         row["window"], row["tau_ref"], row["bpp"],
                         row["psnr"], row["encode_s"]))
    for params, msg in result.errors:
        print(f"failed: {params} -> {msg}", file=sys.stderr)
    return 1 if result.errors else 0


if __name__ == "__main__":
    sys.exit(main())
