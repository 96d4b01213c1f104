"""Light-field data model: grid-of-images container, reversible color
transform, chroma resampling, and quality metrics.

A light field is stored as a camera grid of ``grid_t`` x ``grid_s`` images,
each ``height`` x ``width`` x 3, 8-bit. Grid indexing is row-major with t
outer and s inner; ``planes[t, s]`` is the image captured at grid position
(s, t).
"""

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


class LightFieldError(Exception):
    """Raised for malformed light-field input (missing/mismatched images)."""


@dataclass(eq=False)
class Plane:
    """Single-channel sample plane with declared value bounds.

    ``samples`` is an (h, w) int32 array. ``value_range`` is the inclusive
    (min, max) bound the samples are guaranteed to lie in; raw channels are
    (0, 255), transformed chroma and residual data carry wider ranges.
    """

    samples: np.ndarray
    value_range: tuple[int, int]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def validate(self) -> None:
        lo, hi = self.value_range
        if self.samples.size and (self.samples.min() < lo or self.samples.max() > hi):
            raise ValueError(
                f"samples outside declared range [{lo}, {hi}]: "
                f"observed [{self.samples.min()}, {self.samples.max()}]"
            )


@dataclass(frozen=True)
class ColorConfig:
    """Color pipeline switches.

    transform: "identity" keeps RGB; "ycocg_r" applies the reversible
    integer lifting transform. chroma_subsample: "none" or "half" (2x2 box);
    subsampling is only meaningful for the decorrelated chroma channels.
    """

    transform: str = "ycocg_r"
    chroma_subsample: str = "none"

    def __post_init__(self):
        if self.transform not in ("identity", "ycocg_r"):
            raise ValueError(f"unknown transform {self.transform!r}")
        if self.chroma_subsample not in ("none", "half"):
            raise ValueError(f"unknown chroma_subsample {self.chroma_subsample!r}")
        if self.transform == "identity" and self.chroma_subsample != "none":
            raise ValueError("chroma subsampling requires the ycocg_r transform")


@dataclass(eq=False)
class LightField:
    """(grid_t, grid_s, height, width, 3) uint8 sample grid."""

    planes: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.planes.ndim != 5 or self.planes.shape[4] != 3:
            raise LightFieldError(
                f"expected (T, S, H, W, 3) planes, got shape {self.planes.shape}"
            )
        if self.bit_depth != 8:
            raise LightFieldError(f"unsupported bit depth {self.bit_depth}")

    @property
    def grid_t(self) -> int:
        return self.planes.shape[0]

    @property
    def grid_s(self) -> int:
        return self.planes.shape[1]

    @property
    def height(self) -> int:
        return self.planes.shape[2]

    @property
    def width(self) -> int:
        return self.planes.shape[3]

    @property
    def channels(self) -> int:
        return 3

    def plane(self, s: int, t: int) -> np.ndarray:
        """Image at grid position (s, t), shape (H, W, 3) uint8."""
        if not (0 <= s < self.grid_s and 0 <= t < self.grid_t):
            raise IndexError(f"view ({s}, {t}) outside {self.grid_s}x{self.grid_t} grid")
        return self.planes[t, s]


_NAME_RE = re.compile(r"^out_(\d+)_(\d+)\.(png|ppm)$")


def _infer_grid(directory: Path) -> dict[tuple[int, int], Path]:
    """Map (t, s) -> file from ``out_<t>_<s>.png`` names, or a manifest."""
    manifest = directory / "manifest.json"
    if manifest.exists():
        spec = json.loads(manifest.read_text())
        return {(int(t), int(s)): directory / name for t, s, name in spec["files"]}
    files = {}
    for p in sorted(directory.iterdir()):
        m = _NAME_RE.match(p.name)
        if m:
            files[(int(m.group(1)), int(m.group(2)))] = p
    return files


def load_light_field(path) -> LightField:
    """Load a light field from a directory of PNG/PPM images.

    The default naming convention is ``out_<t>_<s>.png`` (or ``.ppm``); a
    ``manifest.json`` of the form ``{"grid_t": T, "grid_s": S, "files":
    [[t, s, "name"], ...]}`` overrides it. Every grid position must be
    present and all images must agree on dimensions, 3 channels, 8 bits.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise LightFieldError(f"not a directory: {directory}")
    files = _infer_grid(directory)
    if not files:
        raise LightFieldError(f"no light-field images found in {directory}")
    grid_t = max(t for t, _ in files) + 1
    grid_s = max(s for _, s in files) + 1
    planes = None
    for t in range(grid_t):
        for s in range(grid_s):
            if (t, s) not in files:
                raise LightFieldError(f"missing image for grid position (s={s}, t={t})")
            with Image.open(files[(t, s)]) as im:
                if im.mode not in ("RGB", "P", "L"):
                    raise LightFieldError(
                        f"unsupported image mode {im.mode!r} at (s={s}, t={t})"
                    )
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
            if planes is None:
                planes = np.empty((grid_t, grid_s) + arr.shape, dtype=np.uint8)
            elif arr.shape != planes.shape[2:]:
                raise LightFieldError(
                    f"dimension mismatch at (s={s}, t={t}): "
                    f"{arr.shape[1]}x{arr.shape[0]} vs expected "
                    f"{planes.shape[3]}x{planes.shape[2]}"
                )
            planes[t, s] = arr
    return LightField(planes)


def save_light_field(field: LightField, path, fmt: str = "png") -> None:
    """Write a light field as ``out_<t>_<s>.<fmt>`` images plus a manifest."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for t in range(field.grid_t):
        for s in range(field.grid_s):
            name = f"out_{t:02d}_{s:02d}.{fmt}"
            Image.fromarray(field.planes[t, s], mode="RGB").save(directory / name)
            names.append([t, s, name])
    manifest = {"grid_t": field.grid_t, "grid_s": field.grid_s, "files": names}
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=1))


def rgb_to_ycocg(r, g, b):
    """Reversible integer RGB -> (Y, Co, Cg) lifting transform.

    Accepts scalars or arrays. Output ranges: Y in [0, 255], Co and Cg in
    [-255, 255]. All divisions are floor divisions toward -inf, making the
    transform exactly invertible by :func:`ycocg_to_rgb`.
    """
    r = np.asarray(r, dtype=np.int32)
    g = np.asarray(g, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    co = r - b
    tmp = b + (co >> 1)
    cg = g - tmp
    y = tmp + (cg >> 1)
    return y, co, cg


def ycocg_to_rgb(y, co, cg):
    """Exact inverse of :func:`rgb_to_ycocg`."""
    y = np.asarray(y, dtype=np.int32)
    co = np.asarray(co, dtype=np.int32)
    cg = np.asarray(cg, dtype=np.int32)
    tmp = y - (cg >> 1)
    g = cg + tmp
    b = tmp - (co >> 1)
    r = b + co
    return r, g, b


def round_half_away(num, den):
    """Integer num/den rounded half away from zero (element-wise)."""
    num = np.asarray(num)
    q = (2 * np.abs(num) + den) // (2 * den)
    return np.sign(num) * q


def subsample_chroma(plane):
    """2x2 box-downsample, rounding half away from zero.

    Accepts a Plane or a bare 2D array and returns the same kind. Output
    is ceil(w/2) x ceil(h/2); odd edges are handled by replicating the
    last row/column before averaging, which equals the mean of the
    samples actually present in the partial box.
    """
    a = plane.samples if isinstance(plane, Plane) else np.asarray(plane)
    h, w = a.shape
    pad = np.pad(a, ((0, h % 2), (0, w % 2)), mode="edge")
    blocks = pad.reshape(pad.shape[0] // 2, 2, pad.shape[1] // 2, 2)
    sums = blocks.sum(axis=(1, 3), dtype=np.int64)
    out = round_half_away(sums, 4).astype(np.int32)
    if isinstance(plane, Plane):
        return Plane(out, plane.value_range)
    return out


def upsample_chroma(plane, width: int, height: int):
    """Nearest-neighbor replication back to (width, height)."""
    a = plane.samples if isinstance(plane, Plane) else np.asarray(plane)
    up = np.repeat(np.repeat(a, 2, axis=0), 2, axis=1)
    out = np.ascontiguousarray(up[:height, :width])
    if isinstance(plane, Plane):
        return Plane(out, plane.value_range)
    return out


def psnr(a, b, peak: int = 255) -> float:
    """Peak signal-to-noise ratio in dB between two equal-shape sample sets.

    Accepts LightField, Plane, or ndarray; returns +inf for identical input.
    """
    aa = _as_samples(a)
    bb = _as_samples(b)
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: {aa.shape} vs {bb.shape}")
    err = aa.astype(np.float64) - bb.astype(np.float64)
    mse = float(np.mean(err * err))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _as_samples(x) -> np.ndarray:
    if isinstance(x, LightField):
        return x.planes
    if isinstance(x, Plane):
        return x.samples
    return np.asarray(x)
