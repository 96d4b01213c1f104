"""Rate-distortion measurement: synthetic fields, sweeps, codec comparisons.

Synthetic scenes combine a view-invariant background (global coherence,
captured by the residual hierarchy), textured quads that shift with the
camera index (local parallax, captured by motion search), and a smooth
per-view brightness ramp (defeats prediction from distant references).
Disparities are in pixels per camera grid step.
"""

import csv
import json
import time
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import decoder as dec
from .container import EncodeParams, encode_light_field, parse
from .lightfield import ColorConfig, LightField, psnr
from .renderer import LfGeometry


@dataclass(frozen=True)
class Quad:
    x: int
    y: int
    size: int
    disparity: tuple[float, float]      # pixels per (s, t) grid step
    texture_seed: int
    contrast: int | None = None         # None -> scene.texture_contrast


@dataclass(frozen=True)
class SyntheticScene:
    kind: str = "quads"                 # "quads" | "checker" | "noise" | "flat"
    grid_s: int = 8
    grid_t: int = 8
    width: int = 128
    height: int = 128
    seed: int = 0
    quads: tuple = ()                   # Quad tuple; empty -> seeded defaults
    background_disparity: tuple[float, float] = (1.0, 1.0)
    brightness_amp: float = 10.0
    baseline: float = 1.0               # scales every quad and background disparity
    texture_contrast: int = 160

    def __post_init__(self):
        if self.kind not in ("quads", "checker", "noise", "flat"):
            raise ValueError(f"unknown scene kind {self.kind!r}")


def depth_to_disparity(geometry: LfGeometry, depth: float) -> tuple[float, float]:
    """Pixel shift per camera grid step of a point at the given depth.

    A point at distance ``depth`` from the camera plane projects at
    x_img = u (1 - sep/z) + const, so moving one camera step su shifts the
    image-plane hit by su (1 - sep/z), i.e. by that over the pixel pitch
    in pixel units.
    """
    su, sv = geometry.cam_spacing
    x0, y0, x1, y1 = geometry.st_rect
    spx = (x1 - x0) / geometry.width
    spy = (y1 - y0) / geometry.height
    k = 1.0 - geometry.separation / depth
    return su * k / spx, sv * k / spy


def _blur2d(a: np.ndarray, width: int) -> np.ndarray:
    k = np.ones(width) / width
    a = np.apply_along_axis(lambda r: np.convolve(r, k, mode="same"), 1, a)
    return np.apply_along_axis(lambda c: np.convolve(c, k, mode="same"), 0, a)


def _smooth_background(rng, h: int, w: int, fine_amp: float = 22.0) -> np.ndarray:
    coarse = rng.integers(40, 216, size=(h // 8 + 2, w // 8 + 2, 3)).astype(np.float64)
    up = np.repeat(np.repeat(coarse, 8, 0), 8, 1)
    # blur so block boundaries do not dominate residual energy
    for c in range(3):
        up[..., c] = _blur2d(up[..., c], 9)
    up = up[:h, :w]
    if fine_amp:
        # pixel-scale detail: cluster filtering averages it away, so motion
        # search is the only tool that recovers it cheaply
        fine = (np.floor(rng.random((h, w)) * 3).clip(0, 2) / 2.0 - 0.5) * fine_amp
        tint = rng.uniform(0.7, 1.0, size=3)
        up = up + fine[..., None] * tint[None, None, :]
    return up


def _posterized_texture(rng, size: int, contrast: int, levels: int = 4) -> np.ndarray:
    """Piecewise-flat pattern with sharp internal edges.

    Flat regions make sibling residual views match under shifts far better
    than raw noise would, which is what gives motion search its leverage.
    """
    sm = _blur2d(rng.random((size, size)), 5)
    sm = (sm - sm.min()) / max(np.ptp(sm), 1e-9)
    q = np.clip(np.floor(sm * levels), 0, levels - 1)
    lo = (255 - contrast) / 2
    vals = lo + q / (levels - 1) * contrast
    tint = rng.uniform(0.85, 1.0, size=3)
    return vals[..., None] * tint[None, None, :]


def _default_quads(rng, scene: SyntheticScene) -> list:
    # depth ladder: each disparity tier is unlocked by a wider search window.
    # Far-disparity quads start near the right/bottom edge so they slide
    # across the frame instead of leaving it.
    disps = [(2, 1), (3, 2), (6, 4), (12, 9), (9, 12)]
    # farther quads get stronger texture and more area so their ghost stays
    # significant until the window actually reaches their disparity
    contrasts = [70, 100, 140, 200, 200]
    sizes = [0.32, 0.32, 0.38, 0.50, 0.50]
    W, H = scene.width, scene.height
    anchors = [(0.04, 0.04), (0.10, 0.55), (0.55, 0.08), (0.58, 0.56),
               (0.32, 0.30)]
    quads = []
    for (fx, fy), disp, con, fs in zip(anchors, disps, contrasts, sizes):
        size = max(8, int(round(fs * W)))
        quads.append(Quad(
            x=min(int(fx * W), W - size), y=min(int(fy * H), H - size),
            size=size, disparity=disp, contrast=con,
            texture_seed=int(rng.integers(0, 2 ** 31))))
    return quads


def generate_synthetic(scene: SyntheticScene) -> LightField:
    """Deterministic light field for the requested scene kind."""
    rng = np.random.default_rng(scene.seed)
    S, T, W, H = scene.grid_s, scene.grid_t, scene.width, scene.height
    planes = np.zeros((T, S, H, W, 3), dtype=np.uint8)

    if scene.kind == "noise":
        planes[:] = rng.integers(0, 256, size=planes.shape, dtype=np.int64)
        return LightField(planes=planes)

    if scene.kind == "checker":
        yy, xx = np.mgrid[0:H, 0:W]
        for t in range(T):
            for s in range(S):
                shift = int(round(scene.baseline * s))
                board = (((xx + shift) // 8 + yy // 8) % 2) * 200 + 28
                planes[t, s] = board[..., None]
        return LightField(planes=planes)

    bdx = scene.baseline * scene.background_disparity[0]
    bdy = scene.baseline * scene.background_disparity[1]
    pad_x = int(round(abs(bdx) * (S - 1)))
    pad_y = int(round(abs(bdy) * (T - 1)))
    background = _smooth_background(rng, H + pad_y, W + pad_x)
    if scene.kind == "flat":
        planes[:] = np.clip(background[:H, :W], 0, 255).astype(np.uint8)
        return LightField(planes=planes)

    quads = list(scene.quads) or _default_quads(rng, scene)
    textures = {}
    for q in quads:
        trng = np.random.default_rng(q.texture_seed)
        textures[q.texture_seed] = _posterized_texture(
            trng, q.size, q.contrast or scene.texture_contrast)

    for t in range(T):
        for s in range(S):
            ox = int(round(bdx * s)) if bdx >= 0 else pad_x + int(round(bdx * s))
            oy = int(round(bdy * t)) if bdy >= 0 else pad_y + int(round(bdy * t))
            img = background[oy:oy + H, ox:ox + W].copy()
            for q in quads:
                dx = int(round(scene.baseline * q.disparity[0] * s))
                dy = int(round(scene.baseline * q.disparity[1] * t))
                x0, y0 = q.x - dx, q.y - dy
                tx0, ty0 = max(0, -x0), max(0, -y0)
                x0, y0 = max(x0, 0), max(y0, 0)
                x1 = min(x0 + q.size - tx0, W)
                y1 = min(y0 + q.size - ty0, H)
                if x1 > x0 and y1 > y0:
                    img[y0:y1, x0:x1] = textures[q.texture_seed][
                        ty0:ty0 + (y1 - y0), tx0:tx0 + (x1 - x0)]
            if scene.brightness_amp:
                g = scene.brightness_amp * (
                    s / max(S - 1, 1) + t / max(T - 1, 1) - 1.0)
                img = img + g
            planes[t, s] = np.clip(np.round(img), 0, 255).astype(np.uint8)
    return LightField(planes=planes)


@dataclass(frozen=True)
class RdPoint:
    variant: str
    params: EncodeParams
    bpp: float
    psnr: float
    encode_seconds: float
    stream_bytes: int
    decode_stats: dict

    def to_row(self) -> dict:
        return {
            "variant": self.variant,
            "height": self.params.tree_height,
            "block": self.params.block_size,
            "window": self.params.window,
            "tau_ref": self.params.tau_ref,
            "tau_res": self.params.tau_res,
            "bpp": round(self.bpp, 6),
            "psnr": round(self.psnr, 4) if np.isfinite(self.psnr) else "inf",
            "encode_s": round(self.encode_seconds, 3),
            "stream_bytes": self.stream_bytes,
            "cache_bytes": self.decode_stats.get("cache_bytes", 0),
        }


CSV_COLUMNS = ["variant", "height", "block", "window", "tau_ref", "tau_res",
               "bpp", "psnr", "encode_s", "stream_bytes", "cache_bytes"]


@dataclass(frozen=True)
class SweepSpec:
    heights: tuple = (3,)
    block_sizes: tuple = (4,)
    taus: tuple = (75,)
    windows: tuple = (16,)
    variants: tuple = ("hmlfc",)
    color: ColorConfig = dc_field(default_factory=ColorConfig)
    dataset: str = "synthetic"

    def __post_init__(self):
        for name in ("heights", "block_sizes", "taus", "windows", "variants"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} is empty")


@dataclass
class SweepResult:
    points: list
    errors: list                        # (params, message)


def measure_point(field: LightField, params: EncodeParams) -> RdPoint:
    """Encode, decode fully, and report rate and distortion for one setting."""
    t0 = time.perf_counter()
    data = encode_light_field(field, params)
    enc_s = time.perf_counter() - t0
    stream = parse(data)
    state = dec.open_stream(stream)
    out = dec.decode_full(state)
    return RdPoint(variant=params.variant, params=params, bpp=stream.bpp,
                   psnr=psnr(out, field), encode_seconds=enc_s,
                   stream_bytes=len(data), decode_stats=dec.stats(state))


def run_sweep(field: LightField, spec: SweepSpec) -> SweepResult:
    """Cartesian sweep; per-point failures are recorded and skipped."""
    points, errors = [], []
    for variant in spec.variants:
        for height in spec.heights:
            for block in spec.block_sizes:
                for window in spec.windows:
                    for tau in spec.taus:
                        params = EncodeParams(
                            tree_height=height, block_size=block, window=window,
                            tau_ref=tau, tau_res=tau, color=spec.color,
                            variant=variant)
                        try:
                            points.append(measure_point(field, params))
                        except Exception as exc:
                            errors.append((params, f"{type(exc).__name__}: {exc}"))
    return SweepResult(points=points, errors=errors)


def write_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for p in points:
            writer.writerow(p.to_row())


def write_json(points, path) -> None:
    with open(path, "w") as fh:
        json.dump([p.to_row() for p in points], fh, indent=2)


class TuneError(Exception):
    """Threshold bisection failed to reach the requested quality band."""


def tune_tau(field: LightField, params: EncodeParams, target_psnr: float,
             tol: float = 0.75, tau_max: int = 20000, max_iter: int = 24):
    """Largest tau whose decode lands within tol of target_psnr.

    Bisection over integer tau with tau_ref = tau_res = tau; quality falls
    (weakly) as tau grows. Returns the RdPoint at the accepted tau. The
    accepted point may exceed the target when integer tau granularity
    cannot land inside the band (its rate is then conservative); only
    undershoot beyond tol is an error.
    """

    def at(tau: int) -> RdPoint:
        return measure_point(field, replace(params, tau_ref=tau, tau_res=tau))

    lo, hi = 0, tau_max
    p_lo = at(lo)
    if p_lo.psnr < target_psnr - tol:
        raise TuneError(
            f"{params.variant}: lossless quality {p_lo.psnr:.2f} dB already "
            f"below target {target_psnr:.2f} dB")
    p_hi = at(hi)
    if p_hi.psnr >= target_psnr:
        return p_hi
    best = p_lo
    for _ in range(max_iter):
        if hi - lo <= 1:
            break
        mid = (lo + hi) // 2
        p_mid = at(mid)
        if p_mid.psnr >= target_psnr:
            lo, best = mid, p_mid
        else:
            hi = mid
            if abs(p_mid.psnr - target_psnr) <= tol:
                best = p_mid   # inside the band from below, lower rate
    if best.psnr < target_psnr - tol:
        raise TuneError(
            f"{params.variant}: closest achievable quality {best.psnr:.2f} dB "
            f"more than {tol} dB below {target_psnr:.2f} dB")
    return best


def compare_codecs(field: LightField, target_psnr: float,
                   variants=("hmlfc", "rlfc", "mc"),
                   base_params: EncodeParams | None = None,
                   tol: float = 0.75, tau_max: int = 20000) -> dict:
    """Matched-quality rate comparison across codec variants.

    Thresholds are tuned per variant by bisection so every decode lands
    within tol dB of target_psnr; reports per-variant points plus bpp
    ratios against the hybrid codec. ``tau_max`` caps the bisection range
    when the caller knows the useful threshold scale.
    """
    base = base_params or EncodeParams()
    results = {}
    for variant in variants:
        params = replace(base, variant=variant)
        results[variant] = tune_tau(field, params, target_psnr, tol=tol,
                                    tau_max=tau_max)
    ratios = {}
    if "hmlfc" in results:
        ref_bpp = results["hmlfc"].bpp
        ratios = {v: results[v].bpp / ref_bpp for v in results}
    return {"points": results, "ratios": ratios, "target_psnr": target_psnr,
            "tolerance": tol}
