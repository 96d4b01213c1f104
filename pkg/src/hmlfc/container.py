"""Random-access compressed stream: threshold, linearize, serialize, parse.

Stream layout (all integers little-endian; full byte map in docs/format.md):

  header | channel section per color channel

Each channel section stores the losslessly coded base images (top-level
RKVs, or the reference views of the flat multi-reference variant)
followed by one section per level in root-to-leaf order. A level section
holds per-plane significance bitmaps, the motion-vector stream (three
bounded-integer payloads: mode, dx, dy), and a plane directory of
(byte offset, value bias, alphabet size) entries addressing the block
payloads. Every stored block occupies exactly block_size^2 values (edge
blocks are zero-padded), so any block payload is locatable from its
significance rank without scanning.
"""

import io
import struct
import zlib
from dataclasses import dataclass, field as dc_field

import numpy as np
from PIL import Image

from . import bise
from .hierarchy import build_tree, max_height
from .lightfield import ColorConfig, LightField, LightFieldError, rgb_to_ycocg, subsample_chroma
from .motion import (
    ROLE_PREDICTIVE, ROLE_REFERENCE, McConfig, cluster_reference_map,
    compensate_level, search_plane, gather_ref_blocks, mode_signs, block_starts,
)

MAGIC = b"HMLF"
VERSION = 1

VARIANT_CODES = {"hmlfc": 0, "rlfc": 1, "mc": 2}
VARIANT_NAMES = {v: k for k, v in VARIANT_CODES.items()}
CODEC_CODES = {"png16": 0, "zlib": 1}
CODEC_NAMES = {v: k for k, v in CODEC_CODES.items()}
REF_SELECT_CODES = {"topleft": 0, "center": 1}
REF_SELECT_NAMES = {v: k for k, v in REF_SELECT_CODES.items()}

FLAG_MV_DROP = 1 << 0
FLAG_CHROMA_HALF = 1 << 1
FLAG_YCOCG = 1 << 2


class ContainerError(LightFieldError):
    pass


class BadMagic(ContainerError):
    pass


class BadVersion(ContainerError):
    pass


class Truncated(ContainerError):
    pass


@dataclass(frozen=True)
class EncodeParams:
    tree_height: int = 3
    block_size: int = 4
    window: int = 16
    tau_ref: int = 75
    tau_res: int = 75
    color: ColorConfig = dc_field(default_factory=ColorConfig)
    variant: str = "hmlfc"            # "hmlfc" | "rlfc" | "mc"
    mv_drop_insignificant: bool = False
    mc_ref_stride: int = 4
    ref_select: str = "topleft"
    rkv_codec: str = "png16"

    def __post_init__(self):
        if self.tau_ref < 0 or self.tau_res < 0:
            raise ValueError("thresholds must be >= 0")
        if self.variant not in VARIANT_CODES:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.rkv_codec not in CODEC_CODES:
            raise ValueError(f"unknown rkv codec {self.rkv_codec!r}")
        if self.ref_select not in REF_SELECT_CODES:
            raise ValueError(f"unknown ref_select {self.ref_select!r}")
        if self.variant == "mc" and self.mc_ref_stride < 2:
            raise ValueError("mc_ref_stride must be >= 2")
        McConfig(block_size=self.block_size, window=self.window,
                 ref_select=self.ref_select)

    def mc_config(self, phase_modes: bool = True) -> McConfig:
        return McConfig(block_size=self.block_size, window=self.window,
                        ref_select=self.ref_select, phase_modes=phase_modes)


def threshold_blocks(plane: np.ndarray, tau: int, block_size: int) -> np.ndarray:
    """Significance map: block kept iff the sum of |samples| is >= tau."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    h, w = plane.shape
    ri, ci = block_starts(h, block_size), block_starts(w, block_size)
    energy = np.add.reduceat(np.add.reduceat(
        np.abs(plane.astype(np.int64)), ri, axis=0), ci, axis=1)
    return energy >= tau


def apply_significance(plane: np.ndarray, bits: np.ndarray, block_size: int) -> np.ndarray:
    """Zero out the insignificant blocks; what the decoder will reconstruct."""
    h, w = plane.shape
    keep = np.repeat(np.repeat(bits, block_size, 0), block_size, 1)[:h, :w]
    return plane * keep


def block_payload_values(plane: np.ndarray, bits: np.ndarray, block_size: int) -> np.ndarray:
    """Samples of the significant blocks, row-major, zero-padded to block_size^2."""
    h, w = plane.shape
    nby, nbx = bits.shape
    padded = np.zeros((nby * block_size, nbx * block_size), dtype=np.int64)
    padded[:h, :w] = plane
    blocks = padded.reshape(nby, block_size, nbx, block_size).transpose(0, 2, 1, 3)
    return blocks[bits].reshape(-1)


def plane_from_payload(values: np.ndarray, bits: np.ndarray, block_size: int,
                       h: int, w: int) -> np.ndarray:
    """Inverse of block_payload_values; insignificant blocks decode as zero."""
    nby, nbx = bits.shape
    blocks = np.zeros((nby, nbx, block_size, block_size), dtype=np.int64)
    if values.size:
        blocks[bits] = values.reshape(-1, block_size, block_size)
    padded = blocks.transpose(0, 2, 1, 3).reshape(nby * block_size, nbx * block_size)
    return padded[:h, :w].astype(np.int32)


def encode_base_plane(plane: np.ndarray, lo: int, codec: str) -> bytes:
    shifted = (plane.astype(np.int64) - lo)
    if shifted.min() < 0 or shifted.max() > 0xFFFF:
        raise ContainerError("base plane exceeds 16-bit coded range")
    arr = shifted.astype(np.uint16)
    if codec == "png16":
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        return buf.getvalue()
    return zlib.compress(arr.tobytes(), 9)


def decode_base_plane(data: bytes, lo: int, h: int, w: int, codec: str) -> np.ndarray:
    if codec == "png16":
        arr = np.asarray(Image.open(io.BytesIO(data)), dtype=np.int64)
    else:
        arr = np.frombuffer(zlib.decompress(data), dtype=np.uint16)
        arr = arr.astype(np.int64).reshape(h, w)
    if arr.shape != (h, w):
        raise ContainerError(f"base plane shape {arr.shape}, expected {(h, w)}")
    return (arr + lo).astype(np.int32)


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def pack(self, fmt: str, *vals):
        self.buf.write(struct.pack("<" + fmt, *vals))

    def raw(self, data: bytes):
        self.buf.write(data)

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class _Reader:
    def __init__(self, data, pos: int = 0):
        self.data = data
        self.pos = pos

    def unpack(self, fmt: str):
        fmt = "<" + fmt
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise Truncated(f"need {size} bytes at offset {self.pos}, have "
                            f"{len(self.data) - self.pos}")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals if len(vals) > 1 else vals[0]

    def raw(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise Truncated(f"need {size} bytes at offset {self.pos}, have "
                            f"{len(self.data) - self.pos}")
        out = bytes(self.data[self.pos:self.pos + size])
        self.pos += size
        return out


def _payload_range(values: np.ndarray) -> tuple[int, int]:
    if values.size == 0:
        return 0, 1
    lo = int(values.min())
    return lo, int(values.max()) - lo + 1


@dataclass(eq=False)
class LevelDir:
    """Parsed directory of one level section (grid, bitmaps, motion, payloads)."""
    nt: int
    ns: int
    nby: int
    nbx: int
    has_motion: bool
    bitmap: bytes                       # per-plane stride nby*nbx bits, LSB-first
    rec_count: int
    rec_starts: np.ndarray | None       # per predictive plane, only when mv_drop
    modes_payload: bytes
    dx_payload: bytes
    dy_payload: bytes
    plane_offsets: np.ndarray           # (n_planes + 1,) uint64 into blob
    plane_lo: np.ndarray                # (n_planes,) int32
    plane_n: np.ndarray                 # (n_planes,) uint32
    blob: bytes

    @property
    def blocks_per_plane(self) -> int:
        return self.nby * self.nbx

    def plane_bits(self, rank: int) -> np.ndarray:
        bpp = self.blocks_per_plane
        all_bits = np.unpackbits(np.frombuffer(self.bitmap, dtype=np.uint8),
                                 bitorder="little")
        return all_bits[rank * bpp:(rank + 1) * bpp].astype(bool).reshape(self.nby, self.nbx)

    def plane_payload(self, rank: int) -> bytes:
        return self.blob[int(self.plane_offsets[rank]):int(self.plane_offsets[rank + 1])]


@dataclass(eq=False)
class ChannelDir:
    width: int
    height: int
    base_lo: int
    base_n: int
    n_base_t: int
    n_base_s: int
    base_payloads: list
    levels: list                        # LevelDir, root -> leaf order


@dataclass(eq=False)
class CompressedStream:
    """Immutable parsed view of an .hmlfc byte stream."""
    version: int
    variant: str
    rkv_codec: str
    grid_s: int
    grid_t: int
    width: int
    height: int
    tree_height: int
    block_size: int
    window: int
    ref_select: str
    mc_ref_stride: int
    tau_ref: int
    tau_res: int
    mv_drop_insignificant: bool
    color: ColorConfig
    channels: list
    size_bytes: int

    @property
    def bpp(self) -> float:
        return self.size_bytes * 8 / (self.grid_s * self.grid_t * self.width * self.height)

    def params(self) -> EncodeParams:
        return EncodeParams(
            tree_height=self.tree_height, block_size=self.block_size,
            window=self.window, tau_ref=self.tau_ref, tau_res=self.tau_res,
            color=self.color, variant=self.variant,
            mv_drop_insignificant=self.mv_drop_insignificant,
            mc_ref_stride=self.mc_ref_stride, ref_select=self.ref_select,
            rkv_codec=self.rkv_codec)


def split_channels(field: LightField, color: ColorConfig):
    """Color-transformed channels as (name, samples (T,S,h,w) int32) tuples."""
    planes = field.planes.astype(np.int32)
    if color.transform == "identity":
        return [(name, planes[..., i].copy()) for i, name in enumerate("rgb")]
    y, co, cg = rgb_to_ycocg(planes[..., 0], planes[..., 1], planes[..., 2])
    chans = [("y", y), ("co", co), ("cg", cg)]
    if color.chroma_subsample == "half":
        out = [chans[0]]
        for name, arr in chans[1:]:
            t, s = arr.shape[:2]
            sub0 = subsample_chroma(arr[0, 0])
            sub = np.empty((t, s) + sub0.shape, dtype=np.int32)
            for ti in range(t):
                for si in range(s):
                    sub[ti, si] = subsample_chroma(arr[ti, si])
            out.append((name, sub))
        return out
    return chans


def level_roles(stream_or_params, nt: int, ns: int, level_has_motion: bool) -> np.ndarray:
    """Reference/predictive role of every plane of one level (not serialized)."""
    if not level_has_motion:
        return np.full((nt, ns), ROLE_REFERENCE, dtype=np.uint8)
    return cluster_reference_map(nt, ns, stream_or_params.ref_select)[0]


def mc_roles(grid_t: int, grid_s: int, stride: int) -> np.ndarray:
    roles = np.full((grid_t, grid_s), ROLE_PREDICTIVE, dtype=np.uint8)
    roles[::stride, ::stride] = ROLE_REFERENCE
    return roles


def _serialize_level(w: _Writer, planes: np.ndarray, roles: np.ndarray,
                     mc_arrays, params: EncodeParams, tau_ref: int, tau_res: int):
    """Threshold one level's planes and write its section.

    ``mc_arrays`` is (modes, dys, dxs) for motion levels, or None. Returns
    nothing; all payload layout decisions live here and in _parse_level.
    """
    nt, ns, h, w_px = planes.shape
    b = params.block_size
    nby, nbx = len(block_starts(h, b)), len(block_starts(w_px, b))
    has_motion = mc_arrays is not None

    bits_all = np.zeros((nt, ns, nby, nbx), dtype=bool)
    for t in range(nt):
        for s in range(ns):
            if has_motion and roles[t, s] == ROLE_PREDICTIVE:
                tau = tau_res
            else:
                tau = tau_ref if has_motion else tau_res
            bits_all[t, s] = threshold_blocks(planes[t, s], tau, b)
    # base-position planes of the flat variant live in the base payload
    if params.variant == "mc":
        bits_all[roles == ROLE_REFERENCE] = False

    payload_entries = []
    for t in range(nt):
        for s in range(ns):
            vals = block_payload_values(planes[t, s], bits_all[t, s], b)
            lo, n = _payload_range(vals)
            payload_entries.append((vals - lo, lo, n))

    mode_vals, dx_vals, dy_vals, rec_starts = [], [], [], []
    if has_motion:
        modes, dys, dxs = mc_arrays
        for t in range(nt):
            for s in range(ns):
                if roles[t, s] != ROLE_PREDICTIVE:
                    continue
                if params.mv_drop_insignificant:
                    rec_starts.append(len(mode_vals))
                    sel = bits_all[t, s]
                else:
                    sel = np.ones((nby, nbx), dtype=bool)
                mode_vals.extend(modes[t, s][sel].tolist())
                dx_vals.extend((dxs[t, s][sel] + params.window).tolist())
                dy_vals.extend((dys[t, s][sel] + params.window).tolist())

    w.pack("HH", nt, ns)
    w.pack("HH", nby, nbx)
    w.pack("BB", 1 if has_motion else 0, 0)
    bitmap = np.packbits(
        bits_all.reshape(nt * ns, nby * nbx).astype(np.uint8).reshape(-1),
        bitorder="little").tobytes() if nt * ns else b""
    w.pack("I", len(bitmap))
    w.raw(bitmap)
    if has_motion:
        w.pack("I", len(mode_vals))
        if params.mv_drop_insignificant:
            w.pack("I", len(rec_starts))
            w.raw(np.asarray(rec_starts, dtype="<u4").tobytes())
        else:
            w.pack("I", 0)
        n_off = 2 * params.window + 1
        for vals, n in ((mode_vals, 2), (dx_vals, n_off), (dy_vals, n_off)):
            payload = bise.encode(vals, n)
            w.pack("I", len(payload))
            w.raw(payload)

    offsets, blob = [0], io.BytesIO()
    for vals, lo, n in payload_entries:
        blob.write(bise.encode(vals, n))
        offsets.append(blob.tell())
    w.pack("I", nt * ns)
    for rank, (vals, lo, n) in enumerate(payload_entries):
        w.pack("QiI", offsets[rank], lo, n)
    w.pack("Q", offsets[-1])
    blob_bytes = blob.getvalue()
    w.pack("Q", len(blob_bytes))
    w.raw(blob_bytes)


def _parse_level(r: _Reader) -> LevelDir:
    nt, ns = r.unpack("HH")
    nby, nbx = r.unpack("HH")
    has_motion, _ = r.unpack("BB")
    bitmap = r.raw(r.unpack("I"))
    rec_count, rec_starts = 0, None
    modes_payload = dx_payload = dy_payload = b""
    if has_motion:
        rec_count = r.unpack("I")
        n_starts = r.unpack("I")
        if n_starts:
            rec_starts = np.frombuffer(r.raw(4 * n_starts), dtype="<u4")
        modes_payload = r.raw(r.unpack("I"))
        dx_payload = r.raw(r.unpack("I"))
        dy_payload = r.raw(r.unpack("I"))
    n_planes = r.unpack("I")
    if n_planes != nt * ns:
        raise ContainerError(f"plane directory size {n_planes} != grid {nt}x{ns}")
    offsets = np.zeros(n_planes + 1, dtype=np.uint64)
    lows = np.zeros(n_planes, dtype=np.int64)
    ns_arr = np.zeros(n_planes, dtype=np.int64)
    for rank in range(n_planes):
        off, lo, n = r.unpack("QiI")
        offsets[rank], lows[rank], ns_arr[rank] = off, lo, n
    offsets[n_planes] = r.unpack("Q")
    blob = r.raw(r.unpack("Q"))
    if len(blob) != int(offsets[n_planes]):
        raise ContainerError("level blob length disagrees with directory")
    return LevelDir(nt=nt, ns=ns, nby=nby, nbx=nbx, has_motion=bool(has_motion),
                    bitmap=bitmap, rec_count=rec_count, rec_starts=rec_starts,
                    modes_payload=modes_payload, dx_payload=dx_payload,
                    dy_payload=dy_payload, plane_offsets=offsets,
                    plane_lo=lows, plane_n=ns_arr, blob=blob)


def _encode_channel_hier(w: _Writer, samples: np.ndarray, value_range,
                         params: EncodeParams):
    t, s, h, w_px = samples.shape
    tree = build_tree(samples, value_range, params.tree_height)
    w.pack("II", w_px, h)

    top = tree.top_rkvs
    base_lo = int(top.min())
    base_n = int(top.max()) - base_lo + 1
    nct, ncs = top.shape[:2]
    w.pack("iI", base_lo, base_n)
    w.pack("HH", nct, ncs)
    for bt in range(nct):
        for bs in range(ncs):
            data = encode_base_plane(top[bt, bs], base_lo, params.rkv_codec)
            w.pack("I", len(data))
            w.raw(data)

    w.pack("H", len(tree.levels))
    for level in reversed(tree.levels):          # root to leaf
        if params.variant == "hmlfc":
            # closed loop: search against the thresholded references the
            # decoder will actually hold, so kept residuals invert exactly
            nt_l, ns_l = level.grid
            roles0, _ = cluster_reference_map(nt_l, ns_l, params.ref_select)
            refs = level.srvs.copy()
            for t in range(nt_l):
                for s in range(ns_l):
                    if roles0[t, s] == ROLE_REFERENCE:
                        bits = threshold_blocks(level.srvs[t, s],
                                                params.tau_ref, params.block_size)
                        refs[t, s] = apply_significance(level.srvs[t, s], bits,
                                                        params.block_size)
            mc = compensate_level(level, params.mc_config(), ref_planes=refs)
            roles = mc.roles
            _serialize_level(w, mc.planes, roles, (mc.modes, mc.dys, mc.dxs),
                             params, params.tau_ref, params.tau_res)
        else:
            nt_l, ns_l = level.grid
            roles = np.full((nt_l, ns_l), ROLE_REFERENCE, dtype=np.uint8)
            _serialize_level(w, level.srvs, roles, None, params,
                             params.tau_ref, params.tau_res)


def _encode_channel_mc(w: _Writer, samples: np.ndarray, params: EncodeParams):
    t, s, h, w_px = samples.shape
    stride = params.mc_ref_stride
    w.pack("II", w_px, h)
    roles = mc_roles(t, s, stride)

    base = samples[::stride, ::stride]
    base_lo = int(base.min())
    base_n = int(base.max()) - base_lo + 1
    nbt, nbs = base.shape[:2]
    w.pack("iI", base_lo, base_n)
    w.pack("HH", nbt, nbs)
    for bt in range(nbt):
        for bs in range(nbs):
            data = encode_base_plane(base[bt, bs], base_lo, params.rkv_codec)
            w.pack("I", len(data))
            w.raw(data)

    cfg = params.mc_config(phase_modes=False)
    b = params.block_size
    nby, nbx = len(block_starts(h, b)), len(block_starts(w_px, b))
    residuals = np.zeros_like(samples)
    modes = np.zeros((t, s, nby, nbx), dtype=np.int8)
    dys = np.zeros((t, s, nby, nbx), dtype=np.int16)
    dxs = np.zeros((t, s, nby, nbx), dtype=np.int16)
    for ti in range(t):
        for si in range(s):
            if roles[ti, si] == ROLE_REFERENCE:
                continue
            ref = samples[(ti // stride) * stride, (si // stride) * stride]
            _, m, vy, vx = search_plane(samples[ti, si], ref, cfg)
            gathered = gather_ref_blocks(ref, vy, vx, b, h, w_px)
            signs = mode_signs(m, b, h, w_px)
            residuals[ti, si] = samples[ti, si] + signs * gathered
            modes[ti, si], dys[ti, si], dxs[ti, si] = m, vy, vx

    w.pack("H", 1)
    _serialize_level(w, residuals, roles, (modes, dys, dxs), params,
                     params.tau_res, params.tau_res)


def encode_light_field(field: LightField, params: EncodeParams) -> bytes:
    """Compress a light field into .hmlfc bytes."""
    if params.variant != "mc":
        hmax = max_height(field.grid_s, field.grid_t)
        if not 1 <= params.tree_height <= hmax:
            raise ValueError(
                f"tree_height {params.tree_height} outside [1, {hmax}] for "
                f"{field.grid_s}x{field.grid_t} grid")
    else:
        if params.mc_ref_stride > max(field.grid_s, field.grid_t):
            raise ValueError("mc_ref_stride exceeds grid")

    flags = 0
    if params.mv_drop_insignificant:
        flags |= FLAG_MV_DROP
    if params.color.chroma_subsample == "half":
        flags |= FLAG_CHROMA_HALF
    if params.color.transform == "ycocg_r":
        flags |= FLAG_YCOCG

    w = _Writer()
    w.pack("4s", MAGIC)
    w.pack("HH", VERSION, flags)
    w.pack("BB", VARIANT_CODES[params.variant], CODEC_CODES[params.rkv_codec])
    w.pack("HH", field.grid_s, field.grid_t)
    w.pack("II", field.width, field.height)
    w.pack("HHH", params.tree_height if params.variant != "mc" else 0,
           params.block_size, params.window)
    w.pack("BB", REF_SELECT_CODES[params.ref_select],
           params.mc_ref_stride if params.variant == "mc" else 0)
    w.pack("II", params.tau_ref, params.tau_res)

    channels = split_channels(field, params.color)
    w.pack("B", len(channels))
    w.raw(b"\x00" * 3)

    ranges = {"r": (0, 255), "g": (0, 255), "b": (0, 255),
              "y": (0, 255), "co": (-255, 255), "cg": (-255, 255)}
    for name, samples in channels:
        cw = _Writer()
        if params.variant == "mc":
            _encode_channel_mc(cw, samples, params)
        else:
            _encode_channel_hier(cw, samples, ranges[name], params)
        section = cw.getvalue()
        w.pack("Q", len(section))
        w.raw(section)
    return w.getvalue()


def _parse_channel(r: _Reader) -> ChannelDir:
    w_px, h = r.unpack("II")
    base_lo, base_n = r.unpack("iI")
    nbt, nbs = r.unpack("HH")
    base_payloads = []
    for _ in range(nbt * nbs):
        base_payloads.append(r.raw(r.unpack("I")))
    n_levels = r.unpack("H")
    levels = [_parse_level(r) for _ in range(n_levels)]
    return ChannelDir(width=w_px, height=h, base_lo=base_lo, base_n=base_n,
                      n_base_t=nbt, n_base_s=nbs, base_payloads=base_payloads,
                      levels=levels)


def parse(data: bytes) -> CompressedStream:
    """Parse .hmlfc bytes into an immutable directory view."""
    r = _Reader(memoryview(data))
    magic = r.unpack("4s")
    if magic != MAGIC:
        raise BadMagic(f"magic {magic!r}, expected {MAGIC!r}")
    version, flags = r.unpack("HH")
    if version != VERSION:
        raise BadVersion(f"stream version {version}, reader supports {VERSION}")
    variant_code, codec_code = r.unpack("BB")
    if variant_code not in VARIANT_NAMES:
        raise ContainerError(f"unknown variant code {variant_code}")
    if codec_code not in CODEC_NAMES:
        raise ContainerError(f"unknown rkv codec code {codec_code}")
    grid_s, grid_t = r.unpack("HH")
    width, height = r.unpack("II")
    tree_height, block_size, window = r.unpack("HHH")
    ref_select_code, mc_ref_stride = r.unpack("BB")
    tau_ref, tau_res = r.unpack("II")
    n_channels = r.unpack("B")
    r.raw(3)

    color = ColorConfig(
        transform="ycocg_r" if flags & FLAG_YCOCG else "identity",
        chroma_subsample="half" if flags & FLAG_CHROMA_HALF else "none")
    channels = []
    for _ in range(n_channels):
        section_len = r.unpack("Q")
        section_end = r.pos + section_len
        if section_end > len(r.data):
            raise Truncated(f"channel section of {section_len} bytes overruns stream")
        channels.append(_parse_channel(r))
        if r.pos != section_end:
            raise ContainerError("channel section length mismatch")
    return CompressedStream(
        version=version, variant=VARIANT_NAMES[variant_code],
        rkv_codec=CODEC_NAMES[codec_code], grid_s=grid_s, grid_t=grid_t,
        width=width, height=height, tree_height=tree_height,
        block_size=block_size, window=window,
        ref_select=REF_SELECT_NAMES[ref_select_code], mc_ref_stride=mc_ref_stride,
        tau_ref=tau_ref, tau_res=tau_res,
        mv_drop_insignificant=bool(flags & FLAG_MV_DROP), color=color,
        channels=channels, size_bytes=len(data))


def parse_header(data: bytes) -> CompressedStream:
    """Alias kept for symmetry with writing; parse() already stops at directories."""
    return parse(data)
