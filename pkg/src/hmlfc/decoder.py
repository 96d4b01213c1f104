"""Block-granular decoding with motion re-compensation and a sparse cache.

Opening a stream materializes the dense base images (top-level RKVs, or
the reference views of the flat variant) and a sparse-row cache of every
reference residual plane at every level; those are the only pixels any
block decode may need outside its own payload. decode_block walks the
ancestor chain root to leaf, adding each level's stored block and undoing
motion residuals via the cached references. decode_full takes a separate
vectorized route over whole planes, which the tests hold bit-equal to
block-by-block assembly.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import bise
from .container import (
    CompressedStream, LevelDir, decode_base_plane, level_roles, mc_roles, parse,
    plane_from_payload,
)
from .lightfield import LightField, upsample_chroma, ycocg_to_rgb
from .motion import (
    ROLE_PREDICTIVE, ROLE_REFERENCE, SUBTRACTIVE, cluster_reference_map,
    gather_ref_blocks, mode_signs,
)


class DecodeError(Exception):
    pass


class SparseImage:
    """CSR-style nonzero store; lookups outside the listed entries read 0."""

    def __init__(self, height: int, width: int, row_ptr, cols, vals):
        self.height = height
        self.width = width
        self.row_ptr = row_ptr
        self.cols = cols
        self.vals = vals

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "SparseImage":
        h, w = arr.shape
        ys, xs = np.nonzero(arr)
        row_ptr = np.zeros(h + 1, dtype=np.int64)
        np.add.at(row_ptr, ys + 1, 1)
        row_ptr = np.cumsum(row_ptr)
        return cls(h, w, row_ptr, xs.astype(np.int32), arr[ys, xs].astype(np.int32))

    @property
    def nnz(self) -> int:
        return int(self.cols.size)

    @property
    def nbytes(self) -> int:
        return self.row_ptr.nbytes + self.cols.nbytes + self.vals.nbytes

    def block(self, y0: int, x0: int, bh: int, bw: int) -> np.ndarray:
        """Dense copy of rows [y0, y0+bh) x cols [x0, x0+bw), zero-extended."""
        out = np.zeros((bh, bw), dtype=np.int32)
        ys, ye = max(y0, 0), min(y0 + bh, self.height)
        for y in range(ys, ye):
            a, b = self.row_ptr[y], self.row_ptr[y + 1]
            cols = self.cols[a:b]
            lo = np.searchsorted(cols, x0)
            hi = np.searchsorted(cols, x0 + bw)
            if lo < hi:
                out[y - y0, cols[lo:hi] - x0] = self.vals[a + lo:a + hi]
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.height, self.width), dtype=np.int32)
        for y in range(self.height):
            a, b = self.row_ptr[y], self.row_ptr[y + 1]
            out[y, self.cols[a:b]] = self.vals[a:b]
        return out


@dataclass(eq=False)
class _LevelRuntime:
    dir: LevelDir
    roles: np.ndarray                  # (nt, ns)
    ref_of: dict                       # (s, t) -> (s, t), motion levels only
    pred_rank: np.ndarray              # (nt, ns) int32, -1 for reference planes
    bits: np.ndarray                   # (nt, ns, nby, nbx) bool
    layouts: list                      # bise.Layout per plane
    ref_cache: dict                    # (s, t) -> SparseImage
    window: int = 0


@dataclass(eq=False)
class _ChannelRuntime:
    width: int
    height: int
    base: np.ndarray                   # (nbt, nbs, h, w) int32
    levels: list                       # _LevelRuntime, leaf -> root order


@dataclass(eq=False)
class Stats:
    blocks_decoded: int = 0
    payload_bits_read: int = 0
    cache_bytes: int = 0

    def as_dict(self) -> dict:
        return {"blocks_decoded": self.blocks_decoded,
                "payload_bytes_read": self.payload_bits_read // 8,
                "cache_bytes": self.cache_bytes}


@dataclass(eq=False)
class DecoderState:
    stream: CompressedStream
    channels: list = dc_field(default_factory=list)
    stats: Stats = dc_field(default_factory=Stats)


def _decode_plane(level: _LevelRuntime, dirs: LevelDir, rank: int,
                  h: int, w: int, block: int, stats: "Stats | None" = None) -> np.ndarray:
    """Stored samples of one plane (residuals for predictive planes)."""
    bits = level.bits.reshape(-1, dirs.nby, dirs.nbx)[rank]
    n = int(dirs.plane_n[rank])
    count = int(np.count_nonzero(bits)) * block * block
    vals = bise.decode_all(dirs.plane_payload(rank), count, n) + int(dirs.plane_lo[rank])
    if stats is not None:
        stats.blocks_decoded += count // (block * block)
        stats.payload_bits_read += count * int(np.ceil(level.layouts[rank].bits_per_value))
    return plane_from_payload(vals, bits, block, h, w)


def _reconstruct_level_planes(level: _LevelRuntime, h: int, w: int, block: int,
                              base: np.ndarray | None, stride: int = 0,
                              stats: "Stats | None" = None) -> np.ndarray:
    """All planes of a level with motion residuals undone (vectorized path)."""
    d = level.dir
    nt, ns = d.nt, d.ns
    out = np.zeros((nt, ns, h, w), dtype=np.int32)
    for t in range(nt):
        for s in range(ns):
            out[t, s] = _decode_plane(level, d, t * ns + s, h, w, block, stats)
    if not d.has_motion:
        return out
    n_off = 2 * level.window + 1
    for t in range(nt):
        for s in range(ns):
            if level.roles[t, s] != ROLE_PREDICTIVE:
                if base is not None:
                    out[t, s] = base[t // stride, s // stride]
                continue
            if base is not None:
                ref = base[t // stride, s // stride]
            else:
                rs, rt = level.ref_of[(s, t)]
                ref = out[rt, rs]  # reference planes carry no residuals
            modes, dys, dxs = _plane_records(level, t, s, n_off, stats)
            gathered = gather_ref_blocks(ref, dys, dxs, block, h, w)
            signs = mode_signs(modes, block, h, w)
            if d.rec_starts is not None:
                # dropped blocks: zero residual and no prediction either
                keep = np.repeat(np.repeat(level.bits[t, s], block, 0),
                                 block, 1)[:h, :w]
                gathered = gathered * keep
            out[t, s] = out[t, s] - signs * gathered
    return out


def _plane_records(level: _LevelRuntime, t: int, s: int, n_off: int,
                   stats: "Stats | None" = None):
    """All (modes, dys, dxs) arrays for one predictive plane."""
    d = level.dir
    nblocks = d.blocks_per_plane
    rank = int(level.pred_rank[t, s])
    if stats is not None:
        n_rec = (int(np.count_nonzero(level.bits[t, s]))
                 if d.rec_starts is not None else nblocks)
        stats.payload_bits_read += n_rec * (1 + 2 * bise.choose_layout(n_off).group_bits)
    if d.rec_starts is not None:
        bits = level.bits[t, s].reshape(-1)
        start = int(d.rec_starts[rank])
        count = int(np.count_nonzero(bits))
        idx = np.arange(start, start + count)
        modes = np.zeros(nblocks, dtype=np.int8)
        dys = np.zeros(nblocks, dtype=np.int16)
        dxs = np.zeros(nblocks, dtype=np.int16)
        w = (n_off - 1) // 2
        for pos, k in zip(np.nonzero(bits)[0], idx):
            modes[pos] = bise.decode_at(d.modes_payload, int(k), 2)
            dys[pos] = bise.decode_at(d.dy_payload, int(k), n_off) - w
            dxs[pos] = bise.decode_at(d.dx_payload, int(k), n_off) - w
        shape = (d.nby, d.nbx)
        return modes.reshape(shape), dys.reshape(shape), dxs.reshape(shape)
    start = rank * nblocks
    w = (n_off - 1) // 2
    modes = bise.decode_all(d.modes_payload, (rank + 1) * nblocks, 2)[start:]
    dys = bise.decode_all(d.dy_payload, (rank + 1) * nblocks, n_off)[start:] - w
    dxs = bise.decode_all(d.dx_payload, (rank + 1) * nblocks, n_off)[start:] - w
    shape = (d.nby, d.nbx)
    return (modes.astype(np.int8).reshape(shape), dys.astype(np.int16).reshape(shape),
            dxs.astype(np.int16).reshape(shape))


def open_stream(data: bytes) -> DecoderState:
    """Parse the stream, decode base images, build the reference cache."""
    stream = data if isinstance(data, CompressedStream) else parse(data)
    state = DecoderState(stream=stream)
    block = stream.block_size
    for ch in stream.channels:
        h, w = ch.height, ch.width
        base = np.zeros((ch.n_base_t, ch.n_base_s, h, w), dtype=np.int32)
        for bt in range(ch.n_base_t):
            for bs in range(ch.n_base_s):
                base[bt, bs] = decode_base_plane(
                    ch.base_payloads[bt * ch.n_base_s + bs], ch.base_lo, h, w,
                    stream.rkv_codec)
        levels = []
        for d in reversed(ch.levels):          # runtime order: leaf -> root
            if stream.variant == "mc":
                roles = mc_roles(d.nt, d.ns, stream.mc_ref_stride)
            else:
                roles = level_roles(stream, d.nt, d.ns, d.has_motion)
            ref_of = {}
            if d.has_motion and stream.variant != "mc":
                _, ref_of = cluster_reference_map(d.nt, d.ns, stream.ref_select)
            pred_rank = np.full((d.nt, d.ns), -1, dtype=np.int32)
            rank = 0
            for t in range(d.nt):
                for s in range(d.ns):
                    if d.has_motion and roles[t, s] == ROLE_PREDICTIVE:
                        pred_rank[t, s] = rank
                        rank += 1
            bits = np.unpackbits(np.frombuffer(d.bitmap, dtype=np.uint8),
                                 bitorder="little")
            bits = bits[:d.nt * d.ns * d.blocks_per_plane].astype(bool)
            bits = bits.reshape(d.nt, d.ns, d.nby, d.nbx)
            layouts = [bise.choose_layout(int(n)) for n in d.plane_n]
            lvl = _LevelRuntime(dir=d, roles=roles, ref_of=ref_of,
                                pred_rank=pred_rank, bits=bits, layouts=layouts,
                                ref_cache={}, window=stream.window)
            levels.append(lvl)
        cr = _ChannelRuntime(width=w, height=h, base=base, levels=levels)
        # reference residual planes, decoded once into sparse storage
        if stream.variant == "hmlfc":
            for lvl in levels:
                d = lvl.dir
                for t in range(d.nt):
                    for s in range(d.ns):
                        if lvl.roles[t, s] != ROLE_REFERENCE:
                            continue
                        plane = _decode_plane(lvl, d, t * d.ns + s, h, w, block)
                        lvl.ref_cache[(s, t)] = SparseImage.from_dense(plane)
        state.channels.append(cr)
    state.stats.cache_bytes = sum(
        sp.nbytes for cr in state.channels for lvl in cr.levels
        for sp in lvl.ref_cache.values())
    return state


def _check_indices(state: DecoderState, s: int, t: int, channel: int):
    st = state.stream
    if not (0 <= channel < len(state.channels)):
        raise IndexError(f"channel {channel} out of range")
    if not (0 <= s < st.grid_s and 0 <= t < st.grid_t):
        raise IndexError(f"view ({s}, {t}) outside {st.grid_s}x{st.grid_t} grid")


def _stored_block(state: DecoderState, lvl: _LevelRuntime, rank: int,
                  bx: int, by: int, block: int, bh: int, bw: int) -> np.ndarray:
    """One stored block of one plane, read via random access only."""
    d = lvl.dir
    k = by * d.nbx + bx
    bits_flat = lvl.bits.reshape(-1, d.blocks_per_plane)[rank]
    if not bits_flat[k]:
        return np.zeros((bh, bw), dtype=np.int64)
    sig_rank = int(np.count_nonzero(bits_flat[:k]))
    payload = d.plane_payload(rank)
    n = int(d.plane_n[rank])
    lo = int(d.plane_lo[rank])
    base_idx = sig_rank * block * block
    out = np.empty(block * block, dtype=np.int64)
    for i in range(block * block):
        out[i] = bise.decode_at(payload, base_idx + i, n)
    layout = lvl.layouts[rank]
    state.stats.payload_bits_read += block * block * int(np.ceil(layout.bits_per_value))
    return out.reshape(block, block)[:bh, :bw] + lo


def _record_for_block(state: DecoderState, lvl: _LevelRuntime, t: int, s: int,
                      bx: int, by: int):
    """Motion record for one predictive block, or None when dropped."""
    d = lvl.dir
    k = by * d.nbx + bx
    rank = int(lvl.pred_rank[t, s])
    if d.rec_starts is not None:
        bits_flat = lvl.bits[t, s].reshape(-1)
        if not bits_flat[k]:
            return None
        idx = int(d.rec_starts[rank]) + int(np.count_nonzero(bits_flat[:k]))
    else:
        idx = rank * d.blocks_per_plane + k
    n_off = 2 * lvl.window + 1
    mode = bise.decode_at(d.modes_payload, idx, 2)
    dy = bise.decode_at(d.dy_payload, idx, n_off) - lvl.window
    dx = bise.decode_at(d.dx_payload, idx, n_off) - lvl.window
    state.stats.payload_bits_read += 1 + 2 * bise.choose_layout(n_off).group_bits
    return mode, dy, dx


def decode_block(state: DecoderState, view: tuple[int, int],
                 block_index: tuple[int, int], channel: int = 0) -> np.ndarray:
    """Decode one pixel block of one view of one channel.

    Walks root to leaf: base image block plus each ancestor's stored
    block, undoing motion residuals through the sparse reference cache.
    Reads only the payloads on that path.
    """
    s, t = view
    bx, by = block_index
    _check_indices(state, s, t, channel)
    cr = state.channels[channel]
    st = state.stream
    b = st.block_size
    x0, y0 = bx * b, by * b
    if not (0 <= x0 < cr.width and 0 <= y0 < cr.height):
        raise IndexError(f"block ({bx}, {by}) outside image")
    bh, bw = min(b, cr.height - y0), min(b, cr.width - x0)

    if st.variant == "mc":
        acc = _decode_block_mc(state, cr, s, t, bx, by, x0, y0, bh, bw)
    else:
        hh = st.tree_height
        acc = cr.base[t >> hh, s >> hh][y0:y0 + bh, x0:x0 + bw].astype(np.int64)
        for li, lvl in enumerate(cr.levels):   # leaf -> root runtime order
            ls, lt = s >> li, t >> li
            d = lvl.dir
            rank = lt * d.ns + ls
            stored = _stored_block(state, lvl, rank, bx, by, b, bh, bw)
            if d.has_motion and lvl.roles[lt, ls] == ROLE_PREDICTIVE:
                rec = _record_for_block(state, lvl, lt, ls, bx, by)
                if rec is None:
                    continue           # dropped: zero residual, no prediction
                mode, dy, dx = rec
                rs, rt = lvl.ref_of[(ls, lt)]
                ref_blk = lvl.ref_cache[(rs, rt)].block(y0 + dy, x0 + dx, bh, bw)
                if mode == SUBTRACTIVE:
                    acc += stored + ref_blk
                else:
                    acc += stored - ref_blk
            else:
                acc += stored
    state.stats.blocks_decoded += 1
    return acc.astype(np.int32)


def _decode_block_mc(state, cr, s, t, bx, by, x0, y0, bh, bw):
    st = state.stream
    lvl = cr.levels[0]
    stride = st.mc_ref_stride
    if lvl.roles[t, s] == ROLE_REFERENCE:
        return cr.base[t // stride, s // stride][y0:y0 + bh, x0:x0 + bw].astype(np.int64)
    d = lvl.dir
    stored = _stored_block(state, lvl, t * d.ns + s, bx, by, st.block_size, bh, bw)
    rec = _record_for_block(state, lvl, t, s, bx, by)
    if rec is None:
        return stored
    mode, dy, dx = rec
    ref = cr.base[t // stride, s // stride]
    h, w = ref.shape
    blk = np.zeros((bh, bw), dtype=np.int64)
    ys, ye = max(y0 + dy, 0), min(y0 + dy + bh, h)
    xs, xe = max(x0 + dx, 0), min(x0 + dx + bw, w)
    if ys < ye and xs < xe:
        blk[ys - y0 - dy:ye - y0 - dy, xs - x0 - dx:xe - x0 - dx] = ref[ys:ye, xs:xe]
    return stored + blk if mode == SUBTRACTIVE else stored - blk


def decode_channel_view(state: DecoderState, channel: int, s: int, t: int) -> np.ndarray:
    """One channel of one view via the vectorized whole-plane route."""
    _check_indices(state, s, t, channel)
    cr = state.channels[channel]
    st = state.stream
    b = st.block_size
    h, w = cr.height, cr.width
    if st.variant == "mc":
        lvl = cr.levels[0]
        stride = st.mc_ref_stride
        if lvl.roles[t, s] == ROLE_REFERENCE:
            return cr.base[t // stride, s // stride].copy()
        d = lvl.dir
        stored = _decode_plane(lvl, d, t * d.ns + s, h, w, b, state.stats)
        n_off = 2 * st.window + 1
        modes, dys, dxs = _plane_records(lvl, t, s, n_off, state.stats)
        ref = cr.base[t // stride, s // stride]
        gathered = gather_ref_blocks(ref, dys, dxs, b, h, w)
        signs = mode_signs(modes, b, h, w)
        if d.rec_starts is not None:
            keep = np.repeat(np.repeat(lvl.bits[t, s], b, 0), b, 1)[:h, :w]
            gathered = gathered * keep
        return (stored - signs * gathered).astype(np.int32)
    hh = st.tree_height
    acc = cr.base[t >> hh, s >> hh].astype(np.int64).copy()
    for li, lvl in enumerate(cr.levels):
        ls, lt = s >> li, t >> li
        d = lvl.dir
        stored = _decode_plane(lvl, d, lt * d.ns + ls, h, w, b, state.stats)
        if d.has_motion and lvl.roles[lt, ls] == ROLE_PREDICTIVE:
            rs, rt = lvl.ref_of[(ls, lt)]
            ref = lvl.ref_cache[(rs, rt)].to_dense()
            n_off = 2 * st.window + 1
            modes, dys, dxs = _plane_records(lvl, lt, ls, n_off, state.stats)
            gathered = gather_ref_blocks(ref, dys, dxs, b, h, w)
            signs = mode_signs(modes, b, h, w)
            if d.rec_starts is not None:
                keep = np.repeat(np.repeat(lvl.bits[lt, ls], b, 0), b, 1)[:h, :w]
                gathered = gathered * keep
            acc += stored - signs * gathered
        else:
            acc += stored
    return acc.astype(np.int32)


def decode_view(state: DecoderState, s: int, t: int) -> np.ndarray:
    """Decode one view to an (H, W, 3) uint8 RGB image."""
    st = state.stream
    chans = [decode_channel_view(state, c, s, t) for c in range(len(state.channels))]
    return _assemble_rgb(st, chans)


def _assemble_rgb(stream: CompressedStream, chans: list) -> np.ndarray:
    h, w = stream.height, stream.width
    if stream.color.chroma_subsample == "half":
        chans = [chans[0]] + [upsample_chroma(c, w, h) for c in chans[1:]]
    if stream.color.transform == "ycocg_r":
        chans = ycocg_to_rgb(*chans)
    img = np.stack(chans, axis=-1)
    return np.clip(img, 0, 255).astype(np.uint8)


def decode_full(state: DecoderState) -> LightField:
    """Decode every view; vectorized per level, independent of decode_block."""
    st = state.stream
    out = np.zeros((st.grid_t, st.grid_s, st.height, st.width, 3), dtype=np.uint8)
    per_channel = []
    for c, cr in enumerate(state.channels):
        h, w = cr.height, cr.width
        b = st.block_size
        acc = np.zeros((st.grid_t, st.grid_s, h, w), dtype=np.int64)
        if st.variant == "mc":
            lvl = cr.levels[0]
            planes = _reconstruct_level_planes(lvl, h, w, b, cr.base,
                                               st.mc_ref_stride, state.stats)
            acc += planes
        else:
            hh = st.tree_height
            t_idx = np.arange(st.grid_t)
            s_idx = np.arange(st.grid_s)
            acc += cr.base[np.ix_(t_idx >> hh, s_idx >> hh)]
            for li, lvl in enumerate(cr.levels):
                planes = _reconstruct_level_planes(lvl, h, w, b, None,
                                                   stats=state.stats)
                acc += planes[np.ix_(t_idx >> li, s_idx >> li)]
        per_channel.append(acc)
    for t in range(st.grid_t):
        for s in range(st.grid_s):
            chans = [per_channel[c][t, s].astype(np.int32)
                     for c in range(len(state.channels))]
            out[t, s] = _assemble_rgb(st, chans)
    return LightField(planes=out)


def decode_pixel_rgb(state: DecoderState, s: int, t: int, x: int, y: int) -> np.ndarray:
    """Single RGB pixel via block-granular access (renderer fallback path)."""
    st = state.stream
    b = st.block_size
    chans = []
    for c, cr in enumerate(state.channels):
        cx, cy = x, y
        if c > 0 and st.color.chroma_subsample == "half":
            cx, cy = x // 2, y // 2
        blk = decode_block(state, (s, t), (cx // b, cy // b), c)
        chans.append(int(blk[cy % b, cx % b]))
    if st.color.transform == "ycocg_r":
        chans = list(ycocg_to_rgb(*chans))
    arr = np.array(chans, dtype=np.int32)
    return np.clip(arr, 0, 255).astype(np.uint8)


def stats(state: DecoderState) -> dict:
    return state.stats.as_dict()


def reset_stats(state: DecoderState) -> None:
    state.stats.blocks_decoded = 0
    state.stats.payload_bits_read = 0
