"""Phase-shifted block motion compensation over residual-view levels.

Within every 2x2 cluster one residual plane is kept verbatim as the
reference; each remaining (predictive) plane is coded block-by-block
against it. For every block an exhaustive search over all integer offsets
in [-W, W]^2 evaluates two residuals: subtractive sum |B_P - B_R| and
additive sum |B_P + B_R| (the additive mode captures sign inversions
between residual signals). The winning block is replaced by its residual;
the inverse step reproduces the original samples bit-exactly.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .hierarchy import CLUSTER, Level

SUBTRACTIVE = 0
ADDITIVE = 1
MODE_NAMES = {SUBTRACTIVE: "subtractive", ADDITIVE: "additive"}

ROLE_REFERENCE = 0
ROLE_PREDICTIVE = 1


@dataclass(frozen=True)
class McConfig:
    block_size: int = 4
    window: int = 16
    refs_per_cluster: int = 1
    ref_select: str = "topleft"   # or "center"
    phase_modes: bool = True

    def __post_init__(self):
        if self.block_size not in (2, 4, 8, 16):
            raise ValueError(f"block_size must be one of 2,4,8,16, got {self.block_size}")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.refs_per_cluster != 1:
            raise ValueError("only one reference per cluster is supported")
        if self.ref_select not in ("topleft", "center"):
            raise ValueError(f"unknown ref_select {self.ref_select!r}")


@dataclass(frozen=True)
class MotionRecord:
    mode: str                    # "subtractive" | "additive"
    dx: int
    dy: int
    block_index: tuple[int, int]
    ref_id: tuple[int, int]      # (s, t) of the reference plane in the level


@dataclass(eq=False)
class McLevel:
    """Motion-compensated level; grid structure matches the input level.

    ``planes`` holds the original SRV for reference planes and the block
    residuals for predictive planes. Per-block winner arrays (modes, dys,
    dxs, deltas) are indexed (t, s, by, bx) and only meaningful where
    roles == ROLE_PREDICTIVE.
    """

    roles: np.ndarray            # (nt, ns) uint8
    ref_of: dict                 # (s, t) -> (s, t) of its reference
    planes: np.ndarray           # (nt, ns, h, w) int32
    modes: np.ndarray            # (nt, ns, nby, nbx) int8
    dys: np.ndarray              # int16
    dxs: np.ndarray              # int16
    deltas: np.ndarray           # int64
    srv_range: tuple[int, int]
    residual_range: tuple[int, int]
    block_size: int

    @property
    def grid(self) -> tuple[int, int]:
        return self.roles.shape

    def is_reference(self, s: int, t: int) -> bool:
        return self.roles[t, s] == ROLE_REFERENCE

    def records(self, s: int, t: int) -> list[MotionRecord]:
        if self.is_reference(s, t):
            return []
        ref = self.ref_of[(s, t)]
        out = []
        nby, nbx = self.modes.shape[2:]
        for by in range(nby):
            for bx in range(nbx):
                out.append(MotionRecord(
                    mode=MODE_NAMES[int(self.modes[t, s, by, bx])],
                    dx=int(self.dxs[t, s, by, bx]),
                    dy=int(self.dys[t, s, by, bx]),
                    block_index=(bx, by),
                    ref_id=ref,
                ))
        return out


def block_starts(extent: int, block: int) -> np.ndarray:
    return np.arange(0, extent, block)


def cluster_reference_map(nt: int, ns: int, ref_select: str = "topleft"):
    """Assign one reference per 2x2 cluster; everything else is predictive.

    Returns (roles, ref_of): roles is (nt, ns) uint8; ref_of maps each
    predictive (s, t) to its cluster's reference (s, t). The default
    reference is the smallest (t, s) member; "center" picks the member at
    relative offset (1, 1) when it exists.
    """
    roles = np.full((nt, ns), ROLE_PREDICTIVE, dtype=np.uint8)
    ref_of = {}
    for ct in range((nt + CLUSTER - 1) // CLUSTER):
        for cs in range((ns + CLUSTER - 1) // CLUSTER):
            ts = list(range(ct * CLUSTER, min((ct + 1) * CLUSTER, nt)))
            ss = list(range(cs * CLUSTER, min((cs + 1) * CLUSTER, ns)))
            if ref_select == "center":
                rt, rs = ts[-1], ss[-1]
            else:
                rt, rs = ts[0], ss[0]
            roles[rt, rs] = ROLE_REFERENCE
            for t in ts:
                for s in ss:
                    if (s, t) != (rs, rt):
                        ref_of[(s, t)] = (rs, rt)
    return roles, ref_of


def select_references(level: Level, cfg: McConfig):
    nt, ns = level.grid
    return cluster_reference_map(nt, ns, cfg.ref_select)


def _ref_block(ref: np.ndarray, y0: int, x0: int, bh: int, bw: int) -> np.ndarray:
    """Block of ``ref`` at rows [y0, y0+bh), cols [x0, x0+bw); out of bounds reads 0."""
    h, w = ref.shape
    out = np.zeros((bh, bw), dtype=ref.dtype)
    ys, ye = max(y0, 0), min(y0 + bh, h)
    xs, xe = max(x0, 0), min(x0 + bw, w)
    if ys < ye and xs < xe:
        out[ys - y0:ye - y0, xs - x0:xe - x0] = ref[ys:ye, xs:xe]
    return out


def block_residuals(pred_block: np.ndarray, ref_plane: np.ndarray,
                    origin: tuple[int, int], x: int, y: int):
    """Subtractive and additive residual error sums for one offset.

    ``origin`` is the (x0, y0) pixel position of the block inside its
    plane; the reference block is read at origin + (x, y), zero-extended
    outside the reference plane.
    """
    bh, bw = pred_block.shape
    x0, y0 = origin
    br = _ref_block(ref_plane, y0 + y, x0 + x, bh, bw)
    d_minus = int(np.abs(pred_block.astype(np.int64) - br).sum())
    d_plus = int(np.abs(pred_block.astype(np.int64) + br).sum())
    return d_minus, d_plus


def search_block(pred_block: np.ndarray, ref_plane: np.ndarray,
                 origin: tuple[int, int], cfg: McConfig,
                 ref_id: tuple[int, int] = (0, 0),
                 block_index: tuple[int, int] = (0, 0)):
    """Exhaustive search for the best (mode, dx, dy) of a single block.

    The winner minimizes the residual error; ties prefer the subtractive
    mode, then the lexicographically smallest (dy, dx). Returns the
    MotionRecord and the residual block at the winner.
    """
    w = cfg.window
    best = None
    for dy in range(-w, w + 1):
        for dx in range(-w, w + 1):
            d_minus, d_plus = block_residuals(pred_block, ref_plane, origin, dx, dy)
            for delta, mode in ((d_minus, SUBTRACTIVE), (d_plus, ADDITIVE)):
                if not cfg.phase_modes and mode == ADDITIVE:
                    continue
                key = (delta, mode, dy, dx)
                if best is None or key < best:
                    best = key
    delta, mode, dy, dx = best
    x0, y0 = origin
    br = _ref_block(ref_plane, y0 + dy, x0 + dx, *pred_block.shape)
    residual = pred_block - br if mode == SUBTRACTIVE else pred_block + br
    record = MotionRecord(MODE_NAMES[mode], dx, dy, block_index, ref_id)
    return record, residual


def _shift_into(ref: np.ndarray, dy: int, dx: int, out: np.ndarray) -> np.ndarray:
    """out[y, x] = ref[y + dy, x + dx], zero outside."""
    h, w = ref.shape
    out[:] = 0
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    if y0 < y1 and x0 < x1:
        out[y0:y1, x0:x1] = ref[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
    return out


def search_plane(pred: np.ndarray, ref: np.ndarray, cfg: McConfig):
    """Vectorized exhaustive search for every block of one plane.

    Returns (deltas, modes, dys, dxs) arrays of shape (nby, nbx), using the
    same winner ordering as :func:`search_block`.
    """
    h, w = pred.shape
    b = cfg.block_size
    ri, ci = block_starts(h, b), block_starts(w, b)
    nby, nbx = len(ri), len(ci)
    best = np.full((nby, nbx), np.iinfo(np.int64).max, dtype=np.int64)
    modes = np.zeros((nby, nbx), dtype=np.int8)
    dys = np.zeros((nby, nbx), dtype=np.int16)
    dxs = np.zeros((nby, nbx), dtype=np.int16)
    shifted = np.empty_like(ref)
    p64 = pred.astype(np.int64)
    for dy in range(-cfg.window, cfg.window + 1):
        for dx in range(-cfg.window, cfg.window + 1):
            _shift_into(ref, dy, dx, shifted)
            d_sub = np.add.reduceat(np.add.reduceat(
                np.abs(p64 - shifted), ri, axis=0), ci, axis=1)
            # equal-delta subtractive candidates displace an additive winner
            upd = (d_sub < best) | ((d_sub == best) & (modes == ADDITIVE))
            best[upd] = d_sub[upd]
            modes[upd] = SUBTRACTIVE
            dys[upd] = dy
            dxs[upd] = dx
            if cfg.phase_modes:
                d_add = np.add.reduceat(np.add.reduceat(
                    np.abs(p64 + shifted), ri, axis=0), ci, axis=1)
                upd = d_add < best
                best[upd] = d_add[upd]
                modes[upd] = ADDITIVE
                dys[upd] = dy
                dxs[upd] = dx
    return best, modes, dys, dxs


def gather_ref_blocks(ref: np.ndarray, dys: np.ndarray, dxs: np.ndarray,
                      block: int, h: int, w: int) -> np.ndarray:
    """Per-block displaced read of the reference plane, zero-extended.

    Returns an (h, w) array whose block (by, bx) holds the reference
    samples at offset (dys[by,bx], dxs[by,bx]).
    """
    dy_pix = np.repeat(np.repeat(dys, block, 0), block, 1)[:h, :w].astype(np.int64)
    dx_pix = np.repeat(np.repeat(dxs, block, 0), block, 1)[:h, :w].astype(np.int64)
    src_y = np.arange(h)[:, None] + dy_pix
    src_x = np.arange(w)[None, :] + dx_pix
    valid = (src_y >= 0) & (src_y < ref.shape[0]) & (src_x >= 0) & (src_x < ref.shape[1])
    out = ref[np.clip(src_y, 0, ref.shape[0] - 1), np.clip(src_x, 0, ref.shape[1] - 1)]
    out[~valid] = 0
    return out


def mode_signs(modes: np.ndarray, block: int, h: int, w: int) -> np.ndarray:
    """Per-pixel sign: -1 for subtractive blocks, +1 for additive blocks."""
    signs = np.where(modes == SUBTRACTIVE, -1, 1).astype(np.int32)
    return np.repeat(np.repeat(signs, block, 0), block, 1)[:h, :w]


def compensate_level(level: Level, cfg: McConfig,
                     ref_planes: np.ndarray | None = None) -> McLevel:
    """Replace every block of every predictive SRV with its best residual.

    ``ref_planes`` optionally substitutes the planes read at reference
    positions; the encoder passes the thresholded references here so the
    search sees exactly what the decoder will reconstruct against.
    """
    roles, ref_of = select_references(level, cfg)
    refs = level.srvs if ref_planes is None else ref_planes
    nt, ns = level.grid
    h, w = level.srvs.shape[2:]
    nby = len(block_starts(h, cfg.block_size))
    nbx = len(block_starts(w, cfg.block_size))
    planes = level.srvs.copy()
    modes = np.zeros((nt, ns, nby, nbx), dtype=np.int8)
    dys = np.zeros((nt, ns, nby, nbx), dtype=np.int16)
    dxs = np.zeros((nt, ns, nby, nbx), dtype=np.int16)
    deltas = np.zeros((nt, ns, nby, nbx), dtype=np.int64)
    for t in range(nt):
        for s in range(ns):
            if roles[t, s] == ROLE_REFERENCE:
                continue
            rs, rt = ref_of[(s, t)]
            ref = refs[rt, rs]
            d, m, vy, vx = search_plane(level.srvs[t, s], ref, cfg)
            gathered = gather_ref_blocks(ref, vy, vx, cfg.block_size, h, w)
            signs = mode_signs(m, cfg.block_size, h, w)
            planes[t, s] = level.srvs[t, s] + signs * gathered
            deltas[t, s], modes[t, s], dys[t, s], dxs[t, s] = d, m, vy, vx
    lo, hi = level.srv_range
    r = hi - lo
    return McLevel(roles=roles, ref_of=ref_of, planes=planes,
                   modes=modes, dys=dys, dxs=dxs, deltas=deltas,
                   srv_range=level.srv_range, residual_range=(-r, r),
                   block_size=cfg.block_size)


def recompensate_block(residual_block: np.ndarray, mode: int, dy: int, dx: int,
                       ref_plane: np.ndarray, origin: tuple[int, int]) -> np.ndarray:
    """Invert one block's residual using its record and reference plane."""
    x0, y0 = origin
    br = _ref_block(ref_plane, y0 + dy, x0 + dx, *residual_block.shape)
    if mode == SUBTRACTIVE:
        return residual_block + br
    return residual_block - br


def recompensate_level(mc: McLevel, ref_planes: np.ndarray | None = None) -> np.ndarray:
    """Rebuild the original SRV planes from residuals, bit-exactly.

    Pass the same ``ref_planes`` that compensate_level saw, if any.
    """
    nt, ns = mc.grid
    h, w = mc.planes.shape[2:]
    out = mc.planes.copy()
    refs = out if ref_planes is None else ref_planes
    for t in range(nt):
        for s in range(ns):
            if mc.is_reference(s, t):
                continue
            rs, rt = mc.ref_of[(s, t)]
            ref = refs[rt, rs]  # references are stored verbatim
            gathered = gather_ref_blocks(ref, mc.dys[t, s], mc.dxs[t, s],
                                         mc.block_size, h, w)
            signs = mode_signs(mc.modes[t, s], mc.block_size, h, w)
            out[t, s] = mc.planes[t, s] - signs * gathered
    return out


def records_to_csv(levels: list[McLevel], path) -> None:
    """Debug dump of every predictive block's winning record."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "s", "t", "bx", "by", "mode", "dx", "dy", "delta"])
        for li, mc in enumerate(levels):
            nt, ns = mc.grid
            nby, nbx = mc.modes.shape[2:]
            for t in range(nt):
                for s in range(ns):
                    if mc.is_reference(s, t):
                        continue
                    for by in range(nby):
                        for bx in range(nbx):
                            writer.writerow([
                                li, s, t, bx, by,
                                MODE_NAMES[int(mc.modes[t, s, by, bx])],
                                int(mc.dxs[t, s, by, bx]),
                                int(mc.dys[t, s, by, bx]),
                                int(mc.deltas[t, s, by, bx]),
                            ])
