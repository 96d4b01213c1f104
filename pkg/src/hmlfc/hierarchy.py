"""Hierarchical key-view / residual-view pyramid over the camera grid.

Each level clusters its input planes into 2x2 spatial tiles of the (s, t)
grid, computes one representative key view (RKV) per cluster as the
rounded per-pixel mean, and one sparse residual view (SRV) per input plane
as the exact difference against its cluster's RKV. The RKV grid becomes
the next level's input. Reconstruction of any leaf plane is the top-level
RKV plus the SRVs along the root-to-leaf path, exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .lightfield import Plane, round_half_away

CLUSTER = 2  # spatial cluster factor per grid axis


@dataclass(eq=False)
class SRVCluster:
    """Residual planes of one cluster plus their parent key view.

    ``members`` holds (s, t, plane) triples for the real (non-padded)
    grid positions covered by the cluster; member planes satisfy
    member = child_plane - parent_rkv pixel-wise.
    """

    members: list
    parent_rkv: Plane


@dataclass(eq=False)
class Level:
    """One pyramid level: SRVs for every input plane, RKVs per cluster."""

    srvs: np.ndarray            # (nt, ns, h, w) int32, one per input plane
    rkvs: np.ndarray            # (nct, ncs, h, w) int32
    srv_range: tuple[int, int]
    rkv_range: tuple[int, int]
    cluster_shape: tuple[int, int] = (CLUSTER, CLUSTER)

    @property
    def grid(self) -> tuple[int, int]:
        return self.srvs.shape[0], self.srvs.shape[1]

    @property
    def cluster_grid(self) -> tuple[int, int]:
        return self.rkvs.shape[0], self.rkvs.shape[1]

    def rkv_plane(self, cs: int, ct: int) -> Plane:
        return Plane(self.rkvs[ct, cs], self.rkv_range)

    def srv_plane(self, s: int, t: int) -> Plane:
        return Plane(self.srvs[t, s], self.srv_range)

    def cluster(self, cs: int, ct: int) -> SRVCluster:
        nt, ns = self.grid
        members = []
        for t in range(ct * CLUSTER, min((ct + 1) * CLUSTER, nt)):
            for s in range(cs * CLUSTER, min((cs + 1) * CLUSTER, ns)):
                members.append((s, t, self.srv_plane(s, t)))
        return SRVCluster(members, self.rkv_plane(cs, ct))


@dataclass(eq=False)
class HierarchyTree:
    """Pyramid levels ordered bottom (0) to top; ``top_rkvs`` is the root."""

    height: int
    levels: list[Level] = field(default_factory=list)

    @property
    def top_rkvs(self) -> np.ndarray:
        return self.levels[-1].rkvs

    @property
    def top_rkv_range(self) -> tuple[int, int]:
        return self.levels[-1].rkv_range


def cluster_planes(planes, factor: tuple[int, int] = (CLUSTER, CLUSTER)):
    """Tile a 2D grid of planes into non-overlapping clusters.

    ``planes`` is indexed [t][s]. Returns a [ct][cs] grid of member lists,
    each member an (s, t, plane, padded) tuple; odd grid edges replicate
    the last row/column and mark those members padded.
    """
    ft, fs = factor
    nt = len(planes)
    ns = len(planes[0])
    out = []
    for ct in range((nt + ft - 1) // ft):
        row = []
        for cs in range((ns + fs - 1) // fs):
            members = []
            for dt in range(ft):
                for ds in range(fs):
                    t, s = ct * ft + dt, cs * fs + ds
                    tc, sc = min(t, nt - 1), min(s, ns - 1)
                    members.append((s, t, planes[tc][sc], t >= nt or s >= ns))
            row.append(members)
        out.append(row)
    return out


def compute_rkv(members) -> Plane:
    """Per-pixel arithmetic mean of member planes, rounded half away from zero."""
    planes = [m[2] if isinstance(m, tuple) else m for m in members]
    if not planes:
        raise ValueError("empty cluster")
    shape = planes[0].samples.shape
    for p in planes:
        if p.samples.shape != shape:
            raise ValueError(f"member shape {p.samples.shape} != {shape}")
    total = np.zeros(shape, dtype=np.int64)
    for p in planes:
        total += p.samples
    mean = round_half_away(total, len(planes)).astype(np.int32)
    return Plane(mean, planes[0].value_range)


def compute_srvs(members, rkv: Plane) -> SRVCluster:
    """Exact member-minus-RKV differences for the real members of a cluster."""
    lo, hi = rkv.value_range
    r = hi - lo
    out = []
    for s, t, plane, padded in members:
        if padded:
            continue
        out.append((s, t, Plane(plane.samples - rkv.samples, (-r, r))))
    return SRVCluster(out, rkv)


def _level_from_arrays(x: np.ndarray, value_range) -> Level:
    """Build one level from (nt, ns, h, w) input planes, vectorized."""
    nt, ns = x.shape[:2]
    pad_t, pad_s = nt % CLUSTER, ns % CLUSTER
    xp = np.pad(x, ((0, pad_t), (0, pad_s), (0, 0), (0, 0)), mode="edge")
    nct, ncs = xp.shape[0] // CLUSTER, xp.shape[1] // CLUSTER
    grouped = xp.reshape(nct, CLUSTER, ncs, CLUSTER, *x.shape[2:])
    sums = grouped.sum(axis=(1, 3), dtype=np.int64)
    rkvs = round_half_away(sums, CLUSTER * CLUSTER).astype(np.int32)
    parents = np.repeat(np.repeat(rkvs, CLUSTER, axis=0), CLUSTER, axis=1)
    srvs = x - parents[:nt, :ns]
    lo, hi = value_range
    r = hi - lo
    return Level(srvs=srvs, rkvs=rkvs, srv_range=(-r, r), rkv_range=(lo, hi))


def max_height(grid_s: int, grid_t: int) -> int:
    return int(np.floor(np.log2(min(grid_s, grid_t))))


def build_tree(channel: np.ndarray, value_range, height: int) -> HierarchyTree:
    """Build the full pyramid for one channel.

    ``channel`` is (grid_t, grid_s, h, w) integer samples. Levels are built
    bottom-up; level L takes level L-1's RKV grid as input. Requires
    1 <= height <= floor(log2(min(grid_s, grid_t))).
    """
    nt, ns = channel.shape[:2]
    hmax = max_height(ns, nt)
    if not 1 <= height <= hmax:
        raise ValueError(f"height {height} outside [1, {hmax}] for {ns}x{nt} grid")
    tree = HierarchyTree(height=height)
    x = channel.astype(np.int32, copy=False)
    rng = tuple(value_range)
    for _ in range(height):
        level = _level_from_arrays(x, rng)
        tree.levels.append(level)
        x = level.rkvs
        rng = level.rkv_range
    return tree


def reconstruct_leaves(tree: HierarchyTree) -> np.ndarray:
    """Invert the pyramid: top RKVs plus SRVs down every path, exactly."""
    x = tree.top_rkvs
    for level in reversed(tree.levels):
        nt, ns = level.grid
        parents = np.repeat(np.repeat(x, CLUSTER, axis=0), CLUSTER, axis=1)
        x = parents[:nt, :ns] + level.srvs
    return x


def dump_tree_images(tree: HierarchyTree, directory) -> None:
    """Debug export: RKV/SRV planes as grayscale PNGs, SRVs bias-shifted."""
    from pathlib import Path

    from PIL import Image

    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for li, level in enumerate(tree.levels):
        lo, hi = level.srv_range
        for t in range(level.grid[0]):
            for s in range(level.grid[1]):
                img = (level.srvs[t, s].astype(np.int64) - lo) * 255 // max(hi - lo, 1)
                Image.fromarray(img.astype(np.uint8)).save(
                    root / f"level{li}_srv_{t:02d}_{s:02d}.png"
                )
        rlo, rhi = level.rkv_range
        for ct in range(level.cluster_grid[0]):
            for cs in range(level.cluster_grid[1]):
                img = (level.rkvs[ct, cs].astype(np.int64) - rlo) * 255 // max(rhi - rlo, 1)
                Image.fromarray(img.astype(np.uint8)).save(
                    root / f"level{li}_rkv_{ct:02d}_{cs:02d}.png"
                )
