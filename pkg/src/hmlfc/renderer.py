"""Novel-view synthesis from the compressed stream.

Rays are cast from a pinhole camera, intersected with the two parallel
parameterization planes, and evaluated by quadrilinear interpolation:
bilinear over the four nearest cameras times bilinear over the four
nearest pixels of each, sixteen taps total. The bulk path runs a
numba-compiled kernel over views decoded on demand into a cache; the
scalar path (sample_lf) fetches taps through block-granular decoding and
serves as the cross-check oracle.

World convention: x right, y down, z forward. The camera plane sits at
z = 0, the image plane at z = separation. A camera with yaw = pitch = 0
looks along +z; positive pitch looks up (toward -y).
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np
from numba import njit, prange

from .decoder import DecoderState, decode_pixel_rgb, decode_view


@dataclass(frozen=True)
class LfGeometry:
    """Two-plane parameterization: camera plane (uv) and image plane (st)."""

    uv_rect: tuple[float, float, float, float]   # (u0, v0, u1, v1) at z = 0
    st_rect: tuple[float, float, float, float]   # (x0, y0, x1, y1) at z = separation
    separation: float
    grid_s: int
    grid_t: int
    width: int
    height: int

    def __post_init__(self):
        u0, v0, u1, v1 = self.uv_rect
        x0, y0, x1, y1 = self.st_rect
        if not (u1 >= u0 and v1 >= v0 and x1 > x0 and y1 > y0):
            raise ValueError("degenerate plane rectangle")
        if self.separation <= 0:
            raise ValueError("plane separation must be > 0")

    @property
    def cam_spacing(self) -> tuple[float, float]:
        u0, v0, u1, v1 = self.uv_rect
        su = (u1 - u0) / (self.grid_s - 1) if self.grid_s > 1 else 1.0
        sv = (v1 - v0) / (self.grid_t - 1) if self.grid_t > 1 else 1.0
        return su, sv

    def camera_uv(self, s: float, t: float) -> tuple[float, float]:
        su, sv = self.cam_spacing
        return self.uv_rect[0] + s * su, self.uv_rect[1] + t * sv

    def grid_coords(self, u, v):
        """Continuous camera-grid index of a camera-plane point."""
        su, sv = self.cam_spacing
        return (u - self.uv_rect[0]) / su, (v - self.uv_rect[1]) / sv

    def pixel_coords(self, x_img, y_img):
        """Continuous pixel index of an image-plane point (pixel-center at integers)."""
        x0, y0, x1, y1 = self.st_rect
        px = (x_img - x0) / ((x1 - x0) / self.width) - 0.5
        py = (y_img - y0) / ((y1 - y0) / self.height) - 0.5
        return px, py

    def valid_zone(self) -> dict:
        """Axis-aligned camera-position box the interactive viewer may roam."""
        u0, v0, u1, v1 = self.uv_rect
        return {"x": [u0, u1], "y": [v0, v1],
                "z": [-0.5 * self.separation, 0.0]}

    def to_dict(self) -> dict:
        return {"uv_rect": list(self.uv_rect), "st_rect": list(self.st_rect),
                "separation": self.separation, "grid_s": self.grid_s,
                "grid_t": self.grid_t, "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d: dict) -> "LfGeometry":
        return cls(uv_rect=tuple(d["uv_rect"]), st_rect=tuple(d["st_rect"]),
                   separation=float(d["separation"]), grid_s=int(d["grid_s"]),
                   grid_t=int(d["grid_t"]), width=int(d["width"]),
                   height=int(d["height"]))


def default_geometry(grid_s: int, grid_t: int, width: int, height: int) -> LfGeometry:
    """Centered unit-spacing geometry used when no sidecar file exists."""
    hu, hv = (grid_s - 1) / 2, (grid_t - 1) / 2
    return LfGeometry(
        uv_rect=(-hu, -hv, hu, hv),
        st_rect=(-width / 2, -height / 2, width / 2, height / 2),
        separation=1.5 * max(width, height),
        grid_s=grid_s, grid_t=grid_t, width=width, height=height)


def geometry_for_stream(stream, sidecar_path=None) -> LfGeometry:
    """Geometry from a sidecar JSON next to the stream, else defaults."""
    if sidecar_path is not None:
        p = Path(sidecar_path)
        if p.exists():
            d = json.loads(p.read_text())
            d.setdefault("grid_s", stream.grid_s)
            d.setdefault("grid_t", stream.grid_t)
            d.setdefault("width", stream.width)
            d.setdefault("height", stream.height)
            return LfGeometry.from_dict(d)
    return default_geometry(stream.grid_s, stream.grid_t, stream.width, stream.height)


@dataclass(frozen=True)
class Camera:
    position: tuple[float, float, float]
    view: tuple[float, float, float] = (0.0, 0.0, 1.0)
    up: tuple[float, float, float] = (0.0, -1.0, 0.0)
    fov: float = 45.0                    # full vertical angle, degrees
    resolution: tuple[int, int] = (512, 512)
    principal_shift: tuple[float, float] = (0.0, 0.0)

    def basis(self):
        fwd = np.asarray(self.view, dtype=np.float64)
        fwd = fwd / np.linalg.norm(fwd)
        up = np.asarray(self.up, dtype=np.float64)
        right = np.cross(fwd, up)
        right = right / np.linalg.norm(right)
        true_up = np.cross(right, fwd)
        return right, -true_up, fwd      # right, down, forward


def pose_camera(x: float, y: float, z: float, yaw: float, pitch: float,
                fov: float = 45.0, resolution=(512, 512)) -> Camera:
    """Camera from a position plus yaw/pitch in degrees (roll-free)."""
    cy, sy = math.cos(math.radians(yaw)), math.sin(math.radians(yaw))
    cp, sp = math.cos(math.radians(pitch)), math.sin(math.radians(pitch))
    view = (sy * cp, -sp, cy * cp)
    return Camera(position=(x, y, z), view=view, fov=float(fov),
                  resolution=tuple(resolution))


def camera_for_view(geometry: LfGeometry, s: int, t: int,
                    resolution=None) -> Camera:
    """Camera at grid viewpoint (s, t) whose frustum exactly spans st_rect.

    Rendering with this camera at the native resolution reproduces the
    stored view, pixel centers landing exactly on source pixels.
    """
    u, v = geometry.camera_uv(s, t)
    x0, y0, x1, y1 = geometry.st_rect
    sep = geometry.separation
    half_h = (y1 - y0) / (2 * sep)
    shift_x = ((x0 + x1) / 2 - u) / sep
    shift_y = ((y0 + y1) / 2 - v) / sep
    res = resolution or (geometry.width, geometry.height)
    return Camera(position=(u, v, 0.0), fov=math.degrees(2 * math.atan(half_h)),
                  resolution=res, principal_shift=(shift_x, shift_y))


def camera_rays(camera: Camera):
    """Per-pixel ray directions (h, w, 3); origins are camera.position."""
    w, h = camera.resolution
    right, down, fwd = camera.basis()
    half_h = math.tan(math.radians(camera.fov) / 2)
    half_w = half_h * (w / h)
    nx = (np.arange(w) + 0.5) / w * 2 - 1
    ny = (np.arange(h) + 0.5) / h * 2 - 1
    sx, sy = camera.principal_shift
    dirs = (fwd[None, None, :]
            + right[None, None, :] * (half_w * nx[None, :, None] + sx)
            + down[None, None, :] * (half_h * ny[:, None, None] + sy))
    return dirs


def ray_to_lf(origin, direction, geometry: LfGeometry):
    """Intersect one ray with both planes; None when outside either rectangle."""
    ox, oy, oz = origin
    dx, dy, dz = direction
    if dz == 0:
        return None
    k0 = (0.0 - oz) / dz
    k1 = (geometry.separation - oz) / dz
    u, v = ox + k0 * dx, oy + k0 * dy
    x_img, y_img = ox + k1 * dx, oy + k1 * dy
    u0, v0, u1, v1 = geometry.uv_rect
    x0, y0, x1, y1 = geometry.st_rect
    if not (u0 <= u <= u1 and v0 <= v <= v1):
        return None
    if not (x0 <= x_img <= x1 and y0 <= y_img <= y1):
        return None
    return u, v, x_img, y_img


class ViewCache:
    """Views decoded on demand into one dense array (lazy pages keep it cheap)."""

    def __init__(self, state: DecoderState):
        self.state = state
        st = state.stream
        self.views = np.zeros((st.grid_t, st.grid_s, st.height, st.width, 3),
                              dtype=np.uint8)
        self.loaded = np.zeros((st.grid_t, st.grid_s), dtype=bool)

    def ensure(self, s: int, t: int) -> None:
        if not self.loaded[t, s]:
            self.views[t, s] = decode_view(self.state, s, t)
            self.loaded[t, s] = True

    @property
    def loaded_count(self) -> int:
        return int(np.count_nonzero(self.loaded))


@njit(cache=True, parallel=True)
def _render_kernel(views, cs, ct, px, py, miss, bg, out):
    h, w = out.shape[0], out.shape[1]
    T, S = views.shape[0], views.shape[1]
    H, W = views.shape[2], views.shape[3]
    for j in prange(h):
        for i in range(w):
            if miss[j, i]:
                out[j, i, 0] = bg[0]
                out[j, i, 1] = bg[1]
                out[j, i, 2] = bg[2]
                continue
            u = cs[j, i]
            v = ct[j, i]
            x = px[j, i]
            y = py[j, i]
            su = int(math.floor(u))
            fu = u - su
            if su < 0:
                su = 0
                fu = 0.0
            if su >= S - 1:
                su = S - 1
                fu = 0.0
            sv = int(math.floor(v))
            fv = v - sv
            if sv < 0:
                sv = 0
                fv = 0.0
            if sv >= T - 1:
                sv = T - 1
                fv = 0.0
            xi = int(math.floor(x))
            fx = x - xi
            if xi < 0:
                xi = 0
                fx = 0.0
            if xi >= W - 1:
                xi = W - 1
                fx = 0.0
            yi = int(math.floor(y))
            fy = y - yi
            if yi < 0:
                yi = 0
                fy = 0.0
            if yi >= H - 1:
                yi = H - 1
                fy = 0.0
            su1 = su + 1 if su + 1 < S else su
            sv1 = sv + 1 if sv + 1 < T else sv
            xi1 = xi + 1 if xi + 1 < W else xi
            yi1 = yi + 1 if yi + 1 < H else yi
            r = 0.0
            g = 0.0
            b = 0.0
            for a in range(2):
                ws = (1.0 - fu) if a == 0 else fu
                if ws == 0.0:
                    continue
                si = su if a == 0 else su1
                for c in range(2):
                    wt = (1.0 - fv) if c == 0 else fv
                    wc = ws * wt
                    if wc == 0.0:
                        continue
                    ti = sv if c == 0 else sv1
                    vw = views[ti, si]
                    w00 = (1.0 - fx) * (1.0 - fy)
                    w10 = fx * (1.0 - fy)
                    w01 = (1.0 - fx) * fy
                    w11 = fx * fy
                    r += wc * (w00 * vw[yi, xi, 0] + w10 * vw[yi, xi1, 0]
                               + w01 * vw[yi1, xi, 0] + w11 * vw[yi1, xi1, 0])
                    g += wc * (w00 * vw[yi, xi, 1] + w10 * vw[yi, xi1, 1]
                               + w01 * vw[yi1, xi, 1] + w11 * vw[yi1, xi1, 1])
                    b += wc * (w00 * vw[yi, xi, 2] + w10 * vw[yi, xi1, 2]
                               + w01 * vw[yi1, xi, 2] + w11 * vw[yi1, xi1, 2])
            out[j, i, 0] = np.uint8(r + 0.5)
            out[j, i, 1] = np.uint8(g + 0.5)
            out[j, i, 2] = np.uint8(b + 0.5)


def _project_rays(camera: Camera, geometry: LfGeometry):
    """Vectorized plane intersections for every pixel of the camera."""
    dirs = camera_rays(camera)
    ox, oy, oz = camera.position
    dz = dirs[..., 2]
    safe = dz != 0
    dzs = np.where(safe, dz, 1.0)
    k0 = (0.0 - oz) / dzs
    k1 = (geometry.separation - oz) / dzs
    u = ox + k0 * dirs[..., 0]
    v = oy + k0 * dirs[..., 1]
    x_img = ox + k1 * dirs[..., 0]
    y_img = oy + k1 * dirs[..., 1]
    u0, v0, u1, v1 = geometry.uv_rect
    x0, y0, x1, y1 = geometry.st_rect
    miss = (~safe | (u < u0) | (u > u1) | (v < v0) | (v > v1)
            | (x_img < x0) | (x_img > x1) | (y_img < y0) | (y_img > y1))
    cs, ct = geometry.grid_coords(u, v)
    px, py = geometry.pixel_coords(x_img, y_img)
    return cs, ct, px, py, miss


def touched_views(cs, ct, miss, grid_s: int, grid_t: int):
    """Camera grid indices the quadrilinear footprint can touch."""
    if miss.all():
        return []
    csv = cs[~miss]
    ctv = ct[~miss]
    s_lo = int(np.clip(np.floor(csv.min()), 0, grid_s - 1))
    s_hi = int(np.clip(np.floor(csv.max()) + 1, 0, grid_s - 1))
    t_lo = int(np.clip(np.floor(ctv.min()), 0, grid_t - 1))
    t_hi = int(np.clip(np.floor(ctv.max()) + 1, 0, grid_t - 1))
    return [(s, t) for t in range(t_lo, t_hi + 1) for s in range(s_lo, s_hi + 1)]


def set_render_threads(threads: int) -> int:
    """Clamp to the machine's numba thread pool; returns the effective count."""
    limit = numba.config.NUMBA_NUM_THREADS
    eff = max(1, min(int(threads), limit))
    numba.set_num_threads(eff)
    return eff


def render(state: DecoderState, camera: Camera, geometry: LfGeometry,
           threads: int = 1, background=(0, 0, 0),
           cache: ViewCache | None = None) -> np.ndarray:
    """Render an (h, w, 3) uint8 image; deterministic for any thread count."""
    if cache is None:
        cache = ViewCache(state)
    cs, ct, px, py, miss = _project_rays(camera, geometry)
    for s, t in touched_views(cs, ct, miss, geometry.grid_s, geometry.grid_t):
        cache.ensure(s, t)
    w, h = camera.resolution
    out = np.empty((h, w, 3), dtype=np.uint8)
    bg = np.asarray(background, dtype=np.float64)
    set_render_threads(threads)
    _render_kernel(cache.views, cs, ct, px, py, miss, bg, out)
    return out


def sample_lf(state: DecoderState, u: float, v: float, s: float, t: float) -> np.ndarray:
    """Quadrilinear sample at continuous camera (u, v) and pixel (s, t) coords.

    Sixteen taps fetched through block-granular decoding; the bulk kernel
    must agree with this everywhere.
    """
    st = state.stream
    S, T, W, H = st.grid_s, st.grid_t, st.width, st.height

    def split(val, n):
        i = int(math.floor(val))
        f = val - i
        if i < 0:
            i, f = 0, 0.0
        if i >= n - 1:
            i, f = n - 1, 0.0
        return i, min(i + 1, n - 1), f

    s0, s1, fu = split(u, S)
    t0, t1, fv = split(v, T)
    x0, x1, fx = split(s, W)
    y0, y1, fy = split(t, H)
    acc = np.zeros(3, dtype=np.float64)
    for (si, ws) in ((s0, 1 - fu), (s1, fu)):
        if ws == 0.0:
            continue
        for (ti, wt) in ((t0, 1 - fv), (t1, fv)):
            wc = ws * wt
            if wc == 0.0:
                continue
            for (xi, wx) in ((x0, 1 - fx), (x1, fx)):
                for (yi, wy) in ((y0, 1 - fy), (y1, fy)):
                    wpix = wc * wx * wy
                    if wpix == 0.0:
                        continue
                    acc += wpix * decode_pixel_rgb(state, si, ti, xi, yi)
    return np.uint8(acc + 0.5)


def render_reference(full_planes: np.ndarray, camera: Camera,
                     geometry: LfGeometry, background=(0, 0, 0)) -> np.ndarray:
    """Oracle renderer over a fully decoded (T, S, H, W, 3) array, pure numpy."""
    cs, ct, px, py, miss = _project_rays(camera, geometry)
    w, h = camera.resolution
    out = np.empty((h, w, 3), dtype=np.uint8)
    bg = np.asarray(background, dtype=np.float64)
    views = np.ascontiguousarray(full_planes)
    # scalar loop mirrors the kernel exactly, op for op
    _render_kernel.py_func(views, cs, ct, px, py, miss, bg, out)
    return out
