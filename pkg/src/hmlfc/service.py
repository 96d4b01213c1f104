"""Local HTTP service: interactive novel-view rendering over a compressed stream.

Endpoints:
  GET /api/meta   stream dimensions, geometry, encode parameters, valid zone
  GET /api/view   query-encoded pose -> PNG bytes (X-Render-Ms header)
  GET /api/stats  session counters (frames, render times, blocks, cache)
  GET /           static viewer bundle, when one is built

Responses depend only on (stream, request); the stats endpoint is
observational. View decoding populates a shared cache behind a lock, so
concurrent requests render the same bytes as a serial run.
"""

import io
import threading
import time
from pathlib import Path

import numpy as np
from PIL import Image

from . import decoder as dec
from .renderer import (LfGeometry, ViewCache, geometry_for_stream, pose_camera,
                       render, set_render_threads)

MAX_DIM = 1024
FOV_MIN, FOV_MAX = 1.0, 120.0


class ViewService:
    """Owns the open stream, render cache, and session counters."""

    def __init__(self, stream_path, geometry: LfGeometry | None = None,
                 threads: int = 1):
        self.path = Path(stream_path)
        self.state = dec.open_stream(self.path.read_bytes())
        sidecar = self.path.with_suffix(self.path.suffix + ".json")
        self.geometry = geometry or geometry_for_stream(
            self.state.stream, sidecar if sidecar.exists() else None)
        self.threads = set_render_threads(threads)
        self.cache = ViewCache(self.state)
        self._lock = threading.Lock()
        self.frames = 0
        self.total_render_ms = 0.0
        self.last_render_ms = 0.0
        self.last_blocks = 0

    def meta(self) -> dict:
        stream = self.state.stream
        return {
            "grid_s": stream.grid_s, "grid_t": stream.grid_t,
            "width": stream.width, "height": stream.height,
            "variant": stream.variant,
            "params": stream.params(),
            "size_bytes": stream.size_bytes,
            "bpp": stream.bpp,
            "geometry": self.geometry.to_dict(),
            "valid_zone": self.geometry.valid_zone(),
        }

    def render_view(self, x, y, z, yaw, pitch, fov, w, h,
                    quality: str = "full") -> tuple[bytes, float]:
        if quality == "fast":
            rw, rh = max(1, (w + 1) // 2), max(1, (h + 1) // 2)
        else:
            rw, rh = w, h
        camera = pose_camera(x, y, z, yaw=yaw, pitch=pitch, fov=fov,
                             resolution=(rw, rh))
        before = self.state.stats.blocks_decoded
        t0 = time.perf_counter()
        img = render(self.state, camera, self.geometry,
                     threads=self.threads, cache=self.cache)
        ms = (time.perf_counter() - t0) * 1e3
        if (rw, rh) != (w, h):
            img = np.repeat(np.repeat(img, 2, axis=0), 2, axis=1)[:h, :w]
        buf = io.BytesIO()
        Image.fromarray(img).save(buf, format="PNG")
        with self._lock:
            self.frames += 1
            self.total_render_ms += ms
            self.last_render_ms = ms
            self.last_blocks = self.state.stats.blocks_decoded - before
        return buf.getvalue(), ms

    def stats(self) -> dict:
        with self._lock:
            frames = self.frames
            mean_ms = self.total_render_ms / frames if frames else 0.0
            out = {
                "frames": frames,
                "mean_render_ms": round(mean_ms, 3),
                "last_render_ms": round(self.last_render_ms, 3),
                "blocks_last_frame": self.last_blocks,
            }
        st = self.state.stats.as_dict()
        out["blocks_decoded"] = st["blocks_decoded"]
        out["payload_bytes_read"] = st["payload_bytes_read"]
        out["cache_bytes"] = st["cache_bytes"]
        out["views_loaded"] = self.cache.loaded_count
        return out


def default_ui_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "frontend" / "dist"


def create_app(stream_path, geometry: LfGeometry | None = None,
               threads: int = 1, ui_dir=None):
    from fastapi import FastAPI, HTTPException, Query
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import Response

    svc = ViewService(stream_path, geometry=geometry, threads=threads)
    app = FastAPI(title="hmlfc view service")
    app.state.service = svc
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    zone = svc.geometry.valid_zone()
    cx = 0.5 * (zone["x"][0] + zone["x"][1])
    cy = 0.5 * (zone["y"][0] + zone["y"][1])

    @app.get("/api/meta")
    def meta():
        return svc.meta()

    @app.get("/api/view")
    def view(x: float = cx, y: float = cy, z: float = 0.0,
             yaw: float = 0.0, pitch: float = 0.0, fov: float = 45.0,
             w: int = 512, h: int = 512,
             quality: str = Query("full", pattern="^(full|fast)$")):
        if not (FOV_MIN < fov < FOV_MAX):
            raise HTTPException(
                400, detail=f"fov must lie in ({FOV_MIN}, {FOV_MAX}): {fov}")
        for name, val in (("w", w), ("h", h)):
            if not (1 <= val <= MAX_DIM):
                raise HTTPException(
                    400, detail=f"{name} must lie in [1, {MAX_DIM}]: {val}")
        for name, val in (("x", x), ("y", y), ("z", z),
                          ("yaw", yaw), ("pitch", pitch)):
            if not np.isfinite(val):
                raise HTTPException(400, detail=f"{name} must be finite")
        png, ms = svc.render_view(x, y, z, yaw, pitch, fov, w, h, quality)
        return Response(content=png, media_type="image/png",
                        headers={"X-Render-Ms": f"{ms:.3f}",
                                 "X-Blocks-Decoded": str(svc.last_blocks)})

    @app.get("/api/stats")
    def stats():
        return svc.stats()

    ui = Path(ui_dir) if ui_dir is not None else default_ui_dir()
    if ui.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")
    else:
        @app.get("/")
        def no_ui():
            return Response(
                content="viewer bundle not built; see frontend/README.md\n",
                media_type="text/plain", status_code=404)

    return app


def serve(stream_path, addr: str = "127.0.0.1:8080", threads: int = 1,
          ui_dir=None) -> None:
    import uvicorn

    host, _, port = addr.partition(":")
    app = create_app(stream_path, threads=threads, ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080),
                log_level="warning")
