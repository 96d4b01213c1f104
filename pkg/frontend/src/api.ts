/**
 * Typed client for the view service's HTTP API: /api/meta, /api/view
 * (PNG frames plus render headers) and /api/stats.
 */

import type { Pose, Zone } from "./pose.js";

export interface GeometryInfo {
  uv_rect: [number, number, number, number];
  st_rect: [number, number, number, number];
  separation: number;
  grid_s: number;
  grid_t: number;
  width: number;
  height: number;
}

export interface Meta {
  grid_s: number;
  grid_t: number;
  width: number;
  height: number;
  variant: string;
  params: Record<string, unknown>;
  size_bytes: number;
  bpp: number;
  geometry: GeometryInfo;
  valid_zone: Zone;
}

export interface ServiceStats {
  frames: number;
  mean_render_ms: number;
  last_render_ms: number;
  blocks_last_frame: number;
  blocks_decoded: number;
  payload_bytes_read: number;
  cache_bytes: number;
  views_loaded: number;
}

export type Quality = "full" | "fast";

export interface ViewOptions {
  width: number;
  height: number;
  fov: number;
  quality: Quality;
}

/** One rendered frame: PNG bytes plus the per-frame render headers. */
export interface ViewFrame {
  bytes: ArrayBuffer;
  renderMs: number;
  blocksDecoded: number;
}

/** What the viewer needs from the service; ViewClient is the HTTP one. */
export interface ViewService {
  meta(): Promise<Meta>;
  stats(): Promise<ServiceStats>;
  view(pose: Pose, opts: ViewOptions): Promise<ViewFrame>;
}

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ServiceError";
  }
}

/**
 * Resolve the API base URL: an `?api=` query override wins, otherwise the
 * fallback (usually the page origin, or "" for same-origin paths).
 * Trailing slashes are stripped so paths concatenate cleanly.
 */
export function resolveApiBase(search: string, fallback = ""): string {
  const override = new URLSearchParams(search).get("api");
  return (override ?? fallback).replace(/\/+$/, "");
}

type FetchLike = (url: string) => Promise<Response>;

export class ViewClient implements ViewService {
  constructor(
    readonly base = "",
    private fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async getJson(path: string): Promise<unknown> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path);
    } catch (err) {
      throw new ServiceError(`service unreachable at ${this.base || "same origin"}: ${err}`);
    }
    if (!resp.ok) throw new ServiceError(`${path} failed (${resp.status})`, resp.status);
    return resp.json();
  }

  meta(): Promise<Meta> {
    return this.getJson("/api/meta") as Promise<Meta>;
  }

  stats(): Promise<ServiceStats> {
    return this.getJson("/api/stats") as Promise<ServiceStats>;
  }

  viewUrl(pose: Pose, opts: ViewOptions): string {
    const q = new URLSearchParams({
      x: String(pose.x),
      y: String(pose.y),
      z: String(pose.z),
      yaw: String(pose.yaw),
      pitch: String(pose.pitch),
      fov: String(opts.fov),
      w: String(opts.width),
      h: String(opts.height),
      quality: opts.quality,
    });
    return `${this.base}/api/view?${q.toString()}`;
  }

  async view(pose: Pose, opts: ViewOptions): Promise<ViewFrame> {
    const resp = await this.fetchFn(this.viewUrl(pose, opts));
    if (!resp.ok) {
      let detail = "";
      try {
        detail = String(((await resp.json()) as { detail?: unknown }).detail ?? "");
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ServiceError(detail || `view request failed (${resp.status})`, resp.status);
    }
    return {
      bytes: await resp.arrayBuffer(),
      renderMs: parseFloat(resp.headers.get("X-Render-Ms") ?? "0"),
      blocksDecoded: parseInt(resp.headers.get("X-Blocks-Decoded") ?? "0", 10),
    };
  }
}
