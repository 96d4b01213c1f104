/**
 * DOM-free viewer core: owns the pose, feeds gestures through the
 * debounced scheduler, and exposes the stats snapshot the panel shows.
 * The browser layer (main.ts) only wires events in and blits frames out.
 */

import type { Meta, Quality, ServiceStats, ViewFrame, ViewService } from "./api.js";
import {
  applyDolly,
  applyOrbit,
  applyPan,
  clampPose,
  defaultPose,
  type Pose,
  type Zone,
} from "./pose.js";
import { FrameScheduler } from "./scheduler.js";

export type DragMode = "orbit" | "pan";

export interface FrameEvent {
  pose: Pose;
  quality: Quality;
  frame: ViewFrame;
  seq: number;
}

/** What the stats panel displays. */
export interface PanelSnapshot {
  renderMs: number;
  blocks: number;
  cacheBytes: number;
  viewsLoaded: number;
  frames: number;
}

export interface ViewerOptions {
  width?: number;
  height?: number;
  fov?: number;
  debounceMs?: number;
  onFrame?: (event: FrameEvent) => void;
  onError?: (err: unknown) => void;
}

export class ViewerCore {
  private state: Pose | null = null;
  private metaInfo: Meta | null = null;
  private scheduler: FrameScheduler;
  private seq = 0;
  private snapshot: PanelSnapshot = {
    renderMs: 0, blocks: 0, cacheBytes: 0, viewsLoaded: 0, frames: 0,
  };

  lastFrame: FrameEvent | null = null;
  framesShown = 0;

  constructor(private client: ViewService, private opts: ViewerOptions = {}) {
    this.scheduler = new FrameScheduler(
      (pose, quality) => this.fetchFrame(pose, quality),
      opts.debounceMs ?? 60,
    );
  }

  /** Fetch /api/meta and start at the zone's camera-plane centre. */
  async connect(): Promise<Meta> {
    this.metaInfo = await this.client.meta();
    this.state = defaultPose(this.metaInfo.valid_zone);
    return this.metaInfo;
  }

  get meta(): Meta {
    if (this.metaInfo === null) throw new Error("not connected");
    return this.metaInfo;
  }

  get zone(): Zone {
    return this.meta.valid_zone;
  }

  get pose(): Pose {
    if (this.state === null) throw new Error("not connected");
    return { ...this.state };
  }

  get panel(): PanelSnapshot {
    return { ...this.snapshot };
  }

  get requestsIssued(): number {
    return this.scheduler.requestsIssued;
  }

  drag(dx: number, dy: number, mode: DragMode = "orbit"): void {
    const moved = mode === "orbit"
      ? applyOrbit(this.pose, dx, dy)
      : applyPan(this.pose, dx, dy, this.zone);
    this.setPose(moved, "fast");
  }

  dolly(steps: number): void {
    this.setPose(applyDolly(this.pose, steps, this.zone), "fast");
  }

  /** Gesture ended: re-request the current pose at full quality. */
  release(): void {
    this.setPose(this.pose, "full");
  }

  recenter(): void {
    this.setPose(defaultPose(this.zone), "full");
  }

  private setPose(pose: Pose, quality: Quality): void {
    this.state = clampPose(pose, this.zone);
    this.scheduler.request(this.state, quality);
  }

  private async fetchFrame(pose: Pose, quality: Quality): Promise<void> {
    try {
      const frame = await this.client.view(pose, {
        width: this.opts.width ?? 512,
        height: this.opts.height ?? 512,
        fov: this.opts.fov ?? 45,
        quality,
      });
      this.seq += 1;
      this.framesShown += 1;
      this.lastFrame = { pose, quality, frame, seq: this.seq };
      this.snapshot = {
        ...this.snapshot,
        renderMs: frame.renderMs,
        blocks: frame.blocksDecoded,
        frames: this.framesShown,
      };
      this.opts.onFrame?.(this.lastFrame);
    } catch (err) {
      // keep the last good frame on screen; surface the failure
      this.opts.onError?.(err);
    }
  }

  /** Refresh the cache-size half of the panel from /api/stats. */
  async refreshStats(): Promise<ServiceStats> {
    const stats = await this.client.stats();
    this.snapshot = {
      ...this.snapshot,
      cacheBytes: stats.cache_bytes,
      viewsLoaded: stats.views_loaded,
    };
    return stats;
  }

  /** Resolves when no frame request is pending or in flight. */
  idle(): Promise<void> {
    return this.scheduler.idle();
  }
}
