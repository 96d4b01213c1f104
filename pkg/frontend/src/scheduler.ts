/**
 * Gesture-to-request gate: coalesces pose updates into at most one
 * request per debounce window, with a single request in flight.
 *
 * Latest wins by construction: while a request is pending or in flight,
 * new poses only overwrite the stored "next" slot, so the request that
 * eventually fires always carries the newest pose, and no response can
 * be stale relative to an earlier in-flight one.
 */

import type { Pose } from "./pose.js";
import type { Quality } from "./api.js";

export type IssueFn = (pose: Pose, quality: Quality) => Promise<void>;

export class FrameScheduler {
  private pending: { pose: Pose; quality: Quality } | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private issued = 0;
  private idleResolvers: Array<() => void> = [];

  constructor(private issue: IssueFn, readonly windowMs = 60) {}

  /** Total requests handed to the issue function so far. */
  get requestsIssued(): number {
    return this.issued;
  }

  /** Record the newest desired frame; it is issued at the next window. */
  request(pose: Pose, quality: Quality): void {
    this.pending = { pose: { ...pose }, quality };
    if (this.timer === null && !this.inFlight) this.arm();
  }

  private arm(): void {
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, this.windowMs);
  }

  private async fire(): Promise<void> {
    if (this.pending === null || this.inFlight) return;
    const next = this.pending;
    this.pending = null;
    this.inFlight = true;
    this.issued += 1;
    try {
      await this.issue(next.pose, next.quality);
    } catch {
      // the issue fn reports its own errors; scheduling must continue
    } finally {
      this.inFlight = false;
      if (this.pending !== null) this.arm();
      else this.settle();
    }
  }

  /** Resolves once no request is pending, armed, or in flight. */
  idle(): Promise<void> {
    if (this.timer === null && !this.inFlight && this.pending === null) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.idleResolvers.push(resolve));
  }

  private settle(): void {
    const resolvers = this.idleResolvers;
    this.idleResolvers = [];
    for (const resolve of resolvers) resolve();
  }
}
