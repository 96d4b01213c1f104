import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { Quality } from "../src/api.js";
import type { Pose } from "../src/pose.js";
import { FrameScheduler } from "../src/scheduler.js";

const pose = (yaw: number): Pose => ({ x: 0, y: 0, z: 0, yaw, pitch: 0 });

describe("FrameScheduler", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("issues nothing without a gesture", async () => {
    const issue = vi.fn(async () => {});
    const sched = new FrameScheduler(issue, 50);
    await vi.advanceTimersByTimeAsync(1000);
    expect(issue).not.toHaveBeenCalled();
    await expect(sched.idle()).resolves.toBeUndefined();
  });

  it("waits a full debounce window before firing", async () => {
    const issue = vi.fn(async () => {});
    const sched = new FrameScheduler(issue, 50);
    sched.request(pose(1), "fast");
    await vi.advanceTimersByTimeAsync(49);
    expect(issue).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(1);
    expect(issue).toHaveBeenCalledTimes(1);
    expect(sched.requestsIssued).toBe(1);
  });

  it("coalesces a rapid burst to at most one request per window", async () => {
    const seen: number[] = [];
    const sched = new FrameScheduler(async (p) => { seen.push(p.yaw); }, 50);
    // 30 pose updates at 10 ms spacing, far faster than the window
    for (let i = 1; i <= 30; i++) {
      sched.request(pose(i), "fast");
      await vi.advanceTimersByTimeAsync(10);
    }
    await vi.advanceTimersByTimeAsync(200);
    expect(sched.requestsIssued).toBeLessThanOrEqual(300 / 50 + 1);
    expect(sched.requestsIssued).toBeGreaterThanOrEqual(2);
    // latest pose wins: the final request carries the newest yaw
    expect(seen[seen.length - 1]).toBe(30);
    // and requests stay far below one per simulated animation frame
    expect(sched.requestsIssued).toBeLessThan(30);
  });

  it("keeps a single request in flight", async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => { release = r; });
    const seen: number[] = [];
    const sched = new FrameScheduler(async (p) => { seen.push(p.yaw); await gate; }, 50);

    sched.request(pose(1), "fast");
    await vi.advanceTimersByTimeAsync(50);
    expect(seen).toEqual([1]);

    // while the first render is in flight, pile up newer poses
    for (let i = 2; i <= 6; i++) {
      sched.request(pose(i), "fast");
      await vi.advanceTimersByTimeAsync(100);
    }
    expect(seen).toEqual([1]);

    release();
    await vi.advanceTimersByTimeAsync(50);
    expect(seen).toEqual([1, 6]);
    await expect(sched.idle()).resolves.toBeUndefined();
  });

  it("keeps scheduling after a failed request", async () => {
    let calls = 0;
    const sched = new FrameScheduler(async () => {
      calls += 1;
      if (calls === 1) throw new Error("boom");
    }, 20);
    sched.request(pose(1), "fast");
    await vi.advanceTimersByTimeAsync(20);
    sched.request(pose(2), "full");
    await vi.advanceTimersByTimeAsync(20);
    expect(calls).toBe(2);
  });

  it("idle resolves only after the trailing request lands", async () => {
    let done = false;
    const sched = new FrameScheduler(async () => {}, 30);
    sched.request(pose(1), "full");
    const idle = sched.idle().then(() => { done = true; });
    await vi.advanceTimersByTimeAsync(29);
    expect(done).toBe(false);
    await vi.advanceTimersByTimeAsync(1);
    await idle;
    expect(done).toBe(true);
  });
});
