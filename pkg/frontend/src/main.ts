/**
 * Browser entry point: wires pointer/wheel/key input into the viewer
 * core and blits served PNG frames onto the canvas.
 *
 * Controls: drag to orbit (yaw/pitch), shift-drag or middle-drag to pan,
 * wheel or +/- to dolly, arrows to pan, 0 to recenter.
 */

import { resolveApiBase, ViewClient } from "./api.js";
import { StatsPanel } from "./stats.js";
import { ViewerCore, type DragMode, type FrameEvent } from "./viewer.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const metaLine = document.getElementById("meta")!;

const panel = new StatsPanel({
  renderMs: document.getElementById("stat-render")!,
  blocks: document.getElementById("stat-blocks")!,
  cache: document.getElementById("stat-cache")!,
  views: document.getElementById("stat-views")!,
  frames: document.getElementById("stat-frames")!,
});

let bannerTimer: ReturnType<typeof setTimeout> | null = null;

function showBanner(message: string, transient = true): void {
  banner.textContent = message;
  banner.classList.add("visible");
  if (bannerTimer !== null) clearTimeout(bannerTimer);
  bannerTimer = transient
    ? setTimeout(() => banner.classList.remove("visible"), 2500)
    : null;
}

let lastBlitted = 0;

async function blit(event: FrameEvent): Promise<void> {
  const blob = new Blob([event.frame.bytes], { type: "image/png" });
  const bitmap = await createImageBitmap(blob);
  // PNG decode is async; never paint over a newer frame
  if (event.seq > lastBlitted) {
    lastBlitted = event.seq;
    ctx.drawImage(bitmap, 0, 0, canvas.width, canvas.height);
  }
  bitmap.close();
}

async function boot(): Promise<void> {
  const client = new ViewClient(resolveApiBase(location.search));
  const core = new ViewerCore(client, {
    width: canvas.width,
    height: canvas.height,
    onFrame: (event) => {
      void blit(event);
      panel.update(core.panel);
      void core.refreshStats().then(() => panel.update(core.panel));
    },
    onError: (err) => showBanner(String(err)),
  });

  try {
    const meta = await core.connect();
    metaLine.textContent =
      `${meta.variant} ${meta.grid_s}x${meta.grid_t} grid of ` +
      `${meta.width}x${meta.height}, ${meta.bpp.toFixed(3)} bpp`;
  } catch (err) {
    showBanner(`cannot reach view service: ${err}`, false);
    return;
  }

  let drag: { x: number; y: number; mode: DragMode } | null = null;
  let quietTimer: ReturnType<typeof setTimeout> | null = null;

  // wheel and key gestures have no "up" event; settle to full quality
  // once they go quiet
  function settleSoon(): void {
    if (quietTimer !== null) clearTimeout(quietTimer);
    quietTimer = setTimeout(() => core.release(), 250);
  }

  canvas.addEventListener("pointerdown", (e) => {
    canvas.setPointerCapture(e.pointerId);
    drag = {
      x: e.clientX,
      y: e.clientY,
      mode: e.shiftKey || e.button === 1 ? "pan" : "orbit",
    };
  });
  canvas.addEventListener("pointermove", (e) => {
    if (drag === null) return;
    core.drag(e.clientX - drag.x, e.clientY - drag.y, drag.mode);
    drag.x = e.clientX;
    drag.y = e.clientY;
  });
  const endDrag = () => {
    if (drag === null) return;
    drag = null;
    core.release();
  };
  canvas.addEventListener("pointerup", endDrag);
  canvas.addEventListener("pointercancel", endDrag);

  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    core.dolly(-Math.sign(e.deltaY));
    settleSoon();
  }, { passive: false });

  const PAN_STEP = 24;
  window.addEventListener("keydown", (e) => {
    switch (e.key) {
      case "ArrowLeft": core.drag(PAN_STEP, 0, "pan"); break;
      case "ArrowRight": core.drag(-PAN_STEP, 0, "pan"); break;
      case "ArrowUp": core.drag(0, PAN_STEP, "pan"); break;
      case "ArrowDown": core.drag(0, -PAN_STEP, "pan"); break;
      case "+": case "=": core.dolly(1); break;
      case "-": case "_": core.dolly(-1); break;
      case "0": core.recenter(); return;
      default: return;
    }
    settleSoon();
  });

  core.release();     // initial frame at the default pose
}

void boot();
