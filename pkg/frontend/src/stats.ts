/** Stats panel: render time, blocks decoded and cache size per frame. */

import type { PanelSnapshot } from "./viewer.js";

// structural element type so the panel is testable without a DOM
export interface TextElement {
  textContent: string | null;
}

export interface PanelElements {
  renderMs: TextElement;
  blocks: TextElement;
  cache: TextElement;
  views: TextElement;
  frames: TextElement;
}

export function formatBytes(n: number): string {
  if (n >= 1 << 20) return `${(n / (1 << 20)).toFixed(1)} MiB`;
  if (n >= 1024) return `${(n / 1024).toFixed(1)} KiB`;
  return `${n} B`;
}

export class StatsPanel {
  constructor(private els: PanelElements) {}

  update(snap: PanelSnapshot): void {
    this.els.renderMs.textContent = `${snap.renderMs.toFixed(1)} ms`;
    this.els.blocks.textContent = String(snap.blocks);
    this.els.cache.textContent = formatBytes(snap.cacheBytes);
    this.els.views.textContent = String(snap.viewsLoaded);
    this.els.frames.textContent = String(snap.frames);
  }
}
