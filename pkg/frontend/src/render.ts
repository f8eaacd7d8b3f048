import { forceLayout, type Point } from "./layout.js";
import type { ViewState } from "./state.js";

export interface Viewport {
  panX: number;
  panY: number;
  zoom: number;
}

/** Node radius scaled by total degree, clamped to a readable range. */
export function nodeRadius(degree: number): number {
  return Math.min(6 + 2 * Math.sqrt(degree), 24);
}

export function toScreen(p: Point, view: Viewport): Point {
  return { x: p.x * view.zoom + view.panX, y: p.y * view.zoom + view.panY };
}

export function toWorld(p: Point, view: Viewport): Point {
  return { x: (p.x - view.panX) / view.zoom, y: (p.y - view.panY) / view.zoom };
}

/**
 * Arrowhead triangle for a directed edge, stopped at the target node's
 * rim so the tip is visible; returns the three triangle corners.
 */
export function arrowHead(from: Point, to: Point, targetRadius: number): [Point, Point, Point] {
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const len = Math.max(Math.sqrt(dx * dx + dy * dy), 0.001);
  const ux = dx / len;
  const uy = dy / len;
  const tip = { x: to.x - ux * targetRadius, y: to.y - uy * targetRadius };
  const size = 7;
  return [
    tip,
    { x: tip.x - ux * size - uy * (size / 2), y: tip.y - uy * size + ux * (size / 2) },
    { x: tip.x - ux * size + uy * (size / 2), y: tip.y - uy * size - ux * (size / 2) },
  ];
}

export function totalDegrees(state: ViewState): Map<string, number> {
  const degrees = new Map<string, number>();
  for (const v of state.nodes) {
    degrees.set(v, 0);
  }
  for (const e of state.edges.values()) {
    degrees.set(e.source, (degrees.get(e.source) ?? 0) + 1);
    degrees.set(e.target, (degrees.get(e.target) ?? 0) + 1);
  }
  return degrees;
}

/** Canvas renderer; all geometry comes from the pure helpers above. */
export class GraphRenderer {
  view: Viewport = { panX: 0, panY: 0, zoom: 1 };
  positions = new Map<string, Point>();

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly state: ViewState,
    private readonly unlisted: (address: string) => boolean = () => false,
  ) {}

  relayout(): void {
    const edges: Array<[string, string]> = [];
    for (const e of this.state.edges.values()) {
      edges.push([e.source, e.target]);
    }
    this.positions = forceLayout([...this.state.nodes], edges, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
  }

  /** World-space node under a screen point, topmost first. */
  pick(screen: Point): string | null {
    const world = toWorld(screen, this.view);
    const degrees = totalDegrees(this.state);
    for (const [address, p] of this.positions) {
      const r = nodeRadius(degrees.get(address) ?? 0) / this.view.zoom;
      const dx = world.x - p.x;
      const dy = world.y - p.y;
      if (dx * dx + dy * dy <= r * r) {
        return address;
      }
    }
    return null;
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const degrees = totalDegrees(this.state);

    for (const e of this.state.edges.values()) {
      const a = this.positions.get(e.source);
      const b = this.positions.get(e.target);
      if (!a || !b) continue;
      const from = toScreen(a, this.view);
      const to = toScreen(b, this.view);
      ctx.strokeStyle = "#8a8fa3";
      ctx.lineWidth = 1;
      if (e.source === e.target) {
        const r = nodeRadius(degrees.get(e.source) ?? 0);
        ctx.beginPath();
        ctx.arc(from.x + r, from.y - r, r * 0.8, 0, 2 * Math.PI);
        ctx.stroke();
        continue;
      }
      ctx.beginPath();
      ctx.moveTo(from.x, from.y);
      ctx.lineTo(to.x, to.y);
      ctx.stroke();
      const [tip, left, right] = arrowHead(
        from,
        to,
        nodeRadius(degrees.get(e.target) ?? 0) * this.view.zoom,
      );
      ctx.fillStyle = "#8a8fa3";
      ctx.beginPath();
      ctx.moveTo(tip.x, tip.y);
      ctx.lineTo(left.x, left.y);
      ctx.lineTo(right.x, right.y);
      ctx.closePath();
      ctx.fill();
    }

    for (const [address, p] of this.positions) {
      const screen = toScreen(p, this.view);
      const r = nodeRadius(degrees.get(address) ?? 0) * this.view.zoom;
      const selected = this.state.selection.has(address);
      ctx.globalAlpha = this.unlisted(address) ? 0.35 : 1; // popularity cue
      ctx.fillStyle = selected ? "#e3655b" : "#4c6ef5";
      ctx.beginPath();
      ctx.arc(screen.x, screen.y, r, 0, 2 * Math.PI);
      ctx.fill();
      ctx.globalAlpha = 1;
      ctx.fillStyle = "#2b2d42";
      ctx.font = "11px sans-serif";
      ctx.fillText(this.state.labelFor(address), screen.x + r + 3, screen.y + 4);
    }

    if (this.state.truncated) {
      ctx.fillStyle = "#b23a48";
      ctx.font = "bold 13px sans-serif";
      ctx.fillText("partial view", 12, 20);
    }
  }
}
