// Canvas rendering: slice raster plus vector overlays. Vertices are drawn
// exactly as received; zoom/pan live in the canvas transform only.

import { CutPayload, SliceRaster } from "./api.js";
import { ViewState } from "./controller.js";
import { Point } from "./polygon.js";

export function applyViewTransform(ctx: CanvasRenderingContext2D, view: ViewState): void {
  ctx.setTransform(view.zoom, 0, 0, view.zoom, view.panX, view.panY);
}

export function drawSliceRaster(ctx: CanvasRenderingContext2D, raster: SliceRaster): void {
  const bytes = Uint8Array.from(atob(raster.pixels), (c) => c.charCodeAt(0));
  const image = ctx.createImageData(raster.width, raster.height);
  for (let i = 0; i < bytes.length; i++) {
    image.data[4 * i] = bytes[i];
    image.data[4 * i + 1] = bytes[i];
    image.data[4 * i + 2] = bytes[i];
    image.data[4 * i + 3] = 255;
  }
  ctx.putImageData(image, 0, 0);
}

function tracePolygon(ctx: CanvasRenderingContext2D, vertices: readonly Point[]): void {
  ctx.beginPath();
  vertices.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
  ctx.closePath();
}

export function drawTemplateDraft(
  ctx: CanvasRenderingContext2D,
  vertices: readonly Point[],
  closed: boolean,
): void {
  if (vertices.length === 0) return;
  ctx.save();
  ctx.strokeStyle = "#ffd23f";
  ctx.lineWidth = 1.5;
  if (closed) {
    tracePolygon(ctx, vertices);
    ctx.stroke();
  } else {
    ctx.beginPath();
    vertices.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    ctx.stroke();
  }
  ctx.fillStyle = "#ffd23f";
  for (const [x, y] of vertices) {
    ctx.beginPath();
    ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.restore();
}

export function drawSeed(ctx: CanvasRenderingContext2D, seed: Point): void {
  ctx.save();
  ctx.strokeStyle = "#3fa7ff";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(seed[0], seed[1], 4, 0, 2 * Math.PI);
  ctx.moveTo(seed[0] - 6, seed[1]);
  ctx.lineTo(seed[0] + 6, seed[1]);
  ctx.moveTo(seed[0], seed[1] - 6);
  ctx.lineTo(seed[0], seed[1] + 6);
  ctx.stroke();
  ctx.restore();
}

export function drawCutContour(ctx: CanvasRenderingContext2D, cut: CutPayload): void {
  ctx.save();
  ctx.strokeStyle = "#ff4136";
  ctx.lineWidth = 1.5;
  tracePolygon(ctx, cut.contour);
  ctx.stroke();
  ctx.restore();
}

/** Sampled node positions between seed and contour, mirroring the graph layout. */
export function drawNodeOverlay(
  ctx: CanvasRenderingContext2D,
  seed: Point,
  cut: CutPayload,
  nodesPerRay: number,
): void {
  ctx.save();
  ctx.fillStyle = "rgba(255, 65, 54, 0.6)";
  for (const [ix, iy] of cut.contour) {
    for (let j = 0; j < nodesPerRay; j++) {
      const f = (j + 1) / nodesPerRay;
      const x = seed[0] + f * (ix - seed[0]);
      const y = seed[1] + f * (iy - seed[1]);
      ctx.fillRect(x - 0.75, y - 0.75, 1.5, 1.5);
    }
  }
  ctx.restore();
}
