// Session controller: view state, parameter panel, review stepping and
// export. Holds no geometry of its own; every contour it exposes is the
// object parsed from a stored server response body, untransformed.

import { ApiClient, CutPayload, Params, Raw, SessionPayload } from "./api.js";
import { PolygonDraw } from "./polygon.js";

export const MAX_DELTA = 2; // hard bound; rugged cuts degrade results
export const DEFAULT_PARAMS: Params = { k: 40, n: 40, delta: 2, t_weight: 0.2, sf: 1.6 };

export type DrawMode = "template" | "seed" | "review";

export interface Overlays {
  contour: boolean;
  nodes: boolean;
  reference: boolean;
}

export interface ViewState {
  volumeId: string | null;
  slice: number;
  windowLo: number;
  windowHi: number;
  zoom: number;
  panX: number;
  panY: number;
  drawMode: DrawMode;
  overlays: Overlays;
}

export function initialViewState(): ViewState {
  return {
    volumeId: null,
    slice: 0,
    windowLo: 0,
    windowHi: 255,
    zoom: 1,
    panX: 0,
    panY: 0,
    drawMode: "template",
    overlays: { contour: true, nodes: false, reference: false },
  };
}

/** Clamp panel edits into the legal parameter ranges (delta hard-capped). */
export function clampParams(p: Partial<Params>): Params {
  const merged = { ...DEFAULT_PARAMS, ...p };
  return {
    k: Math.max(3, Math.round(merged.k)),
    n: Math.max(2, Math.round(merged.n)),
    delta: Math.min(MAX_DELTA, Math.max(0, Math.round(merged.delta))),
    t_weight: merged.t_weight > 0 ? merged.t_weight : DEFAULT_PARAMS.t_weight,
    sf: merged.sf > 0 ? merged.sf : DEFAULT_PARAMS.sf,
  };
}

export interface CutRecord {
  z: number;
  cut: CutPayload; // parsed from `raw`, never recomputed client-side
  raw: string; // exact response body the cut came from
}

export class SessionController {
  view: ViewState = initialViewState();
  draw = new PolygonDraw();
  seed: [number, number] | null = null;
  params: Params = { ...DEFAULT_PARAMS };
  sessionId: string | null = null;
  status: string = "drawing";
  current: CutRecord | null = null;
  startedAt: number | null = null;

  constructor(private api: ApiClient) {}

  selectVolume(id: string): void {
    this.view.volumeId = id;
    this.view.drawMode = "template";
  }

  setParams(edit: Partial<Params>): void {
    this.params = clampParams({ ...this.params, ...edit });
  }

  placeSeed(x: number, y: number): void {
    this.seed = [x, y];
  }

  elapsedSeconds(now: number = Date.now()): number {
    return this.startedAt === null ? 0 : (now - this.startedAt) / 1000;
  }

  private record(payload: Raw<SessionPayload>): CutRecord {
    const rec: CutRecord = {
      z: payload.data.z,
      cut: payload.data.cut,
      raw: payload.raw,
    };
    this.current = rec;
    this.status = payload.data.status;
    this.view.slice = payload.data.z;
    this.view.drawMode = "review";
    return rec;
  }

  /** Submit the drawn template + seed; the panel's parameters ride along. */
  async submitTemplate(z0: number): Promise<CutRecord> {
    if (!this.view.volumeId) throw new Error("no volume selected");
    if (!this.draw.closed && !this.draw.close()) {
      throw new Error(this.draw.message ?? "template incomplete");
    }
    if (!this.seed) throw new Error("no seed point placed");
    const payload = await this.api.createSession({
      volume: this.view.volumeId,
      z0,
      template: this.draw.vertices,
      seed: this.seed,
      params: this.params,
    });
    this.sessionId = payload.data.session_id;
    this.startedAt = Date.now();
    return this.record(payload);
  }

  async accept(direction: 1 | -1, skip = 1): Promise<CutRecord> {
    if (!this.sessionId) throw new Error("no active session");
    return this.record(await this.api.advance(this.sessionId, direction, skip));
  }

  async redrawCurrent(template: [number, number][], seed: [number, number]): Promise<CutRecord> {
    if (!this.sessionId) throw new Error("no active session");
    return this.record(await this.api.redraw(this.sessionId, template, seed));
  }

  async finalize(reference?: string) {
    if (!this.sessionId) throw new Error("no active session");
    const result = await this.api.finalize(this.sessionId, reference);
    this.status = result.data.status;
    return result.data;
  }

  async exportMask(): Promise<Uint8Array> {
    if (!this.sessionId) throw new Error("no active session");
    return this.api.exportMask(this.sessionId);
  }

  async exportContours(): Promise<Uint8Array> {
    if (!this.sessionId) throw new Error("no active session");
    return this.api.exportContours(this.sessionId);
  }

  /**
   * The contour the renderer draws: the parsed payload object itself.
   * Callers can verify it is byte-equal to the stored response body.
   */
  displayedContour(): [number, number][] | null {
    return this.current ? this.current.cut.contour : null;
  }
}
