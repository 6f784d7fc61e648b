// Typed client for the radialcut session service. Responses carrying cut
// geometry keep the raw body text so callers can prove that displayed
// contours are byte-equal to what the server sent.

export interface Params {
  k: number;
  n: number;
  delta: number;
  t_weight: number;
  sf: number;
}

export interface CutPayload {
  boundary: number[];
  contour: [number, number][];
  cut_cost: number;
  flow_value: number;
}

export interface SessionPayload {
  session_id: string;
  volume: string;
  status: string;
  z: number;
  params: Params;
  cut: CutPayload;
}

export interface VolumeInfo {
  id: string;
  sizes: [number, number, number];
  spacing: [number, number, number];
}

export interface SliceRaster {
  z: number;
  width: number;
  height: number;
  spacing: [number, number];
  window: [number, number];
  pixels: string; // base64 grey bytes, row-major
}

export interface FinalizeResult {
  session_id: string;
  status: string;
  slices: number;
  interpolated: number[];
  elapsed_seconds: number;
  metrics: Record<string, number | string> | null;
}

export interface SessionState extends SessionPayload {
  slices: { z: number; provenance: string; vertices: [number, number][] }[];
  gaps: number[];
  events: Record<string, unknown>[];
  elapsed_seconds: number;
  object: string;
}

export interface ServiceError {
  code: number;
  reason: string;
  detail: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
    public detail: string,
  ) {
    super(`${status} ${reason}: ${detail}`);
  }
}

/** Parsed response plus the exact body text it was parsed from. */
export interface Raw<T> {
  data: T;
  raw: string;
}

async function request<T>(url: string, init?: RequestInit): Promise<Raw<T>> {
  const response = await fetch(url, init);
  const raw = await response.text();
  if (!response.ok) {
    let err: ServiceError = { code: response.status, reason: "error", detail: raw };
    try {
      err = JSON.parse(raw) as ServiceError;
    } catch {
      // non-JSON error body; keep the fallback
    }
    throw new ApiError(err.code, err.reason, err.detail);
  }
  return { data: JSON.parse(raw) as T, raw };
}

function jsonInit(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  async listVolumes(): Promise<VolumeInfo[]> {
    const r = await request<{ volumes: VolumeInfo[] }>(`${this.baseUrl}/volumes`);
    return r.data.volumes;
  }

  async getSlice(volume: string, z: number, window?: [number, number]): Promise<SliceRaster> {
    const query = window ? `?window=${window[0]},${window[1]}` : "";
    const r = await request<SliceRaster>(
      `${this.baseUrl}/volumes/${encodeURIComponent(volume)}/slices/${z}${query}`,
    );
    return r.data;
  }

  createSession(body: {
    volume: string;
    z0: number;
    template: [number, number][];
    seed: [number, number];
    params: Partial<Params>;
    object?: string;
  }): Promise<Raw<SessionPayload>> {
    return request<SessionPayload>(`${this.baseUrl}/sessions`, jsonInit(body));
  }

  advance(sessionId: string, direction: 1 | -1, skip: number): Promise<Raw<SessionPayload>> {
    return request<SessionPayload>(
      `${this.baseUrl}/sessions/${sessionId}/advance`,
      jsonInit({ direction, skip }),
    );
  }

  redraw(
    sessionId: string,
    template: [number, number][],
    seed: [number, number],
  ): Promise<Raw<SessionPayload>> {
    return request<SessionPayload>(
      `${this.baseUrl}/sessions/${sessionId}/redraw`,
      jsonInit({ template, seed }),
    );
  }

  finalize(sessionId: string, reference?: string): Promise<Raw<FinalizeResult>> {
    return request<FinalizeResult>(
      `${this.baseUrl}/sessions/${sessionId}/finalize`,
      jsonInit(reference ? { reference } : {}),
    );
  }

  async getSession(sessionId: string): Promise<SessionState> {
    const r = await request<SessionState>(`${this.baseUrl}/sessions/${sessionId}`);
    return r.data;
  }

  async exportMask(sessionId: string): Promise<Uint8Array> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/export/mask`);
    if (!response.ok) {
      const err = (await response.json()) as ServiceError;
      throw new ApiError(err.code, err.reason, err.detail);
    }
    return new Uint8Array(await response.arrayBuffer());
  }

  async exportContours(sessionId: string): Promise<Uint8Array> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/export/contours`);
    if (!response.ok) {
      const err = (await response.json()) as ServiceError;
      throw new ApiError(err.code, err.reason, err.detail);
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}
