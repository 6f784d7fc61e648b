// Typed client for the radialcut session service. Responses carrying cut
// geometry keep the raw body text so callers can prove that displayed
// contours are byte-equal to what the server sent.
export class ApiError extends Error {
    status;
    reason;
    detail;
    constructor(status, reason, detail) {
        super(`${status} ${reason}: ${detail}`);
        this.status = status;
        this.reason = reason;
        this.detail = detail;
    }
}
async function request(url, init) {
    const response = await fetch(url, init);
    const raw = await response.text();
    if (!response.ok) {
        let err = { code: response.status, reason: "error", detail: raw };
        try {
            err = JSON.parse(raw);
        }
        catch {
            // non-JSON error body; keep the fallback
        }
        throw new ApiError(err.code, err.reason, err.detail);
    }
    return { data: JSON.parse(raw), raw };
}
function jsonInit(body) {
    return {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
    };
}
export class ApiClient {
    baseUrl;
    constructor(baseUrl) {
        this.baseUrl = baseUrl;
    }
    async listVolumes() {
        const r = await request(`${this.baseUrl}/volumes`);
        return r.data.volumes;
    }
    async getSlice(volume, z, window) {
        const query = window ? `?window=${window[0]},${window[1]}` : "";
        const r = await request(`${this.baseUrl}/volumes/${encodeURIComponent(volume)}/slices/${z}${query}`);
        return r.data;
    }
    createSession(body) {
        return request(`${this.baseUrl}/sessions`, jsonInit(body));
    }
    advance(sessionId, direction, skip) {
        return request(`${this.baseUrl}/sessions/${sessionId}/advance`, jsonInit({ direction, skip }));
    }
    redraw(sessionId, template, seed) {
        return request(`${this.baseUrl}/sessions/${sessionId}/redraw`, jsonInit({ template, seed }));
    }
    finalize(sessionId, reference) {
        return request(`${this.baseUrl}/sessions/${sessionId}/finalize`, jsonInit(reference ? { reference } : {}));
    }
    async getSession(sessionId) {
        const r = await request(`${this.baseUrl}/sessions/${sessionId}`);
        return r.data;
    }
    async exportMask(sessionId) {
        const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/export/mask`);
        if (!response.ok) {
            const err = (await response.json());
            throw new ApiError(err.code, err.reason, err.detail);
        }
        return new Uint8Array(await response.arrayBuffer());
    }
    async exportContours(sessionId) {
        const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/export/contours`);
        if (!response.ok) {
            const err = (await response.json());
            throw new ApiError(err.code, err.reason, err.detail);
        }
        return new Uint8Array(await response.arrayBuffer());
    }
}
